#![allow(dead_code)]

use gawqed::model::{GiantAtom, SystemConfig};
use gawqed::Topology;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Random geometry of the given topology: phases in `[0, 4π]`, rates in
/// `[0.1, 2]`, `Δ_ab` in `[-3, 3]`.
pub fn random_config(rng: &mut ChaCha8Rng, topology: Topology) -> SystemConfig<f64> {
    let mut p: Vec<f64> = (0..4).map(|_| rng.gen_range(0.0..4.0 * std::f64::consts::PI)).collect();
    p.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let mut rate = || rng.gen_range(0.1..2.0);
    let (a, b) = match topology {
        Topology::Separate => ((p[0], p[1]), (p[2], p[3])),
        Topology::Braided => ((p[0], p[2]), (p[1], p[3])),
        Topology::Nested => ((p[0], p[3]), (p[1], p[2])),
    };
    let atom_a = GiantAtom::from_pairs((a.0, rate()), (a.1, rate()));
    let atom_b = GiantAtom::from_pairs((b.0, rate()), (b.1, rate()));
    SystemConfig::new(atom_a, atom_b, rng.gen_range(-3.0..3.0)).unwrap()
}

pub fn grid(start: f64, stop: f64, points: usize) -> Vec<f64> {
    (0..points)
        .map(|k| start + (stop - start) * k as f64 / (points - 1) as f64)
        .collect()
}

/// Builds a config of `topology` from four unsorted phases and four rates.
pub fn config_from(topology: Topology, mut phases: [f64; 4], rates: [f64; 4], delta_ab: f64) -> SystemConfig<f64> {
    phases.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let p = phases;
    let (a, b) = match topology {
        Topology::Separate => ((p[0], p[1]), (p[2], p[3])),
        Topology::Braided => ((p[0], p[2]), (p[1], p[3])),
        Topology::Nested => ((p[0], p[3]), (p[1], p[2])),
    };
    SystemConfig::new(
        GiantAtom::from_pairs((a.0, rates[0]), (a.1, rates[1])),
        GiantAtom::from_pairs((b.0, rates[2]), (b.1, rates[3])),
        delta_ab,
    )
    .unwrap()
}

pub fn topology_strategy() -> impl proptest::strategy::Strategy<Value = Topology> {
    proptest::sample::select(Topology::ALL.to_vec())
}

/// Random configs over all topologies with unequal rates and `Δ_ab ≠ 0`.
pub fn config_strategy() -> impl proptest::strategy::Strategy<Value = SystemConfig<f64>> {
    use proptest::prelude::*;
    let tau = 4.0 * std::f64::consts::PI;
    (
        topology_strategy(),
        [0.0..tau, 0.0..tau, 0.0..tau, 0.0..tau],
        [0.1..2.0, 0.1..2.0, 0.1..2.0, 0.1..2.0],
        -3.0..3.0,
    )
        .prop_map(|(t, p, r, d)| config_from(t, p, r, d))
}
