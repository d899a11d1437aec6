mod common;

use std::f64::consts::PI;

use gawqed::model::SymmetricConfig;
use gawqed::{amplitudes_general, amplitudes_topology, characteristics, closed_form, solve_real_space, Topology};
use proptest::prelude::*;

use common::{config_strategy, topology_strategy};

fn sym(t: Topology, phi: f64) -> gawqed::SystemConfig {
    SymmetricConfig::new(t, phi, 1.0).expand().unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn unitarity(cfg in config_strategy(), d in -6.0..6.0_f64) {
        let p = amplitudes_general(&cfg, d).unwrap();
        prop_assert!((p.transmittance + p.reflectance - 1.0).abs() < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn real_space_oracle_agrees(cfg in config_strategy(), d in -6.0..6.0_f64) {
        let g = amplitudes_general(&cfg, d).unwrap();
        let o = solve_real_space(&cfg, d).unwrap();
        prop_assert!((g.t - o.t).norm() < 1e-10, "t: {} vs {}", g.t, o.t);
        prop_assert!((g.r - o.r).norm() < 1e-10, "r: {} vs {}", g.r, o.r);
    }

    #[test]
    fn closed_forms_match_general(t in topology_strategy(), phi in 0.0..2.0 * PI, d in -6.0..6.0_f64) {
        if let Some((ct, cr)) = closed_form(t, phi, 1.0, d) {
            let g = amplitudes_general(&sym(t, phi), d).unwrap();
            prop_assert!((ct - g.t).norm() <= 1e-12 * (1.0 + g.t.norm()) * 10.0);
            prop_assert!((cr - g.r).norm() <= 1e-12 * (1.0 + g.r.norm()) * 10.0);
        }
    }

    #[test]
    fn mirror_symmetry(t in topology_strategy(), phi in 0.0..2.0 * PI, d in -6.0..6.0_f64) {
        let mirror = if t == Topology::Braided { PI - phi } else { 2.0 * PI - phi };
        prop_assume!(mirror >= 0.0);
        let a = amplitudes_general(&sym(t, phi), d).unwrap();
        let b = amplitudes_general(&sym(t, mirror), -d).unwrap();
        prop_assert!((a.reflectance - b.reflectance).abs() < 1e-9);
    }
}

#[test]
fn super_gaussian_peak() {
    let cfg = sym(Topology::Separate, 0.25 * PI);
    let ch = characteristics(&cfg).unwrap();
    let peak = ch.lamb_a;
    let scale = 4.0 * ch.g_ab.powi(4) + ch.gamma_ab.powi(2) * ch.g_ab.powi(2);
    for k in 1..=40 {
        for sign in [-1.0, 1.0] {
            let dp = sign * 0.005 * k as f64;
            let p = amplitudes_general(&cfg, peak + dp).unwrap();
            // 1 − R = T, computed directly.
            let predicted = dp.powi(4) / scale;
            assert!(
                (p.transmittance - predicted).abs() <= 0.05 * predicted,
                "dp = {dp}: {} vs {predicted}",
                p.transmittance
            );
        }
    }
}

#[test]
fn symmetric_minima_from_the_text() {
    let phi = 0.05 * PI;
    let d = -(phi.sin() + (2.0 * phi).sin()) / (2.0 * phi).cos();
    assert!(amplitudes_topology(&sym(Topology::Separate, phi), d).unwrap().reflectance < 1e-20);
    let phi = 0.1 * PI;
    assert!(amplitudes_topology(&sym(Topology::Braided, phi), -phi.tan()).unwrap().reflectance < 1e-20);
    assert!(amplitudes_topology(&sym(Topology::Nested, PI / 3.0), 0.0).unwrap().reflectance < 1e-20);
}

#[test]
fn unequal_rate_nested_example() {
    use gawqed::model::{GiantAtom, SystemConfig};
    let cfg = SystemConfig::new(
        GiantAtom::from_pairs((0.0, 1.0), (PI, 1.0)),
        GiantAtom::from_pairs((0.25 * PI, 10.0), (0.75 * PI, 10.0)),
        0.0,
    )
    .unwrap();
    let g = amplitudes_general(&cfg, 0.3).unwrap();
    let o = solve_real_space(&cfg, 0.3).unwrap();
    assert!((g.t - o.t).norm() < 1e-10 && (g.r - o.r).norm() < 1e-10);
}
