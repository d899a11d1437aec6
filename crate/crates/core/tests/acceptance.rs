//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

mod common;

use std::f64::consts::PI;
use std::time::Instant;

use gawqed::eit::{lambda_parameters, CollectiveMode};
use gawqed::model::{GiantAtom, SymmetricConfig, SystemConfig};
use gawqed::{
    amplitudes_general, characteristics, classify_eit, collective_eit_amplitudes, lambda_reference,
    lorentz_decompose, peak_minimum_loci, sa_basis, scattering_from_master, single_atom_eit_amplitudes,
    solve_real_space, DriveSpec, EitRegime, Topology,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{grid, random_config};

struct Report {
    failures: usize,
}

impl Report {
    fn line(&mut self, id: u32, name: &str, pass: bool, detail: String) {
        if !pass {
            self.failures += 1;
        }
        println!("{} [{id:>2}] {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    }
}

fn sym(topology: Topology, phi: f64, delta_ab: f64) -> SystemConfig<f64> {
    SymmetricConfig::new(topology, phi, 1.0).expand_with(delta_ab).unwrap()
}

fn r_at(cfg: &SystemConfig<f64>, d: f64) -> f64 {
    amplitudes_general(cfg, d).map(|p| p.reflectance).unwrap_or(f64::NAN)
}

fn t_at(cfg: &SystemConfig<f64>, d: f64) -> f64 {
    amplitudes_general(cfg, d).map(|p| p.transmittance).unwrap_or(f64::NAN)
}

fn unitarity(rep: &mut Report) {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0_f64;
    let mut errors = 0;
    for k in 0..10_000 {
        let cfg = random_config(&mut rng, Topology::ALL[k % 3]);
        let d = rng.gen_range(-6.0..6.0);
        match amplitudes_general(&cfg, d) {
            Ok(p) => worst = worst.max((p.transmittance + p.reflectance - 1.0).abs()),
            Err(_) => errors += 1,
        }
    }
    let secs = start.elapsed().as_secs_f64();
    rep.line(
        1,
        "unitarity over 1e4 random configs",
        worst < 1e-10 && errors == 0 && secs < 5.0,
        format!("max |T+R-1| = {worst:.2e}, errors = {errors}, {secs:.2}s"),
    );
}

fn oracle(rep: &mut Report) {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0_f64;
    let mut errors = 0;
    for k in 0..1_000 {
        let cfg = random_config(&mut rng, Topology::ALL[k % 3]);
        let d = rng.gen_range(-6.0..6.0);
        match (amplitudes_general(&cfg, d), solve_real_space(&cfg, d)) {
            (Ok(g), Ok(o)) => worst = worst.max((g.t - o.t).norm()).max((g.r - o.r).norm()),
            _ => errors += 1,
        }
    }
    let secs = start.elapsed().as_secs_f64();
    rep.line(
        2,
        "closed form vs real-space solver on 1e3 random configs",
        worst < 1e-10 && errors == 0 && secs < 10.0,
        format!("max deviation = {worst:.2e}, errors = {errors}, {secs:.2}s"),
    );
}

/// Point of the fixed grid `k·1e-4` minimising `f` on `[x − w, x + w]`.
fn local_argmin(f: impl Fn(f64) -> f64, x: f64, w: f64) -> f64 {
    let lo = ((x - w) / 1e-4).ceil() as i64;
    let hi = ((x + w) / 1e-4).floor() as i64;
    (lo..=hi)
        .map(|k| k as f64 * 1e-4)
        .map(|d| (d, f(d)))
        .fold((x, f64::INFINITY), |best, (d, v)| if v < best.1 { (d, v) } else { best })
        .0
}

fn loci(rep: &mut Report) {
    let mut worst = 0.0_f64;
    let mut worst_at = String::new();
    let mut unit_peak = 0.0_f64;
    let mut checked = 0;
    for topology in Topology::ALL {
        for k in 0..200 {
            let phi = 2.0 * PI * (k as f64 + 0.5) / 200.0;
            let cfg = sym(topology, phi, 0.0);
            let l = peak_minimum_loci(topology, phi, 1.0);
            let mut all: Vec<f64> = l.peaks.clone();
            all.extend(l.minimum);
            let window = |x: f64| {
                all.iter()
                    .filter(|y| (**y - x).abs() > 1e-12)
                    .fold(0.02_f64, |w, y| w.min(0.5 * (y - x).abs()))
            };
            let mut check = |x: f64, found: f64, what: &str| {
                checked += 1;
                let e = (found - x).abs();
                if e > worst {
                    worst = e;
                    worst_at = format!("{topology} {what} phi={phi:.4}");
                }
            };
            // Peaks: T = |t|² is computed directly, so its minimum stays
            // resolvable where R is flat to machine precision.
            for &p in &l.peaks {
                check(p, local_argmin(|d| t_at(&cfg, d), p, window(p)), "peak");
                if topology == Topology::Separate {
                    unit_peak = unit_peak.max((1.0 - r_at(&cfg, p)).abs());
                }
            }
            if let Some(m) = l.minimum {
                check(m, local_argmin(|d| r_at(&cfg, d), m, window(m)), "minimum");
            }
        }
    }
    rep.line(
        3,
        "peak/minimum loci vs grid extrema (step 1e-4)",
        worst <= 2e-4 && unit_peak < 1e-8,
        format!("{checked} loci, max offset = {worst:.2e} ({worst_at}), separate max |1-R| at peaks = {unit_peak:.2e}"),
    );
}

fn fano_identity(rep: &mut Report) {
    let mut worst = 0.0_f64;
    let mut errors = 0;
    let deltas = grid(-6.0, 6.0, 241);
    for topology in Topology::ALL {
        for k in 0..=400 {
            let phi = 2.0 * PI * k as f64 / 400.0;
            let cfg = sym(topology, phi, 0.0);
            let pair = match lorentz_decompose(topology, phi, 1.0) {
                Ok(p) => p,
                Err(_) => {
                    errors += 1;
                    continue;
                }
            };
            for &d in &deltas {
                match amplitudes_general(&cfg, d) {
                    Ok(p) => worst = worst.max((pair.reconstruct(d) - p.r).norm()),
                    Err(_) => errors += 1,
                }
            }
        }
    }
    rep.line(
        4,
        "r+ + r- = r on dense (phi, delta) grids",
        worst < 1e-10 && errors == 0,
        format!("max residual = {worst:.2e}, errors = {errors}"),
    );
}

/// Position where `f` crosses `level` between `lo` and `hi` (bisection).
fn crossing(f: &impl Fn(f64) -> f64, level: f64, mut lo: f64, mut hi: f64) -> f64 {
    let above_lo = f(lo) > level;
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if (f(mid) > level) == above_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn decoherence_free_probe(rep: &mut Report) {
    let delta_dev = -0.03 * PI;
    let phi = 0.5 * PI + delta_dev;
    let cfg = sym(Topology::Braided, phi, 0.0);
    let r = |d: f64| r_at(&cfg, d);
    let pts = grid(-3.0, 3.0, 60_001);
    let vals: Vec<f64> = pts.iter().map(|&d| r(d)).collect();
    let mut peaks: Vec<(f64, f64)> = (1..pts.len() - 1)
        .filter(|&i| vals[i] > vals[i - 1] && vals[i] >= vals[i + 1] && vals[i] > 0.5)
        .map(|i| (pts[i], vals[i]))
        .collect();
    peaks.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let target_width = 4.0 * delta_dev * delta_dev;
    if peaks.len() != 2 {
        rep.line(5, "decoherence-free probe", false, format!("found {} peaks", peaks.len()));
        return;
    }
    let widths: Vec<f64> = peaks
        .iter()
        .map(|&(x, h)| {
            let half = 0.5 * h;
            let left = crossing(&r, half, x - 0.5, x);
            let right = crossing(&r, half, x, x + 0.5);
            right - left
        })
        .collect();
    let separation = peaks[1].0 - peaks[0].0;
    let sep_ok = (separation - 2.0).abs() <= 0.02;
    let width_ok = widths.iter().all(|w| (w - target_width).abs() <= 0.1 * target_width);
    let g_ab = characteristics(&cfg).unwrap().g_ab;
    rep.line(
        5,
        "braided phi=0.47pi: peak separation 2 +- 1%, FWHM 4 delta^2 +- 10%",
        sep_ok && width_ok,
        format!(
            "separation = {separation:.5} (2 g_ab = {:.5}), FWHM = [{:.5}, {:.5}] vs {target_width:.5}",
            2.0 * g_ab,
            widths[0],
            widths[1]
        ),
    );
}

fn eit_table(rep: &mut Report) {
    type Rule = fn(i32) -> bool;
    let symmetric_2: Rule = |k| k != 0 && k.abs() < 20;
    let symmetric_4: Rule = |k| k != 0 && k.abs() < 40;
    let nested_stated: Rule = |k| k > -40 && k < 0 && k != -20;
    let rows: [(Topology, f64, &str, Rule); 6] = [
        (Topology::Separate, 0.5 * PI, "separate pi/2, 0<|d|<2", symmetric_2),
        (Topology::Braided, PI, "braided pi, 0<|d|<4", symmetric_4),
        (Topology::Separate, 2.0 * PI, "separate 2pi, 0<|d|<4", symmetric_4),
        (Topology::Braided, 2.0 * PI, "braided 2pi, 0<|d|<4", symmetric_4),
        (Topology::Nested, 2.0 * PI, "nested 2pi, 0<|d|<4", symmetric_4),
        (Topology::Nested, 0.5 * PI, "nested pi/2, -4<d<0 except -2", nested_stated),
    ];
    let mut details = Vec::new();
    let mut all_ok = true;
    for (topology, phi, label, rule) in rows {
        let mismatches: Vec<f64> = (-60..=60)
            .filter(|&k| {
                let cfg = sym(topology, phi, k as f64 / 10.0);
                let eit = classify_eit(&cfg).map(|v| v.regime == EitRegime::Eit).unwrap_or(false);
                eit != rule(k)
            })
            .map(|k| k as f64 / 10.0)
            .collect();
        all_ok &= mismatches.is_empty();
        if mismatches.is_empty() {
            details.push(format!("{label}: ok"));
        } else {
            details.push(format!(
                "{label}: {} mismatches ({:?}..{:?})",
                mismatches.len(),
                mismatches.first().unwrap(),
                mismatches.last().unwrap()
            ));
        }
    }
    rep.line(6, "EIT classification table (delta_ab step 0.1)", all_ok, details.join("; "));
    let observed: Vec<f64> = (-60..=60)
        .filter(|&k| {
            classify_eit(&sym(Topology::Nested, 0.5 * PI, k as f64 / 10.0))
                .map(|v| v.regime == EitRegime::Eit)
                .unwrap_or(false)
        })
        .map(|k| k as f64 / 10.0)
        .collect();
    println!(
        "     info: nested pi/2 EIT observed for delta_ab in [{:?}, {:?}] ({} points, 2.0 excluded: {})",
        observed.first(),
        observed.last(),
        observed.len(),
        !observed.contains(&2.0)
    );
}

fn dark_a_config(nested: bool, shift: f64) -> SystemConfig<f64> {
    let (b, rate_b) = if nested {
        ((0.25 * PI, 0.75 * PI), 10.0)
    } else {
        ((0.25 * PI, 2.25 * PI), 1.0)
    };
    let cfg = SystemConfig::new(
        GiantAtom::from_pairs((0.0, 1.0), (PI, 1.0)),
        GiantAtom::from_pairs((b.0, rate_b), (b.1, rate_b)),
        0.0,
    )
    .unwrap();
    let lamb_b = characteristics(&cfg).unwrap().lamb_b;
    cfg.with_delta_ab(lamb_b + shift).unwrap()
}

fn transparency(rep: &mut Report) {
    let mut worst = 0.0_f64;
    let mut details = Vec::new();
    // (topology, φ, Δ_ab, predicted Δ_a)
    let collective = [
        (Topology::Separate, 0.5 * PI, 1.0, 1.0 - 0.5),
        (Topology::Separate, 1.5 * PI, 1.0, -1.0 - 0.5),
        (Topology::Separate, 2.0 * PI, 1.0, -0.5),
        (Topology::Braided, PI, 1.0, -0.5),
        (Topology::Braided, 2.0 * PI, 1.0, -0.5),
        (Topology::Nested, 0.5 * PI, -1.0, 1.0 + 0.5),
        (Topology::Nested, 1.5 * PI, 1.0, -1.0 - 0.5),
        (Topology::Nested, 2.0 * PI, 1.0, -0.5),
    ];
    for (topology, phi, dab, x) in collective {
        let cfg = sym(topology, phi, dab);
        let general = amplitudes_general(&cfg, x).map(|p| p.r.norm()).unwrap_or(f64::NAN);
        let dark = if sa_basis(&cfg, x).unwrap().gamma_s.abs() < 1e-9 {
            CollectiveMode::S
        } else {
            CollectiveMode::A
        };
        let eit = collective_eit_amplitudes(&sa_basis(&cfg, x).unwrap(), dark)
            .map(|p| p.r.norm())
            .unwrap_or(f64::NAN);
        let m = general.max(eit);
        worst = if m.is_nan() { f64::NAN } else { worst.max(m) };
    }
    details.push(format!("{} collective cases", collective.len()));
    let mut single = 0;
    for nested in [false, true] {
        for shift in [-2.5, 0.0, 2.5] {
            let cfg = dark_a_config(nested, shift);
            let x = characteristics(&cfg).unwrap().lamb_a;
            let general = amplitudes_general(&cfg, x).map(|p| p.r.norm()).unwrap_or(f64::NAN);
            let eit = single_atom_eit_amplitudes(&cfg, x).map(|p| p.r.norm()).unwrap_or(f64::NAN);
            let m = general.max(eit);
            worst = if m.is_nan() { f64::NAN } else { worst.max(m) };
            single += 1;
        }
    }
    details.push(format!("{single} single-atom cases"));
    rep.line(
        7,
        "|r| = 0 at predicted transparency points",
        worst < 1e-12,
        format!("{}, max |r| = {worst:.2e}", details.join(", ")),
    );
}

fn master_convergence(rep: &mut Report) {
    // Phases whose narrow channel is not much below γ: the saturation
    // error grows like |α|²/Γ_narrow².
    let configs = [
        sym(Topology::Separate, 0.25 * PI, 0.0),
        sym(Topology::Braided, PI / 3.0, 0.0),
        sym(Topology::Nested, PI / 3.0, 0.0),
    ];
    let deltas = grid(-5.0, 5.0, 201);
    let mut worst = 0.0_f64;
    let mut ratios = Vec::new();
    let mut errors = 0;
    for cfg in &configs {
        let mut max_dev = |a2: f64| {
            deltas
                .iter()
                .map(|&d| {
                    let analytic = amplitudes_general(cfg, d).unwrap().transmittance;
                    match scattering_from_master(cfg, &DriveSpec::new(a2, d).unwrap()) {
                        Ok(m) => (m.transmittance - analytic).abs(),
                        Err(_) => {
                            errors += 1;
                            f64::NAN
                        }
                    }
                })
                .fold(0.0_f64, f64::max)
        };
        let weak = max_dev(1e-4);
        let stronger = max_dev(1e-3);
        worst = worst.max(weak);
        ratios.push(stronger / weak);
    }
    let ratio_ok = ratios.iter().all(|r| (r - 10.0).abs() <= 2.0);
    rep.line(
        8,
        "master equation -> single-photon limit",
        worst < 1e-3 && ratio_ok && errors == 0,
        format!("max |dT| at 1e-4 = {worst:.2e}, residual ratios 1e-3/1e-4 = {ratios:.3?}, errors = {errors}"),
    );
    let narrow = sym(Topology::Nested, 0.71 * PI, 0.0);
    let dev = deltas
        .iter()
        .map(|&d| {
            let analytic = amplitudes_general(&narrow, d).unwrap().transmittance;
            scattering_from_master(&narrow, &DriveSpec::new(1e-4, d).unwrap())
                .map(|m| (m.transmittance - analytic).abs())
                .unwrap_or(f64::NAN)
        })
        .fold(0.0_f64, f64::max);
    println!("     info: nested phi=0.71pi (narrow width 0.031) max |dT| at 1e-4 = {dev:.2e}");
}

/// Collective and single-atom EIT geometries with their drive strengths.
fn driven_sets() -> Vec<(&'static str, SystemConfig<f64>, f64, bool)> {
    vec![
        ("separate pi/2", sym(Topology::Separate, 0.5 * PI, 1.0), 0.04, true),
        ("braided pi", sym(Topology::Braided, PI, 1.0), 0.04, true),
        ("nested pi/2", sym(Topology::Nested, 0.5 * PI, -1.0), 0.01, true),
        ("braided single-atom", dark_a_config(false, 0.0), 0.01, false),
        ("nested single-atom", dark_a_config(true, 0.0), 0.04, false),
    ]
}

fn conservation(rep: &mut Report) {
    let deltas = grid(-6.0, 6.0, 241);
    let mut worst = 0.0_f64;
    let mut errors = 0;
    for (_, cfg, a2, _) in driven_sets() {
        for &d in &deltas {
            match scattering_from_master(&cfg, &DriveSpec::new(a2, d).unwrap()) {
                Ok(m) => worst = worst.max(m.conservation_residual),
                Err(_) => errors += 1,
            }
        }
    }
    rep.line(
        9,
        "F/|alpha|^2 = 1 - T - R for driven EIT sets",
        worst < 1e-8 && errors == 0,
        format!("max residual = {worst:.2e}, errors = {errors}"),
    );
}

fn quench(rep: &mut Report) {
    let mut ok = true;
    let mut details = Vec::new();
    for (name, cfg, a2, collective) in driven_sets() {
        let x = classify_eit(&cfg).ok().and_then(|v| v.transparency_delta_a);
        let Some(x) = x else {
            ok = false;
            details.push(format!("{name}: no transparency point"));
            continue;
        };
        match scattering_from_master(&cfg, &DriveSpec::new(a2, x).unwrap()) {
            Ok(m) => {
                let pass = if collective {
                    m.inelastic_flux < 1e-6 && m.p_ee < 1e-10
                } else {
                    m.inelastic_flux > 1e-3 && m.p_ee > 0.0
                };
                ok &= pass;
                details.push(format!("{name}: F/|a|^2 = {:.2e}, p_ee = {:.2e}", m.inelastic_flux, m.p_ee));
            }
            Err(e) => {
                ok = false;
                details.push(format!("{name}: {e}"));
            }
        }
    }
    rep.line(10, "fluorescence quench (collective) vs not (single-atom)", ok, details.join("; "));
}

fn lambda_mapping(rep: &mut Report) {
    let mut worst = 0.0_f64;
    let deltas = grid(-6.0, 6.0, 1201);
    let cases = [
        (sym(Topology::Separate, 0.5 * PI, 1.0), CollectiveMode::S),
        (sym(Topology::Braided, PI, 1.0), CollectiveMode::S),
        (sym(Topology::Separate, 2.0 * PI, 1.0), CollectiveMode::A),
    ];
    for (cfg, dark) in &cases {
        for &d in &deltas {
            let q = sa_basis(cfg, d).unwrap();
            let e = collective_eit_amplitudes(&q, *dark).unwrap();
            let (dp, dc, oc, g20) = lambda_parameters(&q, *dark);
            let l = lambda_reference(dp, dc, oc, g20, 0.0).unwrap();
            let phase = match dark {
                CollectiveMode::S => q.alpha_a_mode,
                CollectiveMode::A => q.alpha_s,
            };
            let r_lambda = l.r * num_complex::Complex::from_polar(1.0, phase);
            worst = worst.max((l.t - e.t).norm()).max((r_lambda - e.r).norm());
        }
    }
    rep.line(
        11,
        "Lambda-atom reference reproduces collective EIT amplitudes",
        worst < 1e-12,
        format!("max deviation = {worst:.2e} over {} points", cases.len() * deltas.len()),
    );
}

fn main() {
    let mut rep = Report { failures: 0 };
    unitarity(&mut rep);
    oracle(&mut rep);
    loci(&mut rep);
    fano_identity(&mut rep);
    decoherence_free_probe(&mut rep);
    eit_table(&mut rep);
    transparency(&mut rep);
    master_convergence(&mut rep);
    conservation(&mut rep);
    quench(&mut rep);
    lambda_mapping(&mut rep);
    println!("{} of 11 criteria failed", rep.failures);
    if rep.failures > 0 {
        std::process::exit(1);
    }
}
