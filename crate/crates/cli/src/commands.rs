//! One evaluator per command. Each produces rows in grid order.

use gawqed::eit::{collective_eit_amplitudes, sa_basis, single_atom_eit_amplitudes};
use gawqed::lindblad::InelasticSpectrum;
use gawqed::{
    amplitudes_general, characteristics, classify_eit, classify_topology, detect_symmetric, fano_fit, fano_regime,
    lorentz_decompose, peak_minimum_loci, scattering_from_master, solve_real_space, CollectiveMode, DarkState,
    DriveSpec, EitScheme, FanoRegime, GiantAtom, SymmetricConfig, SystemConfig, Topology,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::Setup;
use crate::output::{Table, Value};
use crate::{numerical, CliError, Command, Outcome, RunSpec, Sweep, SweepVar};

type Row = Vec<Value>;

pub(crate) fn dispatch(spec: &RunSpec, setup: Option<&Setup>) -> Result<Outcome, CliError> {
    let sweep = spec.sweep.or_else(|| spec.command.default_sweep());
    let Some(setup) = setup else {
        return oracle_check(spec);
    };
    let table = match spec.command {
        Command::Characteristics => phi_command(setup, sweep, CHAR_COLUMNS, characteristics_row)?,
        Command::EitClassify => phi_command(setup, sweep, EIT_COLUMNS, eit_classify_row)?,
        Command::Loci => loci(setup, sweep)?,
        Command::Fano => fano(setup, sweep)?,
        Command::Spectrum => delta_command(setup, require(sweep)?, spec.outer, SPECTRUM_COLUMNS, spectrum_row)?,
        Command::EitSpectrum => delta_command(setup, require(sweep)?, spec.outer, EIT_SPECTRUM_COLUMNS, eit_spectrum_row)?,
        Command::MasterSweep => {
            drive_power(setup)?;
            delta_command(setup, require(sweep)?, spec.outer, MASTER_COLUMNS, master_row)?
        }
        Command::InelasticSpectrum => inelastic(setup, require(sweep)?)?,
        Command::OracleCheck => return oracle_check(spec),
    };
    Ok(Outcome { table, failure: None })
}

fn require(sweep: Option<Sweep>) -> Result<Sweep, CliError> {
    sweep.ok_or_else(|| CliError::Schema("this command needs a sweep".into()))
}

fn par_rows(grid: &[f64], f: impl Fn(f64) -> Result<Row, CliError> + Sync) -> Result<Vec<Row>, CliError> {
    grid.par_iter().map(|&x| f(x)).collect()
}

/// The symmetric shortcut behind a configuration, if any. Explicit geometries
/// are recognised when they are a shifted copy of an equally spaced one.
fn symmetric_of(setup: &Setup) -> Option<SymmetricConfig> {
    setup.symmetric.or_else(|| {
        let zeroed = setup.system.with_delta_ab(0.0).ok()?;
        detect_symmetric(&zeroed).map(|(s, _)| s)
    })
}

fn need_symmetric(setup: &Setup, what: &str) -> Result<SymmetricConfig, CliError> {
    symmetric_of(setup).ok_or_else(|| {
        CliError::Schema(format!("{what} needs the symmetric shortcut or an equally spaced geometry with equal rates"))
    })
}

/// The configuration at spacing `phi`, re-expanded from the shortcut.
fn system_at_phi(setup: &Setup, phi: f64) -> Result<SystemConfig, CliError> {
    let sym = need_symmetric(setup, "a phi sweep")?;
    SymmetricConfig::new(sym.topology, phi, sym.gamma)
        .expand_with(setup.system.delta_ab)
        .and_then(|c| c.with_rate_unit(setup.system.rate_unit))
        .map_err(|e| CliError::Schema(e.to_string()))
}

/// Commands evaluated on the configuration itself, or over a φ sweep with a
/// leading `phi` column.
fn phi_command(
    setup: &Setup,
    sweep: Option<Sweep>,
    columns: &[&'static str],
    row: fn(&SystemConfig) -> Result<Row, CliError>,
) -> Result<Table, CliError> {
    match sweep {
        None => Ok(Table {
            columns: columns.to_vec(),
            rows: vec![row(&setup.system)?],
            record: true,
        }),
        Some(s) => {
            let rows = par_rows(&s.grid(), |phi| {
                let mut r = vec![Value::Num(phi)];
                r.extend(row(&system_at_phi(setup, phi)?)?);
                Ok(r)
            })?;
            let mut cols = vec![SweepVar::Phi.name()];
            cols.extend_from_slice(columns);
            Ok(Table {
                columns: cols,
                rows,
                record: false,
            })
        }
    }
}

const CHAR_COLUMNS: &[&str] = &[
    "topology", "lamb_a", "lamb_b", "gamma_a", "gamma_b", "g_ab", "gamma_ab", "alpha_a", "alpha_b",
];

fn characteristics_row(cfg: &SystemConfig) -> Result<Row, CliError> {
    let topology = classify_topology(cfg).map_err(numerical("model"))?;
    let ch = characteristics(cfg).map_err(numerical("model"))?;
    Ok(vec![
        topology.name().into(),
        ch.lamb_a.into(),
        ch.lamb_b.into(),
        ch.gamma_a.into(),
        ch.gamma_b.into(),
        ch.g_ab.into(),
        ch.gamma_ab.into(),
        ch.alpha_a.into(),
        ch.alpha_b.into(),
    ])
}

const EIT_COLUMNS: &[&str] = &[
    "scheme",
    "dark_state",
    "regime",
    "control_strength",
    "bright_width",
    "transparency_delta_a",
    "overlap",
    "re_z_plus",
    "im_z_plus",
    "re_z_minus",
    "im_z_minus",
];

fn eit_classify_row(cfg: &SystemConfig) -> Result<Row, CliError> {
    let v = classify_eit(cfg).map_err(numerical("eit"))?;
    let root = |k: usize, im: bool| -> Value {
        v.roots
            .map(|z| if im { z[k].im } else { z[k].re })
            .into()
    };
    Ok(vec![
        v.scheme.name().into(),
        v.dark_state.name().into(),
        v.regime.name().into(),
        v.control_strength.into(),
        v.bright_width.into(),
        v.transparency_delta_a.into(),
        Value::Bool(v.overlap),
        root(0, false),
        root(0, true),
        root(1, false),
        root(1, true),
    ])
}

/// φ grid for the closed-form commands: the sweep, or the configured spacing.
fn phi_grid(setup: &Setup, sweep: Option<Sweep>, what: &str) -> Result<(SymmetricConfig, Vec<f64>, bool), CliError> {
    let sym = need_symmetric(setup, what)?;
    Ok(match sweep {
        Some(s) => (sym, s.grid(), false),
        None => (sym, vec![sym.phi], true),
    })
}

fn loci(setup: &Setup, sweep: Option<Sweep>) -> Result<Table, CliError> {
    let (sym, grid, record) = phi_grid(setup, sweep, "loci")?;
    let rows = par_rows(&grid, |phi| {
        let l = peak_minimum_loci(sym.topology, phi, sym.gamma);
        Ok(vec![phi.into(), Value::List(l.peaks), l.minimum.into()])
    })?;
    Ok(Table {
        columns: vec!["phi", "peaks", "minimum"],
        rows,
        record,
    })
}

fn fano(setup: &Setup, sweep: Option<Sweep>) -> Result<Table, CliError> {
    let (sym, grid, record) = phi_grid(setup, sweep, "fano")?;
    let (topology, gamma) = (sym.topology, sym.gamma);
    let rows = par_rows(&grid, |phi| {
        let p = lorentz_decompose(topology, phi, gamma).map_err(numerical("fano"))?;
        let regime = fano_regime(topology, phi, gamma);
        let fit = if regime == FanoRegime::None {
            None
        } else {
            fano_fit(&p).ok()
        };
        Ok(vec![
            phi.into(),
            p.delta_plus.into(),
            p.gamma_plus.into(),
            p.chi_plus.re.into(),
            p.chi_plus.im.into(),
            p.delta_minus.into(),
            p.gamma_minus.into(),
            p.chi_minus.re.into(),
            p.chi_minus.im.into(),
            regime.name().into(),
            fit.map(|f| f.q).into(),
            fit.map(|f| f.f_scale).into(),
            fit.map(|f| f.center).into(),
            fit.map(|f| f.width).into(),
        ])
    })?;
    Ok(Table {
        columns: vec![
            "phi",
            "delta_plus",
            "gamma_plus",
            "re_chi_plus",
            "im_chi_plus",
            "delta_minus",
            "gamma_minus",
            "re_chi_minus",
            "im_chi_minus",
            "regime",
            "q",
            "f_scale",
            "fit_center",
            "fit_width",
        ],
        rows,
        record,
    })
}

/// Probe-detuning sweeps, optionally nested inside a φ sweep (`phi`,
/// `delta_a` leading columns, φ outer).
fn delta_command(
    setup: &Setup,
    sweep: Sweep,
    outer: Option<Sweep>,
    columns: &[&'static str],
    row: fn(&Setup, &SystemConfig, f64) -> Result<Row, CliError>,
) -> Result<Table, CliError> {
    let inner = sweep.grid();
    let Some(outer) = outer else {
        let rows = par_rows(&inner, |d| {
            let mut r = vec![Value::Num(d)];
            r.extend(row(setup, &setup.system, d)?);
            Ok(r)
        })?;
        let mut cols = vec![SweepVar::DeltaA.name()];
        cols.extend_from_slice(columns);
        return Ok(Table {
            columns: cols,
            rows,
            record: false,
        });
    };
    let systems = outer
        .grid()
        .into_iter()
        .map(|phi| system_at_phi(setup, phi).map(|c| (phi, c)))
        .collect::<Result<Vec<_>, _>>()?;
    let points: Vec<(usize, f64)> = (0..systems.len()).flat_map(|k| inner.iter().map(move |&d| (k, d))).collect();
    let rows = points
        .par_iter()
        .map(|&(k, d)| {
            let (phi, cfg) = &systems[k];
            let mut r = vec![Value::Num(*phi), Value::Num(d)];
            r.extend(row(setup, cfg, d)?);
            Ok(r)
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let mut cols = vec![SweepVar::Phi.name(), SweepVar::DeltaA.name()];
    cols.extend_from_slice(columns);
    Ok(Table {
        columns: cols,
        rows,
        record: false,
    })
}

const SPECTRUM_COLUMNS: &[&str] = &["re_t", "im_t", "re_r", "im_r", "T", "R"];

fn spectrum_row(_: &Setup, cfg: &SystemConfig, d: f64) -> Result<Row, CliError> {
    let p = amplitudes_general(cfg, d).map_err(numerical("scattering"))?;
    Ok(vec![
        p.t.re.into(),
        p.t.im.into(),
        p.r.re.into(),
        p.r.im.into(),
        p.transmittance.into(),
        p.reflectance.into(),
    ])
}

const EIT_SPECTRUM_COLUMNS: &[&str] = &["T", "R", "T_eit", "R_eit", "deviation"];

fn eit_spectrum_row(_: &Setup, cfg: &SystemConfig, d: f64) -> Result<Row, CliError> {
    let verdict = classify_eit(cfg).map_err(numerical("eit"))?;
    let eit = match (verdict.scheme, verdict.dark_state) {
        (EitScheme::CollectiveSA, dark) => {
            let mode = if dark == DarkState::A { CollectiveMode::A } else { CollectiveMode::S };
            sa_basis(cfg, d).and_then(|q| collective_eit_amplitudes(&q, mode))
        }
        (EitScheme::SingleAtom, _) => single_atom_eit_amplitudes(cfg, d),
        (EitScheme::None, _) => {
            return Err(CliError::Numerical {
                module: "eit",
                message: "no EIT scheme applies to this configuration".into(),
            })
        }
    }
    .map_err(numerical("eit"))?;
    let exact = amplitudes_general(cfg, d).map_err(numerical("scattering"))?;
    let dev = (exact.t - eit.t).norm() + (exact.r - eit.r).norm();
    Ok(vec![
        exact.transmittance.into(),
        exact.reflectance.into(),
        eit.transmittance.into(),
        eit.reflectance.into(),
        dev.into(),
    ])
}

fn drive_power(setup: &Setup) -> Result<(f64, f64), CliError> {
    match setup.drive {
        Some(d) if d.alpha_sq > 0.0 => Ok((d.alpha_sq, d.detuning)),
        _ => Err(CliError::Schema("this command needs drive.alpha_sq > 0 in the config".into())),
    }
}

const MASTER_COLUMNS: &[&str] = &["T", "R", "F", "residual", "p_ee"];

fn master_row(setup: &Setup, cfg: &SystemConfig, d: f64) -> Result<Row, CliError> {
    let (alpha_sq, _) = drive_power(setup)?;
    let drive = DriveSpec::new(alpha_sq, d).map_err(numerical("lindblad"))?;
    let m = scattering_from_master(cfg, &drive).map_err(numerical("lindblad"))?;
    Ok(vec![
        m.transmittance.into(),
        m.reflectance.into(),
        m.inelastic_flux.into(),
        m.conservation_residual.into(),
        m.p_ee.into(),
    ])
}

fn inelastic(setup: &Setup, sweep: Sweep) -> Result<Table, CliError> {
    let (alpha_sq, detuning) = drive_power(setup)?;
    let drive = DriveSpec::new(alpha_sq, detuning).map_err(numerical("lindblad"))?;
    let spec = InelasticSpectrum::new(&setup.system, &drive).map_err(numerical("lindblad"))?;
    let rows = par_rows(&sweep.grid(), |nu| {
        let (st, sr) = spec.at(nu).map_err(numerical("lindblad"))?;
        Ok(vec![nu.into(), st.into(), sr.into()])
    })?;
    Ok(Table {
        columns: vec!["nu", "S_t", "S_r"],
        rows,
        record: false,
    })
}

/// Random geometry: phases in `[0, 4π]`, rates in `[0.1, 2]`, `Δ_ab` in
/// `[−3, 3]`, topology chosen by the phase order.
fn random_config(rng: &mut ChaCha8Rng) -> Result<SystemConfig, CliError> {
    let mut p: Vec<f64> = (0..4).map(|_| rng.gen_range(0.0..4.0 * std::f64::consts::PI)).collect();
    p.sort_by(f64::total_cmp);
    let topology = Topology::ALL[rng.gen_range(0..3)];
    let (a, b) = match topology {
        Topology::Separate => ((p[0], p[1]), (p[2], p[3])),
        Topology::Braided => ((p[0], p[2]), (p[1], p[3])),
        Topology::Nested => ((p[0], p[3]), (p[1], p[2])),
    };
    let mut rate = || rng.gen_range(0.1..2.0);
    let atom_a = GiantAtom::from_pairs((a.0, rate()), (a.1, rate()));
    let atom_b = GiantAtom::from_pairs((b.0, rate()), (b.1, rate()));
    SystemConfig::new(atom_a, atom_b, rng.gen_range(-3.0..3.0)).map_err(numerical("model"))
}

/// Compares the closed-form amplitudes with the real-space solve on random
/// configurations. Sample `k` uses stream `k` of the seeded generator, so the
/// report does not depend on the number of workers.
fn oracle_check(spec: &RunSpec) -> Result<Outcome, CliError> {
    if spec.samples == 0 {
        return Err(CliError::Schema("samples must be at least 1".into()));
    }
    let results: Vec<Result<(f64, f64), String>> = (0..spec.samples as u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
            rng.set_stream(k);
            let cfg = random_config(&mut rng).map_err(|e| e.to_string())?;
            let d = rng.gen_range(-6.0..6.0);
            let a = amplitudes_general(&cfg, d).map_err(|e| e.to_string())?;
            let b = solve_real_space(&cfg, d).map_err(|e| e.to_string())?;
            let dev = (a.t - b.t).norm().max((a.r - b.r).norm());
            Ok((dev, (a.transmittance + a.reflectance - 1.0).abs()))
        })
        .collect();
    let mut max_dev = 0.0_f64;
    let mut max_unitarity = 0.0_f64;
    let mut errors = 0u64;
    let mut first_error = None;
    for r in &results {
        match r {
            Ok((dev, u)) => {
                max_dev = max_dev.max(*dev);
                max_unitarity = max_unitarity.max(*u);
            }
            Err(e) => {
                errors += 1;
                first_error.get_or_insert_with(|| e.clone());
            }
        }
    }
    let pass = errors == 0 && max_dev < spec.tolerance && max_unitarity < spec.tolerance;
    let table = Table {
        columns: vec![
            "samples",
            "seed",
            "tolerance",
            "max_deviation",
            "max_unitarity_error",
            "errors",
            "pass",
        ],
        rows: vec![vec![
            Value::Int(spec.samples as u64),
            Value::Int(spec.seed),
            spec.tolerance.into(),
            max_dev.into(),
            max_unitarity.into(),
            Value::Int(errors),
            Value::Bool(pass),
        ]],
        record: true,
    };
    let failure = (!pass).then(|| CliError::Numerical {
        module: "oracle",
        message: match first_error {
            Some(e) => format!("{errors} samples failed; first: {e}"),
            None => format!(
                "max deviation {max_dev:e} / unitarity error {max_unitarity:e} exceed tolerance {:e}",
                spec.tolerance
            ),
        },
    });
    Ok(Outcome { table, failure })
}
