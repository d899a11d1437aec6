//! EIT from waveguide-mediated interactions.
//!
//! Two schemes are supported. In the collective scheme one of the
//! symmetric/antisymmetric states `(σ_a ± σ_b)/√2` is dark and `g_SA` acts as
//! the control field. In the single-atom scheme one atom is decoupled from the
//! waveguide and the exchange `g_ab` is the control. Either way the two-mode
//! problem maps onto a driven Λ atom, and the roots of the amplitude
//! denominator decide between EIT (both purely imaginary) and Autler-Townes
//! splitting.

use std::fmt;

use thiserror::Error;

use crate::model::{characteristics, classify_topology, ModelError, SystemConfig, Topology};
use crate::real::{c, cis, cr, im, Cplx, Real};
use crate::scattering::ScatterPoint;

/// Relative tolerance for widths and couplings that should vanish.
const ZERO_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EitError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("dark mode {mode} has width {width:e}, expected 0")]
    DarkWidth { mode: CollectiveMode, width: f64 },
    #[error("bright mode has zero width; nothing couples to the waveguide")]
    NoBrightMode,
    #[error("collective decay {name} = {value:e} must vanish")]
    CollectiveDecay { name: &'static str, value: f64 },
    #[error("control coupling {name} vanishes")]
    NoControl { name: &'static str },
    #[error("neither atom is decoupled (gamma_a = {gamma_a:e}, gamma_b = {gamma_b:e})")]
    NoDarkAtom { gamma_a: f64, gamma_b: f64 },
    #[error("separate giant atoms have g_ab = 0 whenever one of them is decoupled; single-atom EIT is impossible")]
    SeparateNoGo,
    #[error("gamma_20 must be positive, got {0}")]
    BadLambdaWidth(f64),
}

/// Symmetric or antisymmetric collective state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CollectiveMode {
    S,
    A,
}

impl fmt::Display for CollectiveMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CollectiveMode::S => "S",
            CollectiveMode::A => "A",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EitScheme {
    CollectiveSA,
    SingleAtom,
    None,
}

impl EitScheme {
    pub fn name(self) -> &'static str {
        match self {
            EitScheme::CollectiveSA => "CollectiveSA",
            EitScheme::SingleAtom => "SingleAtom",
            EitScheme::None => "None",
        }
    }
}

/// The state that decouples from the waveguide. `Eg` is atom a excited.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DarkState {
    S,
    A,
    Eg,
    Ge,
    None,
}

impl DarkState {
    pub fn name(self) -> &'static str {
        match self {
            DarkState::S => "S",
            DarkState::A => "A",
            DarkState::Eg => "eg",
            DarkState::Ge => "ge",
            DarkState::None => "none",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EitRegime {
    Eit,
    Ats,
    Boundary,
    NotApplicable,
}

impl EitRegime {
    pub fn name(self) -> &'static str {
        match self {
            EitRegime::Eit => "EIT",
            EitRegime::Ats => "ATS",
            EitRegime::Boundary => "Boundary",
            EitRegime::NotApplicable => "NotApplicable",
        }
    }
}

/// Two-mode quantities in the symmetric/antisymmetric basis at one probe
/// detuning. Drive strengths are per unit input amplitude `α`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SABasisQuantities<T> {
    pub delta_a: T,
    pub rate_unit: T,
    pub g_sa: T,
    pub gamma_s: T,
    pub gamma_a_mode: T,
    pub gamma_sa: T,
    pub delta_s: T,
    pub delta_a_mode: T,
    pub omega_s: Cplx<T>,
    pub omega_a_mode: Cplx<T>,
    /// `arg s_S²` and `arg s_A²`: phase of the reflected wave emitted by each
    /// mode.
    pub alpha_s: T,
    pub alpha_a_mode: T,
}

/// Rates of the maximum-symmetric configurations, independent of detuning.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaRates<T> {
    pub g_sa: T,
    pub gamma_s: T,
    pub gamma_a_mode: T,
    pub gamma_sa: T,
}

/// Per-atom drive strengths `Ω_j / α = Σ_n sqrt(2γ_jn) e^{i(θ_jn − θ_a1)}`.
pub fn drive_strengths<T: Real>(cfg: &SystemConfig<T>) -> (Cplx<T>, Cplx<T>) {
    let reference = cfg.atom_a.left().phase;
    let two = T::lit(2.0);
    let omega = |atom: &crate::model::GiantAtom<T>| {
        atom.points
            .iter()
            .fold(cr(T::zero()), |acc, p| acc + cis(p.phase - reference) * (two * p.rate).sqrt())
    };
    (omega(&cfg.atom_a), omega(&cfg.atom_b))
}

pub fn sa_basis<T: Real>(cfg: &SystemConfig<T>, delta_a: T) -> Result<SABasisQuantities<T>, EitError> {
    let ch = characteristics(cfg)?;
    let half = T::lit(0.5);
    let (det_a, det_b) = cfg.detunings(delta_a);
    let da = det_a - ch.lamb_a;
    let db = det_b - ch.lamb_b;
    let (om_a, om_b) = drive_strengths(cfg);
    let root_half = half.sqrt();
    let s_sym = (ch.phasor_a + ch.phasor_b) * root_half;
    let s_anti = (ch.phasor_a - ch.phasor_b) * root_half;
    Ok(SABasisQuantities {
        delta_a,
        rate_unit: cfg.rate_unit,
        g_sa: -half * (da - db),
        gamma_s: half * (ch.gamma_a + ch.gamma_b) + ch.gamma_ab,
        gamma_a_mode: half * (ch.gamma_a + ch.gamma_b) - ch.gamma_ab,
        gamma_sa: half * (ch.gamma_a - ch.gamma_b),
        delta_s: half * (da + db) - ch.g_ab,
        delta_a_mode: half * (da + db) + ch.g_ab,
        omega_s: (om_a + om_b) * root_half,
        omega_a_mode: (om_a - om_b) * root_half,
        alpha_s: (s_sym * s_sym).arg(),
        alpha_a_mode: (s_anti * s_anti).arg(),
    })
}

/// Two-mode EIT amplitudes with `dark` as the decoupled mode.
///
/// `t = (−Δ_dΔ_b + g²)/D`, `r = e^{iα_b} ½iΓ_bΔ_d / D` with
/// `D = iΔ_d(iΔ_b − Γ_b/2) + g²` (`d` dark, `b` bright). `r` carries the
/// emission phase of the bright mode so it equals the full scattering
/// amplitude.
pub fn collective_eit_amplitudes<T: Real>(
    q: &SABasisQuantities<T>,
    dark: CollectiveMode,
) -> Result<ScatterPoint<T>, EitError> {
    let tol = T::tol(ZERO_TOL) * q.rate_unit;
    let (dark_width, bright_width, dark_det, bright_det, bright_phase) = match dark {
        CollectiveMode::S => (q.gamma_s, q.gamma_a_mode, q.delta_s, q.delta_a_mode, q.alpha_a_mode),
        CollectiveMode::A => (q.gamma_a_mode, q.gamma_s, q.delta_a_mode, q.delta_s, q.alpha_s),
    };
    if dark_width.abs() > tol {
        return Err(EitError::DarkWidth {
            mode: dark,
            width: dark_width.to_f64_lossy(),
        });
    }
    if bright_width <= tol {
        return Err(EitError::NoBrightMode);
    }
    if q.gamma_sa.abs() > tol {
        return Err(EitError::CollectiveDecay {
            name: "gamma_sa",
            value: q.gamma_sa.to_f64_lossy(),
        });
    }
    if q.g_sa.abs() <= tol {
        return Err(EitError::NoControl { name: "g_sa" });
    }
    Ok(two_mode(q.delta_a, dark_det, bright_det, bright_width, q.g_sa, bright_phase))
}

fn two_mode<T: Real>(delta_a: T, dark_det: T, bright_det: T, width: T, g: T, phase: T) -> ScatterPoint<T> {
    let half = T::lit(0.5);
    let g2 = g * g;
    let den = im(dark_det) * c(-half * width, bright_det) + cr(g2);
    let t = cr(-dark_det * bright_det + g2) / den;
    let r = cis(phase) * im(half * width * dark_det) / den;
    ScatterPoint::new(delta_a, t, r)
}

/// Which atom is decoupled, checked against the single-atom preconditions.
fn dark_atom<T: Real>(cfg: &SystemConfig<T>) -> Result<DarkState, EitError> {
    let ch = characteristics(cfg)?;
    let tol = T::tol(ZERO_TOL) * cfg.rate_unit;
    let dark = match (ch.gamma_a <= tol, ch.gamma_b <= tol) {
        (true, false) => DarkState::Eg,
        (false, true) => DarkState::Ge,
        (true, true) => return Err(EitError::NoBrightMode),
        (false, false) => {
            return Err(EitError::NoDarkAtom {
                gamma_a: ch.gamma_a.to_f64_lossy(),
                gamma_b: ch.gamma_b.to_f64_lossy(),
            })
        }
    };
    if ch.gamma_ab.abs() > tol {
        return Err(EitError::CollectiveDecay {
            name: "gamma_ab",
            value: ch.gamma_ab.to_f64_lossy(),
        });
    }
    Ok(dark)
}

/// EIT amplitudes when one atom is decoupled and `g_ab` is the control.
/// The reflection carries the emission phase of the bright atom.
pub fn single_atom_eit_amplitudes<T: Real>(cfg: &SystemConfig<T>, delta_a: T) -> Result<ScatterPoint<T>, EitError> {
    let dark = dark_atom(cfg)?;
    if classify_topology(cfg)? == Topology::Separate {
        return Err(EitError::SeparateNoGo);
    }
    let ch = characteristics(cfg)?;
    if ch.g_ab.abs() <= T::tol(ZERO_TOL) * cfg.rate_unit {
        return Err(EitError::NoControl { name: "g_ab" });
    }
    let (det_a, det_b) = cfg.detunings(delta_a);
    let da = det_a - ch.lamb_a;
    let db = det_b - ch.lamb_b;
    Ok(match dark {
        DarkState::Eg => two_mode(delta_a, da, db, ch.gamma_b, ch.g_ab, ch.alpha_b),
        _ => two_mode(delta_a, db, da, ch.gamma_a, ch.g_ab, ch.alpha_a),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EitVerdict<T> {
    pub scheme: EitScheme,
    pub dark_state: DarkState,
    pub regime: EitRegime,
    /// `|g_SA|` or `|g_ab|`.
    pub control_strength: T,
    pub bright_width: T,
    pub transparency_delta_a: Option<T>,
    /// Both schemes' preconditions hold; the collective one is reported.
    pub overlap: bool,
    /// Roots `Z±` of the denominator in the dark-mode detuning (symmetric
    /// form, `Δ_dark = Δ_bright = Z`).
    pub roots: Option<[Cplx<T>; 2]>,
}

/// Denominator roots `Z± = (−iΓ/2 ± sqrt(4g² − Γ²/4))/2` and the regime they
/// imply.
pub fn eit_roots<T: Real>(control: T, width: T, rate_unit: T) -> ([Cplx<T>; 2], EitRegime) {
    let half = T::lit(0.5);
    let quarter = T::lit(0.25);
    let four = T::lit(4.0);
    let disc = four * control * control - quarter * width * width;
    let sq = if disc >= T::zero() { cr(disc.sqrt()) } else { im((-disc).sqrt()) };
    let base = im(-half * width);
    let roots = [(base + sq) * half, (base - sq) * half];
    let gap = four * control.abs() - width;
    let regime = if gap.abs() <= T::tol(ZERO_TOL) * rate_unit {
        EitRegime::Boundary
    } else if gap < T::zero() {
        EitRegime::Eit
    } else {
        EitRegime::Ats
    };
    (roots, regime)
}

/// Detects which EIT scheme applies and labels EIT, ATS, Boundary or
/// NotApplicable from the sign of the root discriminant.
pub fn classify_eit<T: Real>(cfg: &SystemConfig<T>) -> Result<EitVerdict<T>, EitError> {
    let ch = characteristics(cfg)?;
    let q = sa_basis(cfg, T::zero())?;
    let tol = T::tol(ZERO_TOL) * cfg.rate_unit;
    let half = T::lit(0.5);
    let lamb_mid = half * (ch.lamb_a + ch.lamb_b - cfg.delta_ab);

    let collective = if q.gamma_sa.abs() > tol {
        None
    } else if q.gamma_s.abs() <= tol && q.gamma_a_mode > tol {
        Some((DarkState::S, q.gamma_a_mode, ch.g_ab + lamb_mid))
    } else if q.gamma_a_mode.abs() <= tol && q.gamma_s > tol {
        Some((DarkState::A, q.gamma_s, -ch.g_ab + lamb_mid))
    } else {
        None
    };
    let single = dark_atom(cfg).ok().map(|d| match d {
        DarkState::Eg => (d, ch.gamma_b, ch.lamb_a),
        _ => (d, ch.gamma_a, ch.lamb_b - cfg.delta_ab),
    });

    let (scheme, (dark_state, width, transparency), control) = match (collective, single) {
        (Some(c), _) => (EitScheme::CollectiveSA, c, q.g_sa.abs()),
        (None, Some(s)) => (EitScheme::SingleAtom, s, ch.g_ab.abs()),
        (None, None) => {
            return Ok(EitVerdict {
                scheme: EitScheme::None,
                dark_state: DarkState::None,
                regime: EitRegime::NotApplicable,
                control_strength: T::zero(),
                bright_width: T::zero(),
                transparency_delta_a: None,
                overlap: false,
                roots: None,
            })
        }
    };
    let overlap = collective.is_some() && single.is_some();
    if control <= tol {
        return Ok(EitVerdict {
            scheme,
            dark_state,
            regime: EitRegime::NotApplicable,
            control_strength: control,
            bright_width: width,
            transparency_delta_a: None,
            overlap,
            roots: None,
        });
    }
    let (roots, regime) = eit_roots(control, width, cfg.rate_unit);
    Ok(EitVerdict {
        scheme,
        dark_state,
        regime,
        control_strength: control,
        bright_width: width,
        transparency_delta_a: Some(transparency),
        overlap,
        roots: Some(roots),
    })
}

/// Closed-form S-A rates for equal rates `gamma` and equal spacing `phi`.
pub fn maximum_symmetric_quantities<T: Real>(topology: Topology, phi: T, gamma: T, delta_ab: T) -> SaRates<T> {
    let two = T::lit(2.0);
    let three = T::lit(3.0);
    let half = T::lit(0.5);
    let (c1, c2, c3) = (phi.cos(), (two * phi).cos(), (three * phi).cos());
    let gamma_s = gamma * (two + three * c1 + two * c2 + c3);
    match topology {
        Topology::Separate => SaRates {
            g_sa: half * delta_ab,
            gamma_s,
            gamma_a_mode: gamma * (two + c1 - two * c2 - c3),
            gamma_sa: T::zero(),
        },
        Topology::Braided => SaRates {
            g_sa: half * delta_ab,
            gamma_s,
            gamma_a_mode: gamma * (two - three * c1 + two * c2 - c3),
            gamma_sa: T::zero(),
        },
        Topology::Nested => SaRates {
            g_sa: half * delta_ab + half * gamma * ((three * phi).sin() - phi.sin()),
            gamma_s,
            gamma_a_mode: gamma * (two - c1 - two * c2 + c3),
            gamma_sa: gamma * (c3 - c1),
        },
    }
}

/// Probe transmission and reflection of a driven Λ atom with ground state
/// `0`, probe transition `0–2` and control on `1–2`.
pub fn lambda_reference<T: Real>(
    delta_p: T,
    delta_c: T,
    omega_c: T,
    gamma_20: T,
    gamma_21: T,
) -> Result<ScatterPoint<T>, EitError> {
    if !(gamma_20 > T::zero()) {
        return Err(EitError::BadLambdaWidth(gamma_20.to_f64_lossy()));
    }
    let half = T::lit(0.5);
    let quarter = T::lit(0.25);
    let upper = c(-half * (gamma_20 + gamma_21), delta_p);
    if omega_c == T::zero() {
        let t = c(-half * gamma_21, delta_p) / upper;
        let r = im(half * gamma_20) / upper;
        return Ok(ScatterPoint::new(delta_p, t, r));
    }
    let two_photon = im(delta_p - delta_c);
    let control = cr(quarter * omega_c * omega_c);
    let den = two_photon * upper + control;
    let t = (two_photon * c(-half * gamma_21, delta_p) + control) / den;
    let r = two_photon * (half * gamma_20) / den;
    Ok(ScatterPoint::new(delta_p, t, r))
}

/// Λ-atom parameters `(Δ_p, Δ_c, Ω_c, Γ_20)` equivalent to the collective
/// scheme with `dark` decoupled (`Γ_21 = 0`).
pub fn lambda_parameters<T: Real>(q: &SABasisQuantities<T>, dark: CollectiveMode) -> (T, T, T, T) {
    let (dark_det, bright_det, width) = match dark {
        CollectiveMode::S => (q.delta_s, q.delta_a_mode, q.gamma_a_mode),
        CollectiveMode::A => (q.delta_a_mode, q.delta_s, q.gamma_s),
    };
    (bright_det, bright_det - dark_det, T::lit(2.0) * q.g_sa, width)
}
