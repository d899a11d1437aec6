//! Single-photon transmission and reflection amplitudes.
//!
//! [`amplitudes_general`] works for any geometry. [`closed_form`] holds the
//! specialised expressions for equal rates and equal spacing, and
//! [`peak_minimum_loci`] the analytic positions of reflection extrema.
//! The independent real-space solver lives in [`crate::realspace`].

use thiserror::Error;

use crate::linalg::LinalgError;
use crate::model::{characteristics, detect_symmetric, ModelError, SystemConfig, Topology};
use crate::real::{cis, cr, im, Cplx, Real};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScatterError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("real-axis pole at delta_a = {delta_a}: |denominator| = {magnitude:e}")]
    Pole { delta_a: f64, magnitude: f64 },
    #[error("configuration is not symmetric: {0}")]
    NotSymmetric(String),
    #[error("real-space system is singular with a {null_dim}-dimensional null space touching the outgoing amplitudes")]
    Singular { null_dim: usize },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Amplitudes at one probe detuning.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatterPoint<T> {
    pub delta_a: T,
    pub t: Cplx<T>,
    pub r: Cplx<T>,
    /// `|t|²`.
    pub transmittance: T,
    /// `|r|²`.
    pub reflectance: T,
}

impl<T: Real> ScatterPoint<T> {
    pub fn new(delta_a: T, t: Cplx<T>, r: Cplx<T>) -> Self {
        Self {
            delta_a,
            t,
            r,
            transmittance: t.norm_sqr(),
            reflectance: r.norm_sqr(),
        }
    }
}

/// Relative size below which a denominator counts as zero.
const POLE_TOL: f64 = 1e-14;

/// Transmission and reflection for an arbitrary geometry.
///
/// Removable singularities (bound states whose numerators vanish together
/// with the denominator) are resolved by the limit along `delta_a`; fully
/// decoupled atoms give `t = 1`, `r = 0`.
pub fn amplitudes_general<T: Real>(cfg: &SystemConfig<T>, delta_a: T) -> Result<ScatterPoint<T>, ScatterError> {
    let ch = characteristics(cfg)?;
    let gamma = cfg.rate_unit;
    let half = T::lit(0.5);
    let quarter = T::lit(0.25);
    let decoupled = T::tol(1e-13) * gamma;
    if ch.gamma_a <= decoupled && ch.gamma_b <= decoupled {
        return Ok(ScatterPoint::new(delta_a, cr(T::one()), cr(T::zero())));
    }
    let (delta_a_j, delta_b_j) = cfg.detunings(delta_a);
    let da = delta_a_j - ch.lamb_a;
    let db = delta_b_j - ch.lamb_b;
    let a = im(da) - cr(half * ch.gamma_a);
    let b = im(db) - cr(half * ch.gamma_b);
    let k = cr(half * ch.gamma_ab) + im(ch.g_ab);
    let den = a * b - k * k;
    let num_t = cr(-da * db + quarter * (ch.gamma_ab * ch.gamma_ab - ch.gamma_a * ch.gamma_b) + ch.g_ab * ch.g_ab);
    let phase_a = cis(ch.alpha_a);
    let phase_b = cis(ch.alpha_b);
    let num_r = a * phase_b * (half * ch.gamma_b)
        + b * phase_a * (half * ch.gamma_a)
        + k * ch.phasor_a * ch.phasor_b;

    let scale = gamma * gamma;
    if den.norm() >= T::tol(POLE_TOL) * scale {
        return Ok(ScatterPoint::new(delta_a, num_t / den, num_r / den));
    }
    let dden = im(T::one()) * (a + b);
    let dnum_t = cr(-(da + db));
    let dnum_r = im(half * ch.gamma_b) * phase_b + im(half * ch.gamma_a) * phase_a;
    let vanish = T::tol(1e-10) * scale;
    if dden.norm() > T::tol(1e-10) * gamma && num_t.norm() <= vanish && num_r.norm() <= vanish {
        return Ok(ScatterPoint::new(delta_a, dnum_t / dden, dnum_r / dden));
    }
    Err(ScatterError::Pole {
        delta_a: delta_a.to_f64_lossy(),
        magnitude: den.norm().to_f64_lossy(),
    })
}

/// Closed-form amplitudes for equal rates `gamma` and equal spacing `phi`,
/// leftmost point at phase 0. Returns `None` at a removable 0/0 point.
pub fn closed_form<T: Real>(topology: Topology, phi: T, gamma: T, delta: T) -> Option<(Cplx<T>, Cplx<T>)> {
    let one = cr(T::one());
    let two = T::lit(2.0);
    let half = T::lit(0.5);
    let four_i = im(T::lit(4.0));
    let e = cis(phi);
    let e3 = cis(T::lit(3.0) * phi);
    let i_delta = im(delta);
    let (s1, s2, s3) = (phi.sin(), (two * phi).sin(), (T::lit(3.0) * phi).sin());
    let c1 = phi.cos();
    let (den, num_t, num_r) = match topology {
        Topology::Separate => {
            let d = i_delta - (one + e) * gamma;
            let x = e * (one + e) * (one + e) * (half * gamma);
            let den = d * d - x * x;
            let dev = delta - gamma * s1;
            let cos_half_sq = (half * phi).cos().powi(2);
            let num_r = four_i * e3 * (gamma * cos_half_sq * (delta * (two * phi).cos() + gamma * (s1 + s2)));
            (den, cr(-dev * dev), num_r)
        }
        Topology::Braided => {
            let d = i_delta - (one + e * e) * gamma;
            let x = (e * T::lit(3.0) + e3) * (half * gamma);
            let den = d * d - x * x;
            let dev = delta - gamma * s2;
            let num_t = cr(-dev * dev + gamma * gamma * (s2 * s2 + s1 * s1));
            let num_r = four_i * e3 * (gamma * c1 * c1 * (delta * c1 + gamma * s1));
            (den, num_t, num_r)
        }
        Topology::Nested => {
            let den = (i_delta - (one + e3) * gamma) * (i_delta - (one + e) * gamma)
                - (e * (one + e) * gamma) * (e * (one + e) * gamma);
            let num_t = cr(-(delta - gamma * s3) * (delta - gamma * s1) + gamma * gamma * (s1 + s2).powi(2));
            let shape = two - two * c1 + (two * phi).cos();
            let cos_half_sq = (half * phi).cos().powi(2);
            let num_r = four_i * e3 * (gamma * cos_half_sq * (delta * shape - gamma * (s1 - s2)));
            (den, num_t, num_r)
        }
    };
    let scale = gamma * gamma;
    if den.norm() < T::tol(POLE_TOL) * scale {
        None
    } else {
        Some((num_t / den, num_r / den))
    }
}

/// Closed-form amplitudes for a configuration that is (a shifted copy of) a
/// symmetric one with `Δ_ab = 0`. The probe detuning is `Δ = Δ_a`.
///
/// At removable 0/0 points of the closed form the general evaluation, which
/// resolves the limit, is returned instead.
pub fn amplitudes_topology<T: Real>(cfg: &SystemConfig<T>, delta: T) -> Result<ScatterPoint<T>, ScatterError> {
    let (sym, offset) = detect_symmetric(cfg).ok_or_else(|| {
        ScatterError::NotSymmetric("closed forms need equal rates, equal spacing and delta_ab = 0".into())
    })?;
    match closed_form(sym.topology, sym.phi, sym.gamma, delta) {
        Some((t, r)) => Ok(ScatterPoint::new(delta, t, r * cis(T::lit(2.0) * offset))),
        None => amplitudes_general(cfg, delta),
    }
}

/// Spectrum over a detuning grid.
pub fn spectrum<T: Real>(cfg: &SystemConfig<T>, grid: &[T]) -> Result<Vec<ScatterPoint<T>>, ScatterError> {
    grid.iter().map(|&d| amplitudes_general(cfg, d)).collect()
}

/// Analytic positions of reflection peaks and the reflection zero.
#[derive(Debug, Clone, PartialEq)]
pub struct Loci<T> {
    pub peaks: Vec<T>,
    pub minimum: Option<T>,
}

/// Distance from `x` to the nearest point of `offset + k·period`.
pub(crate) fn lattice_distance<T: Real>(x: T, period: T, offset: T) -> T {
    let y = (x - offset) / period;
    (y - y.round()).abs() * period
}

/// Whether both atoms decouple from the waveguide at this spacing
/// (odd multiples of π for separate/nested, odd multiples of π/2 for braided).
pub fn is_decoupled_spacing<T: Real>(topology: Topology, phi: T) -> bool {
    let tol = T::tol(1e-9);
    let pi = T::PI();
    match topology {
        Topology::Separate | Topology::Nested => lattice_distance(phi, pi + pi, pi) < tol,
        Topology::Braided => lattice_distance(phi, pi, pi / T::lit(2.0)) < tol,
    }
}

/// Reflection peak and minimum loci for equal rates `gamma` and spacing `phi`.
///
/// The minimum is `None` where its expression diverges or where the
/// spectrum degenerates (`φ = nπ`); both are empty when the atoms decouple.
pub fn peak_minimum_loci<T: Real>(topology: Topology, phi: T, gamma: T) -> Loci<T> {
    if is_decoupled_spacing(topology, phi) {
        return Loci {
            peaks: Vec::new(),
            minimum: None,
        };
    }
    let two = T::lit(2.0);
    let half = T::lit(0.5);
    let tol = T::tol(1e-12);
    let (s1, s2, s3) = (phi.sin(), (two * phi).sin(), (T::lit(3.0) * phi).sin());
    let (c1, c2, c3) = (phi.cos(), (two * phi).cos(), (T::lit(3.0) * phi).cos());
    let degenerate = lattice_distance(phi, T::PI(), T::zero()) < T::tol(1e-9);
    let (mut peaks, minimum) = match topology {
        Topology::Separate => {
            let min = if degenerate || c2.abs() < tol {
                None
            } else {
                Some(-gamma * (s1 + s2) / c2)
            };
            (vec![gamma * s1], min)
        }
        Topology::Braided => {
            let root = (T::one() - c1 * c3).max(T::zero()).sqrt();
            let min = if degenerate || c1.abs() < tol {
                None
            } else {
                Some(-gamma * s1 / c1)
            };
            (vec![gamma * (s2 - root), gamma * (s2 + root)], min)
        }
        Topology::Nested => {
            let root = ((s1 + s2).powi(2) + T::lit(0.25) * (s3 - s1).powi(2)).sqrt();
            let mid = half * (s3 + s1);
            let min = if degenerate {
                None
            } else {
                Some(gamma * (s1 - s2) / (two - two * c1 + c2))
            };
            (vec![gamma * (mid - root), gamma * (mid + root)], min)
        }
    };
    let scale = T::one() + gamma.abs();
    if peaks.len() == 2 && (peaks[1] - peaks[0]).abs() <= tol * scale {
        peaks.truncate(1);
    }
    // A zero of the reflection numerator that lands on a peak cancels against
    // a zero of the denominator; there is no reflection minimum there.
    let minimum = minimum.filter(|m| peaks.iter().all(|p| (*p - *m).abs() > T::tol(1e-9) * scale));
    Loci { peaks, minimum }
}
