//! Two-channel decomposition of the reflection amplitude and Fano analysis.
//!
//! For equal rates and equal spacing the reflection amplitude is a sum of two
//! Lorentzian channels `r± = χ± Γ± / (i(Δ − Δ±) − Γ±)`. When one width is much
//! larger than the other, the narrow resonance interferes with an almost flat
//! background and `R` takes the Fano form `ℱ (q + ε)² / (1 + ε²)`.

use thiserror::Error;

use crate::model::Topology;
use crate::real::{c, cis, cr, im, Cplx, Real};
use crate::scattering::{closed_form, is_decoupled_spacing, lattice_distance, ScatterPoint};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FanoError {
    #[error("negative width at phi = {phi}: gamma_plus = {gamma_plus}, gamma_minus = {gamma_minus}")]
    NegativeWidth { phi: f64, gamma_plus: f64, gamma_minus: f64 },
    #[error("no coefficient branch reproduces the reflection amplitude at phi = {phi} (best residual {residual:e})")]
    BranchSelection { phi: f64, residual: f64 },
    #[error("width ratio {ratio} is below 10; the Fano approximation does not apply")]
    RegimeViolation { ratio: f64 },
    #[error("narrow width is zero; the reduced detuning is undefined")]
    DegenerateWidth,
    #[error("|delta| = {0} exceeds 0.1; the vacuum-Rabi approximation needs phi close to pi/2")]
    RabiOutOfRange(f64),
}

/// Angles and scale factors of the nested-topology prefactors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NestedCoefficients<T> {
    pub a: T,
    pub zeta: T,
    pub lambda1: T,
    pub lambda2: T,
    pub lambda3: T,
    /// `ϑ`, half the phase difference of `χ₊` and `χ₋`.
    pub vartheta: T,
    /// `|χ±|`.
    pub chi: T,
}

/// The two Lorentzian channels of the reflection amplitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LorentzPair<T> {
    pub topology: Topology,
    pub phi: T,
    pub gamma: T,
    pub delta_plus: T,
    pub delta_minus: T,
    /// Half widths `Γ±`.
    pub gamma_plus: T,
    pub gamma_minus: T,
    pub chi_plus: Cplx<T>,
    pub chi_minus: Cplx<T>,
    /// Present for the nested topology away from degenerate spacings.
    pub nested: Option<NestedCoefficients<T>>,
}

fn lorentzian<T: Real>(chi: Cplx<T>, width: T, center: T, delta: T) -> Cplx<T> {
    if chi == cr(T::zero()) {
        return cr(T::zero());
    }
    chi * width / (im(delta - center) - cr(width))
}

impl<T: Real> LorentzPair<T> {
    pub fn r_plus(&self, delta: T) -> Cplx<T> {
        lorentzian(self.chi_plus, self.gamma_plus, self.delta_plus, delta)
    }

    pub fn r_minus(&self, delta: T) -> Cplx<T> {
        lorentzian(self.chi_minus, self.gamma_minus, self.delta_minus, delta)
    }

    /// `r₊(Δ) + r₋(Δ)`.
    pub fn reconstruct(&self, delta: T) -> Cplx<T> {
        self.r_plus(delta) + self.r_minus(delta)
    }

    /// `max(Γ₊/Γ₋, Γ₋/Γ₊)`, infinite when one width vanishes.
    pub fn width_ratio(&self) -> T {
        let (big, small) = if self.gamma_plus >= self.gamma_minus {
            (self.gamma_plus, self.gamma_minus)
        } else {
            (self.gamma_minus, self.gamma_plus)
        };
        if small <= T::zero() {
            T::infinity()
        } else {
            big / small
        }
    }
}

/// Probe detunings (units of γ) used to pick coefficient branches.
fn probes<T: Real>() -> impl Iterator<Item = T> {
    (0..41).map(|k| T::lit(-6.0 + 0.3 * k as f64))
}

/// Largest `|r₊ + r₋ − r|` over the probe detunings.
pub fn decomposition_residual<T: Real>(pair: &LorentzPair<T>) -> T {
    probes::<T>()
        .filter_map(|d| {
            let delta = d * pair.gamma;
            closed_form(pair.topology, pair.phi, pair.gamma, delta)
                .map(|(_, r)| (pair.reconstruct(delta) - r).norm())
        })
        .fold(T::zero(), T::max)
}

/// Resonance points, half widths and prefactors of the two channels.
pub fn lorentz_decompose<T: Real>(topology: Topology, phi: T, gamma: T) -> Result<LorentzPair<T>, FanoError> {
    let one = T::one();
    let two = T::lit(2.0);
    let three = T::lit(3.0);
    let (s1, s2, s3) = (phi.sin(), (two * phi).sin(), (three * phi).sin());
    let (c1, c2) = (phi.cos(), (two * phi).cos());
    let e3 = cis(three * phi);
    let pair = match topology {
        Topology::Separate => {
            let shift = two * c1 + two * c1 * c1;
            LorentzPair {
                topology,
                phi,
                gamma,
                delta_plus: gamma * s1 * (one + shift),
                delta_minus: gamma * s1 * (one - shift),
                gamma_plus: gamma * (one + c1) * (one + c2),
                gamma_minus: gamma * (one + c1) * (one - c2),
                chi_plus: e3,
                chi_minus: -e3,
                nested: None,
            }
        }
        Topology::Braided => {
            let split = T::lit(1.5) * s1 + T::lit(0.5) * s3;
            LorentzPair {
                topology,
                phi,
                gamma,
                delta_plus: gamma * (s2 + split),
                delta_minus: gamma * (s2 - split),
                gamma_plus: gamma * (one + c2) * (one + c1),
                gamma_minus: gamma * (one + c2) * (one - c1),
                chi_plus: e3,
                chi_minus: -e3,
                nested: None,
            }
        }
        Topology::Nested => nested_pair(phi, gamma)?,
    };
    let floor = -T::tol(1e-12) * (one + gamma.abs());
    if pair.gamma_plus < floor || pair.gamma_minus < floor {
        return Err(FanoError::NegativeWidth {
            phi: phi.to_f64_lossy(),
            gamma_plus: pair.gamma_plus.to_f64_lossy(),
            gamma_minus: pair.gamma_minus.to_f64_lossy(),
        });
    }
    Ok(pair)
}

/// Nested-topology channels. The prefactor angles are fixed only up to a
/// branch (`ζ` from `tan 2ζ`, `ϑ` from `tan ϑ`), so all candidates are built
/// and the one reproducing the closed-form reflection is kept.
fn nested_pair<T: Real>(phi: T, gamma: T) -> Result<LorentzPair<T>, FanoError> {
    let one = T::one();
    let two = T::lit(2.0);
    let three = T::lit(3.0);
    let half = T::lit(0.5);
    let pi = T::PI();
    let phi_in = phi;
    // Coefficients are 2π-periodic; near φ = 2nπ they divide by Γ₊Γ₋ → 0, so
    // evaluate at the reduced angle where the small offset is exact.
    let phi = phi - two * pi * (phi / (two * pi)).round();
    let (s1, s3) = (phi.sin(), (three * phi).sin());
    let (c1, c2, c3) = (phi.cos(), (two * phi).cos(), (three * phi).cos());
    let a = ((one - three * c1).powi(2) + T::lit(4.0) * s1 * s1).sqrt();
    let ac = (half * phi).cos().abs();
    let root = (two * a).sqrt() * ac;
    let mid = half * (s1 + s3);
    let base = one + half * c1 + half * c3;
    let zeta0 = half * (two * s1 / (one - three * c1)).atan();

    let tol = T::tol(1e-9);
    let degenerate = lattice_distance(phi, pi, T::zero()) < tol;

    let mut best: Option<(T, LorentzPair<T>)> = None;
    let width_floor = -T::tol(1e-12) * gamma;
    for zeta in [zeta0, zeta0 + half * pi] {
        let angle = two * phi + zeta;
        let delta_plus = gamma * (mid - root * angle.cos());
        let delta_minus = gamma * (mid + root * angle.cos());
        let gamma_plus = gamma * (base + root * angle.sin());
        let gamma_minus = gamma * (base - root * angle.sin());
        // Near decoupling r is tiny and the residual cannot tell branches
        // apart; widths must still be non-negative.
        if gamma_plus < width_floor || gamma_minus < width_floor {
            continue;
        }
        let skeleton = LorentzPair {
            topology: Topology::Nested,
            phi: phi_in,
            gamma,
            delta_plus,
            delta_minus,
            gamma_plus,
            gamma_minus,
            chi_plus: cr(T::zero()),
            chi_minus: cr(T::zero()),
            nested: None,
        };
        let candidates: Vec<LorentzPair<T>> = if degenerate {
            vec![single_channel(skeleton)]
        } else {
            let shape = two * c1 - c2 - two;
            let lambda1 = -ac * (T::lit(5.0) * s3 - two * (T::lit(4.0) * phi).sin() + (T::lit(5.0) * phi).sin())
                / (T::lit(4.0) * (two * a).sqrt());
            let lambda2 = (two / a).sqrt() * ac.powi(3) * shape * shape;
            let lambda3 = (two / a).sqrt() * ac * shape;
            let (gp, gm) = (gamma_plus / gamma, gamma_minus / gamma);
            let (dp, dm) = (delta_plus / gamma, delta_minus / gamma);
            let x = (lambda1 * (gp - gm) + lambda2 * (dp - dm)) / (gp * gm);
            let chi = (x * x + lambda3 * lambda3).sqrt();
            [T::zero(), pi]
                .into_iter()
                .map(|shift| {
                    let vartheta = (lambda3 / x).atan() + shift;
                    LorentzPair {
                        chi_plus: cis(phi - zeta + vartheta) * chi,
                        chi_minus: cis(phi - zeta - vartheta) * chi,
                        nested: Some(NestedCoefficients {
                            a,
                            zeta,
                            lambda1,
                            lambda2,
                            lambda3,
                            vartheta,
                            chi,
                        }),
                        ..skeleton
                    }
                })
                .collect()
        };
        for cand in candidates {
            let res = decomposition_residual(&cand);
            if res.is_finite() && best.as_ref().is_none_or(|(b, _)| res < *b) {
                best = Some((res, cand));
            }
        }
    }
    let (mut residual, mut pair) = best.ok_or(FanoError::BranchSelection {
        phi: phi_in.to_f64_lossy(),
        residual: f64::INFINITY,
    })?;
    if residual > T::tol(1e-10) && !degenerate {
        // The prefactor formulas cancel to O(Γ₋) near φ = 2nπ; fit the two
        // pole residues of the closed form instead.
        let fitted = residue_fit(pair);
        let res = decomposition_residual(&fitted);
        if res < residual {
            residual = res;
            pair = fitted;
        }
    }
    // A pole of width Γ_min is resolved by the closed form only to about
    // ε·γ/Γ_min near its centre.
    let narrow = pair.gamma_plus.min(pair.gamma_minus).max(T::epsilon() * gamma);
    if residual > T::tol(1e-10) + T::tol(1e-14) * gamma / narrow {
        return Err(FanoError::BranchSelection {
            phi: phi_in.to_f64_lossy(),
            residual: residual.to_f64_lossy(),
        });
    }
    Ok(pair)
}

/// Poles and residues of the nested reflection amplitude taken directly from
/// its rational form `r = N(Δ)/D(Δ)`: `D = (iΔ − A)(iΔ − B) − C²` has roots
/// `z = −iλ` with `λ` the eigenvalues of `[[A, C], [C, B]]`, and the residue at
/// `z₁` is `N(z₁)/(−(z₁ − z₂))`. `χ = i c/Γ` for `r = Σ c/(Δ − z)`.
fn residue_fit<T: Real>(mut pair: LorentzPair<T>) -> LorentzPair<T> {
    let one = cr(T::one());
    let two = T::lit(2.0);
    let (phi, gamma) = (pair.phi, pair.gamma);
    let e = cis(phi);
    let e3 = cis(T::lit(3.0) * phi);
    let a = (one + e3) * gamma;
    let b = (one + e) * gamma;
    let cc = e * (one + e) * gamma;
    let mean = (a + b) / two;
    let split = (((a - b) / two).powi(2) + cc * cc).sqrt();
    let mut z = [-im(T::one()) * (mean + split), -im(T::one()) * (mean - split)];
    // Keep the channel labels of the analytic skeleton.
    let target = c(pair.delta_plus, -pair.gamma_plus);
    if (z[1] - target).norm() < (z[0] - target).norm() {
        z.swap(0, 1);
    }
    let gap = z[0] - z[1];
    if gap.norm() == T::zero() || z[0].im >= T::zero() || z[1].im >= T::zero() {
        return pair;
    }
    let (s1, s2) = (phi.sin(), (two * phi).sin());
    let shape = two - two * phi.cos() + (two * phi).cos();
    let cos_half_sq = (phi / two).cos().powi(2);
    let num = |d: Cplx<T>| im(T::lit(4.0)) * e3 * (d * shape - cr(gamma * (s1 - s2))) * (gamma * cos_half_sq);
    let c_plus = num(z[0]) / (-gap);
    let c_minus = num(z[1]) / gap;
    pair.delta_plus = z[0].re;
    pair.gamma_plus = -z[0].im;
    pair.delta_minus = z[1].re;
    pair.gamma_minus = -z[1].im;
    pair.chi_plus = im(T::one()) * c_plus / pair.gamma_plus;
    pair.chi_minus = im(T::one()) * c_minus / pair.gamma_minus;
    // Refresh the magnitude and splitting angle of χ± = χ e^{i(φ − ζ ± ϑ)}.
    if let Some(nc) = pair.nested.as_mut() {
        let frame = cis(nc.zeta - phi);
        let (p, m) = (pair.chi_plus * frame, pair.chi_minus * frame);
        nc.chi = (pair.chi_plus.norm() + pair.chi_minus.norm()) / two;
        let mut vartheta = (p.arg() - m.arg()) / two;
        if (cis(vartheta) * nc.chi - p).norm() > (cis(vartheta) * nc.chi + p).norm() {
            vartheta = vartheta + T::PI();
        }
        nc.vartheta = vartheta;
    }
    pair
}

/// At `φ = nπ` at most one channel has a nonzero width. Its prefactor is
/// fixed by matching the reflection one half width above its resonance,
/// where the Lorentzian equals `χ/(i − 1)` (the resonance itself can be a
/// removable 0/0 point of the closed form).
fn single_channel<T: Real>(mut pair: LorentzPair<T>) -> LorentzPair<T> {
    let floor = T::tol(1e-12) * pair.gamma;
    let matched = |center: T, width: T| {
        closed_form(pair.topology, pair.phi, pair.gamma, center + width)
            .map(|(_, r)| r * c(-T::one(), T::one()))
            .unwrap_or(cr(T::zero()))
    };
    if pair.gamma_plus > floor {
        pair.chi_plus = matched(pair.delta_plus, pair.gamma_plus);
    }
    if pair.gamma_minus > floor {
        pair.chi_minus = matched(pair.delta_minus, pair.gamma_minus);
    }
    pair
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FanoRegime {
    /// `Γ₊/Γ₋ > 10`.
    PlusDominant,
    /// `Γ₋/Γ₊ > 10`.
    MinusDominant,
    None,
}

impl FanoRegime {
    pub fn name(self) -> &'static str {
        match self {
            FanoRegime::PlusDominant => "plus_dominant",
            FanoRegime::MinusDominant => "minus_dominant",
            FanoRegime::None => "none",
        }
    }
}

fn regime_of<T: Real>(pair: &LorentzPair<T>) -> FanoRegime {
    let ten = T::lit(10.0);
    let floor = T::tol(1e-12) * pair.gamma;
    if pair.gamma_plus <= floor || pair.gamma_minus <= floor {
        FanoRegime::None
    } else if pair.gamma_plus > ten * pair.gamma_minus {
        FanoRegime::PlusDominant
    } else if pair.gamma_minus > ten * pair.gamma_plus {
        FanoRegime::MinusDominant
    } else {
        FanoRegime::None
    }
}

/// Which width dominates by more than a factor 10.
pub fn fano_regime<T: Real>(topology: Topology, phi: T, gamma: T) -> FanoRegime {
    if is_decoupled_spacing(topology, phi) {
        return FanoRegime::None;
    }
    lorentz_decompose(topology, phi, gamma)
        .map(|p| regime_of(&p))
        .unwrap_or(FanoRegime::None)
}

/// Parameters of the Fano lineshape around the narrow resonance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FanoFit<T> {
    pub q: T,
    /// Prefactor `ℱ`.
    pub f_scale: T,
    /// Narrow resonance position.
    pub center: T,
    /// Narrow half width.
    pub width: T,
    /// True when the plus channel is the broad one.
    pub plus_broad: bool,
}

impl<T: Real> FanoFit<T> {
    /// Reduced detuning `ε = (Δ − center)/width`.
    pub fn epsilon(&self, delta: T) -> T {
        (delta - self.center) / self.width
    }

    /// `ℱ (q + ε)² / (1 + ε²)`.
    pub fn reflectance(&self, delta: T) -> T {
        let eps = self.epsilon(delta);
        self.f_scale * (self.q + eps).powi(2) / (T::one() + eps * eps)
    }
}

/// Fano parameters from a decomposition whose widths differ by at least 10x.
pub fn fano_fit<T: Real>(pair: &LorentzPair<T>) -> Result<FanoFit<T>, FanoError> {
    let plus_broad = pair.gamma_plus >= pair.gamma_minus;
    let (db, dn, gb, gn) = if plus_broad {
        (pair.delta_plus, pair.delta_minus, pair.gamma_plus, pair.gamma_minus)
    } else {
        (pair.delta_minus, pair.delta_plus, pair.gamma_minus, pair.gamma_plus)
    };
    if gn <= T::zero() {
        return Err(FanoError::DegenerateWidth);
    }
    let ratio = gb / gn;
    if ratio < T::lit(10.0) {
        return Err(FanoError::RegimeViolation {
            ratio: ratio.to_f64_lossy(),
        });
    }
    let detune = db - dn;
    let lorentz = gb * gb / (detune * detune + gb * gb);
    let (q, f_scale) = match pair.nested {
        Some(nc) => {
            let sign = if plus_broad { T::one() } else { -T::one() };
            let two_theta = T::lit(2.0) * nc.vartheta;
            (two_theta.cos() * (dn - db) / gb + sign * two_theta.sin(), nc.chi * nc.chi * lorentz)
        }
        None => (detune / gb, lorentz),
    };
    Ok(FanoFit {
        q,
        f_scale,
        center: dn,
        width: gn,
        plus_broad,
    })
}

/// Vacuum-Rabi approximation for braided spacing `φ = π/2 + delta_dev`.
/// Peaks sit at `Δ = −2γδ ± γ`, each with full width `4γδ²`.
pub fn rabi_approximation<T: Real>(delta_dev: T, delta: T, gamma: T) -> Result<ScatterPoint<T>, FanoError> {
    if delta_dev.abs() > T::lit(0.1) {
        return Err(FanoError::RabiOutOfRange(delta_dev.to_f64_lossy()));
    }
    let x = delta + T::lit(2.0) * gamma * delta_dev;
    let w = T::lit(4.0) * gamma * delta_dev * delta_dev;
    let den = im(x) * c(-w, x) + cr(gamma * gamma);
    let t = cr(gamma * gamma - x * x) / den;
    let r = cr(w * gamma) / den;
    Ok(ScatterPoint::new(delta, t, r))
}
