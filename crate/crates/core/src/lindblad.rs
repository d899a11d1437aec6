//! Coherent-drive master equation for the two atoms.
//!
//! Basis order is `{gg, ge, eg, ee}` (index `2·n_a + n_b`) and density
//! matrices are vectorised by stacking columns, so `vec(AρB) = (Bᵀ ⊗ A) vec ρ`.
//! All propagation phases are measured from the leftmost point `a1`; the
//! rightmost point is `N′`.
//!
//! The input field has amplitude `α = sqrt(|α|²)` (real, photons per unit
//! time) and drives atom `j` with `Ω_j = α Σ_n sqrt(2γ_jn) e^{iθ_jn}`.

use thiserror::Error;

use crate::eit::drive_strengths;
use crate::linalg::{eigenvalues, solve, CMatrix, LinalgError};
use crate::model::{characteristics, ModelError, SystemConfig};
use crate::real::{cis, cr, im, Cplx, Real};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LindbladError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("drive amplitude_sq must be finite and non-negative, got {0}")]
    BadDrive(f64),
    #[error("input-output amplitudes need a nonzero drive")]
    ZeroDrive,
    #[error("steady state is not unique: {dim} eigenvalues of the generator vanish")]
    NonUnique { dim: usize },
    #[error("resolvent is singular at nu = {nu}")]
    SingularResolvent { nu: f64 },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Coherent probe: `|α|²` and the detuning `Δ_a` of the drive from atom a.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveSpec<T> {
    pub amplitude_sq: T,
    pub frequency_detuning: T,
}

impl<T: Real> DriveSpec<T> {
    pub fn new(amplitude_sq: T, frequency_detuning: T) -> Result<Self, LindbladError> {
        let d = Self {
            amplitude_sq,
            frequency_detuning,
        };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<(), LindbladError> {
        if self.amplitude_sq.is_finite() && self.amplitude_sq >= T::zero() && self.frequency_detuning.is_finite() {
            Ok(())
        } else {
            Err(LindbladError::BadDrive(self.amplitude_sq.to_f64_lossy()))
        }
    }

    pub fn alpha(&self) -> T {
        self.amplitude_sq.sqrt()
    }
}

/// Basis indices.
pub const GG: usize = 0;
pub const GE: usize = 1;
pub const EG: usize = 2;
pub const EE: usize = 3;

/// Lowering operators `(σ_a, σ_b)` on the two-qubit space.
pub fn lowering_ops<T: Real>() -> (CMatrix<T>, CMatrix<T>) {
    let one = cr(T::one());
    let mut sm = CMatrix::zeros(2, 2);
    sm[(0, 1)] = one;
    let id = CMatrix::identity(2);
    (sm.kron(&id), id.kron(&sm))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SteadyState<T> {
    pub rho: CMatrix<T>,
}

impl<T: Real> SteadyState<T> {
    /// `Tr(O ρ)`.
    pub fn expect(&self, op: &CMatrix<T>) -> Cplx<T> {
        (op * &self.rho).trace()
    }

    pub fn population(&self, index: usize) -> T {
        self.rho[(index, index)].re
    }

    /// Largest deviation from Hermiticity.
    pub fn hermiticity_error(&self) -> T {
        (&self.rho - &self.rho.adjoint()).max_abs()
    }
}

/// Output of the driven steady state read through the input-output relations.
#[derive(Debug, Clone, PartialEq)]
pub struct LindbladResult<T> {
    pub steady: SteadyState<T>,
    pub t: Cplx<T>,
    pub r: Cplx<T>,
    pub transmittance: T,
    pub reflectance: T,
    /// Incoherent output flux divided by `|α|²`.
    pub inelastic_flux: T,
    /// `|F/|α|² − (1 − T − R)|`.
    pub conservation_residual: T,
    /// Doubly excited population `⟨ee|ρ|ee⟩`.
    pub p_ee: T,
}

struct Geometry<T> {
    /// `(atom index, relative phase, rate)` per point.
    points: Vec<(usize, T, T)>,
    rightmost: T,
}

fn geometry<T: Real>(cfg: &SystemConfig<T>) -> Geometry<T> {
    let reference = cfg.atom_a.left().phase;
    let mut points = Vec::with_capacity(4);
    for (j, atom) in [&cfg.atom_a, &cfg.atom_b].into_iter().enumerate() {
        for p in &atom.points {
            points.push((j, p.phase - reference, p.rate));
        }
    }
    let rightmost = points.iter().fold(T::neg_infinity(), |m, p| m.max(p.1));
    Geometry { points, rightmost }
}

/// Adds `w·(A ρ B† − ½{B†A, ρ})` to the generator.
fn add_dissipator<T: Real>(l: &mut CMatrix<T>, a: &CMatrix<T>, b: &CMatrix<T>, w: T) {
    let id = CMatrix::identity(4);
    let bd = b.adjoint();
    let bda = &bd * a;
    let half = T::lit(0.5);
    let jump = b.adjoint().transpose().kron(a);
    let left = id.kron(&bda);
    let right = bda.transpose().kron(&id);
    for i in 0..16 {
        for k in 0..16 {
            l[(i, k)] = l[(i, k)] + (jump[(i, k)] - (left[(i, k)] + right[(i, k)]) * half) * w;
        }
    }
}

/// Drive Hamiltonian in the frame of the probe.
pub fn drive_hamiltonian<T: Real>(cfg: &SystemConfig<T>, drive: &DriveSpec<T>) -> Result<CMatrix<T>, LindbladError> {
    drive.validate()?;
    let ch = characteristics(cfg)?;
    let (sa, sb) = lowering_ops::<T>();
    let (det_a, det_b) = cfg.detunings(drive.frequency_detuning);
    let (om_a, om_b) = drive_strengths(cfg);
    let alpha = drive.alpha();
    let mut h = CMatrix::zeros(4, 4);
    let half = T::lit(0.5);
    for (s, d, om) in [(&sa, det_a - ch.lamb_a, om_a * alpha), (&sb, det_b - ch.lamb_b, om_b * alpha)] {
        let sp = s.adjoint();
        h = &h - &(&sp * s).scale(cr(d));
        // −(i/2)(Ω σ⁺ − Ω* σ)
        h = &h - &(&sp.scale(om) - &s.scale(om.conj())).scale(im(half));
    }
    let exchange = &(&sa.adjoint() * &sb) + &(&sb.adjoint() * &sa);
    Ok(&h + &exchange.scale(cr(ch.g_ab)))
}

/// The 16x16 Lindblad generator acting on column-stacked `ρ`.
pub fn build_liouvillian<T: Real>(cfg: &SystemConfig<T>, drive: &DriveSpec<T>) -> Result<CMatrix<T>, LindbladError> {
    let ch = characteristics(cfg)?;
    let h = drive_hamiltonian(cfg, drive)?;
    let id = CMatrix::identity(4);
    let mut l = (&id.kron(&h) - &h.transpose().kron(&id)).scale(im(-T::one()));
    let (sa, sb) = lowering_ops::<T>();
    add_dissipator(&mut l, &sa, &sa, ch.gamma_a);
    add_dissipator(&mut l, &sb, &sb, ch.gamma_b);
    add_dissipator(&mut l, &sa, &sb, ch.gamma_ab);
    add_dissipator(&mut l, &sb, &sa, ch.gamma_ab);
    Ok(l)
}

fn unstack<T: Real>(x: &[Cplx<T>]) -> CMatrix<T> {
    CMatrix::from_fn(4, 4, |i, j| x[i + 4 * j])
}

fn stack<T: Real>(m: &CMatrix<T>) -> Vec<Cplx<T>> {
    (0..16).map(|k| m[(k % 4, k / 4)]).collect()
}

/// Number of generator eigenvalues with `|λ| < tol`.
pub fn zero_eigenvalue_count<T: Real>(liouvillian: &CMatrix<T>, tol: T) -> Result<usize, LindbladError> {
    Ok(eigenvalues(liouvillian)?.iter().filter(|z| z.norm() < tol).count())
}

/// Unique steady state, found by replacing one redundant row of `L ρ = 0`
/// with the trace condition.
pub fn steady_state<T: Real>(liouvillian: &CMatrix<T>) -> Result<SteadyState<T>, LindbladError> {
    let zeros = zero_eigenvalue_count(liouvillian, T::tol(1e-10))?;
    if zeros != 1 {
        return Err(LindbladError::NonUnique { dim: zeros });
    }
    let mut m = liouvillian.clone();
    for k in 0..16 {
        m[(0, k)] = cr(T::zero());
    }
    for k in [0, 5, 10, 15] {
        m[(0, k)] = cr(T::one());
    }
    let mut rhs = vec![cr(T::zero()); 16];
    rhs[0] = cr(T::one());
    let x = solve(&m, &rhs)?;
    let rho = unstack(&x);
    let half = cr(T::lit(0.5));
    Ok(SteadyState {
        rho: (&rho + &rho.adjoint()).scale(half),
    })
}

/// Output-channel weights: `b_t = α e^{iθ_N′} + Σ_j c_j σ_j`,
/// `b_r = Σ_j d_j σ_j`.
fn channel_weights<T: Real>(cfg: &SystemConfig<T>) -> ([Cplx<T>; 2], [Cplx<T>; 2], T) {
    let geo = geometry(cfg);
    let half = T::lit(0.5);
    let mut c = [cr(T::zero()); 2];
    let mut d = [cr(T::zero()); 2];
    for &(j, theta, rate) in &geo.points {
        let v = (half * rate).sqrt();
        c[j] = c[j] + cis(geo.rightmost - theta) * v;
        d[j] = d[j] + cis(theta) * v;
    }
    (c, d, geo.rightmost)
}

/// `Σ_jk w_j* w_k (⟨σ_j⁺σ_k⟩ − ⟨σ_j⁺⟩⟨σ_k⟩)`.
fn incoherent<T: Real>(ss: &SteadyState<T>, ops: &[CMatrix<T>; 2], mean: &[Cplx<T>; 2], w: &[Cplx<T>; 2]) -> T {
    let mut s = cr(T::zero());
    for j in 0..2 {
        for k in 0..2 {
            let corr = ss.expect(&(&ops[j].adjoint() * &ops[k])) - mean[j].conj() * mean[k];
            s = s + w[j].conj() * w[k] * corr;
        }
    }
    s.re
}

/// Steady-state transmission, reflection and inelastic flux.
pub fn scattering_from_master<T: Real>(
    cfg: &SystemConfig<T>,
    drive: &DriveSpec<T>,
) -> Result<LindbladResult<T>, LindbladError> {
    drive.validate()?;
    if drive.amplitude_sq <= T::zero() {
        return Err(LindbladError::ZeroDrive);
    }
    let l = build_liouvillian(cfg, drive)?;
    let steady = steady_state(&l)?;
    let (sa, sb) = lowering_ops::<T>();
    let ops = [sa, sb];
    let mean = [steady.expect(&ops[0]), steady.expect(&ops[1])];
    let (c, d, rightmost) = channel_weights(cfg);
    let alpha = drive.alpha();
    let emitted = |w: &[Cplx<T>; 2]| (w[0] * mean[0] + w[1] * mean[1]) / alpha;
    let t = cis(rightmost) + emitted(&c);
    let r = emitted(&d);
    let flux = (incoherent(&steady, &ops, &mean, &c) + incoherent(&steady, &ops, &mean, &d)) / drive.amplitude_sq;
    let (tt, rr) = (t.norm_sqr(), r.norm_sqr());
    Ok(LindbladResult {
        p_ee: steady.population(EE),
        steady,
        t,
        r,
        transmittance: tt,
        reflectance: rr,
        inelastic_flux: flux,
        conservation_residual: (flux - (T::one() - tt - rr)).abs(),
    })
}

/// Incoherent power spectrum of the two output channels,
/// `S(ν) = (1/2π) ∫ e^{−iντ} ⟨δb†(τ) δb(0)⟩ dτ`, normalised so that `∫S dν`
/// equals the incoherent flux `⟨δb†δb⟩`. `ν` is measured from the drive.
#[derive(Debug, Clone)]
pub struct InelasticSpectrum<T> {
    /// `L − |ρ_ss⟩⟨⟨I|`, regular at `ν = 0`.
    shifted: CMatrix<T>,
    /// Per channel: `δb†` and `vec((b − ⟨b⟩) ρ_ss)`.
    channels: [(CMatrix<T>, Vec<Cplx<T>>); 2],
    /// Per channel `⟨δb†δb⟩`.
    pub moments: [T; 2],
}

impl<T: Real> InelasticSpectrum<T> {
    pub fn new(cfg: &SystemConfig<T>, drive: &DriveSpec<T>) -> Result<Self, LindbladError> {
        let l = build_liouvillian(cfg, drive)?;
        let ss = steady_state(&l)?;
        let rho_vec = stack(&ss.rho);
        let mut shifted = l;
        for i in 0..16 {
            for k in [0, 5, 10, 15] {
                shifted[(i, k)] = shifted[(i, k)] - rho_vec[i];
            }
        }
        let (sa, sb) = lowering_ops::<T>();
        let (c, d, _) = channel_weights(cfg);
        let id = CMatrix::identity(4);
        let channel = |w: &[Cplx<T>; 2]| {
            let b = &sa.scale(w[0]) + &sb.scale(w[1]);
            let mean = ss.expect(&b);
            let db = &b - &id.scale(mean);
            let x = stack(&(&db * &ss.rho));
            let moment = ss.expect(&(&db.adjoint() * &db)).re;
            ((db.adjoint(), x), moment)
        };
        let (ct, mt) = channel(&c);
        let (cr_, mr) = channel(&d);
        Ok(Self {
            shifted,
            channels: [ct, cr_],
            moments: [mt, mr],
        })
    }

    /// `(S_t(ν), S_r(ν))`.
    pub fn at(&self, nu: T) -> Result<(T, T), LindbladError> {
        let mut m = self.shifted.scale(cr(-T::one()));
        for k in 0..16 {
            m[(k, k)] = m[(k, k)] + im(nu);
        }
        let mut out = [T::zero(); 2];
        for (slot, (a, x)) in out.iter_mut().zip(&self.channels) {
            let y = solve(&m, x).map_err(|_| LindbladError::SingularResolvent { nu: nu.to_f64_lossy() })?;
            *slot = (a * &unstack(&y)).trace().re / T::PI();
        }
        Ok((out[0], out[1]))
    }
}

/// Spectrum on a grid of `ν` values: rows of `(ν, S_t, S_r)`.
pub fn inelastic_spectrum<T: Real>(
    cfg: &SystemConfig<T>,
    drive: &DriveSpec<T>,
    nu_grid: &[T],
) -> Result<Vec<(T, T, T)>, LindbladError> {
    let spec = InelasticSpectrum::new(cfg, drive)?;
    nu_grid
        .iter()
        .map(|&nu| spec.at(nu).map(|(st, sr)| (nu, st, sr)))
        .collect()
}
