//! Real-space scattering solver used as an independent check of the
//! closed-form amplitudes.
//!
//! The photon wavefunction is piecewise plane-wave between the four coupling
//! points: right-movers `u_0 = 1, u_1, u_2, u_3, u_4 = t` and left-movers
//! `w_0 = r, w_1, w_2, w_3, w_4 = 0`. Each point contributes a jump
//! proportional to the owning atom's amplitude, and each atom sees the mean of
//! the field on both sides of its points. The result is a 10x10 linear
//! system in position order, so one assembly serves every topology.

use crate::linalg::{solve, solve_min_norm, CMatrix, LinalgError};
use crate::model::{AtomLabel, SystemConfig};
use crate::real::{cis, cr, im, Cplx, Real};
use crate::scattering::{ScatterError, ScatterPoint};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RealSpaceSolution<T> {
    pub delta_a: T,
    /// Right-moving amplitudes between consecutive points.
    pub segment_t: [Cplx<T>; 3],
    /// Left-moving amplitudes between consecutive points.
    pub segment_r: [Cplx<T>; 3],
    pub t: Cplx<T>,
    pub r: Cplx<T>,
    pub f_a: Cplx<T>,
    pub f_b: Cplx<T>,
    /// Set when the system was singular (a bound state decoupled from the
    /// outgoing channels) and the minimum-norm solution was returned.
    pub degenerate: bool,
}

impl<T: Real> RealSpaceSolution<T> {
    pub fn scatter_point(&self) -> ScatterPoint<T> {
        ScatterPoint::new(self.delta_a, self.t, self.r)
    }
}

const F_A: usize = 8;
const F_B: usize = 9;
const T_IDX: usize = 3;
const R_IDX: usize = 4;

/// Unknown index of `u_m`, or `None` for the incident `u_0 = 1`.
fn u_idx(m: usize) -> Option<usize> {
    (m > 0).then(|| m - 1)
}

/// Unknown index of `w_m`, or `None` for the boundary `w_4 = 0`.
fn w_idx(m: usize) -> Option<usize> {
    (m < 4).then(|| 4 + m)
}

/// Assembles the system `M x = b`.
pub fn assemble<T: Real>(cfg: &SystemConfig<T>, delta_a: T) -> (CMatrix<T>, Vec<Cplx<T>>) {
    let pts = cfg.points_in_order();
    let (det_a, det_b) = cfg.detunings(delta_a);
    let mut m = CMatrix::zeros(10, 10);
    let mut rhs = vec![cr(T::zero()); 10];
    let one = cr(T::one());
    let half = T::lit(0.5);
    let f_of = |label: AtomLabel| if label == AtomLabel::A { F_A } else { F_B };

    for (k, p) in pts.iter().enumerate() {
        let mpos = k + 1;
        let v = p.point.strength();
        let theta = p.point.phase;
        let f = f_of(p.atom);
        // u_m − u_{m−1} + iV e^{−iθ} f = 0
        let row = 2 * k;
        m[(row, u_idx(mpos).unwrap())] = m[(row, u_idx(mpos).unwrap())] + one;
        match u_idx(mpos - 1) {
            Some(i) => m[(row, i)] = m[(row, i)] - one,
            None => rhs[row] = rhs[row] + one,
        }
        m[(row, f)] = m[(row, f)] + im(v) * cis(-theta);
        // w_m − w_{m−1} − iV e^{iθ} f = 0
        let row = 2 * k + 1;
        if let Some(i) = w_idx(mpos) {
            m[(row, i)] = m[(row, i)] + one;
        }
        let i = w_idx(mpos - 1).unwrap();
        m[(row, i)] = m[(row, i)] - one;
        m[(row, f)] = m[(row, f)] - im(v) * cis(theta);
    }

    for (row, label, det) in [(8, AtomLabel::A, det_a), (9, AtomLabel::B, det_b)] {
        let f = f_of(label);
        m[(row, f)] = cr(-det);
        for (k, p) in pts.iter().enumerate().filter(|(_, p)| p.atom == label) {
            let mpos = k + 1;
            let v = p.point.strength();
            let right = cis(p.point.phase) * (v * half);
            let left = cis(-p.point.phase) * (v * half);
            for idx in [u_idx(mpos - 1), u_idx(mpos)] {
                match idx {
                    Some(i) => m[(row, i)] = m[(row, i)] + right,
                    None => rhs[row] = rhs[row] - right,
                }
            }
            for i in [w_idx(mpos - 1), w_idx(mpos)].into_iter().flatten() {
                m[(row, i)] = m[(row, i)] + left;
            }
        }
    }
    (m, rhs)
}

/// Solves the real-space system at probe detuning `delta_a`.
pub fn solve_real_space<T: Real>(cfg: &SystemConfig<T>, delta_a: T) -> Result<RealSpaceSolution<T>, ScatterError> {
    cfg.validate()?;
    let (m, rhs) = assemble(cfg, delta_a);
    let (x, degenerate) = match solve(&m, &rhs) {
        Ok(x) => (x, false),
        Err(LinalgError::Singular { .. }) => {
            let sol = solve_min_norm(&m, &rhs)?;
            let tol = T::tol(1e-8);
            let touches_output = sol
                .null_space
                .iter()
                .any(|v| v[T_IDX].norm() > tol || v[R_IDX].norm() > tol);
            let scale = T::one() + rhs.iter().fold(T::zero(), |s, z| s.max(z.norm()));
            if touches_output || sol.residual > tol * scale {
                return Err(ScatterError::Singular {
                    null_dim: sol.null_space.len(),
                });
            }
            (sol.x, true)
        }
        Err(e) => return Err(e.into()),
    };
    Ok(RealSpaceSolution {
        delta_a,
        segment_t: [x[0], x[1], x[2]],
        segment_r: [x[5], x[6], x[7]],
        t: x[T_IDX],
        r: x[R_IDX],
        f_a: x[F_A],
        f_b: x[F_B],
        degenerate,
    })
}
