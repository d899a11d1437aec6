//! Small dense complex linear algebra: LU solve, null spaces and eigenvalues.
//!
//! Sized for the 10x10 scattering system and the 16x16 Liouvillian. Everything
//! is generic over [`Real`] so the same code serves `f32` and `f64`.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_traits::Zero;
use thiserror::Error;

use crate::real::{cr, Cplx, Real};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("matrix is singular (rank {rank} of {dim})")]
    Singular { rank: usize, dim: usize },
    #[error("eigenvalue iteration did not converge after {iterations} sweeps")]
    NoConvergence { iterations: usize },
    #[error("dimension mismatch: {0}")]
    Shape(String),
}

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<Cplx<T>>,
}

impl<T: Real> CMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Cplx::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = cr(T::one());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Cplx<T>) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[Cplx<T>] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn trace(&self) -> Cplx<T> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: Cplx<T>) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| x * s).collect(),
        }
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        let (r2, c2) = (other.rows, other.cols);
        Self::from_fn(self.rows * r2, self.cols * c2, |i, j| {
            self[(i / r2, j / c2)] * other[(i % r2, j % c2)]
        })
    }

    pub fn mul_vec(&self, v: &[Cplx<T>]) -> Vec<Cplx<T>> {
        assert_eq!(v.len(), self.cols, "mul_vec dimension");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(&a, &b)| a * b).sum())
            .collect()
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, z| m.max(z.norm()))
    }
}

impl<T> Index<(usize, usize)> for CMatrix<T> {
    type Output = Cplx<T>;
    fn index(&self, (i, j): (usize, usize)) -> &Cplx<T> {
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for CMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Cplx<T> {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Real> Mul for &CMatrix<T> {
    type Output = CMatrix<T>;
    fn mul(self, rhs: &CMatrix<T>) -> CMatrix<T> {
        assert_eq!(self.cols, rhs.rows, "matrix product dimension");
        let mut out = CMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] = out[(i, j)] + a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl<T: Real> Add for &CMatrix<T> {
    type Output = CMatrix<T>;
    fn add(self, rhs: &CMatrix<T>) -> CMatrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a + b).collect(),
        }
    }
}

impl<T: Real> Sub for &CMatrix<T> {
    type Output = CMatrix<T>;
    fn sub(self, rhs: &CMatrix<T>) -> CMatrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a - b).collect(),
        }
    }
}

/// Pivot threshold relative to the largest entry of the matrix.
fn pivot_floor<T: Real>(a: &CMatrix<T>) -> T {
    let n = a.rows.max(a.cols);
    a.max_abs() * T::epsilon() * T::lit(n as f64) * T::lit(64.0)
}

/// Solves `a x = b` by LU with partial pivoting.
pub fn solve<T: Real>(a: &CMatrix<T>, b: &[Cplx<T>]) -> Result<Vec<Cplx<T>>, LinalgError> {
    if !a.is_square() || b.len() != a.rows {
        return Err(LinalgError::Shape(format!(
            "{}x{} system with rhs of length {}",
            a.rows,
            a.cols,
            b.len()
        )));
    }
    let n = a.rows;
    let floor = pivot_floor(a);
    let mut m = a.clone();
    let mut x = b.to_vec();
    for k in 0..n {
        let (p, pmax) = (k..n)
            .map(|i| (i, m[(i, k)].norm()))
            .fold((k, -T::one()), |acc, v| if v.1 > acc.1 { v } else { acc });
        if !(pmax > floor) {
            return Err(LinalgError::Singular {
                rank: rank(a),
                dim: n,
            });
        }
        if p != k {
            for j in 0..n {
                let t = m[(k, j)];
                m[(k, j)] = m[(p, j)];
                m[(p, j)] = t;
            }
            x.swap(k, p);
        }
        let piv = m[(k, k)];
        for i in k + 1..n {
            let f = m[(i, k)] / piv;
            if f.is_zero() {
                continue;
            }
            for j in k..n {
                let v = m[(k, j)];
                m[(i, j)] = m[(i, j)] - f * v;
            }
            let v = x[k];
            x[i] = x[i] - f * v;
        }
    }
    for k in (0..n).rev() {
        let mut s = x[k];
        for j in k + 1..n {
            s = s - m[(k, j)] * x[j];
        }
        x[k] = s / m[(k, k)];
    }
    Ok(x)
}

/// Reduced row-echelon form with row pivoting. Returns the reduced matrix
/// and the pivot column of each nonzero row.
fn rref<T: Real>(a: &CMatrix<T>, floor: T) -> (CMatrix<T>, Vec<usize>) {
    let mut m = a.clone();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..m.cols {
        if r == m.rows {
            break;
        }
        let (p, pmax) = (r..m.rows)
            .map(|i| (i, m[(i, col)].norm()))
            .fold((r, -T::one()), |acc, v| if v.1 > acc.1 { v } else { acc });
        if !(pmax > floor) {
            for i in r..m.rows {
                m[(i, col)] = Cplx::zero();
            }
            continue;
        }
        for j in 0..m.cols {
            let t = m[(r, j)];
            m[(r, j)] = m[(p, j)];
            m[(p, j)] = t;
        }
        let piv = m[(r, col)];
        for j in 0..m.cols {
            m[(r, j)] = m[(r, j)] / piv;
        }
        for i in 0..m.rows {
            if i == r {
                continue;
            }
            let f = m[(i, col)];
            if f.is_zero() {
                continue;
            }
            for j in 0..m.cols {
                let v = m[(r, j)];
                m[(i, j)] = m[(i, j)] - f * v;
            }
        }
        pivots.push(col);
        r += 1;
    }
    (m, pivots)
}

/// Numerical rank.
pub fn rank<T: Real>(a: &CMatrix<T>) -> usize {
    rref(a, pivot_floor(a)).1.len()
}

/// Orthonormal basis of the right null space of `a`.
pub fn null_space<T: Real>(a: &CMatrix<T>) -> Vec<Vec<Cplx<T>>> {
    let (m, pivots) = rref(a, pivot_floor(a));
    let free: Vec<usize> = (0..a.cols).filter(|c| !pivots.contains(c)).collect();
    let mut basis: Vec<Vec<Cplx<T>>> = Vec::new();
    for &f in &free {
        let mut v = vec![Cplx::zero(); a.cols];
        v[f] = cr(T::one());
        for (row, &pc) in pivots.iter().enumerate() {
            v[pc] = -m[(row, f)];
        }
        orthonormalize_against(&mut v, &basis);
        basis.push(v);
    }
    basis
}

fn dot<T: Real>(u: &[Cplx<T>], v: &[Cplx<T>]) -> Cplx<T> {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

fn vnorm<T: Real>(v: &[Cplx<T>]) -> T {
    v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
}

fn orthonormalize_against<T: Real>(v: &mut [Cplx<T>], basis: &[Vec<Cplx<T>>]) {
    for b in basis {
        let p = dot(b, v);
        for (x, y) in v.iter_mut().zip(b) {
            *x = *x - p * y;
        }
    }
    let n = vnorm(v);
    for x in v.iter_mut() {
        *x = *x / n;
    }
}

/// Outcome of a possibly singular solve.
#[derive(Debug, Clone)]
pub struct MinNormSolution<T> {
    pub x: Vec<Cplx<T>>,
    pub null_space: Vec<Vec<Cplx<T>>>,
    /// `‖a x − b‖`, zero up to rounding when the system is consistent.
    pub residual: T,
}

/// Minimum-norm solution of a square system that may be singular.
pub fn solve_min_norm<T: Real>(a: &CMatrix<T>, b: &[Cplx<T>]) -> Result<MinNormSolution<T>, LinalgError> {
    if b.len() != a.rows {
        return Err(LinalgError::Shape("rhs length".into()));
    }
    let aug = CMatrix::from_fn(a.rows, a.cols + 1, |i, j| if j < a.cols { a[(i, j)] } else { b[i] });
    let (m, pivots) = rref(&aug, pivot_floor(a));
    let mut x = vec![Cplx::zero(); a.cols];
    for (row, &pc) in pivots.iter().enumerate() {
        if pc < a.cols {
            x[pc] = m[(row, a.cols)];
        }
    }
    let null = null_space(a);
    for v in &null {
        let p = dot(v, &x);
        for (xi, vi) in x.iter_mut().zip(v) {
            *xi = *xi - p * vi;
        }
    }
    let ax = a.mul_vec(&x);
    let residual = vnorm(&ax.iter().zip(b).map(|(p, q)| p - q).collect::<Vec<_>>());
    Ok(MinNormSolution {
        x,
        null_space: null,
        residual,
    })
}

/// All eigenvalues of a square matrix (Hessenberg reduction + shifted QR).
pub fn eigenvalues<T: Real>(a: &CMatrix<T>) -> Result<Vec<Cplx<T>>, LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::Shape("eigenvalues of non-square matrix".into()));
    }
    let n = a.rows;
    let mut h = hessenberg(a);
    let eps = T::epsilon();
    let max_iter = 60 * n.max(1);
    let mut total = 0usize;
    let mut since_deflation = 0usize;
    let mut hi = n.saturating_sub(1);
    while hi > 0 {
        let mut l = hi;
        while l > 0 {
            let s = h[(l - 1, l - 1)].norm() + h[(l, l)].norm();
            let s = if s.is_zero() { h.max_abs() } else { s };
            if h[(l, l - 1)].norm() <= eps * s {
                h[(l, l - 1)] = Cplx::zero();
                break;
            }
            l -= 1;
        }
        if l == hi {
            hi -= 1;
            since_deflation = 0;
            continue;
        }
        total += 1;
        since_deflation += 1;
        if total > max_iter {
            return Err(LinalgError::NoConvergence { iterations: total });
        }
        let mu = if since_deflation % 11 == 10 {
            // exceptional shift to break cycles
            h[(hi, hi)] + cr(h[(hi, hi - 1)].norm() * T::lit(0.75))
        } else {
            wilkinson_shift(&h, hi)
        };
        qr_step(&mut h, l, hi, mu);
    }
    Ok((0..n).map(|i| h[(i, i)]).collect())
}

fn wilkinson_shift<T: Real>(h: &CMatrix<T>, hi: usize) -> Cplx<T> {
    let a = h[(hi - 1, hi - 1)];
    let b = h[(hi - 1, hi)];
    let c = h[(hi, hi - 1)];
    let d = h[(hi, hi)];
    let two = T::lit(2.0);
    let half_diff = (a - d) / two;
    let disc = (half_diff * half_diff + b * c).sqrt();
    let mean = (a + d) / two;
    let m1 = mean + disc;
    let m2 = mean - disc;
    if (m1 - d).norm() < (m2 - d).norm() {
        m1
    } else {
        m2
    }
}

/// Rotation `G = [[c̄, s̄], [−s, c]]` with `G [x; y] = [r; 0]`.
fn givens<T: Real>(x: Cplx<T>, y: Cplx<T>) -> (Cplx<T>, Cplx<T>) {
    let r = (x.norm_sqr() + y.norm_sqr()).sqrt();
    if r.is_zero() {
        (cr(T::one()), Cplx::zero())
    } else {
        (x / r, y / r)
    }
}

fn qr_step<T: Real>(h: &mut CMatrix<T>, l: usize, hi: usize, mu: Cplx<T>) {
    for i in l..=hi {
        h[(i, i)] = h[(i, i)] - mu;
    }
    let mut rots = Vec::with_capacity(hi - l);
    for k in l..hi {
        let (c, s) = givens(h[(k, k)], h[(k + 1, k)]);
        for j in k..=hi {
            let x = h[(k, j)];
            let y = h[(k + 1, j)];
            h[(k, j)] = c.conj() * x + s.conj() * y;
            h[(k + 1, j)] = -s * x + c * y;
        }
        rots.push((c, s));
    }
    for (idx, &(c, s)) in rots.iter().enumerate() {
        let k = l + idx;
        let top = (k + 2).min(hi);
        for i in l..=top {
            let x = h[(i, k)];
            let y = h[(i, k + 1)];
            h[(i, k)] = x * c + y * s;
            h[(i, k + 1)] = -x * s.conj() + y * c.conj();
        }
    }
    for i in l..=hi {
        h[(i, i)] = h[(i, i)] + mu;
    }
}

/// Householder reduction to upper Hessenberg form (similarity transform).
fn hessenberg<T: Real>(a: &CMatrix<T>) -> CMatrix<T> {
    let n = a.rows;
    let mut h = a.clone();
    for k in 0..n.saturating_sub(2) {
        let x: Vec<Cplx<T>> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let xn = vnorm(&x);
        if xn.is_zero() {
            continue;
        }
        let phase = if x[0].norm().is_zero() {
            cr(T::one())
        } else {
            x[0] / x[0].norm()
        };
        let mut v = x.clone();
        v[0] = v[0] + phase * xn;
        let vn = vnorm(&v);
        if vn.is_zero() {
            continue;
        }
        for z in v.iter_mut() {
            *z = *z / vn;
        }
        let two = cr(T::lit(2.0));
        // H <- (I - 2vv*) H on rows k+1..
        for j in 0..n {
            let p: Cplx<T> = v.iter().enumerate().map(|(i, vi)| vi.conj() * h[(k + 1 + i, j)]).sum();
            for (i, vi) in v.iter().enumerate() {
                h[(k + 1 + i, j)] = h[(k + 1 + i, j)] - two * vi * p;
            }
        }
        // H <- H (I - 2vv*) on columns k+1..
        for i in 0..n {
            let p: Cplx<T> = v.iter().enumerate().map(|(j, vj)| h[(i, k + 1 + j)] * vj).sum();
            for (j, vj) in v.iter().enumerate() {
                h[(i, k + 1 + j)] = h[(i, k + 1 + j)] - two * p * vj.conj();
            }
        }
        for i in k + 2..n {
            h[(i, k)] = Cplx::zero();
        }
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::c;

    fn sample(n: usize, seed: u64) -> CMatrix<f64> {
        let mut s = seed;
        let mut next = move || {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((s >> 11) as f64 / (1u64 << 53) as f64) - 0.5
        };
        CMatrix::from_fn(n, n, |_, _| c(next(), next()))
    }

    #[test]
    fn solve_recovers_known_solution() {
        let a = sample(10, 3);
        let x: Vec<_> = (0..10).map(|k| c(k as f64, -0.5 * k as f64)).collect();
        let b = a.mul_vec(&x);
        let y = solve(&a, &b).unwrap();
        for (p, q) in x.iter().zip(&y) {
            assert!((p - q).norm() < 1e-11);
        }
    }

    #[test]
    fn singular_is_reported() {
        let mut a = sample(4, 1);
        for j in 0..4 {
            a[(3, j)] = a[(0, j)] * 2.0;
        }
        match solve(&a, &[c(1.0, 0.0); 4]) {
            Err(LinalgError::Singular { rank, dim }) => assert_eq!((rank, dim), (3, 4)),
            other => panic!("expected singular, got {other:?}"),
        }
        let ns = null_space(&a);
        assert_eq!(ns.len(), 1);
        let r = a.mul_vec(&ns[0]);
        assert!(r.iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn min_norm_solution_is_orthogonal_to_null_space() {
        let mut a = sample(5, 7);
        for j in 0..5 {
            a[(4, j)] = a[(1, j)] + a[(2, j)];
        }
        let x0: Vec<_> = (0..5).map(|k| c(1.0 + k as f64, 0.3)).collect();
        let b = a.mul_vec(&x0);
        let sol = solve_min_norm(&a, &b).unwrap();
        assert!(sol.residual < 1e-12);
        assert_eq!(sol.null_space.len(), 1);
        assert!(dot(&sol.null_space[0], &sol.x).norm() < 1e-12);
    }

    #[test]
    fn eigenvalues_of_triangular_matrix_are_diagonal() {
        let mut a = sample(6, 11);
        for i in 0..6 {
            for j in 0..i {
                a[(i, j)] = c(0.0, 0.0);
            }
        }
        let mut ev = eigenvalues(&a).unwrap();
        let mut diag: Vec<_> = (0..6).map(|i| a[(i, i)]).collect();
        let key = |z: &Cplx<f64>| (z.re * 1e6).round() as i64 * 1_000_000 + (z.im * 1e6).round() as i64;
        ev.sort_by_key(key);
        diag.sort_by_key(key);
        for (p, q) in ev.iter().zip(&diag) {
            assert!((p - q).norm() < 1e-10);
        }
    }

    #[test]
    fn eigenvalue_sum_and_product_match_trace_and_det() {
        let a = sample(16, 5);
        let ev = eigenvalues(&a).unwrap();
        let s: Cplx<f64> = ev.iter().sum();
        assert!((s - a.trace()).norm() < 1e-10);
    }

    #[test]
    fn kron_dimensions_and_entries() {
        let a = CMatrix::from_fn(2, 2, |i, j| c((i * 2 + j) as f64, 0.0));
        let i2 = CMatrix::<f64>::identity(2);
        let k = a.kron(&i2);
        assert_eq!((k.rows(), k.cols()), (4, 4));
        assert_eq!(k[(2, 2)], c(3.0, 0.0));
        assert_eq!(k[(1, 3)], c(1.0, 0.0));
        assert_eq!(k[(1, 2)], c(0.0, 0.0));
    }
}
