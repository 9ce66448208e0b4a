//! Small dense linear algebra: complex matrices with a one-sided Jacobi SVD,
//! and a real Cholesky factorization.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::math;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Dense complex matrix, column-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, ONE);
        }
        m
    }

    pub fn from_fn<F: FnMut(usize, usize) -> Complex64>(rows: usize, cols: usize, mut f: F) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for c in 0..cols {
            for r in 0..rows {
                data.push(f(r, c));
            }
        }
        CMatrix { rows, cols, data }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[c * self.rows + r]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Complex64) {
        self.data[c * self.rows + r] = v;
    }

    #[inline]
    pub fn col(&self, c: usize) -> &[Complex64] {
        &self.data[c * self.rows..(c + 1) * self.rows]
    }

    #[inline]
    fn col_mut(&mut self, c: usize) -> &mut [Complex64] {
        &mut self.data[c * self.rows..(c + 1) * self.rows]
    }

    fn two_cols_mut(&mut self, p: usize, q: usize) -> (&mut [Complex64], &mut [Complex64]) {
        debug_assert!(p < q);
        let rows = self.rows;
        let (head, tail) = self.data.split_at_mut(q * rows);
        (&mut head[p * rows..(p + 1) * rows], &mut tail[..rows])
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> CMatrix {
        CMatrix::from_fn(self.cols, self.rows, |r, c| self.get(c, r).conj())
    }

    pub fn conj(&self) -> CMatrix {
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| v.conj()).collect(),
        }
    }

    pub fn matmul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(self.cols, other.rows, "inner dimensions must agree");
        let mut out = CMatrix::zeros(self.rows, other.cols);
        for j in 0..other.cols {
            let oc = out.col_mut(j);
            for k in 0..self.cols {
                let b = other.get(k, j);
                if b == ZERO {
                    continue;
                }
                let ac = &self.data[k * self.rows..(k + 1) * self.rows];
                for (o, a) in oc.iter_mut().zip(ac) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn fro_norm(&self) -> f64 {
        math::sqrt(self.data.iter().map(|v| v.norm_sqr()).sum())
    }

    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0, |m, (a, b)| m.max((a - b).norm()))
    }
}

/// Singular value decomposition `A = U · diag(s) · Vᴴ` with `s` sorted
/// non-increasing.
///
/// `u` is `rows x ku`, `v` is `cols x kv`; for a thin decomposition both
/// carry `min(rows, cols)` columns, a full one makes them square.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: CMatrix,
    pub s: Vec<f64>,
    pub v: CMatrix,
}

impl Svd {
    /// `U · diag(f(s)) · Vᴴ` over the leading `s.len()` columns.
    pub fn reconstruct_with<F: Fn(f64) -> f64>(&self, f: F) -> CMatrix {
        let k = self.s.len();
        let rows = self.u.rows();
        let cols = self.v.rows();
        let mut out = CMatrix::zeros(rows, cols);
        for (idx, &sv) in self.s.iter().enumerate().take(k) {
            let w = f(sv);
            if w == 0.0 {
                continue;
            }
            let uc = self.u.col(idx);
            let vc = self.v.col(idx);
            for c in 0..cols {
                let scale = vc[c].conj() * w;
                let oc = out.col_mut(c);
                for (o, u) in oc.iter_mut().zip(uc) {
                    *o += u * scale;
                }
            }
        }
        out
    }
}

const MAX_SWEEPS: usize = 80;

/// One-sided (Hestenes) Jacobi SVD.
///
/// `full` requests square `U` and `V`; otherwise both are thin. Returns
/// `None` if the sweeps fail to converge.
pub fn svd(a: &CMatrix, full: bool) -> Option<Svd> {
    if a.rows() >= a.cols() {
        svd_tall(a, full, true)
    } else {
        // A = (Aᴴ)ᴴ = (U' Σ V'ᴴ)ᴴ = V' Σ U'ᴴ
        let t = svd_tall(&a.adjoint(), full, true)?;
        Some(Svd {
            u: t.v,
            s: t.s,
            v: t.u,
        })
    }
}

/// Singular values only, sorted non-increasing.
pub fn singular_values(a: &CMatrix) -> Option<Vec<f64>> {
    let t = if a.rows() >= a.cols() {
        svd_tall(a, false, false)?
    } else {
        svd_tall(&a.adjoint(), false, false)?
    };
    Some(t.s)
}

fn svd_tall(a: &CMatrix, full: bool, want_vectors: bool) -> Option<Svd> {
    let m = a.rows();
    let n = a.cols();
    debug_assert!(m >= n);
    let mut g = a.clone();
    let mut v = if want_vectors {
        CMatrix::identity(n)
    } else {
        CMatrix::zeros(0, 0)
    };
    let eps = f64::EPSILON;
    // columns below this norm are numerically zero; rotating them only churns
    let total: f64 = a.data.iter().map(|z| z.norm_sqr()).sum();
    let negligible = eps * eps * total;
    // the computed off-diagonal carries rounding of order m·eps
    let tol = eps * m as f64;

    let mut converged = n < 2;
    for _ in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let mut rotated = false;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let (gp, gq) = g.two_cols_mut(p, q);
                let mut alpha = 0.0;
                let mut beta = 0.0;
                let mut gamma = ZERO;
                for (x, y) in gp.iter().zip(gq.iter()) {
                    alpha += x.norm_sqr();
                    beta += y.norm_sqr();
                    gamma += x.conj() * y;
                }
                let gabs = gamma.norm();
                if gabs == 0.0
                    || alpha <= negligible
                    || beta <= negligible
                    || gabs <= tol * math::sqrt(alpha) * math::sqrt(beta)
                {
                    continue;
                }
                rotated = true;
                // phase that makes the off-diagonal term real and positive
                let phase = gamma / gabs;
                let zeta = (beta - alpha) / (2.0 * gabs);
                let t = if zeta >= 0.0 {
                    1.0 / (zeta + math::hypot(1.0, zeta))
                } else {
                    -1.0 / (-zeta + math::hypot(1.0, zeta))
                };
                let c = 1.0 / math::hypot(1.0, t);
                let s = c * t;
                let pc = phase.conj();
                for (x, y) in gp.iter_mut().zip(gq.iter_mut()) {
                    let yq = *y * pc;
                    let xp = *x;
                    *x = xp * c - yq * s;
                    *y = xp * s + yq * c;
                }
                if want_vectors {
                    let (vp, vq) = v.two_cols_mut(p, q);
                    for (x, y) in vp.iter_mut().zip(vq.iter_mut()) {
                        let yq = *y * pc;
                        let xp = *x;
                        *x = xp * c - yq * s;
                        *y = xp * s + yq * c;
                    }
                }
            }
        }
        if !rotated {
            converged = true;
        }
    }
    if !converged {
        return None;
    }

    let norms: Vec<f64> = (0..n)
        .map(|j| math::sqrt(g.col(j).iter().map(|z| z.norm_sqr()).sum()))
        .collect();
    if norms.iter().any(|x| !x.is_finite()) {
        return None;
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].partial_cmp(&norms[i]).unwrap_or(core::cmp::Ordering::Equal));
    let s: Vec<f64> = order.iter().map(|&j| norms[j]).collect();

    if !want_vectors {
        return Some(Svd {
            u: CMatrix::zeros(0, 0),
            s,
            v: CMatrix::zeros(0, 0),
        });
    }

    let smax = s.first().copied().unwrap_or(0.0);
    let cutoff = smax * eps * (m.max(n) as f64);
    let ucols = if full { m } else { n };
    let mut u = CMatrix::zeros(m, ucols);
    let mut filled = 0;
    for (idx, &j) in order.iter().enumerate() {
        if s[idx] <= cutoff || s[idx] == 0.0 {
            break;
        }
        let inv = 1.0 / s[idx];
        let dst = u.col_mut(idx);
        for (d, x) in dst.iter_mut().zip(g.col(j)) {
            *d = x * inv;
        }
        filled = idx + 1;
    }
    // re-orthogonalize, then complete with basis vectors
    orthonormalize_prefix(&mut u, filled);
    complete_basis(&mut u, filled);

    let vs = CMatrix::from_fn(n, n, |r, c| v.get(r, order[c]));
    Some(Svd { u, s, v: vs })
}

/// Modified Gram-Schmidt (two passes) over the first `k` columns.
fn orthonormalize_prefix(u: &mut CMatrix, k: usize) {
    for j in 0..k {
        for _ in 0..2 {
            for i in 0..j {
                let (ci, cj) = u.two_cols_mut(i, j);
                let proj: Complex64 = ci.iter().zip(cj.iter()).map(|(a, b)| a.conj() * b).sum();
                for (b, a) in cj.iter_mut().zip(ci.iter()) {
                    *b -= a * proj;
                }
            }
        }
        let nrm = math::sqrt(u.col(j).iter().map(|z| z.norm_sqr()).sum());
        for z in u.col_mut(j) {
            *z /= nrm;
        }
    }
}

/// Fills columns `k..` with orthonormal vectors drawn from the standard basis.
fn complete_basis(u: &mut CMatrix, mut k: usize) {
    let m = u.rows();
    let target = u.cols();
    let mut candidate = 0;
    while k < target && candidate < m {
        let mut e = vec![ZERO; m];
        e[candidate] = ONE;
        candidate += 1;
        for _ in 0..2 {
            for i in 0..k {
                let ci = u.col(i);
                let proj: Complex64 = ci.iter().zip(e.iter()).map(|(a, b)| a.conj() * b).sum();
                for (b, a) in e.iter_mut().zip(ci.iter()) {
                    *b -= a * proj;
                }
            }
        }
        let nrm = math::sqrt(e.iter().map(|z| z.norm_sqr()).sum());
        // a unit vector projected onto the complement keeps a component of at
        // least sqrt(1 - k/m) on average; reject near-dependent candidates
        if nrm < 0.5 / math::sqrt(m as f64) {
            continue;
        }
        for (d, x) in u.col_mut(k).iter_mut().zip(&e) {
            *d = x / nrm;
        }
        k += 1;
    }
    debug_assert_eq!(k, target, "basis completion ran out of candidates");
}

/// Cholesky factor `L` of a symmetric positive definite matrix, `A = L Lᵀ`.
#[derive(Debug, Clone)]
pub struct Cholesky {
    n: usize,
    /// Row-major lower triangle.
    l: Vec<f64>,
}

impl Cholesky {
    /// Factors the row-major `n x n` matrix `a`; only the lower triangle is read.
    pub fn new(n: usize, a: &[f64]) -> Result<Self> {
        assert_eq!(a.len(), n * n);
        let mut l = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let mut sum = a[i * n + j];
                for k in 0..j {
                    sum -= l[i * n + k] * l[j * n + k];
                }
                if i == j {
                    if !(sum > 0.0) || !sum.is_finite() {
                        return Err(Error::Factorization { pivot: i });
                    }
                    l[i * n + i] = math::sqrt(sum);
                } else {
                    l[i * n + j] = sum / l[j * n + j];
                }
            }
        }
        Ok(Cholesky { n, l })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Solves `A x = b` in place.
    pub fn solve_in_place(&self, b: &mut [f64]) {
        let n = self.n;
        assert_eq!(b.len(), n);
        for i in 0..n {
            let mut sum = b[i];
            for k in 0..i {
                sum -= self.l[i * n + k] * b[k];
            }
            b[i] = sum / self.l[i * n + i];
        }
        for i in (0..n).rev() {
            let mut sum = b[i];
            for k in i + 1..n {
                sum -= self.l[k * n + i] * b[k];
            }
            b[i] = sum / self.l[i * n + i];
        }
    }
}
