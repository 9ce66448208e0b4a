//! The t-SVD algebra: t-product, tensor conjugate transpose, identity tensor,
//! t-SVD, tubal rank and the tubal nuclear norm.
//!
//! Everything is computed slice-wise in the mode-3 Fourier domain. For a real
//! tensor the frequency slices `k` and `I3 - k` are complex conjugates, so
//! only slices `0..=I3/2` are processed and the rest are mirrored. This keeps
//! every spectrum exactly conjugate-symmetric and the inverse transform real.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::math;
use crate::spectral::{dft_mode3, idft_mode3, SpectralTensor3};
use crate::tensor::{Dims, Tensor3};

/// Relative cutoff used by [`tubal_rank`] when callers have no better choice.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

/// Number of independent frequency slices of a real tensor with `n` slices.
#[inline]
pub(crate) fn independent_slices(n: usize) -> usize {
    n / 2 + 1
}

/// `𝒰 * 𝒮 * 𝒱ᵀ` factors of a t-SVD.
#[derive(Debug, Clone)]
pub struct TsvdFactors {
    /// Orthogonal, `I1 x I1 x I3`.
    pub u: Tensor3,
    /// F-diagonal, `I1 x I2 x I3`.
    pub s: Tensor3,
    /// Orthogonal, `I2 x I2 x I3`.
    pub v: Tensor3,
}

impl TsvdFactors {
    /// `𝒰 * 𝒮 * 𝒱ᵀ`.
    pub fn reconstruct(&self) -> Result<Tensor3> {
        t_product(&t_product(&self.u, &self.s)?, &conj_transpose(&self.v))
    }
}

/// t-product of `a` (`I1 x I2 x I3`) and `b` (`I2 x J x I3`).
///
/// Each output tube is the sum over `i2` of circular convolutions; computed as
/// slice-wise matrix products of the mode-3 spectra.
pub fn t_product(a: &Tensor3, b: &Tensor3) -> Result<Tensor3> {
    let (da, db) = (a.dims(), b.dims());
    if da.i2 != db.i1 || da.i3 != db.i3 {
        return Err(Error::DimensionMismatch { left: da, right: db });
    }
    let out_dims = Dims::new(da.i1, db.i2, da.i3)?;
    let fa = dft_mode3(a);
    let fb = dft_mode3(b);
    let mut fc = SpectralTensor3::zeros(out_dims);
    for k in 0..independent_slices(da.i3) {
        fc.set_slice(k, &fa.slice(k).matmul(&fb.slice(k)));
    }
    fc.mirror_conjugate_half();
    idft_mode3(&fc)
}

/// Transposes every frontal slice and reverses the order of slices `2..=I3`.
pub fn conj_transpose(a: &Tensor3) -> Tensor3 {
    let d = a.dims();
    let out = Dims {
        i1: d.i2,
        i2: d.i1,
        i3: d.i3,
    };
    let n = d.i3;
    let mut data = Vec::with_capacity(d.len());
    for r in 0..out.i1 {
        for c in 0..out.i2 {
            for k in 0..n {
                data.push(a.get(c, r, (n - k) % n));
            }
        }
    }
    Tensor3::from_raw(out, data)
}

/// `i x i x i3` tensor whose first frontal slice is the identity matrix and
/// whose other slices are zero.
pub fn identity_tensor(i: usize, i3: usize) -> Result<Tensor3> {
    let dims = Dims::new(i, i, i3)?;
    Tensor3::from_fn(dims, |a, b, k| if a == b && k == 0 { 1.0 } else { 0.0 })
}

/// Full t-SVD.
///
/// Singular values inside each frequency slice are sorted non-increasing.
pub fn t_svd(a: &Tensor3) -> Result<TsvdFactors> {
    let d = a.dims();
    let fa = dft_mode3(a);
    let mut fu = SpectralTensor3::zeros(Dims { i1: d.i1, i2: d.i1, i3: d.i3 });
    let mut fs = SpectralTensor3::zeros(d);
    let mut fv = SpectralTensor3::zeros(Dims { i1: d.i2, i2: d.i2, i3: d.i3 });
    for k in 0..independent_slices(d.i3) {
        let dec = linalg::svd(&fa.slice(k), true).ok_or(Error::SvdFailed { slice: k })?;
        let sigma = CMatrix::from_fn(d.i1, d.i2, |r, c| {
            if r == c {
                num_complex::Complex64::new(dec.s[r], 0.0)
            } else {
                num_complex::Complex64::new(0.0, 0.0)
            }
        });
        fu.set_slice(k, &dec.u);
        fs.set_slice(k, &sigma);
        fv.set_slice(k, &dec.v);
    }
    fu.mirror_conjugate_half();
    fs.mirror_conjugate_half();
    fv.mirror_conjugate_half();
    Ok(TsvdFactors {
        u: idft_mode3(&fu)?,
        s: idft_mode3(&fs)?,
        v: idft_mode3(&fv)?,
    })
}

/// Singular values of every frequency slice, `I3` rows of `min(I1, I2)`
/// values each, sorted non-increasing within a row.
pub fn spectral_singular_values(a: &Tensor3) -> Result<Vec<Vec<f64>>> {
    let d = a.dims();
    let fa = dft_mode3(a);
    let half = independent_slices(d.i3);
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(d.i3);
    for k in 0..half {
        rows.push(linalg::singular_values(&fa.slice(k)).ok_or(Error::SvdFailed { slice: k })?);
    }
    for k in half..d.i3 {
        let mirrored = rows[d.i3 - k].clone();
        rows.push(mirrored);
    }
    Ok(rows)
}

/// Number of singular tubes `𝒮(i, i, :)` whose Frobenius norm exceeds
/// `tol` times the largest singular value found in any frequency slice.
///
/// The tube norm is evaluated through Parseval, `‖𝒮(i,i,:)‖² = (1/I3) Σₖ σᵢ(k)²`.
pub fn tubal_rank(a: &Tensor3, tol: f64) -> Result<usize> {
    if !(tol >= 0.0) {
        return Err(Error::NegativeThreshold(tol));
    }
    let sv = spectral_singular_values(a)?;
    let n = a.dims().i3 as f64;
    let smax = sv.iter().flatten().fold(0.0f64, |m, &s| m.max(s));
    if smax == 0.0 {
        return Ok(0);
    }
    let k = sv[0].len();
    let rank = (0..k)
        .filter(|&i| {
            let energy: f64 = sv.iter().map(|row| row[i] * row[i]).sum();
            math::sqrt(energy / n) > tol * smax
        })
        .count();
    Ok(rank)
}

/// Tubal nuclear norm, `(1/I3) Σₖ ‖Â⁽ᵏ⁾‖_*` over the frequency slices.
pub fn tnn(a: &Tensor3) -> Result<f64> {
    let sv = spectral_singular_values(a)?;
    let total: f64 = sv.iter().map(|row| row.iter().sum::<f64>()).sum();
    Ok(total / a.dims().i3 as f64)
}
