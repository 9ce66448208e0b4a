//! Proximal operators of the tubal nuclear norm and of the ℓ1 norm.

use crate::error::{Error, Result};
use crate::linalg;
use crate::spectral::{dft_mode3, idft_mode3, SpectralTensor3};
use crate::tensor::Tensor3;
use crate::tsvd::independent_slices;

fn check_threshold(mu: f64) -> Result<()> {
    if !(mu >= 0.0) || !mu.is_finite() {
        return Err(Error::NegativeThreshold(mu));
    }
    Ok(())
}

/// `argmin_Z μ‖Z‖_TNN + ½‖Z − T‖²_F`.
///
/// Transforms along mode 3, shrinks the singular values of every frequency
/// slice by `μ` (clamping at zero), rebuilds the slices and transforms back.
pub fn prox_tnn(t: &Tensor3, mu: f64) -> Result<Tensor3> {
    check_threshold(mu)?;
    if mu == 0.0 {
        return Ok(t.clone());
    }
    let d = t.dims();
    let ft = dft_mode3(t);
    let mut fz = SpectralTensor3::zeros(d);
    for k in 0..independent_slices(d.i3) {
        let dec = linalg::svd(&ft.slice(k), false).ok_or(Error::SvdFailed { slice: k })?;
        if dec.s.first().is_none_or(|&s| s <= mu) {
            continue;
        }
        fz.set_slice(k, &dec.reconstruct_with(|s| (s - mu).max(0.0)));
    }
    fz.mirror_conjugate_half();
    idft_mode3(&fz)
}

/// Element-wise soft-thresholding, `sign(t)·max(|t| − μ, 0)`.
pub fn prox_l1(t: &Tensor3, mu: f64) -> Result<Tensor3> {
    check_threshold(mu)?;
    Ok(Tensor3::from_raw(
        t.dims(),
        t.as_slice().iter().map(|&v| soft_threshold(v, mu)).collect(),
    ))
}

#[inline]
pub(crate) fn soft_threshold(v: f64, mu: f64) -> f64 {
    if v > mu {
        v - mu
    } else if v < -mu {
        v + mu
    } else {
        0.0
    }
}
