use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;
use crate::tensor::Tensor3;

/// Number of entries kept when selecting the top `eta_percent` % of `total`.
///
/// `ceil(eta·total/100)`, with a small allowance so that values which are
/// integers up to rounding are not pushed to the next count.
pub fn selected_count(eta_percent: f64, total: usize) -> Result<usize> {
    if !(eta_percent > 0.0 && eta_percent <= 100.0) {
        return Err(Error::InvalidConfig(alloc::format!(
            "eta must lie in (0, 100], got {eta_percent}"
        )));
    }
    let exact = eta_percent * total as f64 / 100.0;
    let count = math::ceil(exact - 1e-9 * exact.max(1.0)) as usize;
    Ok(count.clamp(1, total))
}

/// `{0,1}` mask marking the `ceil(η%·I)` entries of largest magnitude.
///
/// Equal magnitudes are ordered by linear index, lower index first.
pub fn select_top_features(w: &Tensor3, eta_percent: f64) -> Result<Tensor3> {
    let total = w.dims().len();
    let keep = selected_count(eta_percent, total)?;
    let data = w.as_slice();
    let mut order: Vec<usize> = (0..total).collect();
    order.sort_by(|&i, &j| {
        data[j]
            .abs()
            .partial_cmp(&data[i].abs())
            .unwrap_or(core::cmp::Ordering::Equal)
            .then(i.cmp(&j))
    });
    let mut mask = alloc::vec![0.0; total];
    for &i in &order[..keep] {
        mask[i] = 1.0;
    }
    Ok(Tensor3::from_raw(w.dims(), mask))
}

/// Fraction of entries with `|w| <= tol`.
pub fn sparsity(w: &Tensor3, tol: f64) -> f64 {
    let zeros = w.as_slice().iter().filter(|v| v.abs() <= tol).count();
    zeros as f64 / w.dims().len() as f64
}
