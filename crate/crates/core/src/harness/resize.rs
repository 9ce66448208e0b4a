use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;
use crate::tensor::{Dims, Tensor3};

/// Per-output-index interpolation stencil along one mode.
#[derive(Debug, Clone, Copy)]
struct Stencil {
    lo: usize,
    hi: usize,
    frac: f64,
}

fn scaled_len(n: usize, beta: f64) -> usize {
    let exact = beta * n as f64;
    (math::ceil(exact - 1e-9 * exact.max(1.0)) as usize).max(1)
}

/// Output sample `o` sits at input coordinate `(o + ½)·n/n_out − ½`,
/// clamped to `[0, n − 1]`.
fn stencils(n: usize, n_out: usize) -> Vec<Stencil> {
    let step = n as f64 / n_out as f64;
    (0..n_out)
        .map(|o| {
            let s = ((o as f64 + 0.5) * step - 0.5).clamp(0.0, (n - 1) as f64);
            let lo = math::floor(s) as usize;
            let hi = (lo + 1).min(n - 1);
            Stencil { lo, hi, frac: s - lo as f64 }
        })
        .collect()
}

/// Shrinks every mode by `beta` (output size `ceil(β·Iₙ)`) with trilinear
/// interpolation and edge clamping. `beta = 1` returns the input unchanged.
pub fn resize_tensor(a: &Tensor3, beta: f64) -> Result<Tensor3> {
    if !(beta > 0.0 && beta <= 1.0) {
        return Err(Error::InvalidConfig(alloc::format!(
            "resize factor must lie in (0, 1], got {beta}"
        )));
    }
    if beta == 1.0 {
        return Ok(a.clone());
    }
    let d = a.dims();
    let out = Dims::new(scaled_len(d.i1, beta), scaled_len(d.i2, beta), scaled_len(d.i3, beta))?;
    let (s1, s2, s3) = (stencils(d.i1, out.i1), stencils(d.i2, out.i2), stencils(d.i3, out.i3));
    let lerp = |x: f64, y: f64, t: f64| x + (y - x) * t;
    Tensor3::from_fn(out, |o1, o2, o3| {
        let (p, q, r) = (s1[o1], s2[o2], s3[o3]);
        let along3 = |i: usize, j: usize| lerp(a.get(i, j, r.lo), a.get(i, j, r.hi), r.frac);
        let along2 = |i: usize| lerp(along3(i, q.lo), along3(i, q.hi), q.frac);
        lerp(along2(p.lo), along2(p.hi), p.frac)
    })
}
