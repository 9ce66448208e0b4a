//! Reference implementations used as test oracles. None of these call into
//! the transform, SVD or solver code paths of the crate under test.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sturm_core::{Dims, Tensor3};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn dims(a: usize, b: usize, c: usize) -> Dims {
    Dims::new(a, b, c).unwrap()
}

pub fn random_tensor(d: Dims, rng: &mut ChaCha8Rng) -> Tensor3 {
    Tensor3::from_fn(d, |_, _, _| rng.random_range(-1.0..1.0)).unwrap()
}

pub fn fro(a: &Tensor3) -> f64 {
    a.as_slice().iter().map(|v| v * v).sum::<f64>().sqrt()
}

pub fn rel_err(got: &Tensor3, want: &Tensor3) -> f64 {
    let diff: f64 = got
        .as_slice()
        .iter()
        .zip(want.as_slice())
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    diff / fro(want).max(1e-300)
}

/// `O(n²)` DFT of one sequence, sign −1 forward, +1 inverse (unscaled).
pub fn naive_dft(x: &[Complex64], sign: f64) -> Vec<Complex64> {
    let n = x.len();
    (0..n)
        .map(|k| {
            x.iter()
                .enumerate()
                .map(|(t, v)| {
                    let th = sign * 2.0 * std::f64::consts::PI * ((k * t) % n) as f64 / n as f64;
                    v * Complex64::new(th.cos(), th.sin())
                })
                .sum()
        })
        .collect()
}

/// Frequency slices of `a` computed with [`naive_dft`].
pub fn naive_slices(a: &Tensor3) -> Vec<DMatrix<Complex64>> {
    let d = a.dims();
    let mut slices = vec![DMatrix::<Complex64>::zeros(d.i1, d.i2); d.i3];
    for i in 0..d.i1 {
        for j in 0..d.i2 {
            let tube: Vec<Complex64> = (0..d.i3).map(|k| Complex64::new(a.get(i, j, k), 0.0)).collect();
            for (k, v) in naive_dft(&tube, -1.0).into_iter().enumerate() {
                slices[k][(i, j)] = v;
            }
        }
    }
    slices
}

/// Real part of the naive inverse DFT of a stack of frequency slices.
pub fn naive_unslice(slices: &[DMatrix<Complex64>]) -> Tensor3 {
    let n = slices.len();
    let (r, c) = slices[0].shape();
    let mut out = vec![0.0; r * c * n];
    for i in 0..r {
        for j in 0..c {
            let tube: Vec<Complex64> = slices.iter().map(|s| s[(i, j)]).collect();
            for (k, v) in naive_dft(&tube, 1.0).into_iter().enumerate() {
                out[(i * c + j) * n + k] = v.re / n as f64;
            }
        }
    }
    Tensor3::from_vec(dims(r, c, n), out).unwrap()
}

pub fn nuclear_norm(m: &DMatrix<Complex64>) -> f64 {
    m.clone().svd(false, false).singular_values.iter().sum()
}

/// Tubal nuclear norm from its definition.
pub fn tnn_oracle(a: &Tensor3) -> f64 {
    naive_slices(a).iter().map(nuclear_norm).sum::<f64>() / a.dims().i3 as f64
}

/// t-product by literal circular convolution of tubes.
pub fn t_product_oracle(a: &Tensor3, b: &Tensor3) -> Tensor3 {
    let (da, db) = (a.dims(), b.dims());
    let n = da.i3;
    Tensor3::from_fn(dims(da.i1, db.i2, n), |i, j, t| {
        let mut acc = 0.0;
        for l in 0..da.i2 {
            for s in 0..n {
                acc += a.get(i, l, s) * b.get(l, j, (t + n - s) % n);
            }
        }
        acc
    })
    .unwrap()
}

/// Projection onto `{Y : every frequency slice has spectral norm ≤ μ}`.
pub fn clip_spectral_norm(y: &Tensor3, mu: f64) -> Tensor3 {
    let slices: Vec<DMatrix<Complex64>> = naive_slices(y)
        .into_iter()
        .map(|s| {
            let mut svd = s.svd(true, true);
            for v in svd.singular_values.iter_mut() {
                *v = v.min(mu);
            }
            svd.recompose().unwrap()
        })
        .collect();
    naive_unslice(&slices)
}

/// `argmin_Z μ‖Z‖_TNN + ½‖Z − T‖²` by projected gradient ascent on the dual
/// `max_{‖Y‖_spec ≤ μ} ⟨T, Y⟩ − ½‖Y‖²`, then `Z = T − Y`.
pub fn prox_tnn_dual_oracle(t: &Tensor3, mu: f64, iters: usize) -> Tensor3 {
    let step = 0.5;
    let mut y = Tensor3::zeros(t.dims());
    for _ in 0..iters {
        let ascent = y
            .as_slice()
            .iter()
            .zip(t.as_slice())
            .map(|(y, t)| y + step * (t - y))
            .collect();
        y = clip_spectral_norm(&Tensor3::from_vec(t.dims(), ascent).unwrap(), mu);
    }
    Tensor3::from_vec(
        t.dims(),
        t.as_slice().iter().zip(y.as_slice()).map(|(t, y)| t - y).collect(),
    )
    .unwrap()
}

pub fn prox_tnn_objective(z: &Tensor3, t: &Tensor3, mu: f64) -> f64 {
    let d: f64 = z.as_slice().iter().zip(t.as_slice()).map(|(a, b)| (a - b).powi(2)).sum();
    mu * tnn_oracle(z) + 0.5 * d
}

pub fn prox_l1_objective(z: &Tensor3, t: &Tensor3, mu: f64) -> f64 {
    let d: f64 = z.as_slice().iter().zip(t.as_slice()).map(|(a, b)| (a - b).powi(2)).sum();
    mu * z.as_slice().iter().map(|v| v.abs()).sum::<f64>() + 0.5 * d
}

/// Random direction of unit Frobenius norm.
pub fn unit_direction(d: Dims, rng: &mut ChaCha8Rng) -> Tensor3 {
    let t = random_tensor(d, rng);
    let n = fro(&t);
    t.scaled(1.0 / n)
}

/// `M x I` design matrix with vectorized samples as rows.
pub fn design(samples: &[Tensor3]) -> DMatrix<f64> {
    let m = samples.len();
    let i = samples[0].dims().len();
    DMatrix::from_fn(m, i, |r, c| samples[r].as_slice()[c])
}

/// Dense solve of `(XᵀX + ρI) v = r`.
pub fn dense_ridge_solve(x: &DMatrix<f64>, rho: f64, r: &[f64]) -> Vec<f64> {
    let n = x.ncols();
    let a = x.transpose() * x + DMatrix::<f64>::identity(n, n) * rho;
    let v = a.lu().solve(&DVector::from_column_slice(r)).unwrap();
    v.iter().copied().collect()
}

pub fn vec_rel_err(got: &[f64], want: &[f64]) -> f64 {
    let d: f64 = got.iter().zip(want).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
    let n: f64 = want.iter().map(|v| v * v).sum::<f64>().sqrt();
    if n == 0.0 {
        d
    } else {
        d / n
    }
}
