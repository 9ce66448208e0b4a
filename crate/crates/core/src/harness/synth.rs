use alloc::format;
use alloc::vec::Vec;

use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, StandardNormal};

use crate::error::{Error, Result};
use crate::math;
use crate::tensor::{fro_norm, inner_product, Dims, Label, LabeledDataset, Tensor3};
use crate::tsvd::t_product;

/// Recipe for a synthetic regression problem with a sparse, low tubal rank
/// ground truth.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SynthSpec {
    pub dims: Dims,
    /// Number of samples `M`.
    pub samples: usize,
    pub true_tubal_rank: usize,
    /// Fraction of nonzero entries kept in the ground truth.
    pub density: f64,
    /// Standard deviation of the Gaussian noise added to scores before taking signs.
    pub noise_sigma: f64,
    pub seed: u64,
}

impl SynthSpec {
    pub fn validate(&self) -> Result<()> {
        let d = self.dims;
        let bad = |msg: alloc::string::String| Err(Error::InvalidConfig(msg));
        if d.is_empty() {
            return bad(format!("dims {d} must be positive"));
        }
        if self.samples == 0 {
            return bad("sample count must be at least 1".into());
        }
        if self.true_tubal_rank == 0 || self.true_tubal_rank > d.i1.min(d.i2) {
            return bad(format!(
                "tubal rank {} must lie in 1..=min(I1, I2) = {}",
                self.true_tubal_rank,
                d.i1.min(d.i2)
            ));
        }
        if !(self.density > 0.0 && self.density <= 1.0) {
            return bad(format!("density {} must lie in (0, 1]", self.density));
        }
        if !(self.noise_sigma >= 0.0) || !self.noise_sigma.is_finite() {
            return bad(format!("noise sigma {} must be finite and >= 0", self.noise_sigma));
        }
        Ok(())
    }
}

fn normal_tensor(dims: Dims, rng: &mut ChaCha8Rng) -> Tensor3 {
    let data: Vec<f64> = (0..dims.len()).map(|_| StandardNormal.sample(rng)).collect();
    Tensor3::from_raw(dims, data)
}

/// Builds the ground truth and `spec.samples` labeled samples.
///
/// The ground truth is the t-product of two Gaussian factors of inner size
/// `true_tubal_rank`, restricted to `ceil(density·I)` uniformly chosen
/// entries and scaled to unit Frobenius norm. Samples have i.i.d. standard
/// normal entries; labels are `sign(⟨X, W*⟩ + ε)` with `ε ~ N(0, σ²)` and
/// ties going to `+1`. Everything is drawn from one ChaCha8 stream seeded
/// with `spec.seed`.
pub fn generate_synthetic(spec: &SynthSpec) -> Result<(LabeledDataset, Tensor3)> {
    spec.validate()?;
    let d = spec.dims;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let left = normal_tensor(Dims::new(d.i1, spec.true_tubal_rank, d.i3)?, &mut rng);
    let right = normal_tensor(Dims::new(spec.true_tubal_rank, d.i2, d.i3)?, &mut rng);
    let dense = t_product(&left, &right)?;

    let total = d.len();
    let exact = spec.density * total as f64;
    let keep = (math::ceil(exact - 1e-9 * exact.max(1.0)) as usize).clamp(1, total);
    let mut data = alloc::vec![0.0; total];
    for i in index::sample(&mut rng, total, keep) {
        data[i] = dense.as_slice()[i];
    }
    let mut w_star = Tensor3::from_raw(d, data);
    let norm = fro_norm(&w_star);
    if norm > 0.0 {
        w_star = w_star.scaled(1.0 / norm);
    }

    let dataset = sample_with(&w_star, spec.samples, spec.noise_sigma, &mut rng)?;
    Ok((dataset, w_star))
}

/// Draws `count` fresh labeled samples for a given ground truth, e.g. a
/// held-out set, from a stream seeded with `seed`.
pub fn draw_samples(w_star: &Tensor3, count: usize, noise_sigma: f64, seed: u64) -> Result<LabeledDataset> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_with(w_star, count, noise_sigma, &mut rng)
}

fn sample_with(w_star: &Tensor3, count: usize, noise_sigma: f64, rng: &mut ChaCha8Rng) -> Result<LabeledDataset> {
    let noise = Normal::new(0.0, noise_sigma)
        .map_err(|_| Error::InvalidConfig(format!("noise sigma {noise_sigma} is invalid")))?;
    let mut samples = Vec::with_capacity(count);
    let mut labels = Vec::with_capacity(count);
    for _ in 0..count {
        let x = normal_tensor(w_star.dims(), rng);
        let eps: f64 = noise.sample(rng);
        labels.push(Label::from_score(inner_product(&x, w_star)? + eps));
        samples.push(x);
    }
    LabeledDataset::new(samples, labels)
}
