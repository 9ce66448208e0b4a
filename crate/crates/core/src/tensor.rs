//! Dense real third-order tensors.
//!
//! Storage is tube-contiguous: the mode-3 index varies fastest, then mode 2,
//! then mode 1. Entry `(i1, i2, i3)` (0-based) lives at
//! `(i1 * I2 + i2) * I3 + i3`. The same order is used by [`vectorize`], by
//! the rows of the solver's design matrix and by the on-disk format.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::math;

/// Mode sizes `(I1, I2, I3)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Dims {
    pub i1: usize,
    pub i2: usize,
    pub i3: usize,
}

impl Dims {
    pub fn new(i1: usize, i2: usize, i3: usize) -> Result<Self> {
        if i1 == 0 || i2 == 0 || i3 == 0 {
            return Err(Error::InvalidDims { i1, i2, i3 });
        }
        Ok(Dims { i1, i2, i3 })
    }

    /// Total number of entries `I1·I2·I3`.
    #[inline]
    pub fn len(&self) -> usize {
        self.i1 * self.i2 * self.i3
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, i1: usize, i2: usize, i3: usize) -> usize {
        debug_assert!(i1 < self.i1 && i2 < self.i2 && i3 < self.i3);
        (i1 * self.i2 + i2) * self.i3 + i3
    }

    pub fn as_tuple(&self) -> (usize, usize, usize) {
        (self.i1, self.i2, self.i3)
    }
}

impl fmt::Display for Dims {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}x{}", self.i1, self.i2, self.i3)
    }
}

fn check_finite(data: &[f64]) -> Result<()> {
    match data.iter().position(|v| !v.is_finite()) {
        Some(index) => Err(Error::NonFinite { index }),
        None => Ok(()),
    }
}

/// Dense real `I1 x I2 x I3` tensor with finite entries.
#[derive(Clone, PartialEq)]
pub struct Tensor3 {
    dims: Dims,
    data: Vec<f64>,
}

impl fmt::Debug for Tensor3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Tensor3")
            .field("dims", &self.dims)
            .field("data", &self.data)
            .finish()
    }
}

impl Tensor3 {
    pub fn zeros(dims: Dims) -> Self {
        Tensor3 {
            dims,
            data: vec![0.0; dims.len()],
        }
    }

    pub fn filled(dims: Dims, value: f64) -> Result<Self> {
        check_finite(&[value])?;
        Ok(Tensor3 {
            dims,
            data: vec![value; dims.len()],
        })
    }

    /// Builds a tensor from data already in tube-contiguous order.
    pub fn from_vec(dims: Dims, data: Vec<f64>) -> Result<Self> {
        if data.len() != dims.len() {
            return Err(Error::LengthMismatch {
                expected: dims.len(),
                actual: data.len(),
            });
        }
        check_finite(&data)?;
        Ok(Tensor3 { dims, data })
    }

    /// Builds a tensor by evaluating `f(i1, i2, i3)` at every 0-based index.
    pub fn from_fn<F>(dims: Dims, mut f: F) -> Result<Self>
    where
        F: FnMut(usize, usize, usize) -> f64,
    {
        let mut data = Vec::with_capacity(dims.len());
        for i1 in 0..dims.i1 {
            for i2 in 0..dims.i2 {
                for i3 in 0..dims.i3 {
                    data.push(f(i1, i2, i3));
                }
            }
        }
        Self::from_vec(dims, data)
    }

    /// Stacks `I3` frontal slices, each an `I1 x I2` row-major matrix.
    pub fn from_frontal_slices(i1: usize, i2: usize, slices: &[Vec<f64>]) -> Result<Self> {
        let dims = Dims::new(i1, i2, slices.len())?;
        for s in slices {
            if s.len() != i1 * i2 {
                return Err(Error::LengthMismatch {
                    expected: i1 * i2,
                    actual: s.len(),
                });
            }
        }
        Self::from_fn(dims, |a, b, k| slices[k][a * i2 + b])
    }

    /// Internal constructor; callers guarantee length and finiteness.
    pub(crate) fn from_raw(dims: Dims, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), dims.len());
        Tensor3 { dims, data }
    }

    #[inline]
    pub fn dims(&self) -> Dims {
        self.dims
    }

    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub(crate) fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    #[inline]
    pub fn get(&self, i1: usize, i2: usize, i3: usize) -> f64 {
        self.data[self.dims.index(i1, i2, i3)]
    }

    /// Tube `A(i1, i2, :)`.
    #[inline]
    pub fn tube(&self, i1: usize, i2: usize) -> &[f64] {
        let start = self.dims.index(i1, i2, 0);
        &self.data[start..start + self.dims.i3]
    }

    /// Frontal slice `A(:, :, i3)` as a row-major `I1 x I2` matrix.
    pub fn frontal_slice(&self, i3: usize) -> Vec<f64> {
        let d = self.dims;
        let mut out = Vec::with_capacity(d.i1 * d.i2);
        for i1 in 0..d.i1 {
            for i2 in 0..d.i2 {
                out.push(self.get(i1, i2, i3));
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0.0)
    }

    pub fn map<F: FnMut(f64) -> f64>(&self, f: F) -> Result<Tensor3> {
        Tensor3::from_vec(self.dims, self.data.iter().copied().map(f).collect())
    }

    pub fn scaled(&self, alpha: f64) -> Tensor3 {
        Tensor3::from_raw(self.dims, self.data.iter().map(|v| v * alpha).collect())
    }

    fn zip_with(&self, other: &Tensor3, f: impl Fn(f64, f64) -> f64) -> Result<Tensor3> {
        ensure_same_dims(self, other)?;
        Ok(Tensor3::from_raw(
            self.dims,
            self.data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        ))
    }

    pub fn try_add(&self, other: &Tensor3) -> Result<Tensor3> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn try_sub(&self, other: &Tensor3) -> Result<Tensor3> {
        self.zip_with(other, |a, b| a - b)
    }

    /// Entry-wise product, used to apply feature masks.
    pub fn hadamard(&self, other: &Tensor3) -> Result<Tensor3> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

pub(crate) fn ensure_same_dims(a: &Tensor3, b: &Tensor3) -> Result<()> {
    if a.dims != b.dims {
        return Err(Error::DimensionMismatch {
            left: a.dims,
            right: b.dims,
        });
    }
    Ok(())
}

impl Add for &Tensor3 {
    type Output = Tensor3;

    /// Panics on mismatched dims; use [`Tensor3::try_add`] to get an error instead.
    fn add(self, rhs: &Tensor3) -> Tensor3 {
        self.try_add(rhs).expect("tensor dims must match")
    }
}

impl Sub for &Tensor3 {
    type Output = Tensor3;

    fn sub(self, rhs: &Tensor3) -> Tensor3 {
        self.try_sub(rhs).expect("tensor dims must match")
    }
}

impl Mul<f64> for &Tensor3 {
    type Output = Tensor3;

    fn mul(self, rhs: f64) -> Tensor3 {
        self.scaled(rhs)
    }
}

impl Neg for &Tensor3 {
    type Output = Tensor3;

    fn neg(self) -> Tensor3 {
        self.scaled(-1.0)
    }
}

/// `Σ a(i1,i2,i3)·b(i1,i2,i3)`.
pub fn inner_product(a: &Tensor3, b: &Tensor3) -> Result<f64> {
    ensure_same_dims(a, b)?;
    Ok(dot(&a.data, &b.data))
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn l1_norm(a: &Tensor3) -> f64 {
    a.data.iter().map(|v| v.abs()).sum()
}

pub fn fro_norm(a: &Tensor3) -> f64 {
    math::sqrt(dot(&a.data, &a.data))
}

/// Linearizes in tube-contiguous order.
pub fn vectorize(a: &Tensor3) -> Vec<f64> {
    a.data.clone()
}

/// Inverse of [`vectorize`].
pub fn tensorize3(v: &[f64], dims: Dims) -> Result<Tensor3> {
    Tensor3::from_vec(dims, v.to_vec())
}

/// Binary class label, encoded as `±1` in the regression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Negative,
    Positive,
}

impl Label {
    pub fn value(self) -> f64 {
        match self {
            Label::Negative => -1.0,
            Label::Positive => 1.0,
        }
    }

    /// Sign rule with ties going to [`Label::Positive`].
    pub fn from_score(score: f64) -> Label {
        if score >= 0.0 {
            Label::Positive
        } else {
            Label::Negative
        }
    }

    pub fn from_value(v: f64) -> Option<Label> {
        if v == 1.0 {
            Some(Label::Positive)
        } else if v == -1.0 {
            Some(Label::Negative)
        } else {
            None
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Positive => f.write_str("+1"),
            Label::Negative => f.write_str("-1"),
        }
    }
}

/// Samples `X_m` with binary labels `y_m`; all samples share one shape.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    samples: Vec<Tensor3>,
    labels: Vec<Label>,
}

impl LabeledDataset {
    pub fn new(samples: Vec<Tensor3>, labels: Vec<Label>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidDataset("dataset needs at least one sample".into()));
        }
        if samples.len() != labels.len() {
            return Err(Error::InvalidDataset(format!(
                "{} samples but {} labels",
                samples.len(),
                labels.len()
            )));
        }
        let dims = samples[0].dims();
        if let Some((m, s)) = samples.iter().enumerate().find(|(_, s)| s.dims() != dims) {
            return Err(Error::InvalidDataset(format!(
                "sample {m} has dims {} but sample 0 has {dims}",
                s.dims()
            )));
        }
        Ok(LabeledDataset { samples, labels })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn dims(&self) -> Dims {
        self.samples[0].dims()
    }

    pub fn samples(&self) -> &[Tensor3] {
        &self.samples
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    /// Labels as `±1.0` responses.
    pub fn responses(&self) -> Vec<f64> {
        self.labels.iter().map(|l| l.value()).collect()
    }

    /// Sub-dataset made of the given sample indices, in order.
    pub fn subset(&self, indices: &[usize]) -> Result<LabeledDataset> {
        LabeledDataset::new(
            indices.iter().map(|&i| self.samples[i].clone()).collect(),
            indices.iter().map(|&i| self.labels[i]).collect(),
        )
    }

    /// Applies `f` to every sample, keeping labels.
    pub fn map_samples<F>(&self, mut f: F) -> Result<LabeledDataset>
    where
        F: FnMut(&Tensor3) -> Result<Tensor3>,
    {
        let samples = self.samples.iter().map(&mut f).collect::<Result<Vec<_>>>()?;
        LabeledDataset::new(samples, self.labels.clone())
    }

    pub fn into_parts(self) -> (Vec<Tensor3>, Vec<Label>) {
        (self.samples, self.labels)
    }
}
