use alloc::string::String;

use crate::tensor::Dims;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: Dims, right: Dims },
    #[error("invalid dimensions {i1}x{i2}x{i3}: every mode must be at least 1")]
    InvalidDims { i1: usize, i2: usize, i3: usize },
    #[error("length mismatch: expected {expected} values, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("non-finite value at linear index {index}")]
    NonFinite { index: usize },
    #[error("spectrum is not conjugate-symmetric: imaginary residual {residual:e} after inverse transform")]
    NotConjugateSymmetric { residual: f64 },
    #[error("SVD did not converge on spectral slice {slice}")]
    SvdFailed { slice: usize },
    #[error("threshold must be non-negative, got {0}")]
    NegativeThreshold(f64),
    #[error("factorization failed: matrix is not positive definite (pivot {pivot})")]
    Factorization { pivot: usize },
    #[error("non-finite value produced at iteration {iteration}")]
    Diverged { iteration: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid dataset: {0}")]
    InvalidDataset(String),
    #[error("infeasible folds: {0}")]
    InfeasibleFolds(String),
}
