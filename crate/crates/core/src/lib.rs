//! Sparse tubal-regularized multilinear regression.
//!
//! The crate is `no_std` with `alloc`. It carries the dense third-order
//! tensor type, the mode-3 Fourier transform, the t-SVD algebra built on it
//! (t-product, conjugate transpose, t-SVD, tubal rank, tubal nuclear norm),
//! the two proximal operators, the ADMM solver and the evaluation harness
//! (synthetic data, resizing, feature selection, nested cross-validation).
//!
//! File formats, timing-heavy benchmarks and the command-line interface live
//! in the `sturm-cli` crate.
#![cfg_attr(not(feature = "std"), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

mod error;
pub mod harness;
pub mod linalg;
mod math;
pub mod prox;
pub mod solver;
pub mod spectral;
pub mod tensor;
pub mod tsvd;

pub use error::{Error, Result};
pub use prox::{prox_l1, prox_tnn};
pub use solver::{
    accuracy, fit_observed, fit_responses, fit_sturm, objective_for_responses, objective_value,
    precompute_data_solve, predict, update_a, DataSolveHandle, FitResult, IterationView,
    SolveRoute, SolverState, SturmConfig,
};
pub use spectral::{dft_mode3, idft_mode3, SpectralTensor3};
pub use tensor::{
    fro_norm, inner_product, l1_norm, tensorize3, vectorize, Dims, Label, LabeledDataset, Tensor3,
};
pub use tsvd::{
    conj_transpose, identity_tensor, spectral_singular_values, t_product, t_svd, tnn, tubal_rank,
    TsvdFactors, DEFAULT_RANK_TOL,
};
