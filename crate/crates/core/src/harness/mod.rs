//! Experimental-protocol machinery: synthetic data, resizing, feature
//! selection, sparsity and nested cross-validation.

mod cv;
mod resize;
mod select;
mod synth;

pub use cv::{
    run_nested_cv, run_nested_cv_observed, stratified_folds, CvPlan, CvReport, FitEvent, FitStage,
    FoldOutcome, SolverSettings, DEFAULT_PENALTY_GRID,
};
pub use resize::resize_tensor;
pub use select::{select_top_features, selected_count, sparsity};
pub use synth::{draw_samples, generate_synthetic, SynthSpec};
