//! Nested, stratified cross-validation over `(τ, γ, β, η)`.
//!
//! For every outer fold the remaining samples are split again into inner
//! folds; every grid point is scored by mean inner-validation accuracy, the
//! winner is refit on the whole outer-training set and scored once on the
//! held-out fold. Feature selection is applied by zeroing every entry of `W`
//! outside the top-`η` % before predicting (masked-Sturm prediction).
//!
//! Winner order: higher mean accuracy, then higher mean sparsity, then
//! smaller `τ`, smaller `γ`, smaller `β`, smaller `η`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::resize::resize_tensor;
use super::select::{select_top_features, sparsity};
use crate::error::{Error, Result};
use crate::math;
use crate::solver::{accuracy, fit_sturm, SolveRoute, SturmConfig};
use crate::tensor::{Label, LabeledDataset, Tensor3};

/// `{10⁻³, 5·10⁻³, 10⁻², …, 5·10², 10³}`, used for both `τ` and `γ`.
pub const DEFAULT_PENALTY_GRID: [f64; 13] = [
    1e-3, 5e-3, 1e-2, 5e-2, 1e-1, 5e-1, 1.0, 5.0, 10.0, 50.0, 100.0, 500.0, 1000.0,
];

/// Solver knobs shared by every fit in a cross-validation run.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct SolverSettings {
    pub rho: f64,
    pub max_iters: usize,
    pub primal_tol: f64,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            rho: 1.0,
            max_iters: 200,
            primal_tol: 1e-4,
        }
    }
}

/// Folds and search grids.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct CvPlan {
    pub outer_folds: usize,
    pub inner_folds: usize,
    pub tau_grid: Vec<f64>,
    pub gamma_grid: Vec<f64>,
    /// Resize factors.
    pub beta_grid: Vec<f64>,
    /// Feature-selection percentages.
    pub eta_grid: Vec<f64>,
    pub solver: SolverSettings,
}

impl Default for CvPlan {
    fn default() -> Self {
        CvPlan {
            outer_folds: 10,
            inner_folds: 9,
            tau_grid: DEFAULT_PENALTY_GRID.to_vec(),
            gamma_grid: DEFAULT_PENALTY_GRID.to_vec(),
            beta_grid: vec![0.3, 0.5, 0.7],
            eta_grid: vec![1.0, 5.0, 10.0, 50.0, 100.0],
            solver: SolverSettings::default(),
        }
    }
}

impl CvPlan {
    /// Plan with one point per grid.
    pub fn single(tau: f64, gamma: f64, beta: f64, eta: f64) -> Self {
        CvPlan {
            tau_grid: vec![tau],
            gamma_grid: vec![gamma],
            beta_grid: vec![beta],
            eta_grid: vec![eta],
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: alloc::string::String| Err(Error::InvalidConfig(msg));
        if self.outer_folds < 2 || self.inner_folds < 2 {
            return bad(format!(
                "fold counts must be at least 2 (outer {}, inner {})",
                self.outer_folds, self.inner_folds
            ));
        }
        for (name, grid) in [
            ("tau_grid", &self.tau_grid),
            ("gamma_grid", &self.gamma_grid),
            ("beta_grid", &self.beta_grid),
            ("eta_grid", &self.eta_grid),
        ] {
            if grid.is_empty() {
                return bad(format!("{name} is empty"));
            }
            if grid.iter().any(|v| !v.is_finite()) {
                return bad(format!("{name} has a non-finite value"));
            }
        }
        if self.tau_grid.iter().chain(&self.gamma_grid).any(|&v| v < 0.0) {
            return bad("penalty weights must be >= 0".into());
        }
        if self.beta_grid.iter().any(|&b| !(b > 0.0 && b <= 1.0)) {
            return bad("resize factors must lie in (0, 1]".into());
        }
        if self.eta_grid.iter().any(|&e| !(e > 0.0 && e <= 100.0)) {
            return bad("selection percentages must lie in (0, 100]".into());
        }
        self.fit_config(0.0, 0.0).validate()
    }

    fn grid_size(&self) -> usize {
        self.tau_grid.len() * self.gamma_grid.len() * self.beta_grid.len() * self.eta_grid.len()
    }

    fn fit_config(&self, tau: f64, gamma: f64) -> SturmConfig {
        SturmConfig {
            tau,
            gamma,
            rho: self.solver.rho,
            alpha: None,
            max_iters: self.solver.max_iters,
            primal_tol: self.solver.primal_tol,
            record_trace: false,
            route: SolveRoute::Auto,
        }
    }
}

/// Result of one outer fold.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct FoldOutcome {
    pub fold: usize,
    pub tau: f64,
    pub gamma: f64,
    pub beta: f64,
    pub eta: f64,
    /// Held-out accuracy in `[0, 1]`.
    pub accuracy: f64,
    /// Sparsity of the masked model used for prediction.
    pub sparsity: f64,
    /// ADMM iterations of the refit.
    pub iterations: usize,
}

/// Per-fold outcomes with mean and sample standard deviation.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CvReport {
    pub folds: Vec<FoldOutcome>,
    pub mean_accuracy: f64,
    pub std_accuracy: f64,
    pub mean_sparsity: f64,
    pub std_sparsity: f64,
}

impl CvReport {
    fn from_folds(folds: Vec<FoldOutcome>) -> Self {
        let (mean_accuracy, std_accuracy) = mean_std(folds.iter().map(|f| f.accuracy));
        let (mean_sparsity, std_sparsity) = mean_std(folds.iter().map(|f| f.sparsity));
        CvReport {
            folds,
            mean_accuracy,
            std_accuracy,
            mean_sparsity,
            std_sparsity,
        }
    }
}

fn mean_std(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = values.clone().count();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.clone().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
    (mean, math::sqrt(var))
}

/// Which fit inside the protocol an event belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitStage {
    /// Grid-search fit on inner fold `fold`.
    Inner { fold: usize },
    /// Refit of the winning configuration on the outer-training set.
    Refit,
}

/// Emitted once per model fit, naming the sample indices (into the original
/// dataset) used for training and for scoring.
#[derive(Debug, Clone, Copy)]
pub struct FitEvent<'a> {
    pub outer_fold: usize,
    pub stage: FitStage,
    pub train: &'a [usize],
    pub eval: &'a [usize],
}

/// Splits positions `0..labels.len()` into `k` stratified folds.
///
/// Each class is shuffled with a ChaCha8 stream (`seed`, `stream`) and dealt
/// round-robin, continuing the rotation across classes, so every fold holds
/// each class's share to within one sample. Every fold is sorted ascending.
pub fn stratified_folds(labels: &[Label], k: usize, seed: u64, stream: u64) -> Result<Vec<Vec<usize>>> {
    if k < 2 {
        return Err(Error::InfeasibleFolds(format!("need at least 2 folds, got {k}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let mut folds = vec![Vec::new(); k];
    let mut slot = 0;
    for class in [Label::Negative, Label::Positive] {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        if members.len() < k {
            return Err(Error::InfeasibleFolds(format!(
                "class {class} has {} samples, fewer than the {k} folds requested; use at most {} folds",
                members.len(),
                members.len().max(1)
            )));
        }
        members.shuffle(&mut rng);
        for m in members {
            folds[slot].push(m);
            slot = (slot + 1) % k;
        }
    }
    for f in &mut folds {
        f.sort_unstable();
    }
    Ok(folds)
}

fn complement(n: usize, excluded: &[usize]) -> Vec<usize> {
    let mut mask = vec![true; n];
    for &i in excluded {
        mask[i] = false;
    }
    (0..n).filter(|&i| mask[i]).collect()
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    beta_idx: usize,
    tau: f64,
    gamma: f64,
    eta: f64,
    accuracy: f64,
    sparsity: f64,
}

fn candidate_order(a: &Candidate, b: &Candidate) -> Ordering {
    // "Less" means better.
    let cmp = |x: f64, y: f64| x.partial_cmp(&y).unwrap_or(Ordering::Equal);
    cmp(b.accuracy, a.accuracy)
        .then(cmp(b.sparsity, a.sparsity))
        .then(cmp(a.tau, b.tau))
        .then(cmp(a.gamma, b.gamma))
        .then(a.beta_idx.cmp(&b.beta_idx))
        .then(cmp(a.eta, b.eta))
}

fn masked(w: &Tensor3, eta: f64) -> Result<Tensor3> {
    if eta >= 100.0 {
        return Ok(w.clone());
    }
    w.hadamard(&select_top_features(w, eta)?)
}

/// [`run_nested_cv_observed`] without an observer.
pub fn run_nested_cv(dataset: &LabeledDataset, plan: &CvPlan, seed: u64) -> Result<CvReport> {
    run_nested_cv_observed(dataset, plan, seed, |_| {})
}

/// Runs the nested protocol, reporting every fit to `observer`.
///
/// Outer folds use ChaCha8 stream 0 of `seed`; the inner folds of outer
/// fold `f` use stream `f + 1`. When every grid has a single point the
/// inner search is skipped.
pub fn run_nested_cv_observed<F>(dataset: &LabeledDataset, plan: &CvPlan, seed: u64, mut observer: F) -> Result<CvReport>
where
    F: FnMut(&FitEvent<'_>),
{
    plan.validate()?;
    let n = dataset.len();
    if n < plan.outer_folds {
        return Err(Error::InfeasibleFolds(format!(
            "{n} samples cannot fill {} outer folds",
            plan.outer_folds
        )));
    }
    let outer = stratified_folds(dataset.labels(), plan.outer_folds, seed, 0)?;

    // resizing is a fixed per-sample map, applied identically to every split
    let resized: Vec<LabeledDataset> = plan
        .beta_grid
        .iter()
        .map(|&beta| dataset.map_samples(|x| resize_tensor(x, beta)))
        .collect::<Result<_>>()?;

    let mut outcomes = Vec::with_capacity(outer.len());
    for (f, test) in outer.iter().enumerate() {
        let train = complement(n, test);

        let winner = if plan.grid_size() == 1 {
            Candidate {
                beta_idx: 0,
                tau: plan.tau_grid[0],
                gamma: plan.gamma_grid[0],
                eta: plan.eta_grid[0],
                accuracy: f64::NAN,
                sparsity: f64::NAN,
            }
        } else {
            let train_labels: Vec<Label> = train.iter().map(|&i| dataset.labels()[i]).collect();
            let inner_local = stratified_folds(&train_labels, plan.inner_folds, seed, f as u64 + 1)
                .map_err(|e| match e {
                    Error::InfeasibleFolds(msg) => {
                        Error::InfeasibleFolds(format!("inner split of outer fold {f}: {msg}"))
                    }
                    other => other,
                })?;
            let inner: Vec<Vec<usize>> = inner_local
                .iter()
                .map(|fold| fold.iter().map(|&j| train[j]).collect())
                .collect();
            let splits: Vec<(Vec<usize>, Vec<usize>)> = inner
                .iter()
                .map(|val| {
                    let mut tr: Vec<usize> = train.iter().copied().filter(|i| val.binary_search(i).is_err()).collect();
                    tr.sort_unstable();
                    (tr, val.clone())
                })
                .collect();

            let mut best: Option<Candidate> = None;
            for (beta_idx, data) in resized.iter().enumerate() {
                for &tau in &plan.tau_grid {
                    for &gamma in &plan.gamma_grid {
                        let config = plan.fit_config(tau, gamma);
                        let mut acc = vec![0.0; plan.eta_grid.len()];
                        let mut spars = vec![0.0; plan.eta_grid.len()];
                        for (g, (tr, val)) in splits.iter().enumerate() {
                            observer(&FitEvent {
                                outer_fold: f,
                                stage: FitStage::Inner { fold: g },
                                train: tr,
                                eval: val,
                            });
                            let fit = fit_sturm(&data.subset(tr)?, &config)?;
                            let val_set = data.subset(val)?;
                            for (e, &eta) in plan.eta_grid.iter().enumerate() {
                                let model = masked(&fit.w, eta)?;
                                acc[e] += accuracy(&model, &val_set)?;
                                spars[e] += sparsity(&model, 0.0);
                            }
                        }
                        let folds = splits.len() as f64;
                        for (e, &eta) in plan.eta_grid.iter().enumerate() {
                            let cand = Candidate {
                                beta_idx,
                                tau,
                                gamma,
                                eta,
                                accuracy: acc[e] / folds,
                                sparsity: spars[e] / folds,
                            };
                            if best.is_none_or(|b| candidate_order(&cand, &b) == Ordering::Less) {
                                best = Some(cand);
                            }
                        }
                    }
                }
            }
            best.expect("grids are non-empty")
        };

        observer(&FitEvent {
            outer_fold: f,
            stage: FitStage::Refit,
            train: &train,
            eval: test,
        });
        let data = &resized[winner.beta_idx];
        let fit = fit_sturm(&data.subset(&train)?, &plan.fit_config(winner.tau, winner.gamma))?;
        let model = masked(&fit.w, winner.eta)?;
        outcomes.push(FoldOutcome {
            fold: f,
            tau: winner.tau,
            gamma: winner.gamma,
            beta: plan.beta_grid[winner.beta_idx],
            eta: winner.eta,
            accuracy: accuracy(&model, &data.subset(test)?)?,
            sparsity: sparsity(&model, 0.0),
            iterations: fit.iterations_run,
        });
    }
    Ok(CvReport::from_folds(outcomes))
}
