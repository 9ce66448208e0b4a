//! ADMM solver for
//!
//! ```text
//! min_W  (α/2) Σₘ (yₘ − ⟨Xₘ, W⟩)² + τ‖W‖_TNN + γ‖W‖₁
//! ```
//!
//! The loss is split from the two penalties through copies `A` (data term)
//! and `B` (TNN term) of `W`, each tied to `W` by a scaled dual variable
//! (`P' = P/ρ`, `Q' = Q/ρ`). One iteration is:
//!
//! 1. `A ← (α XᵀX + ρI)⁻¹ (α Xᵀy + ρ(W − P'))`
//! 2. `B ← prox_{τ/ρ ‖·‖_TNN}(W − Q')`
//! 3. `W ← prox_{γ/(2ρ) ‖·‖₁}((A + P' + B + Q') / 2)`
//! 4. `P' ← P' + A − W`, `Q' ← Q' + B − W`
//!
//! The loss weight `α` multiplies the squared-error term. It is folded into
//! the design matrix by scaling `X` and `y` by `√α`, so the linear system in
//! step 1 is `(X̃ᵀX̃ + ρI) a = X̃ᵀỹ + ρ(w − p')` with `X̃ = √α X`, `ỹ = √α y`.
//! [`objective_value`] applies the same weight.
//!
//! There is no intercept; center labels and features beforehand if needed.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::time::Duration;

use crate::error::{Error, Result};
use crate::linalg::Cholesky;
use crate::math;
use crate::prox::{prox_l1, prox_tnn};
use crate::tensor::{dot, ensure_same_dims, fro_norm, inner_product, l1_norm, Dims, Label, LabeledDataset, Tensor3};
use crate::tsvd::tnn;

/// Largest variable count for which the `I x I` factorization is allowed.
pub const DENSE_ROUTE_MAX_DIM: usize = 4096;

/// How the `A`-update system is factored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum SolveRoute {
    /// Woodbury when `M < I` (or `I` exceeds [`DENSE_ROUTE_MAX_DIM`]), dense otherwise.
    #[default]
    Auto,
    /// Factor the `M x M` matrix `ρI + X̃X̃ᵀ`.
    Woodbury,
    /// Factor the `I x I` matrix `X̃ᵀX̃ + ρI`.
    Dense,
}

/// Hyperparameters of one fit.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SturmConfig {
    /// Weight of the tubal nuclear norm.
    pub tau: f64,
    /// Weight of the ℓ1 norm.
    pub gamma: f64,
    /// Augmented-Lagrangian constant.
    pub rho: f64,
    /// Loss weight; `None` means `sqrt(max(I1, I2)·I3)`.
    pub alpha: Option<f64>,
    pub max_iters: usize,
    /// Stop once both primal residuals, divided by `max(1, ‖W‖_F)`, drop
    /// below this value. Zero disables early stopping.
    pub primal_tol: f64,
    /// Record the objective value after every iteration.
    pub record_trace: bool,
    pub route: SolveRoute,
}

impl Default for SturmConfig {
    fn default() -> Self {
        SturmConfig {
            tau: 1e-3,
            gamma: 1e-3,
            rho: 1.0,
            alpha: None,
            max_iters: 200,
            primal_tol: 1e-4,
            record_trace: true,
            route: SolveRoute::Auto,
        }
    }
}

impl SturmConfig {
    pub fn new(tau: f64, gamma: f64) -> Self {
        SturmConfig {
            tau,
            gamma,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidConfig(msg.into()));
        if !(self.tau >= 0.0) || !self.tau.is_finite() {
            return bad("tau must be a finite value >= 0");
        }
        if !(self.gamma >= 0.0) || !self.gamma.is_finite() {
            return bad("gamma must be a finite value >= 0");
        }
        if !(self.rho > 0.0) || !self.rho.is_finite() {
            return bad("rho must be a finite value > 0");
        }
        if let Some(a) = self.alpha {
            if !(a > 0.0) || !a.is_finite() {
                return bad("alpha must be a finite value > 0");
            }
        }
        if self.max_iters == 0 {
            return bad("max_iters must be at least 1");
        }
        if !(self.primal_tol >= 0.0) {
            return bad("primal_tol must be >= 0");
        }
        Ok(())
    }

    /// Loss weight for samples of shape `dims`.
    pub fn resolved_alpha(&self, dims: Dims) -> f64 {
        self.alpha
            .unwrap_or_else(|| math::sqrt((dims.i1.max(dims.i2) * dims.i3) as f64))
    }
}

#[derive(Debug, Clone)]
enum Factor {
    Woodbury(Cholesky),
    Dense(Cholesky),
}

/// Pre-factored solver for `(X̃ᵀX̃ + ρI) v = r`, where the rows of `X̃` are
/// the vectorized samples scaled by `√loss_scale`.
#[derive(Debug, Clone)]
pub struct DataSolveHandle {
    rows: usize,
    dim: usize,
    rho: f64,
    loss_scale: f64,
    /// Row-major `M x I`, already scaled.
    design: Vec<f64>,
    factor: Factor,
}

impl DataSolveHandle {
    pub fn new(samples: &[Tensor3], rho: f64, loss_scale: f64, route: SolveRoute) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidDataset("no samples".into()));
        }
        if !(rho > 0.0) || !(loss_scale > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "rho ({rho}) and loss scale ({loss_scale}) must be positive"
            )));
        }
        let dims = samples[0].dims();
        let rows = samples.len();
        let dim = dims.len();
        let root = math::sqrt(loss_scale);
        let mut design = Vec::with_capacity(rows * dim);
        for s in samples {
            if s.dims() != dims {
                return Err(Error::DimensionMismatch {
                    left: dims,
                    right: s.dims(),
                });
            }
            design.extend(s.as_slice().iter().map(|v| v * root));
        }
        let route = match route {
            SolveRoute::Auto if rows < dim || dim > DENSE_ROUTE_MAX_DIM => SolveRoute::Woodbury,
            SolveRoute::Auto => SolveRoute::Dense,
            r => r,
        };
        let factor = match route {
            SolveRoute::Dense => {
                if dim > DENSE_ROUTE_MAX_DIM {
                    return Err(Error::InvalidConfig(format!(
                        "dense route needs I <= {DENSE_ROUTE_MAX_DIM}, got {dim}"
                    )));
                }
                let mut gram = vec![0.0; dim * dim];
                for row in design.chunks_exact(dim) {
                    for i in 0..dim {
                        let ri = row[i];
                        if ri == 0.0 {
                            continue;
                        }
                        for j in 0..=i {
                            gram[i * dim + j] += ri * row[j];
                        }
                    }
                }
                for i in 0..dim {
                    gram[i * dim + i] += rho;
                }
                Factor::Dense(Cholesky::new(dim, &gram)?)
            }
            _ => {
                let mut kernel = vec![0.0; rows * rows];
                for i in 0..rows {
                    let ri = &design[i * dim..(i + 1) * dim];
                    for j in 0..=i {
                        let rj = &design[j * dim..(j + 1) * dim];
                        kernel[i * rows + j] = dot(ri, rj);
                    }
                    kernel[i * rows + i] += rho;
                }
                Factor::Woodbury(Cholesky::new(rows, &kernel)?)
            }
        };
        Ok(DataSolveHandle {
            rows,
            dim,
            rho,
            loss_scale,
            design,
            factor,
        })
    }

    pub fn route(&self) -> SolveRoute {
        match self.factor {
            Factor::Woodbury(_) => SolveRoute::Woodbury,
            Factor::Dense(_) => SolveRoute::Dense,
        }
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn loss_scale(&self) -> f64 {
        self.loss_scale
    }

    /// Number of variables `I`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of samples `M`.
    pub fn samples(&self) -> usize {
        self.rows
    }

    /// `X̃ v`.
    pub fn design_times(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.dim);
        self.design.chunks_exact(self.dim).map(|row| dot(row, v)).collect()
    }

    /// `X̃ᵀ u`.
    pub fn design_transpose_times(&self, u: &[f64]) -> Vec<f64> {
        assert_eq!(u.len(), self.rows);
        let mut out = vec![0.0; self.dim];
        for (row, &c) in self.design.chunks_exact(self.dim).zip(u) {
            if c == 0.0 {
                continue;
            }
            for (o, x) in out.iter_mut().zip(row) {
                *o += c * x;
            }
        }
        out
    }

    /// `(X̃ᵀX̃ + ρI) v`, without forming the `I x I` matrix.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let mut out = self.design_transpose_times(&self.design_times(v));
        for (o, x) in out.iter_mut().zip(v) {
            *o += self.rho * x;
        }
        out
    }

    /// Solves `(X̃ᵀX̃ + ρI) v = r`.
    pub fn solve(&self, r: &[f64]) -> Vec<f64> {
        assert_eq!(r.len(), self.dim);
        match &self.factor {
            Factor::Dense(chol) => {
                let mut v = r.to_vec();
                chol.solve_in_place(&mut v);
                v
            }
            Factor::Woodbury(chol) => {
                // v = (r − X̃ᵀ (ρI + X̃X̃ᵀ)⁻¹ X̃ r) / ρ
                let mut z = self.design_times(r);
                chol.solve_in_place(&mut z);
                let correction = self.design_transpose_times(&z);
                r.iter()
                    .zip(&correction)
                    .map(|(a, b)| (a - b) / self.rho)
                    .collect()
            }
        }
    }

    /// `‖(X̃ᵀX̃ + ρI) v − r‖ / ‖r‖` (absolute when `r = 0`).
    pub fn normal_equation_residual(&self, v: &[f64], r: &[f64]) -> f64 {
        let av = self.apply(v);
        let num: f64 = av.iter().zip(r).map(|(a, b)| (a - b) * (a - b)).sum();
        let den: f64 = dot(r, r);
        if den == 0.0 {
            math::sqrt(num)
        } else {
            math::sqrt(num / den)
        }
    }
}

/// Handle for the unweighted system `(XᵀX + ρI) v = r` built from a dataset.
pub fn precompute_data_solve(dataset: &LabeledDataset, rho: f64) -> Result<DataSolveHandle> {
    DataSolveHandle::new(dataset.samples(), rho, 1.0, SolveRoute::Auto)
}

/// ADMM iterates. All tensors share the sample shape.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverState {
    pub a: Tensor3,
    pub b: Tensor3,
    pub w: Tensor3,
    /// Scaled dual for `A = W`.
    pub p: Tensor3,
    /// Scaled dual for `B = W`.
    pub q: Tensor3,
    pub iteration: usize,
}

impl SolverState {
    pub fn zeros(dims: Dims) -> Self {
        let z = Tensor3::zeros(dims);
        SolverState {
            a: z.clone(),
            b: z.clone(),
            w: z.clone(),
            p: z.clone(),
            q: z,
            iteration: 0,
        }
    }
}

/// Right-hand side `X̃ᵀỹ + ρ(w − p')` of the `A`-update.
fn a_update_rhs(xty: &[f64], rho: f64, state: &SolverState) -> Vec<f64> {
    xty.iter()
        .zip(state.w.as_slice().iter().zip(state.p.as_slice()))
        .map(|(c, (w, p))| c + rho * (w - p))
        .collect()
}

fn check_handle(handle: &DataSolveHandle, dims: Dims, config: &SturmConfig) -> Result<()> {
    let alpha = config.resolved_alpha(dims);
    if handle.dim() != dims.len() || handle.rho() != config.rho || handle.loss_scale() != alpha {
        return Err(Error::InvalidConfig(format!(
            "solve handle was built for I={}, rho={}, alpha={} but the fit uses I={}, rho={}, alpha={}",
            handle.dim(),
            handle.rho(),
            handle.loss_scale(),
            dims.len(),
            config.rho,
            alpha
        )));
    }
    Ok(())
}

/// Data-term update: exact minimizer of
/// `(α/2)‖Xa − y‖² + (ρ/2)‖a − w + p'‖²`.
///
/// `handle` must come from [`DataSolveHandle::new`] with the same samples,
/// `ρ` and the resolved `α` as loss scale.
pub fn update_a(
    state: &SolverState,
    handle: &DataSolveHandle,
    dataset: &LabeledDataset,
    config: &SturmConfig,
) -> Result<Tensor3> {
    let dims = dataset.dims();
    check_handle(handle, dims, config)?;
    if handle.samples() != dataset.len() {
        return Err(Error::InvalidConfig("solve handle built for a different sample count".into()));
    }
    let root = math::sqrt(handle.loss_scale());
    let y: Vec<f64> = dataset.responses().iter().map(|v| v * root).collect();
    let xty = handle.design_transpose_times(&y);
    let rhs = a_update_rhs(&xty, config.rho, state);
    let a = handle.solve(&rhs);
    Tensor3::from_vec(dims, a).map_err(|_| Error::Diverged {
        iteration: state.iteration,
    })
}

/// Outcome of a fit.
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub w: Tensor3,
    /// Objective after each iteration; empty unless `record_trace` was set.
    pub objective_trace: Vec<f64>,
    /// `(‖A − W‖_F, ‖B − W‖_F)` after each iteration.
    pub primal_residuals: Vec<(f64, f64)>,
    pub converged: bool,
    pub iterations_run: usize,
    /// Measured only when built with the `std` feature.
    pub wall_time: Option<Duration>,
}

/// Read-only view of the solver after one iteration, handed to observers.
#[derive(Debug)]
pub struct IterationView<'a> {
    /// 1-based iteration number.
    pub iteration: usize,
    pub state: &'a SolverState,
    /// Right-hand side the `A`-update solved against.
    pub a_rhs: &'a [f64],
    pub handle: &'a DataSolveHandle,
    pub objective: Option<f64>,
    pub residuals: (f64, f64),
}

/// Fits `W` to a labeled dataset, with labels used as `±1` responses.
pub fn fit_sturm(dataset: &LabeledDataset, config: &SturmConfig) -> Result<FitResult> {
    fit_responses(dataset.samples(), &dataset.responses(), config)
}

/// Fits `W` to arbitrary real responses.
pub fn fit_responses(samples: &[Tensor3], responses: &[f64], config: &SturmConfig) -> Result<FitResult> {
    fit_observed(samples, responses, config, |_| {})
}

/// [`fit_responses`] with a callback after every iteration.
pub fn fit_observed<F>(
    samples: &[Tensor3],
    responses: &[f64],
    config: &SturmConfig,
    mut observer: F,
) -> Result<FitResult>
where
    F: FnMut(&IterationView<'_>),
{
    #[cfg(feature = "std")]
    let started = std::time::Instant::now();

    config.validate()?;
    if samples.is_empty() {
        return Err(Error::InvalidDataset("no samples".into()));
    }
    if samples.len() != responses.len() {
        return Err(Error::InvalidDataset(format!(
            "{} samples but {} responses",
            samples.len(),
            responses.len()
        )));
    }
    if let Some(i) = responses.iter().position(|v| !v.is_finite()) {
        return Err(Error::InvalidDataset(format!("response {i} is not finite")));
    }
    let dims = samples[0].dims();
    let alpha = config.resolved_alpha(dims);
    let handle = DataSolveHandle::new(samples, config.rho, alpha, config.route)?;
    let root = math::sqrt(alpha);
    let y_scaled: Vec<f64> = responses.iter().map(|v| v * root).collect();
    let xty = handle.design_transpose_times(&y_scaled);

    let rho = config.rho;
    let tnn_mu = config.tau / rho;
    let l1_mu = config.gamma / (2.0 * rho);

    let mut state = SolverState::zeros(dims);
    let mut objective_trace = Vec::new();
    let mut primal_residuals = Vec::with_capacity(config.max_iters.min(1024));
    let mut converged = false;

    for k in 1..=config.max_iters {
        let diverged = || Error::Diverged { iteration: k };

        let rhs = a_update_rhs(&xty, rho, &state);
        let a = Tensor3::from_vec(dims, handle.solve(&rhs)).map_err(|_| diverged())?;

        let b = prox_tnn(&state.w.try_sub(&state.q)?, tnn_mu).map_err(|e| match e {
            Error::NotConjugateSymmetric { .. } | Error::NonFinite { .. } => diverged(),
            other => other,
        })?;

        let avg: Vec<f64> = a
            .as_slice()
            .iter()
            .zip(state.p.as_slice())
            .zip(b.as_slice().iter().zip(state.q.as_slice()))
            .map(|((a, p), (b, q))| 0.5 * (a + p + b + q))
            .collect();
        let avg = Tensor3::from_vec(dims, avg).map_err(|_| diverged())?;
        let w = prox_l1(&avg, l1_mu)?;

        {
            let (p, q) = (state.p.data_mut(), state.q.data_mut());
            for i in 0..p.len() {
                p[i] += a.as_slice()[i] - w.as_slice()[i];
                q[i] += b.as_slice()[i] - w.as_slice()[i];
            }
        }
        if state.p.as_slice().iter().chain(state.q.as_slice()).any(|v| !v.is_finite()) {
            return Err(diverged());
        }

        let resid_a = fro_norm(&a.try_sub(&w)?);
        let resid_b = fro_norm(&b.try_sub(&w)?);
        state.a = a;
        state.b = b;
        state.w = w;
        state.iteration = k;
        primal_residuals.push((resid_a, resid_b));

        let objective = if config.record_trace {
            let obj = objective_with_handle(&state.w, &handle, &y_scaled, config)?;
            if !obj.is_finite() {
                return Err(diverged());
            }
            objective_trace.push(obj);
            Some(obj)
        } else {
            None
        };

        observer(&IterationView {
            iteration: k,
            state: &state,
            a_rhs: &rhs,
            handle: &handle,
            objective,
            residuals: (resid_a, resid_b),
        });

        let scale = fro_norm(&state.w).max(1.0);
        if resid_a / scale < config.primal_tol && resid_b / scale < config.primal_tol {
            converged = true;
            break;
        }
    }

    #[cfg(feature = "std")]
    let wall_time = Some(started.elapsed());
    #[cfg(not(feature = "std"))]
    let wall_time = None;

    Ok(FitResult {
        iterations_run: state.iteration,
        w: state.w,
        objective_trace,
        primal_residuals,
        converged,
        wall_time,
    })
}

fn penalties(w: &Tensor3, config: &SturmConfig) -> Result<f64> {
    let mut total = 0.0;
    if config.tau != 0.0 {
        total += config.tau * tnn(w)?;
    }
    if config.gamma != 0.0 {
        total += config.gamma * l1_norm(w);
    }
    Ok(total)
}

fn objective_with_handle(w: &Tensor3, handle: &DataSolveHandle, y_scaled: &[f64], config: &SturmConfig) -> Result<f64> {
    let pred = handle.design_times(w.as_slice());
    let loss: f64 = pred.iter().zip(y_scaled).map(|(p, y)| (y - p) * (y - p)).sum();
    Ok(0.5 * loss + penalties(w, config)?)
}

/// `(α/2) Σₘ (yₘ − ⟨Xₘ, W⟩)² + τ‖W‖_TNN + γ‖W‖₁`.
pub fn objective_value(w: &Tensor3, dataset: &LabeledDataset, config: &SturmConfig) -> Result<f64> {
    objective_for_responses(w, dataset.samples(), &dataset.responses(), config)
}

/// [`objective_value`] for arbitrary real responses.
pub fn objective_for_responses(
    w: &Tensor3,
    samples: &[Tensor3],
    responses: &[f64],
    config: &SturmConfig,
) -> Result<f64> {
    let alpha = config.resolved_alpha(w.dims());
    let mut loss = 0.0;
    for (x, y) in samples.iter().zip(responses) {
        let r = y - inner_product(x, w)?;
        loss += r * r;
    }
    Ok(0.5 * alpha * loss + penalties(w, config)?)
}

/// `+1` when `⟨x, W⟩ ≥ 0`, else `−1`. An exact zero score is `+1`.
pub fn predict(w: &Tensor3, x: &Tensor3) -> Result<Label> {
    ensure_same_dims(w, x)?;
    Ok(Label::from_score(inner_product(x, w)?))
}

/// Fraction of samples whose prediction matches the label.
pub fn accuracy(w: &Tensor3, dataset: &LabeledDataset) -> Result<f64> {
    let mut hits = 0usize;
    for (x, &y) in dataset.samples().iter().zip(dataset.labels()) {
        if predict(w, x)? == y {
            hits += 1;
        }
    }
    Ok(hits as f64 / dataset.len() as f64)
}
