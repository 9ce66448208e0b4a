//! Convergence traces (CSV) and cross-validation reports (JSON).

use std::path::Path;

use serde::{Deserialize, Serialize};
use sturm_core::harness::{CvPlan, CvReport, FoldOutcome};
use sturm_core::FitResult;

use crate::error::{IoError, Result};
use crate::write_atomic;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub iter: usize,
    /// Empty when the objective was not recorded.
    pub objective: Option<f64>,
    #[serde(rename = "resid_A")]
    pub resid_a: f64,
    #[serde(rename = "resid_B")]
    pub resid_b: f64,
}

pub fn trace_rows(fit: &FitResult) -> Vec<TraceRow> {
    fit.primal_residuals
        .iter()
        .enumerate()
        .map(|(k, &(resid_a, resid_b))| TraceRow {
            iter: k + 1,
            objective: fit.objective_trace.get(k).copied(),
            resid_a,
            resid_b,
        })
        .collect()
}

/// CSV with header `iter,objective,resid_A,resid_B`, one row per iteration.
pub fn trace_csv(rows: &[TraceRow]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| IoError::Argument(format!("trace csv: {e}")))?;
    }
    w.into_inner().map_err(|e| IoError::Argument(format!("trace csv: {e}")))
}

pub fn write_trace(path: &Path, fit: &FitResult) -> Result<()> {
    write_atomic(path, &trace_csv(&trace_rows(fit))?)
}

pub fn read_trace(path: &Path) -> Result<Vec<TraceRow>> {
    let bytes = std::fs::read(path).map_err(|e| IoError::io(path, e))?;
    csv::Reader::from_reader(bytes.as_slice())
        .deserialize()
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| IoError::Mismatch(format!("{}: {e}", path.display())))
}

/// On-disk cross-validation report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvReportFile {
    /// Models are scored after zeroing all but the top-`eta` % of
    /// coefficients; there is no downstream classifier.
    pub prediction: String,
    pub seed: u64,
    pub folds: Vec<FoldOutcome>,
    pub mean_accuracy: f64,
    pub std_accuracy: f64,
    pub mean_sparsity: f64,
    pub std_sparsity: f64,
}

impl CvReportFile {
    pub fn new(report: CvReport, seed: u64) -> Self {
        CvReportFile {
            prediction: "masked-sturm".into(),
            seed,
            folds: report.folds,
            mean_accuracy: report.mean_accuracy,
            std_accuracy: report.std_accuracy,
            mean_sparsity: report.mean_sparsity,
            std_sparsity: report.std_sparsity,
        }
    }
}

pub fn write_report(path: &Path, report: &CvReportFile) -> Result<()> {
    let mut text = serde_json::to_vec_pretty(report).map_err(|e| IoError::Argument(e.to_string()))?;
    text.push(b'\n');
    write_atomic(path, &text)
}

/// Reads a plan; keys that are absent take their defaults, unknown keys are
/// rejected.
pub fn read_plan(path: &Path) -> Result<CvPlan> {
    let text = std::fs::read_to_string(path).map_err(|e| IoError::io(path, e))?;
    parse_plan(&text, path)
}

pub fn parse_plan(text: &str, path: &Path) -> Result<CvPlan> {
    let plan: CvPlan = serde_json::from_str(text).map_err(|e| IoError::Plan {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    plan.validate().map_err(|e| IoError::Plan {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    Ok(plan)
}
