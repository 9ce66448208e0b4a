use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use sturm_cli::bench::{bench_iterations, format_table};
use sturm_cli::dataset::{read_dataset, read_samples, write_dataset, DatasetPaths};
use sturm_cli::labels::{read_labels, write_labels};
use sturm_cli::report::{read_plan, write_report, write_trace, CvReportFile};
use sturm_cli::strm::{read_single, write_tensors};
use sturm_cli::{parse_dims, IoError, Result};
use sturm_core::harness::{generate_synthetic, run_nested_cv, CvPlan, SynthSpec};
use sturm_core::{fit_sturm, objective_value, predict, Dims, Label, SturmConfig};

const EXIT_CODES: &str = "\
Exit codes:
  0  success
  2  usage error (unknown flag, malformed flag value)
  3  file could not be read or written
  4  malformed input file (header, payload, labels, shape mismatch)
  5  invalid configuration or plan
  6  infeasible cross-validation folds
  7  numerical failure during fitting

Errors are printed to stderr as a single line:
  error kind=<kind> code=<code> msg=<JSON string>";

/// Sparse tubal-regularized multilinear regression.
#[derive(Debug, Parser)]
#[command(name = "sturm", version, after_help = EXIT_CODES)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a synthetic dataset: PREFIX.strm, PREFIX.labels and the
    /// ground truth PREFIX.truth.strm.
    Synth {
        /// Sample shape, e.g. 10x10x10.
        #[arg(long, value_parser = dims_arg)]
        dims: Dims,
        /// Number of samples.
        #[arg(long)]
        m: usize,
        /// Tubal rank of the ground truth before masking.
        #[arg(long)]
        rank: usize,
        /// Fraction of nonzero ground-truth entries, in (0, 1].
        #[arg(long)]
        density: f64,
        /// Standard deviation of the label noise.
        #[arg(long, default_value_t = 0.0)]
        noise: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit a model to PREFIX.strm / PREFIX.labels.
    Fit {
        #[arg(long)]
        data: PathBuf,
        /// Tubal nuclear norm weight.
        #[arg(long)]
        tau: f64,
        /// l1 weight.
        #[arg(long)]
        gamma: f64,
        #[arg(long, default_value_t = 1.0)]
        rho: f64,
        /// Loss weight; defaults to sqrt(max(I1, I2) * I3).
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long, default_value_t = 200)]
        max_iters: usize,
        /// Relative primal residual tolerance; 0 runs all iterations.
        #[arg(long, default_value_t = 1e-4)]
        tol: f64,
        /// Model output (STRM, one tensor).
        #[arg(long)]
        out: PathBuf,
        /// Per-iteration CSV: iter, objective, resid_A, resid_B.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Predict labels for PREFIX.strm; prints accuracy to stderr when
    /// PREFIX.labels exists.
    Predict {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
        /// One +1 or -1 per line.
        #[arg(long)]
        out: PathBuf,
    },
    /// Nested cross-validation over the grids of a JSON plan.
    Cv {
        #[arg(long)]
        data: PathBuf,
        /// JSON object with CvPlan fields; absent keys take defaults.
        #[arg(long)]
        plan: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Per-iteration solver timing on random data.
    Bench {
        /// One or more sample shapes.
        #[arg(long, value_parser = dims_arg, num_args = 1.., required = true)]
        dims: Vec<Dims>,
        #[arg(long, default_value_t = 20)]
        m: usize,
        /// Iterations per shape, including one warm-up.
        #[arg(long, default_value_t = 20)]
        iters: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn dims_arg(s: &str) -> std::result::Result<Dims, String> {
    parse_dims(s).map_err(|e| e.to_string())
}

fn json_line(kind: &str, code: u8, msg: &str) -> String {
    let msg = serde_json::to_string(msg).unwrap_or_else(|_| "\"?\"".into());
    format!("error kind={kind} code={code} msg={msg}")
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            let text = if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand {
                "missing subcommand; see `sturm --help`".to_string()
            } else {
                e.to_string()
            };
            let first = text.lines().next().unwrap_or("usage error");
            eprintln!("{}", json_line("usage", 2, first.trim_start_matches("error: ")));
            return ExitCode::from(2);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", json_line(e.kind(), e.exit_code(), &e.to_string()));
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Synth {
            dims,
            m,
            rank,
            density,
            noise,
            seed,
            out,
        } => {
            let spec = SynthSpec {
                dims,
                samples: m,
                true_tubal_rank: rank,
                density,
                noise_sigma: noise,
                seed,
            };
            let (dataset, truth) = generate_synthetic(&spec)?;
            let paths = DatasetPaths::from_prefix(&out);
            write_dataset(&dataset, &paths.tensors, &paths.labels)?;
            write_tensors(&paths.truth, dims, &[truth])?;
            let positives = dataset.labels().iter().filter(|l| **l == Label::Positive).count();
            println!("samples={m} dims={dims} positives={positives}");
        }
        Command::Fit {
            data,
            tau,
            gamma,
            rho,
            alpha,
            max_iters,
            tol,
            out,
            trace,
        } => {
            let paths = DatasetPaths::from_prefix(&data);
            let dataset = read_dataset(&paths.tensors, &paths.labels)?;
            let config = SturmConfig {
                tau,
                gamma,
                rho,
                alpha,
                max_iters,
                primal_tol: tol,
                record_trace: trace.is_some(),
                ..SturmConfig::default()
            };
            let fit = fit_sturm(&dataset, &config)?;
            write_tensors(&out, dataset.dims(), std::slice::from_ref(&fit.w))?;
            if let Some(path) = trace {
                write_trace(&path, &fit)?;
            }
            let objective = objective_value(&fit.w, &dataset, &config)?;
            println!(
                "iterations={} converged={} objective={objective}",
                fit.iterations_run, fit.converged
            );
        }
        Command::Predict { model, data, out } => {
            let w = read_single(&model)?;
            let paths = DatasetPaths::from_prefix(&data);
            let samples = read_samples(&paths.tensors)?;
            let preds: Vec<Label> = samples.iter().map(|x| predict(&w, x)).collect::<sturm_core::Result<_>>()?;
            write_labels(&out, &preds)?;
            if paths.labels.exists() {
                let truth = read_labels(&paths.labels)?;
                if truth.len() != preds.len() {
                    return Err(IoError::Mismatch(format!(
                        "{} has {} labels but there are {} samples",
                        paths.labels.display(),
                        truth.len(),
                        preds.len()
                    )));
                }
                let hits = truth.iter().zip(&preds).filter(|(a, b)| a == b).count();
                eprintln!("accuracy={}", hits as f64 / preds.len() as f64);
            }
        }
        Command::Cv { data, plan, seed, out } => {
            let paths = DatasetPaths::from_prefix(&data);
            let dataset = read_dataset(&paths.tensors, &paths.labels)?;
            let plan = match plan {
                Some(p) => read_plan(&p)?,
                None => CvPlan::default(),
            };
            let report = run_nested_cv(&dataset, &plan, seed)?;
            let file = CvReportFile::new(report, seed);
            write_report(&out, &file)?;
            println!(
                "mean_accuracy={} std_accuracy={} mean_sparsity={} std_sparsity={}",
                file.mean_accuracy, file.std_accuracy, file.mean_sparsity, file.std_sparsity
            );
        }
        Command::Bench { dims, m, iters, seed } => {
            let rows = dims
                .into_iter()
                .map(|d| bench_iterations(d, m, iters, seed))
                .collect::<Result<Vec<_>>>()?;
            print!("{}", format_table(&rows));
        }
    }
    Ok(())
}
