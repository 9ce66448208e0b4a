//! Per-iteration timing of the solver on random data.

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sturm_core::{fit_observed, Dims, SturmConfig, Tensor3};

use crate::error::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub dims: Dims,
    pub samples: usize,
    /// Timed iterations; the first iteration is a warm-up and not counted.
    pub timed: usize,
    pub median: Duration,
    pub mean: Duration,
}

/// Runs `iters` solver iterations on `samples` random tensors of shape
/// `dims` and reports per-iteration wall time, skipping the first iteration.
pub fn bench_iterations(dims: Dims, samples: usize, iters: usize, seed: u64) -> Result<BenchRow> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let xs: Vec<Tensor3> = (0..samples)
        .map(|_| Tensor3::from_fn(dims, |_, _, _| rng.random_range(-1.0..1.0)))
        .collect::<std::result::Result<_, _>>()?;
    let ys: Vec<f64> = (0..samples).map(|_| if rng.random_bool(0.5) { 1.0 } else { -1.0 }).collect();
    let config = SturmConfig {
        max_iters: iters.max(2),
        primal_tol: 0.0,
        record_trace: false,
        ..SturmConfig::new(0.1, 0.1)
    };
    let mut stamps = Vec::with_capacity(config.max_iters);
    fit_observed(&xs, &ys, &config, |_| stamps.push(Instant::now()))?;
    let mut laps: Vec<Duration> = stamps.windows(2).map(|w| w[1] - w[0]).collect();
    laps.sort_unstable();
    let total: Duration = laps.iter().sum();
    let n = laps.len();
    let median = if n % 2 == 1 {
        laps[n / 2]
    } else {
        (laps[n / 2 - 1] + laps[n / 2]) / 2
    };
    Ok(BenchRow {
        dims,
        samples,
        timed: n,
        median,
        mean: total / n as u32,
    })
}

/// Fixed-width table with timings relative to the first row.
pub fn format_table(rows: &[BenchRow]) -> String {
    let mut out = format!(
        "{:<14} {:>8} {:>5} {:>6} {:>12} {:>12} {:>7}\n",
        "dims", "I", "M", "iters", "median_ms", "mean_ms", "ratio"
    );
    let base = rows.first().map(|r| r.median.as_secs_f64());
    for r in rows {
        let ratio = base.map_or(1.0, |b| r.median.as_secs_f64() / b);
        out.push_str(&format!(
            "{:<14} {:>8} {:>5} {:>6} {:>12.4} {:>12.4} {:>7.2}\n",
            r.dims.to_string(),
            r.dims.len(),
            r.samples,
            r.timed,
            r.median.as_secs_f64() * 1e3,
            r.mean.as_secs_f64() * 1e3,
            ratio
        ));
    }
    out
}
