//! Sample statistics and percentile-bootstrap intervals for the variance.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ensembles::{derive_seed, RngStream};
use crate::error::{Error, Result};

pub const BOOTSTRAP_RESAMPLES: usize = 1000;
pub const CI_LEVEL: f64 = 0.95;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleStats {
    pub mean: f64,
    /// `sqrt(var / N)`
    pub mean_stderr: f64,
    /// Unbiased sample variance.
    pub var: f64,
    pub samples: usize,
}

/// Tree summation; the grouping depends only on the length.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        n => pairwise_sum(&values[..n / 2]) + pairwise_sum(&values[n / 2..]),
    }
}

fn unbiased_var(values: &[f64], mean: f64) -> f64 {
    let dev: Vec<f64> = values.iter().map(|x| (x - mean) * (x - mean)).collect();
    pairwise_sum(&dev) / (values.len() - 1) as f64
}

pub fn sample_stats(values: &[f64]) -> Result<SampleStats> {
    let n = values.len();
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "{n} samples; need at least 2"
        )));
    }
    if let Some(x) = values.iter().find(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument(format!("non-finite sample {x}")));
    }
    let mean = pairwise_sum(values) / n as f64;
    let var = unbiased_var(values, mean);
    Ok(SampleStats {
        mean,
        mean_stderr: (var / n as f64).sqrt(),
        var,
        samples: n,
    })
}

/// Linear-interpolation quantile of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Percentile-bootstrap interval for the unbiased variance.
///
/// Resample `b` draws from stream `b` of a seed derived from `stream`, so
/// the interval does not depend on the thread count. The interval is
/// widened to contain the point estimate when the percentiles miss it.
pub fn bootstrap_var_ci(
    values: &[f64],
    resamples: usize,
    level: f64,
    stream: RngStream,
) -> Result<(f64, f64)> {
    let n = values.len();
    if n < 2 || resamples < 2 {
        return Err(Error::InvalidArgument(format!(
            "bootstrap of {n} values with {resamples} resamples"
        )));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidArgument(format!("confidence level {level}")));
    }
    let point = sample_stats(values)?.var;
    let base = derive_seed(stream.seed, stream.stream_id);
    let mut vars: Vec<f64> = (0..resamples)
        .into_par_iter()
        .map(|b| {
            let mut rng = RngStream::new(base, b as u64).rng();
            let draw: Vec<f64> = (0..n).map(|_| values[rng.random_range(0..n)]).collect();
            let mean = pairwise_sum(&draw) / n as f64;
            unbiased_var(&draw, mean)
        })
        .collect();
    vars.sort_by(f64::total_cmp);
    let tail = (1.0 - level) / 2.0;
    let lo = quantile(&vars, tail).min(point);
    let hi = quantile(&vars, 1.0 - tail).max(point);
    Ok((lo, hi))
}
