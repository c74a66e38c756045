//! Percentile bootstrap over items.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{ItemDiagnostics, Metric};
use crate::error::{Error, Result};

pub const DEFAULT_RESAMPLES: usize = 1_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConfidenceInterval {
    pub low: f64,
    pub high: f64,
}

/// 95% percentile interval of `stat` under item-level resampling with
/// replacement. Endpoints are nearest-rank order statistics, so they are
/// always values the statistic actually took.
pub fn bootstrap_ci_with<T, F>(items: &[T], resamples: usize, seed: u64, stat: F) -> Result<ConfidenceInterval>
where
    F: Fn(&[&T]) -> f64,
{
    if items.is_empty() {
        return Err(Error::EmptyInput("bootstrap items"));
    }
    if resamples == 0 {
        return Err(Error::Invalid("bootstrap needs at least one resample".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sample: Vec<&T> = Vec::with_capacity(items.len());
    let mut stats = Vec::with_capacity(resamples);
    for _ in 0..resamples {
        sample.clear();
        for _ in 0..items.len() {
            sample.push(&items[rng.gen_range(0..items.len())]);
        }
        stats.push(stat(&sample));
    }
    stats.sort_by(f64::total_cmp);
    let rank = |q: f64| {
        let r = (q * resamples as f64).ceil() as usize;
        stats[r.clamp(1, resamples) - 1]
    };
    Ok(ConfidenceInterval {
        low: rank(0.025),
        high: rank(0.975),
    })
}

pub fn bootstrap_ci(
    items: &[ItemDiagnostics],
    metric: Metric,
    resamples: usize,
    seed: u64,
    epsilon: f64,
) -> Result<ConfidenceInterval> {
    bootstrap_ci_with(items, resamples, seed, |s| {
        metric.aggregate(s.iter().copied(), epsilon)
    })
}
