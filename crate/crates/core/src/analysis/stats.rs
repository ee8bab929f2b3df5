use super::lower_median;
use crate::engine::Snapshot;

/// `(estimate - log2 n) / log2 n`.
#[inline]
pub fn relative_error(estimate: f64, n: u64) -> f64 {
    let log_n = (n as f64).log2();
    (estimate - log_n) / log_n
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelativeErrorRow {
    pub parallel_time: f64,
    pub min: f64,
    pub median: f64,
    pub max: f64,
}

/// Per snapshot index, the spread across runs of each run's median-estimate
/// relative error. Runs are truncated to the shortest one.
pub fn relative_error_stats(runs: &[Vec<Snapshot>]) -> Vec<RelativeErrorRow> {
    let len = runs.iter().map(Vec::len).min().unwrap_or(0);
    let mut errors = Vec::with_capacity(runs.len());
    (0..len)
        .map(|i| {
            errors.clear();
            errors.extend(runs.iter().map(|r| relative_error(r[i].est_median, r[i].n)));
            let min = errors.iter().copied().fold(f64::INFINITY, f64::min);
            let max = errors.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            RelativeErrorRow {
                parallel_time: runs[0][i].parallel_time,
                min,
                median: lower_median(&mut errors),
                max,
            }
        })
        .collect()
}

/// Median of `|relative error|` pooled over every run's snapshots with
/// `parallel_time >= from`.
pub fn window_median_abs_error(runs: &[Vec<Snapshot>], from: f64) -> f64 {
    let mut pooled: Vec<f64> = runs
        .iter()
        .flatten()
        .filter(|s| s.parallel_time >= from)
        .map(|s| relative_error(s.est_median, s.n).abs())
        .collect();
    lower_median(&mut pooled)
}
