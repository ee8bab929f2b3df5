//! Observables, predicates and Monte Carlo checks over simulated runs.
//!
//! Logarithms are base 2 throughout. Medians over an even number of values
//! take the lower of the two central values.

mod bounds;
mod rounds;
mod stats;
mod sync;

use thiserror::Error;

use crate::engine::EngineError;
use crate::protocols::{AgentState, ProtocolParams};

pub use bounds::{
    check_chvp_bounds, check_epidemic, check_grv_bounds, check_participation, check_phase_clock,
    check_sync, chvp_thresholds, epidemic_bound, evaluate_phase_clock, grv_max_bounds,
    participation_interval, phase_clock_duration, run_chvp, BoundCheck, ChvpStart,
    PhaseClockOptions,
};
pub use rounds::{detect_rounds, Burst, RoundReport, DEFAULT_GAP_FACTOR};
pub use stats::{relative_error, relative_error_stats, window_median_abs_error, RelativeErrorRow};
pub use sync::{is_synchronized, SyncOptions, SyncReport, SyncViolation};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("n must be at least {min} (got {n})")]
    TooFewAgents { n: u64, min: u64 },
    #[error("k must satisfy 1 <= k <= n")]
    BadBatch,
    #[error("delta too large for m")]
    DeltaTooLarge,
    #[error("no resets recorded")]
    NoResets,
    #[error("{0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

/// Reported estimate: `max{max, lastMax}` with the overestimation undone.
#[inline]
pub fn estimate_of(s: &AgentState, p: &ProtocolParams) -> f64 {
    s.effective_max() as f64 / p.overestimation() as f64
}

/// Bits needed for `|value|`, at least 1.
#[inline]
pub fn bit_length(value: i64) -> u32 {
    (64 - value.unsigned_abs().leading_zeros()).max(1)
}

/// Bits to store all four variables, plus a sign bit for `time`.
#[inline]
pub fn memory_bits(s: &AgentState) -> u32 {
    let unsigned = |x: u64| (64 - x.leading_zeros()).max(1);
    unsigned(s.max) + unsigned(s.last_max) + bit_length(s.time) + 1 + unsigned(s.interactions)
}

/// Lower median; reorders `values`. NaN for an empty slice.
pub fn lower_median(values: &mut [f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mid = (values.len() - 1) / 2;
    *values.select_nth_unstable_by(mid, f64::total_cmp).1
}
