use std::fmt;

#[cfg(test)]
use crate::protocols::Phase;
use crate::protocols::{phase_of, state_scaled, AgentState, ProtocolParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SyncViolation {
    /// Agents disagree on `max`.
    CommonMax,
    /// Agents disagree on `lastMax`.
    CommonLastMax,
    /// The shared values fall outside `[0.5 log n, 40(k+1)^2 log n]`.
    EstimateRange,
    /// Occupied phases are not within {exchange, hold} or {hold, reset}.
    PhaseWindow,
    /// Some agent has `time >= tau1 * M`.
    TimeCeiling,
    /// Some agent exceeds the opt-in interactions ceiling.
    InteractionsCeiling,
}

impl SyncViolation {
    pub fn name(self) -> &'static str {
        match self {
            Self::CommonMax => "commonMax",
            Self::CommonLastMax => "commonLastMax",
            Self::EstimateRange => "estimate-range",
            Self::PhaseWindow => "phase-window",
            Self::TimeCeiling => "time-ceiling",
            Self::InteractionsCeiling => "interactions-ceiling",
        }
    }
}

impl fmt::Display for SyncViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct SyncOptions {
    /// Parallel time `t` since the last global reset burst. When set, every
    /// agent must also satisfy `interactions <= 2t(1 + sqrt(k/t)) log n`.
    pub interactions_horizon: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyncReport {
    pub is_synchronized: bool,
    pub common_max: Option<u64>,
    pub violations: Vec<SyncViolation>,
}

/// Synchronized-population predicate.
///
/// The "wait" phase of the definition is the hold phase.
pub fn is_synchronized(states: &[AgentState], p: &ProtocolParams, opts: SyncOptions) -> SyncReport {
    let mut violations = Vec::new();
    let log_n = (states.len() as f64).log2();
    let k = f64::from(p.k());

    let shared = |f: fn(&AgentState) -> u64| {
        let first = f(states.first()?);
        states.iter().all(|s| f(s) == first).then_some(first)
    };
    let common_max = shared(|s| s.max);
    let common_last = shared(|s| s.last_max);
    if common_max.is_none() {
        violations.push(SyncViolation::CommonMax);
    }
    if common_last.is_none() {
        violations.push(SyncViolation::CommonLastMax);
    }
    let (lo, hi) = (0.5 * log_n, 40.0 * (k + 1.0).powi(2) * log_n);
    let in_range = |x: u64| (lo..=hi).contains(&(x as f64));
    if [common_max, common_last]
        .iter()
        .flatten()
        .any(|&x| !in_range(x))
    {
        violations.push(SyncViolation::EstimateRange);
    }

    let mut occupied = [false; 3];
    for s in states {
        occupied[phase_of(s, p).index()] = true;
    }
    let [exchange, _, reset] = occupied;
    if exchange && reset {
        violations.push(SyncViolation::PhaseWindow);
    }

    let m = states
        .iter()
        .map(AgentState::effective_max)
        .max()
        .unwrap_or(0);
    let ceiling = state_scaled(p.tau1(), m);
    if states.iter().any(|s| s.time >= ceiling) {
        violations.push(SyncViolation::TimeCeiling);
    }

    if let Some(t) = opts.interactions_horizon {
        let limit = if t > 0.0 {
            2.0 * t * (1.0 + (k / t).sqrt()) * log_n
        } else {
            0.0
        };
        if states.iter().any(|s| s.interactions as f64 > limit) {
            violations.push(SyncViolation::InteractionsCeiling);
        }
    }

    SyncReport {
        is_synchronized: violations.is_empty(),
        common_max,
        violations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn flat(n: usize, s: AgentState) -> Vec<AgentState> {
        vec![s; n]
    }

    #[test]
    fn all_hold_at_thirteen_is_synchronized() {
        let p = ProtocolParams::empirical();
        let states = flat(10_000, AgentState::new(13, 13, 30, 4));
        assert_eq!(phase_of(&states[0], &p), Phase::Hold);
        let report = is_synchronized(&states, &p, SyncOptions::default());
        assert!(report.is_synchronized, "{:?}", report.violations);
        assert_eq!(report.common_max, Some(13));
    }

    #[test]
    fn differing_max_is_reported() {
        let p = ProtocolParams::empirical();
        let mut states = flat(100, AgentState::new(13, 13, 30, 4));
        states[7] = AgentState::new(14, 13, 30, 4);
        let report = is_synchronized(&states, &p, SyncOptions::default());
        assert!(!report.is_synchronized);
        assert!(report.violations.contains(&SyncViolation::CommonMax));
        assert_eq!(SyncViolation::CommonMax.name(), "commonMax");
        assert_eq!(report.common_max, None);
    }

    #[test]
    fn exchange_and_reset_together_break_the_window() {
        let p = ProtocolParams::empirical();
        let mut states = flat(100, AgentState::new(13, 13, 60, 4));
        states[0].time = 5;
        let report = is_synchronized(&states, &p, SyncOptions::default());
        assert_eq!(report.violations, vec![SyncViolation::PhaseWindow]);
        assert_eq!(SyncViolation::PhaseWindow.to_string(), "phase-window");
    }

    #[test]
    fn range_and_ceiling() {
        let p = ProtocolParams::empirical();
        // 0.5 * log2(10^4) = 6.6 > 5
        let report = is_synchronized(
            &flat(10_000, AgentState::new(5, 5, 12, 0)),
            &p,
            SyncOptions::default(),
        );
        assert_eq!(report.violations, vec![SyncViolation::EstimateRange]);
        let report = is_synchronized(
            &flat(100, AgentState::new(13, 13, 78, 0)),
            &p,
            SyncOptions::default(),
        );
        assert_eq!(report.violations, vec![SyncViolation::TimeCeiling]);
    }

    #[test]
    fn interactions_ceiling_is_opt_in() {
        let p = ProtocolParams::empirical();
        let states = flat(1024, AgentState::new(13, 13, 30, 500));
        assert!(is_synchronized(&states, &p, SyncOptions::default()).is_synchronized);
        // t = 10: 2 * 10 * (1 + sqrt(1.6)) * 10 = 452.98 < 500
        let opts = SyncOptions {
            interactions_horizon: Some(10.0),
        };
        let report = is_synchronized(&states, &p, opts);
        assert_eq!(report.violations, vec![SyncViolation::InteractionsCeiling]);
    }

    proptest! {
        #[test]
        fn one_bad_agent_flips_the_verdict(
            idx in 0usize..64,
            bad_max in 14u64..100,
            bad_time in -5i64..200,
        ) {
            let p = ProtocolParams::empirical();
            let mut states = flat(64, AgentState::new(13, 13, 30, 4));
            prop_assert!(is_synchronized(&states, &p, SyncOptions::default()).is_synchronized);
            states[idx] = AgentState::new(bad_max, 13, bad_time, 4);
            prop_assert!(!is_synchronized(&states, &p, SyncOptions::default()).is_synchronized);
        }
    }
}
