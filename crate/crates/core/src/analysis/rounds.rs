use std::collections::{BTreeMap, HashMap};

use super::AnalysisError;
use crate::engine::ResetEvent;

/// Gap, in units of `log2 n` parallel time, that separates two bursts.
pub const DEFAULT_GAP_FACTOR: f64 = 0.5;

/// A maximal cluster of resets.
#[derive(Debug, Clone, PartialEq)]
pub struct Burst {
    pub start: f64,
    pub end: f64,
    /// Lower median of the reset times in the burst.
    pub center: f64,
    pub resets: u64,
    /// Population size at the burst's center.
    pub live_agents: u64,
    /// resets-per-agent -> number of live agents with that many resets.
    /// Live agents that did not reset are counted under 0.
    pub reset_histogram: BTreeMap<u64, u64>,
}

impl Burst {
    /// Every live agent reset exactly once during the burst.
    pub fn every_agent_once(&self) -> bool {
        self.reset_histogram.len() == 1 && self.reset_histogram.get(&1) == Some(&self.live_agents)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoundReport {
    /// Start time of each burst.
    pub round_boundaries: Vec<f64>,
    pub bursts: Vec<Burst>,
    /// Distances between consecutive burst centers.
    pub round_lengths: Vec<f64>,
}

fn size_at(n_trace: &[(f64, u64)], t: f64) -> u64 {
    let idx = n_trace.partition_point(|&(time, _)| time <= t);
    n_trace[idx.saturating_sub(1)].1
}

/// Clusters a time-sorted reset log into bursts. A new burst starts when two
/// consecutive resets are more than `gap_factor * log2 n` parallel time apart.
pub fn detect_rounds(
    reset_log: &[ResetEvent],
    n_trace: &[(f64, u64)],
    gap_factor: f64,
) -> Result<RoundReport, AnalysisError> {
    if reset_log.is_empty() {
        return Err(AnalysisError::NoResets);
    }
    if n_trace.is_empty() {
        return Err(AnalysisError::InvalidArgument("empty size trace".into()));
    }
    if reset_log
        .windows(2)
        .any(|w| w[1].parallel_time < w[0].parallel_time)
    {
        return Err(AnalysisError::InvalidArgument(
            "reset log must be sorted by time".into(),
        ));
    }

    let mut groups: Vec<&[ResetEvent]> = Vec::new();
    let mut first = 0;
    for i in 1..reset_log.len() {
        let gap = reset_log[i].parallel_time - reset_log[i - 1].parallel_time;
        let n = size_at(n_trace, reset_log[i - 1].parallel_time).max(2);
        if gap > gap_factor * (n as f64).log2() {
            groups.push(&reset_log[first..i]);
            first = i;
        }
    }
    groups.push(&reset_log[first..]);

    let bursts: Vec<Burst> = groups
        .into_iter()
        .map(|events| {
            let center = events[(events.len() - 1) / 2].parallel_time;
            let live = size_at(n_trace, center);
            let mut per_agent: HashMap<u64, u64> = HashMap::new();
            for e in events {
                *per_agent.entry(e.agent_id).or_default() += 1;
            }
            let mut reset_histogram = BTreeMap::new();
            for &count in per_agent.values() {
                *reset_histogram.entry(count).or_default() += 1;
            }
            let silent = live.saturating_sub(per_agent.len() as u64);
            if silent > 0 {
                reset_histogram.insert(0, silent);
            }
            Burst {
                start: events[0].parallel_time,
                end: events[events.len() - 1].parallel_time,
                center,
                resets: events.len() as u64,
                live_agents: live,
                reset_histogram,
            }
        })
        .collect();

    Ok(RoundReport {
        round_boundaries: bursts.iter().map(|b| b.start).collect(),
        round_lengths: bursts
            .windows(2)
            .map(|w| w[1].center - w[0].center)
            .collect(),
        bursts,
    })
}
