use serde::{Deserialize, Serialize};

use super::{Population, Protocol};
use crate::analysis::lower_median;

/// Aggregates over the population at one snapshot boundary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub parallel_time: f64,
    pub n: u64,
    pub est_min: f64,
    pub est_median: f64,
    pub est_max: f64,
    /// Agents in the exchange, hold and reset phases. All zero for protocols
    /// without phases.
    pub phase_counts: [u64; 3],
    pub resets: u64,
    pub max_bits: u32,
}

impl Snapshot {
    pub(crate) fn capture<P: Protocol>(
        pop: &Population<P::State>,
        protocol: &P,
        resets: u64,
        scratch: &mut Vec<f64>,
    ) -> Self {
        scratch.clear();
        let mut phase_counts = [0u64; 3];
        let mut max_bits = 0;
        let mut est_min = f64::INFINITY;
        let mut est_max = f64::NEG_INFINITY;
        for s in pop.states() {
            let obs = protocol.observe(s);
            if let Some(phase) = obs.phase {
                phase_counts[phase.index()] += 1;
            }
            max_bits = max_bits.max(obs.bits);
            est_min = est_min.min(obs.estimate);
            est_max = est_max.max(obs.estimate);
            scratch.push(obs.estimate);
        }
        Self {
            parallel_time: pop.parallel_time(),
            n: pop.len() as u64,
            est_min,
            est_median: lower_median(scratch),
            est_max,
            phase_counts,
            resets,
            max_bits,
        }
    }
}
