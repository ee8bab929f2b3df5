use serde::{Deserialize, Serialize};

use super::{EngineError, Population, Protocol};
use crate::sampling::SeededCoin;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum RemovalPolicy {
    UniformRandom,
    /// Agents with the greatest reported estimate go first, lower index
    /// first among equal estimates.
    LargestEstimateFirst,
    SmallestEstimateFirst,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "camelCase")]
pub enum AdversaryAction {
    AddAgents { count: u64 },
    RemoveAgents { count: u64, policy: RemovalPolicy },
}

/// An add or remove instruction, applied at the first snapshot boundary at
/// or after `at` parallel time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdversaryEvent {
    #[serde(rename = "atParallelTime")]
    pub at: f64,
    pub action: AdversaryAction,
}

impl AdversaryEvent {
    pub fn add(at: f64, count: u64) -> Self {
        Self {
            at,
            action: AdversaryAction::AddAgents { count },
        }
    }

    pub fn remove(at: f64, count: u64, policy: RemovalPolicy) -> Self {
        Self {
            at,
            action: AdversaryAction::RemoveAgents { count, policy },
        }
    }

    /// Size after applying this event to a population of `n`.
    pub fn resulting_size(&self, n: u64) -> Result<u64, EngineError> {
        match self.action {
            AdversaryAction::AddAgents { count } => Ok(n.saturating_add(count)),
            AdversaryAction::RemoveAgents { count, .. } => match n.checked_sub(count) {
                Some(rest) if rest >= 2 => Ok(rest),
                _ => Err(EngineError::PopulationTooSmall),
            },
        }
    }
}

/// Checks a schedule against an initial size: times must be finite and
/// non-decreasing, and no removal may leave fewer than two agents.
pub fn validate_schedule(n0: u64, schedule: &[AdversaryEvent]) -> Result<(), EngineError> {
    let mut n = n0;
    let mut last = f64::NEG_INFINITY;
    for (index, event) in schedule.iter().enumerate() {
        if !event.at.is_finite() || event.at < last {
            return Err(EngineError::InvalidSchedule {
                index,
                reason: "event times must be finite and non-decreasing".into(),
            });
        }
        last = event.at;
        n = event
            .resulting_size(n)
            .map_err(|_| EngineError::InvalidSchedule {
                index,
                reason: format!("removal would leave fewer than 2 of {n} agents"),
            })?;
    }
    Ok(())
}

pub fn apply_adversary_event<P: Protocol>(
    pop: &mut Population<P::State>,
    event: &AdversaryEvent,
    protocol: &P,
    coin: &mut SeededCoin,
) -> Result<(), EngineError> {
    event.resulting_size(pop.len() as u64)?;
    match event.action {
        AdversaryAction::AddAgents { count } => {
            for _ in 0..count {
                pop.push(protocol.joining());
            }
        }
        AdversaryAction::RemoveAgents { count, policy } => match policy {
            RemovalPolicy::UniformRandom => {
                for _ in 0..count {
                    let index = coin.below(pop.len() as u64) as usize;
                    pop.swap_remove(index);
                }
            }
            RemovalPolicy::LargestEstimateFirst | RemovalPolicy::SmallestEstimateFirst => {
                let estimates: Vec<f64> = pop
                    .states()
                    .iter()
                    .map(|s| protocol.observe(s).estimate)
                    .collect();
                let mut order: Vec<usize> = (0..estimates.len()).collect();
                let largest = policy == RemovalPolicy::LargestEstimateFirst;
                order.sort_by(|&a, &b| {
                    let by_estimate = estimates[a].total_cmp(&estimates[b]);
                    let by_estimate = if largest {
                        by_estimate.reverse()
                    } else {
                        by_estimate
                    };
                    by_estimate.then(a.cmp(&b))
                });
                let mut keep = vec![true; estimates.len()];
                for &i in order.iter().take(count as usize) {
                    keep[i] = false;
                }
                pop.retain_mask(&keep);
            }
        },
    }
    Ok(())
}
