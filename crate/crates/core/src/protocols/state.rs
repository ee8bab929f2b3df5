use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::ProtocolParams;

/// The four variables an agent of the counting protocol stores.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AgentState {
    /// Current size estimate, already multiplied by the overestimation factor.
    pub max: u64,
    /// Estimate carried over from the previous round.
    pub last_max: u64,
    /// Countdown synchronised by higher-value propagation. Non-positive values
    /// trigger a reset at the agent's next update.
    pub time: i64,
    /// Updates received since the last reset. Never exchanged.
    pub interactions: u64,
}

impl AgentState {
    pub fn new(max: u64, last_max: u64, time: i64, interactions: u64) -> Self {
        Self {
            max,
            last_max,
            time,
            interactions,
        }
    }

    /// `max{max, lastMax}`, the value every phase boundary is relative to.
    #[inline]
    pub fn effective_max(&self) -> u64 {
        self.max.max(self.last_max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Exchange,
    Hold,
    Reset,
}

impl Phase {
    pub const ALL: [Phase; 3] = [Phase::Exchange, Phase::Hold, Phase::Reset];

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("initial estimate must be at least 1")]
pub struct ZeroEstimate;

/// `tau * estimate`, saturating for adversarially large states.
#[inline]
pub(crate) fn scaled(tau: i64, estimate: u64) -> i64 {
    tau.saturating_mul(i64::try_from(estimate).unwrap_or(i64::MAX))
}

/// Phase of an agent, relative to `E = max{max, lastMax}`: exchange when
/// `time >= tau2*E`, hold when `tau3*E <= time < tau2*E`, reset otherwise
/// (including any non-positive time).
#[inline]
pub fn phase_of(s: &AgentState, p: &ProtocolParams) -> Phase {
    let e = s.effective_max();
    if s.time >= scaled(p.tau2(), e) {
        Phase::Exchange
    } else if s.time >= scaled(p.tau3(), e) {
        Phase::Hold
    } else {
        Phase::Reset
    }
}

/// State of an agent that joins the population.
pub fn init_state(p: &ProtocolParams) -> AgentState {
    AgentState::new(1, 1, p.tau1(), 0)
}

/// Agent that starts out believing the estimate `est`.
pub fn init_with_estimate(est: u64, p: &ProtocolParams) -> Result<AgentState, ZeroEstimate> {
    if est == 0 {
        return Err(ZeroEstimate);
    }
    Ok(AgentState::new(est, est, scaled(p.tau1(), est), 0))
}
