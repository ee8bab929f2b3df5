//! Engine bindings for every transition function in [`crate::protocols`].

use super::{Observation, Protocol};
use crate::analysis::{bit_length, estimate_of, memory_bits};
use crate::protocols::{
    chvp_step, clvp_step, dsc_update, epidemic_step, init_state, init_with_estimate, phase_of,
    simplified_update, AgentState, Events, ProtocolParams, ZeroEstimate,
};
use crate::sampling::{CoinSource, SamplingError};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DscProtocol {
    params: ProtocolParams,
    initial: AgentState,
}

impl DscProtocol {
    pub fn new(params: ProtocolParams) -> Self {
        Self {
            params,
            initial: init_state(&params),
        }
    }

    /// Every initial agent believes `est`; agents added later still start
    /// from the default state.
    pub fn with_initial_estimate(params: ProtocolParams, est: u64) -> Result<Self, ZeroEstimate> {
        Ok(Self {
            params,
            initial: init_with_estimate(est, &params)?,
        })
    }
}

impl Protocol for DscProtocol {
    type State = AgentState;

    #[inline]
    fn interact<C: CoinSource + ?Sized>(
        &self,
        u: &AgentState,
        v: &AgentState,
        coin: &mut C,
    ) -> Result<(AgentState, Events), SamplingError> {
        dsc_update(u, v, &self.params, coin).map(|o| (o.state, o.events))
    }

    fn initial(&self, _index: usize, _n0: usize) -> AgentState {
        self.initial
    }

    fn joining(&self) -> AgentState {
        init_state(&self.params)
    }

    #[inline]
    fn observe(&self, s: &AgentState) -> Observation {
        Observation {
            estimate: estimate_of(s, &self.params),
            phase: Some(phase_of(s, &self.params)),
            bits: memory_bits(s),
        }
    }

    fn params(&self) -> Option<ProtocolParams> {
        Some(self.params)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplifiedProtocol {
    params: ProtocolParams,
    initial: AgentState,
}

impl SimplifiedProtocol {
    pub fn new(params: ProtocolParams) -> Self {
        Self {
            params,
            initial: init_state(&params),
        }
    }

    pub fn with_initial_estimate(params: ProtocolParams, est: u64) -> Result<Self, ZeroEstimate> {
        Ok(Self {
            params,
            initial: init_with_estimate(est, &params)?,
        })
    }
}

impl Protocol for SimplifiedProtocol {
    type State = AgentState;

    #[inline]
    fn interact<C: CoinSource + ?Sized>(
        &self,
        u: &AgentState,
        v: &AgentState,
        coin: &mut C,
    ) -> Result<(AgentState, Events), SamplingError> {
        simplified_update(u, v, &self.params, coin).map(|o| (o.state, o.events))
    }

    fn initial(&self, _index: usize, _n0: usize) -> AgentState {
        self.initial
    }

    fn joining(&self) -> AgentState {
        init_state(&self.params)
    }

    fn observe(&self, s: &AgentState) -> Observation {
        Observation {
            // the simplified variant stores unscaled samples
            estimate: s.max as f64,
            phase: Some(phase_of(s, &self.params)),
            bits: bit_length(s.max as i64) + bit_length(s.time) + 1,
        }
    }

    fn params(&self) -> Option<ProtocolParams> {
        Some(self.params)
    }
}

/// Max-propagation from a single informed agent (agent 0 holds 1, all
/// others 0). Joining agents are uninformed.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EpidemicProtocol;

impl Protocol for EpidemicProtocol {
    type State = u64;

    #[inline]
    fn interact<C: CoinSource + ?Sized>(
        &self,
        u: &u64,
        v: &u64,
        _coin: &mut C,
    ) -> Result<(u64, Events), SamplingError> {
        Ok((epidemic_step(*u, *v), Events::empty()))
    }

    fn initial(&self, index: usize, _n0: usize) -> u64 {
        u64::from(index == 0)
    }

    fn joining(&self) -> u64 {
        0
    }

    fn observe(&self, s: &u64) -> Observation {
        Observation {
            estimate: *s as f64,
            phase: None,
            bits: bit_length(*s as i64),
        }
    }
}

/// One-sided countdown with higher value propagation. Agents start at
/// `start`, or with `spread` evenly over `0..=start`; joining agents hold 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChvpProtocol {
    pub start: i64,
    pub spread: bool,
}

impl Protocol for ChvpProtocol {
    type State = i64;

    #[inline]
    fn interact<C: CoinSource + ?Sized>(
        &self,
        u: &i64,
        v: &i64,
        _coin: &mut C,
    ) -> Result<(i64, Events), SamplingError> {
        Ok((chvp_step(*u, *v), Events::empty()))
    }

    fn initial(&self, index: usize, n0: usize) -> i64 {
        if self.spread && n0 > 1 {
            (self.start as i128 * index as i128 / (n0 as i128 - 1)) as i64
        } else {
            self.start
        }
    }

    fn joining(&self) -> i64 {
        0
    }

    fn observe(&self, s: &i64) -> Observation {
        Observation {
            estimate: *s as f64,
            phase: None,
            bits: bit_length(*s) + 1,
        }
    }
}

/// One-sided count-up with lower value propagation, everyone starting at 0.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ClvpProtocol;

impl Protocol for ClvpProtocol {
    type State = u64;

    #[inline]
    fn interact<C: CoinSource + ?Sized>(
        &self,
        u: &u64,
        v: &u64,
        _coin: &mut C,
    ) -> Result<(u64, Events), SamplingError> {
        Ok((clvp_step(*u, *v), Events::empty()))
    }

    fn initial(&self, _index: usize, _n0: usize) -> u64 {
        0
    }

    fn joining(&self) -> u64 {
        0
    }

    fn observe(&self, s: &u64) -> Observation {
        Observation {
            estimate: *s as f64,
            phase: None,
            bits: bit_length(*s as i64),
        }
    }
}
