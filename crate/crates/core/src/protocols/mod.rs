//! State-transition functions.
//!
//! All transitions are one-sided: for an ordered pair `(u, v)` only `u`
//! changes, and `v` is read as it was before the interaction.

mod dsc;
mod params;
mod primitives;
mod simplified;
mod state;

use bitflags::bitflags;

pub use dsc::dsc_update;
pub use params::{ParamsError, ProtocolParams, RawParams};
pub use primitives::{chvp_step, clvp_step, epidemic_step};
pub use simplified::simplified_update;
pub(crate) use state::scaled as state_scaled;
pub use state::{init_state, init_with_estimate, phase_of, AgentState, Phase, ZeroEstimate};

bitflags! {
    /// What happened to the updated agent during one interaction.
    #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
    pub struct Events: u8 {
        /// Countdown had run out (`time <= 0`).
        const WRAP_AROUND_RESET = 1;
        /// Agent in the reset phase met an agent in the exchange phase.
        const RESET_TO_EXCHANGE_RESET = 1 << 1;
        /// Agent outside the exchange phase saw a different maximum.
        const HOLD_MISMATCH_RESET = 1 << 2;
        const BACKUP_GRV_GENERATED = 1 << 3;
        /// The backup sample exceeded the stored maximum and replaced it.
        const BACKUP_RESET = 1 << 4;
        const MAX_ADOPTED = 1 << 5;
        const LAST_MAX_MERGED = 1 << 6;

        const RESET = Self::WRAP_AROUND_RESET.bits()
            | Self::RESET_TO_EXCHANGE_RESET.bits()
            | Self::HOLD_MISMATCH_RESET.bits();
    }
}

impl Events {
    /// True if one of the three reset triggers fired (a clock tick).
    #[inline]
    pub fn is_reset(self) -> bool {
        self.intersects(Events::RESET)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UpdateOutcome {
    pub state: AgentState,
    pub events: Events,
}

/// Which reset trigger applies to `u` meeting `v`, if any. Triggers are
/// checked in order and only the first one that holds is reported.
#[inline]
pub(crate) fn reset_trigger(
    u: &AgentState,
    v: &AgentState,
    v_phase: Phase,
    p: &ProtocolParams,
) -> Option<Events> {
    if u.time <= 0 {
        return Some(Events::WRAP_AROUND_RESET);
    }
    let u_phase = phase_of(u, p);
    if u_phase == Phase::Reset && v_phase == Phase::Exchange {
        Some(Events::RESET_TO_EXCHANGE_RESET)
    } else if u_phase != Phase::Exchange && u.max != v.max {
        Some(Events::HOLD_MISMATCH_RESET)
    } else {
        None
    }
}
