use super::state::scaled;
use super::{phase_of, reset_trigger, AgentState, Events, Phase, ProtocolParams, UpdateOutcome};
use crate::sampling::{geometric_sample, CoinSource, SamplingError};

/// The two-variable variant: a single unscaled sample per reset, no trailing
/// estimate and no backup samples. `last_max` mirrors `max` and
/// `interactions` stays 0 so the shared phase rules apply unchanged.
pub fn simplified_update<C: CoinSource + ?Sized>(
    u: &AgentState,
    v: &AgentState,
    p: &ProtocolParams,
    coin: &mut C,
) -> Result<UpdateOutcome, SamplingError> {
    let mut s = *u;
    let mut events = Events::empty();
    let v_phase = phase_of(v, p);

    if let Some(trigger) = reset_trigger(&s, v, v_phase, p) {
        let g = u64::from(geometric_sample(coin)?.get());
        s.time = scaled(p.tau1(), s.max.max(g));
        s.max = g;
        s.last_max = g;
        events |= trigger;
    }

    if phase_of(&s, p) == Phase::Exchange && v_phase == Phase::Exchange && s.max < v.max {
        s.time = scaled(p.tau1(), v.max);
        s.max = v.max;
        s.last_max = v.max;
        events |= Events::MAX_ADOPTED;
    }

    s.time = s.time.max(v.time) - 1;
    s.interactions = 0;
    Ok(UpdateOutcome { state: s, events })
}
