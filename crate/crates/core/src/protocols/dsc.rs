use super::state::scaled;
use super::{phase_of, reset_trigger, AgentState, Events, Phase, ProtocolParams, UpdateOutcome};
use crate::sampling::{grv_max, CoinSource, SamplingError};

/// One interaction of the dynamic size counting protocol, updating `u`.
///
/// The four guarded blocks run top to bottom against `u`'s evolving state,
/// so a reset can be followed by a max adoption in the same interaction.
/// `v`'s phase is fixed from its pre-interaction state. The only error is
/// an exhausted scripted coin.
pub fn dsc_update<C: CoinSource + ?Sized>(
    u: &AgentState,
    v: &AgentState,
    p: &ProtocolParams,
    coin: &mut C,
) -> Result<UpdateOutcome, SamplingError> {
    let mut s = *u;
    let mut events = Events::empty();
    let v_phase = phase_of(v, p);
    let f = p.overestimation() as u64;

    // reset
    if let Some(trigger) = reset_trigger(&s, v, v_phase, p) {
        let g = u64::from(grv_max(p.k(), coin)?.get()).saturating_mul(f);
        s = AgentState {
            time: scaled(p.tau1(), s.max.max(g)),
            interactions: 0,
            max: g,
            last_max: s.max,
        };
        events |= trigger;
    }

    // backup sample; lastMax is left alone
    if s.interactions > scaled(p.tau_prime(), s.effective_max()) as u64 {
        s.interactions = 0;
        events |= Events::BACKUP_GRV_GENERATED;
        let g = u64::from(grv_max(p.k(), coin)?.get());
        if g > s.max {
            let g = g.saturating_mul(f);
            s.time = scaled(p.tau1(), g);
            s.max = g;
            events |= Events::BACKUP_RESET;
        }
    }

    // exchange maximum
    let u_phase = phase_of(&s, p);
    if u_phase == Phase::Exchange && v_phase == Phase::Exchange && s.max < v.max {
        s.time = scaled(p.tau1(), v.max);
        s.max = v.max;
        s.last_max = v.last_max;
        events |= Events::MAX_ADOPTED;
    }

    // exchange last maximum
    let u_phase = phase_of(&s, p);
    if s.max == v.max && !(u_phase == Phase::Exchange && v_phase == Phase::Reset) {
        s.last_max = s.last_max.max(v.last_max);
        events |= Events::LAST_MAX_MERGED;
    }

    // countdown with higher value propagation
    s.time = s.time.max(v.time) - 1;
    s.interactions += 1;

    Ok(UpdateOutcome { state: s, events })
}
