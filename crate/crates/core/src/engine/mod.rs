//! The uniform random scheduler.
//!
//! Each interaction draws an ordered pair `(u, v)`, `u != v`, uniformly from
//! the `n(n-1)` ordered pairs and replaces `u`'s state by the protocol's
//! output. A snapshot is taken every `n` interactions (one unit of parallel
//! time at the current size); adversary events are applied right after the
//! snapshot at the first boundary at or after their scheduled time.

mod adapters;
mod adversary;
mod population;
mod snapshot;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::protocols::{Events, Phase, ProtocolParams};
use crate::sampling::{CoinSource, SamplingError, SeededCoin};

pub use adapters::{ChvpProtocol, ClvpProtocol, DscProtocol, EpidemicProtocol, SimplifiedProtocol};
pub use adversary::{
    apply_adversary_event, validate_schedule, AdversaryAction, AdversaryEvent, RemovalPolicy,
};
pub use population::Population;
pub use snapshot::Snapshot;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error("population too small")]
    PopulationTooSmall,
    #[error("invalid adversary event {index}: {reason}")]
    InvalidSchedule { index: usize, reason: String },
    #[error("invalid run configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Sampling(#[from] SamplingError),
}

/// What the scheduler and the snapshots need to know about one agent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observation {
    pub estimate: f64,
    /// `None` for protocols without a phase structure.
    pub phase: Option<Phase>,
    pub bits: u32,
}

/// A one-sided transition function together with how agents are created
/// and observed.
pub trait Protocol: Sync {
    type State: Clone + Send + Sync + std::fmt::Debug;

    fn interact<C: CoinSource + ?Sized>(
        &self,
        u: &Self::State,
        v: &Self::State,
        coin: &mut C,
    ) -> Result<(Self::State, Events), SamplingError>;

    /// State of agent `index` out of `n0` at the start of a run.
    fn initial(&self, index: usize, n0: usize) -> Self::State;

    /// State of an agent added by the adversary.
    fn joining(&self) -> Self::State;

    fn observe(&self, s: &Self::State) -> Observation;

    fn params(&self) -> Option<ProtocolParams> {
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepRecord {
    pub initiator: usize,
    pub responder: usize,
    pub agent_id: u64,
    pub events: Events,
}

/// Draws `u` uniformly from `[0, n)` and `v` from `[0, n - 1)`, shifting
/// `v` past `u`. Exactly uniform over ordered pairs without rejection.
#[inline]
pub fn sample_pair(n: usize, coin: &mut SeededCoin) -> (usize, usize) {
    let u = coin.below(n as u64) as usize;
    let v = coin.below(n as u64 - 1) as usize;
    (u, if v >= u { v + 1 } else { v })
}

/// Performs one interaction.
pub fn step<P: Protocol>(
    pop: &mut Population<P::State>,
    protocol: &P,
    coin: &mut SeededCoin,
) -> Result<StepRecord, EngineError> {
    let n = pop.len();
    if n < 2 {
        return Err(EngineError::PopulationTooSmall);
    }
    let (u, v) = sample_pair(n, coin);
    let agents = pop.agents_mut();
    let (next, events) = protocol.interact(&agents[u], &agents[v], coin)?;
    agents[u] = next;
    pop.tick();
    Ok(StepRecord {
        initiator: u,
        responder: v,
        agent_id: pop.ids()[u],
        events,
    })
}

/// Seed of one run: the batch's master seed and the run's stream index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RunSeed {
    pub master: u64,
    pub run: u64,
}

impl RunSeed {
    pub fn coin(&self) -> SeededCoin {
        SeededCoin::for_run(self.master, self.run)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub n0: u64,
    pub duration: f64,
    #[serde(default)]
    pub schedule: Vec<AdversaryEvent>,
    /// Keep every per-unit snapshot; otherwise only the final one is kept.
    #[serde(default = "yes")]
    pub record_snapshots: bool,
    /// Keep the per-agent reset log (memory grows with `n * duration`).
    #[serde(default)]
    pub record_resets: bool,
}

fn yes() -> bool {
    true
}

impl RunConfig {
    pub fn new(n0: u64, duration: f64) -> Self {
        Self {
            n0,
            duration,
            schedule: Vec::new(),
            record_snapshots: true,
            record_resets: false,
        }
    }

    pub fn with_schedule(mut self, schedule: Vec<AdversaryEvent>) -> Self {
        self.schedule = schedule;
        self
    }

    pub fn with_reset_log(mut self, on: bool) -> Self {
        self.record_resets = on;
        self
    }

    pub fn validate(&self) -> Result<(), EngineError> {
        if self.n0 < 2 {
            return Err(EngineError::InvalidConfig("n0 must be at least 2".into()));
        }
        if !(self.duration.is_finite() && self.duration > 0.0) {
            return Err(EngineError::InvalidConfig(
                "duration must be positive".into(),
            ));
        }
        validate_schedule(self.n0, &self.schedule)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResetEvent {
    pub agent_id: u64,
    pub parallel_time: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub seed: RunSeed,
    pub params: Option<ProtocolParams>,
    pub schedule: Vec<AdversaryEvent>,
    pub snapshots: Vec<Snapshot>,
    pub resets: Option<Vec<ResetEvent>>,
}

impl RunRecord {
    /// `(parallel time, n)` at every snapshot.
    pub fn n_trace(&self) -> Vec<(f64, u64)> {
        self.snapshots
            .iter()
            .map(|s| (s.parallel_time, s.n))
            .collect()
    }
}

pub fn run<P: Protocol>(
    config: &RunConfig,
    protocol: &P,
    seed: RunSeed,
) -> Result<RunRecord, EngineError> {
    run_observed(
        config,
        protocol,
        seed,
        |_: &Population<P::State>, _: &Snapshot| {},
    )
}

/// Like [`run`], calling `observer` with the live population at every
/// snapshot boundary, before any adversary event due there is applied.
pub fn run_observed<P, F>(
    config: &RunConfig,
    protocol: &P,
    seed: RunSeed,
    mut observer: F,
) -> Result<RunRecord, EngineError>
where
    P: Protocol,
    F: FnMut(&Population<P::State>, &Snapshot),
{
    config.validate()?;
    let mut coin = seed.coin();
    let n0 = config.n0 as usize;
    let mut pop = Population::new((0..n0).map(|i| protocol.initial(i, n0)).collect());
    let mut snapshots = Vec::new();
    let mut resets = config.record_resets.then(Vec::new);
    let mut resets_since = 0u64;
    let mut next_event = 0;
    let mut scratch = Vec::with_capacity(n0);
    let mut last_snapshot_at = 0u64;

    loop {
        let n = pop.len() as u64;
        let end = ((config.duration - pop.segment_start()) * n as f64)
            .ceil()
            .max(0.0) as u64;
        let to_end = end.saturating_sub(pop.segment_interactions());
        if to_end == 0 {
            break;
        }
        let to_boundary = n - pop.segment_interactions() % n;
        for _ in 0..to_boundary.min(to_end) {
            let rec = step(&mut pop, protocol, &mut coin)?;
            if rec.events.is_reset() {
                resets_since += 1;
                if let Some(log) = resets.as_mut() {
                    log.push(ResetEvent {
                        agent_id: rec.agent_id,
                        parallel_time: pop.parallel_time(),
                    });
                }
            }
        }
        if pop.segment_interactions() % n == 0 {
            let snap = Snapshot::capture(&pop, protocol, resets_since, &mut scratch);
            resets_since = 0;
            last_snapshot_at = pop.interaction_count();
            observer(&pop, &snap);
            if config.record_snapshots {
                snapshots.push(snap);
            } else {
                snapshots.clear();
                snapshots.push(snap);
            }
            let now = pop.parallel_time();
            while let Some(event) = config.schedule.get(next_event) {
                if event.at > now + 1e-9 {
                    break;
                }
                apply_adversary_event(&mut pop, event, protocol, &mut coin)?;
                next_event += 1;
            }
        }
    }
    if last_snapshot_at != pop.interaction_count() || snapshots.is_empty() {
        let snap = Snapshot::capture(&pop, protocol, resets_since, &mut scratch);
        observer(&pop, &snap);
        if !config.record_snapshots {
            snapshots.clear();
        }
        snapshots.push(snap);
    }

    Ok(RunRecord {
        seed,
        params: protocol.params(),
        schedule: config.schedule.clone(),
        snapshots,
        resets,
    })
}

#[cfg(test)]
mod tests;
