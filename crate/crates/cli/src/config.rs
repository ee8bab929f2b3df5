//! Experiment configuration files.

use std::fmt;
use std::path::PathBuf;

use popsim_core::engine::{validate_schedule, AdversaryEvent, RunConfig};
use popsim_core::protocols::ProtocolParams;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A configuration problem, naming the offending field.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{field}: {reason}")]
pub struct ConfigError {
    pub field: &'static str,
    pub reason: String,
}

impl ConfigError {
    pub fn new(field: &'static str, reason: impl fmt::Display) -> Self {
        Self {
            field,
            reason: reason.to_string(),
        }
    }
}

/// A fixed seed, or `"entropy"` to draw one from the operating system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MasterSeed {
    Fixed(u64),
    Named(EntropyTag),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntropyTag {
    Entropy,
}

impl MasterSeed {
    pub const ENTROPY: Self = Self::Named(EntropyTag::Entropy);

    pub fn resolve(self) -> u64 {
        match self {
            Self::Fixed(seed) => seed,
            Self::Named(EntropyTag::Entropy) => rand::random(),
        }
    }
}

impl Default for MasterSeed {
    fn default() -> Self {
        Self::Fixed(0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParamsProfile {
    Theory {
        k: u32,
    },
    #[default]
    Empirical,
    Custom(ProtocolParams),
}

impl ParamsProfile {
    pub fn params(&self) -> Result<ProtocolParams, ConfigError> {
        match *self {
            Self::Theory { k } => {
                ProtocolParams::theory(k).map_err(|e| ConfigError::new("paramsProfile", e))
            }
            Self::Empirical => Ok(ProtocolParams::empirical()),
            Self::Custom(p) => Ok(p),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ProtocolKind {
    #[default]
    Dsc,
    Simplified,
    Epidemic,
    Chvp,
    Clvp,
}

/// Countdown start value when a chvp run gives no `initialEstimate`.
pub const DEFAULT_CHVP_START: u64 = 1000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Outputs {
    pub snapshots: PathBuf,
    pub manifest: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resets: Option<PathBuf>,
}

impl Default for Outputs {
    fn default() -> Self {
        Self::in_dir(PathBuf::from("."))
    }
}

impl Outputs {
    pub fn in_dir(dir: PathBuf) -> Self {
        Self {
            snapshots: dir.join("snapshots.csv"),
            manifest: dir.join("manifest.json"),
            resets: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ExperimentConfig {
    pub n0: u64,
    pub duration_parallel_time: f64,
    #[serde(default = "one")]
    pub runs: u64,
    #[serde(default)]
    pub master_seed: MasterSeed,
    #[serde(default)]
    pub params_profile: ParamsProfile,
    #[serde(default)]
    pub protocol: ProtocolKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_estimate: Option<u64>,
    #[serde(default)]
    pub adversary_schedule: Vec<AdversaryEvent>,
    #[serde(default = "yes")]
    pub snapshot_every_n_interactions: bool,
    #[serde(default)]
    pub outputs: Outputs,
}

fn one() -> u64 {
    1
}

fn yes() -> bool {
    true
}

impl ExperimentConfig {
    pub fn new(n0: u64, duration: f64) -> Self {
        Self {
            n0,
            duration_parallel_time: duration,
            runs: 1,
            master_seed: MasterSeed::default(),
            params_profile: ParamsProfile::Empirical,
            protocol: ProtocolKind::Dsc,
            initial_estimate: None,
            adversary_schedule: Vec::new(),
            snapshot_every_n_interactions: true,
            outputs: Outputs::default(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let config: Self = serde_json::from_str(text).map_err(|e| ConfigError::new("config", e))?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.n0 < 2 {
            return Err(ConfigError::new("n0", "must be at least 2"));
        }
        if !(self.duration_parallel_time.is_finite() && self.duration_parallel_time > 0.0) {
            return Err(ConfigError::new("durationParallelTime", "must be positive"));
        }
        if self.runs == 0 {
            return Err(ConfigError::new("runs", "must be at least 1"));
        }
        self.params_profile.params()?;
        match (self.protocol, self.initial_estimate) {
            (_, Some(0)) => return Err(ConfigError::new("initialEstimate", "must be positive")),
            (ProtocolKind::Epidemic | ProtocolKind::Clvp, Some(_)) => {
                return Err(ConfigError::new(
                    "initialEstimate",
                    "not supported by this protocol",
                ))
            }
            (ProtocolKind::Chvp, Some(m)) if i64::try_from(m).is_err() => {
                return Err(ConfigError::new("initialEstimate", "too large"))
            }
            _ => {}
        }
        validate_schedule(self.n0, &self.adversary_schedule)
            .map_err(|e| ConfigError::new("adversarySchedule", e))
    }

    /// The engine configuration shared by every run of the batch.
    pub fn run_config(&self) -> RunConfig {
        RunConfig {
            n0: self.n0,
            duration: self.duration_parallel_time,
            schedule: self.adversary_schedule.clone(),
            record_snapshots: self.snapshot_every_n_interactions,
            record_resets: self.outputs.resets.is_some(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use popsim_core::engine::RemovalPolicy;
    use proptest::prelude::*;

    #[test]
    fn minimal_file_takes_defaults() {
        let c = ExperimentConfig::from_json(r#"{"n0": 100, "durationParallelTime": 5}"#).unwrap();
        assert_eq!(c.runs, 1);
        assert_eq!(c.protocol, ProtocolKind::Dsc);
        assert_eq!(c.params_profile, ParamsProfile::Empirical);
        assert!(c.snapshot_every_n_interactions);
    }

    #[test]
    fn full_file_parses() {
        let text = r#"{
            "n0": 10000, "durationParallelTime": 2500, "runs": 16, "masterSeed": "entropy",
            "paramsProfile": {"theory": {"k": 2}}, "protocol": "simplified",
            "initialEstimate": 60,
            "adversarySchedule": [{"atParallelTime": 1350, "action": {"kind": "removeAgents", "count": 9500, "policy": "uniformRandom"}}],
            "snapshotEveryNInteractions": false,
            "outputs": {"snapshots": "a.csv", "manifest": "m.json", "resets": "r.csv"}
        }"#;
        let c = ExperimentConfig::from_json(text).unwrap();
        assert_eq!(c.master_seed, MasterSeed::ENTROPY);
        assert_eq!(c.params_profile.params().unwrap().tau1(), 2280);
        assert_eq!(
            c.adversary_schedule,
            vec![AdversaryEvent::remove(
                1350.0,
                9500,
                RemovalPolicy::UniformRandom
            )]
        );
        assert!(c.run_config().record_resets);
    }

    #[test]
    fn custom_profile() {
        let text = r#"{"n0": 10, "durationParallelTime": 1, "paramsProfile": {"custom":
            {"k": 3, "tau1": 9, "tau2": 5, "tau3": 1, "tau_prime": 30, "overestimation": 2}}}"#;
        let p = ExperimentConfig::from_json(text)
            .unwrap()
            .params_profile
            .params()
            .unwrap();
        assert_eq!((p.k(), p.tau1(), p.overestimation()), (3, 9, 2));
    }

    #[test]
    fn errors_name_the_field() {
        let field = |text: &str| ExperimentConfig::from_json(text).unwrap_err().field;
        assert_eq!(field(r#"{"n0": 1, "durationParallelTime": 5}"#), "n0");
        assert_eq!(
            field(r#"{"n0": 10, "durationParallelTime": -1}"#),
            "durationParallelTime"
        );
        assert_eq!(
            field(r#"{"n0": 10, "durationParallelTime": 1, "runs": 0}"#),
            "runs"
        );
        assert_eq!(
            field(
                r#"{"n0": 10, "durationParallelTime": 1, "paramsProfile": {"theory": {"k": 0}}}"#
            ),
            "paramsProfile"
        );
        assert_eq!(
            field(
                r#"{"n0": 10, "durationParallelTime": 1, "protocol": "epidemic", "initialEstimate": 3}"#
            ),
            "initialEstimate"
        );
        assert_eq!(
            field(
                r#"{"n0": 10, "durationParallelTime": 1, "adversarySchedule":
                [{"atParallelTime": 1, "action": {"kind": "removeAgents", "count": 9, "policy": "uniformRandom"}}]}"#
            ),
            "adversarySchedule"
        );
        assert_eq!(
            field(r#"{"n0": 10, "durationParallelTime": 1, "bogus": 1}"#),
            "config"
        );
    }

    #[test]
    fn round_trip_is_idempotent() {
        let mut c = ExperimentConfig::new(500, 20.0);
        c.master_seed = MasterSeed::Fixed(9);
        c.initial_estimate = Some(60);
        c.adversary_schedule = vec![AdversaryEvent::add(3.0, 7)];
        let once = c.to_json();
        let again = ExperimentConfig::from_json(&once).unwrap();
        assert_eq!(again, c);
        assert_eq!(again.to_json(), once);
    }

    proptest! {
        #[test]
        fn serialization_is_idempotent(
            n0 in 2u64..1_000_000,
            duration in 0.5f64..1e4,
            runs in 1u64..200,
            seed in any::<u64>(),
            k in 1u32..8,
            est in proptest::option::of(1u64..1000),
            adds in proptest::collection::vec((0.0f64..100.0, 0u64..50), 0..4),
        ) {
            let mut c = ExperimentConfig::new(n0, duration);
            c.runs = runs;
            c.master_seed = MasterSeed::Fixed(seed);
            c.params_profile = ParamsProfile::Theory { k };
            c.initial_estimate = est;
            let mut times: Vec<_> = adds.iter().map(|a| a.0).collect();
            times.sort_by(f64::total_cmp);
            c.adversary_schedule = times.iter().zip(&adds).map(|(&t, a)| AdversaryEvent::add(t, a.1)).collect();
            let text = c.to_json();
            let parsed = ExperimentConfig::from_json(&text).unwrap();
            prop_assert_eq!(&parsed, &c);
            prop_assert_eq!(parsed.to_json(), text);
        }
    }
}
