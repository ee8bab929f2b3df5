//! Named presets. Each one only edits fields of an [`ExperimentConfig`], so
//! its effect can always be written out as an explicit config file.

use popsim_core::engine::{AdversaryEvent, RemovalPolicy};

use crate::config::ExperimentConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Scenario {
    /// All but n0/20 agents removed at t=1350, duration 2500.
    Fig3,
    /// Every initial agent starts with an estimate of 60.
    #[value(name = "appendixB", alias = "appendix-b")]
    AppendixB,
}

impl Scenario {
    pub const ALL: [Self; 2] = [Self::Fig3, Self::AppendixB];

    pub fn name(self) -> &'static str {
        match self {
            Self::Fig3 => "fig3",
            Self::AppendixB => "appendixB",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Self::Fig3 => {
                "remove all but n0/20 agents (uniformly at random) at t=1350; duration 2500"
            }
            Self::AppendixB => "initial estimate 60 for every agent present at t=0",
        }
    }

    /// Applies the preset to `config`, whose `n0` must already be final.
    pub fn apply(self, config: &mut ExperimentConfig) {
        match self {
            Self::Fig3 => {
                let keep = (config.n0 / 20).max(2);
                config.duration_parallel_time = 2500.0;
                config.adversary_schedule = vec![AdversaryEvent::remove(
                    1350.0,
                    config.n0.saturating_sub(keep),
                    RemovalPolicy::UniformRandom,
                )];
            }
            Self::AppendixB => config.initial_estimate = Some(60),
        }
    }
}
