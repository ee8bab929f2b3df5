//! Seeded multi-run batches.

use popsim_core::engine::{
    run, ChvpProtocol, ClvpProtocol, DscProtocol, EngineError, EpidemicProtocol, Protocol,
    RunRecord, RunSeed, SimplifiedProtocol,
};
use rayon::prelude::*;

use crate::config::{ConfigError, ExperimentConfig, ProtocolKind, DEFAULT_CHVP_START};

/// Environment variable holding the default worker count.
pub const JOBS_ENV: &str = "POPSIM_JOBS";

#[derive(Debug, thiserror::Error)]
pub enum BatchError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("run {run}: {source}")]
    Engine { run: u64, source: EngineError },
    #[error("thread pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

/// Every run of a batch, in run order.
#[derive(Debug, Clone, PartialEq)]
pub struct Batch {
    pub records: Vec<RunRecord>,
}

impl Batch {
    pub fn seeds(&self) -> Vec<RunSeed> {
        self.records.iter().map(|r| r.seed).collect()
    }
}

/// Worker count from `POPSIM_JOBS`, else the number of available cores.
pub fn default_jobs() -> usize {
    std::env::var(JOBS_ENV)
        .ok()
        .and_then(|v| v.parse().ok())
        .filter(|&j| j > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// Runs `config.runs` runs seeded `(master_seed, 0..runs)` on `jobs`
/// workers. The result does not depend on `jobs`.
pub fn run_batch(
    config: &ExperimentConfig,
    master_seed: u64,
    jobs: usize,
) -> Result<Batch, BatchError> {
    let seeds: Vec<RunSeed> = (0..config.runs)
        .map(|run| RunSeed {
            master: master_seed,
            run,
        })
        .collect();
    run_seeds(config, &seeds, jobs)
}

/// Runs one run per seed, ignoring `config.runs`.
pub fn run_seeds(
    config: &ExperimentConfig,
    seeds: &[RunSeed],
    jobs: usize,
) -> Result<Batch, BatchError> {
    config.validate()?;
    let params = config.params_profile.params()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()?;
    let records = pool.install(|| match config.protocol {
        ProtocolKind::Dsc => {
            let protocol = match config.initial_estimate {
                Some(est) => DscProtocol::with_initial_estimate(params, est)
                    .map_err(|e| ConfigError::new("initialEstimate", e))?,
                None => DscProtocol::new(params),
            };
            all_runs(config, &protocol, seeds)
        }
        ProtocolKind::Simplified => {
            let protocol = match config.initial_estimate {
                Some(est) => SimplifiedProtocol::with_initial_estimate(params, est)
                    .map_err(|e| ConfigError::new("initialEstimate", e))?,
                None => SimplifiedProtocol::new(params),
            };
            all_runs(config, &protocol, seeds)
        }
        ProtocolKind::Epidemic => all_runs(config, &EpidemicProtocol, seeds),
        ProtocolKind::Chvp => {
            let start = config.initial_estimate.unwrap_or(DEFAULT_CHVP_START) as i64;
            all_runs(
                config,
                &ChvpProtocol {
                    start,
                    spread: false,
                },
                seeds,
            )
        }
        ProtocolKind::Clvp => all_runs(config, &ClvpProtocol, seeds),
    })?;
    Ok(Batch { records })
}

fn all_runs<P: Protocol>(
    config: &ExperimentConfig,
    protocol: &P,
    seeds: &[RunSeed],
) -> Result<Vec<RunRecord>, BatchError> {
    let run_config = config.run_config();
    seeds
        .par_iter()
        .map(|&seed| {
            run(&run_config, protocol, seed).map_err(|source| BatchError::Engine {
                run: seed.run,
                source,
            })
        })
        .collect()
}
