//! Monte Carlo check suites.

use popsim_core::analysis::{
    check_chvp_bounds, check_epidemic, check_grv_bounds, check_participation, check_phase_clock,
    check_sync, AnalysisError, BoundCheck, PhaseClockOptions,
};
use popsim_core::sampling::SeededCoin;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Grv,
    Epidemic,
    Chvp,
    Participation,
    Sync,
    Rounds,
    All,
}

impl Suite {
    const EACH: [Self; 6] = [
        Self::Grv,
        Self::Epidemic,
        Self::Chvp,
        Self::Participation,
        Self::Sync,
        Self::Rounds,
    ];
}

/// Overrides of a suite's default scale. Unset fields keep the defaults,
/// which are the scales of the acceptance suite.
#[derive(Debug, Clone, Default, PartialEq, clap::Args)]
pub struct Scale {
    #[arg(long)]
    pub n: Option<u64>,
    #[arg(long)]
    pub k: Option<u32>,
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long)]
    pub runs: Option<u64>,
    /// Countdown start value (chvp).
    #[arg(long)]
    pub m: Option<i64>,
    #[arg(long)]
    pub delta: Option<i64>,
    /// Length of the window in units of log n (participation).
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long)]
    pub bursts: Option<usize>,
    /// Parallel time before measurements start (sync, rounds).
    #[arg(long)]
    pub warmup: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

pub fn run_suite(suite: Suite, scale: &Scale) -> Result<Vec<BoundCheck>, AnalysisError> {
    let mut coin = SeededCoin::new(scale.seed);
    let checks = match suite {
        Suite::All => {
            let mut all = Vec::new();
            for s in Suite::EACH {
                all.extend(run_suite(s, scale)?);
            }
            return Ok(all);
        }
        Suite::Grv => vec![check_grv_bounds(
            scale.n.unwrap_or(1000),
            scale.k.unwrap_or(2),
            scale.trials.unwrap_or(500),
            &mut coin,
        )?],
        Suite::Epidemic => vec![check_epidemic(
            scale.n.unwrap_or(1024),
            scale.k.unwrap_or(2),
            scale.runs.unwrap_or(100),
            &mut coin,
        )?],
        Suite::Chvp => vec![check_chvp_bounds(
            scale.n.unwrap_or(1024),
            scale.m.unwrap_or(1000),
            scale.delta.unwrap_or(50),
            scale.k.unwrap_or(2),
            scale.runs.unwrap_or(100),
            &mut coin,
        )?],
        Suite::Participation => vec![check_participation(
            scale.n.unwrap_or(10_000),
            scale.c.unwrap_or(20.0),
            scale.k.unwrap_or(4),
            scale.runs.unwrap_or(20),
            &mut coin,
        )?],
        Suite::Sync => {
            let opts = phase_clock_options(scale);
            vec![check_sync(&opts, SYNC_WINDOW)?]
        }
        Suite::Rounds => check_phase_clock(&phase_clock_options(scale))?,
    };
    Ok(checks)
}

/// Parallel time watched for a synchronized configuration after the warmup.
const SYNC_WINDOW: f64 = 400.0;

fn phase_clock_options(scale: &Scale) -> PhaseClockOptions {
    let mut opts = PhaseClockOptions::new(scale.n.unwrap_or(10_000));
    opts.master_seed = scale.seed;
    if let Some(runs) = scale.runs {
        opts.runs = runs;
    }
    if let Some(bursts) = scale.bursts {
        opts.bursts = bursts;
    }
    if let Some(warmup) = scale.warmup {
        opts.warmup = warmup;
    }
    opts
}

/// Fixed-width table, one line per check.
pub fn format_table(checks: &[BoundCheck]) -> String {
    let mut out = format!(
        "{:<20} {:>8} {:>10} {:>9} {:>9}  verdict\n",
        "check", "trials", "successes", "fraction", "required"
    );
    for c in checks {
        out.push_str(&format!(
            "{:<20} {:>8} {:>10} {:>9.4} {:>9.4}  {}\n",
            c.name,
            c.trials,
            c.successes,
            c.fraction(),
            c.required_fraction,
            if c.verdict { "PASS" } else { "FAIL" }
        ));
    }
    out
}
