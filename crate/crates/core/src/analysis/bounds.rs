//! Monte Carlo checks of the probabilistic toolbox and of the phase clock.

use serde::{Deserialize, Serialize};

use super::{detect_rounds, is_synchronized, AnalysisError, SyncOptions};
use crate::engine::{run, run_observed, sample_pair, DscProtocol, RunConfig, RunRecord, RunSeed};
use crate::protocols::{chvp_step, epidemic_step, ProtocolParams};
use crate::sampling::{CoinSource, SamplingError, SeededCoin};

/// Outcome of a repeated randomized experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub name: String,
    pub trials: u64,
    pub successes: u64,
    pub required_fraction: f64,
    pub verdict: bool,
}

impl BoundCheck {
    pub fn new(
        name: impl Into<String>,
        trials: u64,
        successes: u64,
        required_fraction: f64,
    ) -> Self {
        let verdict = trials > 0 && successes as f64 >= required_fraction * trials as f64;
        Self {
            name: name.into(),
            trials,
            successes,
            required_fraction,
            verdict,
        }
    }

    pub fn fraction(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.successes as f64 / self.trials as f64
        }
    }
}

/// `[0.5 log n, 2(k+1) log n]`, the range of the maximum of `k n` GRVs.
pub fn grv_max_bounds(n: u64, k: u32) -> (f64, f64) {
    let log_n = (n as f64).log2();
    (0.5 * log_n, 2.0 * (k as f64 + 1.0) * log_n)
}

/// Draws the maximum of `k n` GRVs `trials` times and counts how often it
/// lands inside [`grv_max_bounds`].
pub fn check_grv_bounds<C: CoinSource + ?Sized>(
    n: u64,
    k: u32,
    trials: u64,
    coin: &mut C,
) -> Result<BoundCheck, AnalysisError> {
    if n < 50 {
        return Err(AnalysisError::TooFewAgents { n, min: 50 });
    }
    if k == 0 || k as u64 > n {
        return Err(AnalysisError::BadBatch);
    }
    let (lo, hi) = grv_max_bounds(n, k);
    let draws = k as u64 * n;
    let mut successes = 0;
    for _ in 0..trials {
        let mut m = 0;
        for _ in 0..draws {
            m = m.max(coin.geometric().map_err(engine_err)?.get());
        }
        if (lo..=hi).contains(&(m as f64)) {
            successes += 1;
        }
    }
    // the failure probability is at most 5 n^-k; never ask for more than 99%
    let required = (1.0 - 5.0 * (n as f64).powi(-(k as i32))).clamp(0.0, 0.99);
    Ok(BoundCheck::new("grv", trials, successes, required))
}

fn engine_err(e: SamplingError) -> AnalysisError {
    AnalysisError::Engine(e.into())
}

/// Interactions within which one informed agent informs everyone:
/// `4(k+1) n log n`.
pub fn epidemic_bound(n: u64, k: u32) -> f64 {
    4.0 * (k as f64 + 1.0) * n as f64 * (n as f64).log2()
}

/// Runs max-propagation from a single informed agent and counts the runs in
/// which everyone is informed within [`epidemic_bound`].
pub fn check_epidemic(
    n: u64,
    k: u32,
    runs: u64,
    coin: &mut SeededCoin,
) -> Result<BoundCheck, AnalysisError> {
    if n < 2 {
        return Err(AnalysisError::TooFewAgents { n, min: 2 });
    }
    let budget = epidemic_bound(n, k).floor() as u64;
    let mut successes = 0;
    let mut agents = vec![0u64; n as usize];
    for _ in 0..runs {
        agents.fill(0);
        agents[0] = 1;
        let mut informed = 1;
        let mut steps = 0;
        while informed < n && steps < budget {
            let (u, v) = sample_pair(n as usize, coin);
            let next = epidemic_step(agents[u], agents[v]);
            if next > agents[u] {
                informed += 1;
            }
            agents[u] = next;
            steps += 1;
        }
        if informed == n {
            successes += 1;
        }
    }
    Ok(BoundCheck::new("epidemic", runs, successes, 0.99))
}

/// Initial configurations for the countdown checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChvpStart {
    /// Every agent holds `m`.
    AllAtMax,
    /// Values spread evenly over `0..=m`.
    Spread,
}

/// `(tau, max ceiling, min floor)`: after `tau = ceil(7n(delta + k log n))`
/// interactions the maximum should be at most `m - delta` and the minimum at
/// least `m - 12(delta + k log n)`.
pub fn chvp_thresholds(
    n: u64,
    m: i64,
    delta: i64,
    k: u32,
) -> Result<(u64, i64, f64), AnalysisError> {
    let slack = delta as f64 + k as f64 * (n as f64).log2();
    let floor = m as f64 - 12.0 * slack;
    if floor <= 0.0 {
        return Err(AnalysisError::DeltaTooLarge);
    }
    Ok(((7.0 * n as f64 * slack).ceil() as u64, m - delta, floor))
}

/// Runs `interactions` countdown steps and returns the final `(min, max)`.
pub fn run_chvp(
    n: u64,
    m: i64,
    start: ChvpStart,
    interactions: u64,
    coin: &mut SeededCoin,
) -> (i64, i64) {
    let mut agents: Vec<i64> = match start {
        ChvpStart::AllAtMax => vec![m; n as usize],
        ChvpStart::Spread => (0..n)
            .map(|i| (m as i128 * i as i128 / (n as i128 - 1)) as i64)
            .collect(),
    };
    for _ in 0..interactions {
        let (u, v) = sample_pair(n as usize, coin);
        agents[u] = chvp_step(agents[u], agents[v]);
    }
    let min = agents.iter().copied().min().unwrap_or(0);
    let max = agents.iter().copied().max().unwrap_or(0);
    (min, max)
}

/// One trial is a run from [`ChvpStart::AllAtMax`], which must satisfy
/// both bounds, and a run from [`ChvpStart::Spread`], which must satisfy
/// the maximum bound.
pub fn check_chvp_bounds(
    n: u64,
    m: i64,
    delta: i64,
    k: u32,
    runs: u64,
    coin: &mut SeededCoin,
) -> Result<BoundCheck, AnalysisError> {
    if n < 2 {
        return Err(AnalysisError::TooFewAgents { n, min: 2 });
    }
    let (tau, ceiling, floor) = chvp_thresholds(n, m, delta, k)?;
    let mut successes = 0;
    for _ in 0..runs {
        let (min, max) = run_chvp(n, m, ChvpStart::AllAtMax, tau, coin);
        let (_, spread_max) = run_chvp(n, m, ChvpStart::Spread, tau, coin);
        if max <= ceiling && min as f64 >= floor && spread_max <= ceiling {
            successes += 1;
        }
    }
    Ok(BoundCheck::new("chvp", runs, successes, 0.99))
}

/// `c (1 ± sqrt(k/c)) log n`: how many interactions an agent initiates
/// during `c log n` parallel time.
pub fn participation_interval(n: u64, c: f64, k: u32) -> (f64, f64) {
    let log_n = (n as f64).log2();
    let r = (k as f64 / c).sqrt();
    (c * (1.0 - r) * log_n, c * (1.0 + r) * log_n)
}

/// Counts, for every agent of every run, the interactions it initiates over
/// `c log n` parallel time. One trial per agent and run.
pub fn check_participation(
    n: u64,
    c: f64,
    k: u32,
    runs: u64,
    coin: &mut SeededCoin,
) -> Result<BoundCheck, AnalysisError> {
    if n < 2 {
        return Err(AnalysisError::TooFewAgents { n, min: 2 });
    }
    if !(c.is_finite() && c > 0.0) {
        return Err(AnalysisError::InvalidArgument("c must be positive".into()));
    }
    let (lo, hi) = participation_interval(n, c, k);
    let interactions = (c * (n as f64).log2() * n as f64).ceil() as u64;
    let mut counts = vec![0u32; n as usize];
    let mut successes = 0;
    for _ in 0..runs {
        counts.fill(0);
        for _ in 0..interactions {
            let (u, _) = sample_pair(n as usize, coin);
            counts[u] += 1;
        }
        successes += counts
            .iter()
            .filter(|&&x| (lo..=hi).contains(&(x as f64)))
            .count() as u64;
    }
    Ok(BoundCheck::new("participation", n * runs, successes, 0.99))
}

/// Scale of the full-protocol checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseClockOptions {
    pub n: u64,
    pub runs: u64,
    pub master_seed: u64,
    /// Parallel time allowed for convergence before anything is measured.
    pub warmup: f64,
    /// Bursts analyzed per run.
    pub bursts: usize,
    pub gap_factor: f64,
    /// Inter-burst distances must lie in `[min_gap, max_gap] * log n`.
    pub min_gap: f64,
    pub max_gap: f64,
    pub required_fraction: f64,
}

impl PhaseClockOptions {
    pub fn new(n: u64) -> Self {
        Self {
            n,
            runs: 8,
            master_seed: 0,
            warmup: 200.0,
            bursts: 20,
            gap_factor: super::DEFAULT_GAP_FACTOR,
            min_gap: 1.0,
            max_gap: 50.0,
            required_fraction: 0.9,
        }
    }
}

/// Run length that covers `opts.bursts` complete bursts after the warmup,
/// sized from a pilot run's median round length.
pub fn phase_clock_duration(opts: &PhaseClockOptions) -> Result<f64, AnalysisError> {
    if opts.n < 2 {
        return Err(AnalysisError::TooFewAgents { n: opts.n, min: 2 });
    }
    let protocol = DscProtocol::new(ProtocolParams::empirical());
    let log_n = (opts.n as f64).log2();
    // pilot on a stream no measured run uses
    let config = RunConfig::new(opts.n, opts.warmup + 40.0 * log_n).with_reset_log(true);
    let seed = RunSeed {
        master: opts.master_seed,
        run: u64::MAX,
    };
    let pilot = run(&config, &protocol, seed)?;
    let round = analyzed_rounds(&pilot, opts)
        .ok()
        .and_then(|r| {
            let mut lengths = r.round_lengths;
            (!lengths.is_empty()).then(|| super::lower_median(&mut lengths))
        })
        .unwrap_or(opts.max_gap * log_n);
    Ok(opts.warmup + (opts.bursts as f64 + 3.0) * round * 1.25)
}

/// Checks that, after the warmup, resets come in bursts in which every agent
/// resets exactly once, and that consecutive bursts are
/// `[min_gap, max_gap] * log n` apart. Returns one check for the bursts and
/// one for the gaps. Every record needs a reset log; runs with fewer than
/// `opts.bursts` complete bursts count the missing ones as failures.
pub fn evaluate_phase_clock(records: &[RunRecord], opts: &PhaseClockOptions) -> Vec<BoundCheck> {
    let log_n = (opts.n as f64).log2();
    let mut bursts_ok = 0;
    let mut gaps = 0;
    let mut gaps_ok = 0;
    for record in records {
        let Ok(report) = analyzed_rounds(record, opts) else {
            continue;
        };
        let taken = report.bursts.len().min(opts.bursts);
        bursts_ok += report.bursts[..taken]
            .iter()
            .filter(|b| b.every_agent_once())
            .count() as u64;
        for len in report.round_lengths.iter().take(taken.saturating_sub(1)) {
            gaps += 1;
            if (opts.min_gap * log_n..=opts.max_gap * log_n).contains(len) {
                gaps_ok += 1;
            }
        }
    }
    let trials = records.len() as u64 * opts.bursts as u64;
    vec![
        BoundCheck::new(
            "phase-clock-bursts",
            trials,
            bursts_ok,
            opts.required_fraction,
        ),
        BoundCheck::new("phase-clock-gaps", gaps, gaps_ok, 1.0),
    ]
}

/// [`phase_clock_duration`] followed by `opts.runs` runs and
/// [`evaluate_phase_clock`].
pub fn check_phase_clock(opts: &PhaseClockOptions) -> Result<Vec<BoundCheck>, AnalysisError> {
    let duration = phase_clock_duration(opts)?;
    let protocol = DscProtocol::new(ProtocolParams::empirical());
    let config = RunConfig::new(opts.n, duration).with_reset_log(true);
    let records = (0..opts.runs)
        .map(|r| {
            let seed = RunSeed {
                master: opts.master_seed,
                run: r,
            };
            run(&config, &protocol, seed)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(evaluate_phase_clock(&records, opts))
}

/// Bursts after the warmup, without the first and last ones, which may be
/// cut off.
fn analyzed_rounds(
    record: &RunRecord,
    opts: &PhaseClockOptions,
) -> Result<super::RoundReport, AnalysisError> {
    let log: Vec<_> = record
        .resets
        .as_deref()
        .unwrap_or_default()
        .iter()
        .copied()
        .filter(|e| e.parallel_time >= opts.warmup)
        .collect();
    let mut report = detect_rounds(&log, &record.n_trace(), opts.gap_factor)?;
    if report.bursts.len() < 3 {
        return Err(AnalysisError::NoResets);
    }
    report.bursts.pop();
    report.bursts.remove(0);
    report.round_boundaries = report.bursts.iter().map(|b| b.start).collect();
    report.round_lengths = report
        .bursts
        .windows(2)
        .map(|w| w[1].center - w[0].center)
        .collect();
    Ok(report)
}

/// Counts the runs that pass through a synchronized configuration after
/// the warmup, observing at every snapshot boundary.
pub fn check_sync(opts: &PhaseClockOptions, duration: f64) -> Result<BoundCheck, AnalysisError> {
    if opts.n < 2 {
        return Err(AnalysisError::TooFewAgents { n: opts.n, min: 2 });
    }
    let params = ProtocolParams::empirical();
    let protocol = DscProtocol::new(params);
    let config = RunConfig::new(opts.n, opts.warmup + duration);
    let mut successes = 0;
    for r in 0..opts.runs {
        let mut seen = false;
        let seed = RunSeed {
            master: opts.master_seed,
            run: r,
        };
        run_observed(&config, &protocol, seed, |pop, snap| {
            if !seen && snap.parallel_time >= opts.warmup {
                seen =
                    is_synchronized(pop.states(), &params, SyncOptions::default()).is_synchronized;
            }
        })?;
        successes += u64::from(seen);
    }
    Ok(BoundCheck::new(
        "sync",
        opts.runs,
        successes,
        opts.required_fraction,
    ))
}
