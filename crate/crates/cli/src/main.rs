use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use popsim::batch::{default_jobs, run_batch};
use popsim::check::{format_table, run_suite, Scale, Suite};
use popsim::config::{ExperimentConfig, MasterSeed, Outputs, ParamsProfile, ProtocolKind};
use popsim::exit;
use popsim::output::write_outputs;
use popsim::replay::{replay, ReplayError, ReplayOutcome};
use popsim::scenarios::Scenario;

#[derive(Parser)]
#[command(name = "popsim", version, about = "Population protocol simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a seeded batch and write snapshots CSV plus manifest.
    Run(RunArgs),
    /// Run Monte Carlo check suites and print a pass/fail table.
    Check {
        #[arg(value_enum)]
        suite: Suite,
        #[command(flatten)]
        scale: Scale,
    },
    /// Re-run a batch from its manifest and compare the CSVs byte for byte.
    Replay {
        manifest: PathBuf,
        #[arg(long, env = "POPSIM_JOBS")]
        jobs: Option<usize>,
    },
    /// List scenario presets, or print one as a config file.
    Scenarios {
        #[arg(long, value_enum)]
        dump: Option<Scenario>,
        #[arg(long, default_value_t = 10_000)]
        n: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum Profile {
    Empirical,
    Theory,
}

#[derive(clap::Args)]
struct RunArgs {
    /// JSON config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    scenario: Option<Scenario>,
    #[arg(long)]
    n: Option<u64>,
    /// Duration in parallel time.
    #[arg(long)]
    time: Option<f64>,
    #[arg(long)]
    runs: Option<u64>,
    /// A 64-bit integer or "entropy".
    #[arg(long)]
    seed: Option<String>,
    #[arg(long, value_enum)]
    profile: Option<Profile>,
    /// Batch size k for the theory profile.
    #[arg(long, default_value_t = 2)]
    k: u32,
    #[arg(long, value_enum)]
    protocol: Option<ProtocolKind>,
    #[arg(long)]
    initial_estimate: Option<u64>,
    /// Keep only the final snapshot of each run.
    #[arg(long)]
    final_only: bool,
    /// Output directory for snapshots.csv and manifest.json.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write resets.csv with every agent reset.
    #[arg(long)]
    resets: bool,
    #[arg(long, env = "POPSIM_JOBS")]
    jobs: Option<usize>,
}

fn resolve_config(args: &RunArgs) -> Result<ExperimentConfig, String> {
    let mut config = match &args.config {
        Some(path) => {
            let text =
                std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            serde_json::from_str(&text).map_err(|e| format!("config: {e}"))?
        }
        None => ExperimentConfig::new(1000, 100.0),
    };
    if let Some(n) = args.n {
        config.n0 = n;
    }
    if let Some(scenario) = args.scenario {
        scenario.apply(&mut config);
    }
    if let Some(time) = args.time {
        config.duration_parallel_time = time;
    }
    if let Some(runs) = args.runs {
        config.runs = runs;
    }
    if let Some(seed) = &args.seed {
        config.master_seed = match seed.as_str() {
            "entropy" => MasterSeed::ENTROPY,
            s => MasterSeed::Fixed(
                s.parse()
                    .map_err(|_| format!("masterSeed: not a seed: {s}"))?,
            ),
        };
    }
    match args.profile {
        Some(Profile::Empirical) => config.params_profile = ParamsProfile::Empirical,
        Some(Profile::Theory) => config.params_profile = ParamsProfile::Theory { k: args.k },
        None => {}
    }
    if let Some(protocol) = args.protocol {
        config.protocol = protocol;
    }
    if args.initial_estimate.is_some() {
        config.initial_estimate = args.initial_estimate;
    }
    if args.final_only {
        config.snapshot_every_n_interactions = false;
    }
    if let Some(dir) = &args.out {
        config.outputs = Outputs::in_dir(dir.clone());
    }
    if args.resets && config.outputs.resets.is_none() {
        let dir = config
            .outputs
            .snapshots
            .parent()
            .map(PathBuf::from)
            .unwrap_or_default();
        config.outputs.resets = Some(dir.join("resets.csv"));
    }
    config.validate().map_err(|e| e.to_string())?;
    Ok(config)
}

fn cmd_run(args: RunArgs) -> u8 {
    let config = match resolve_config(&args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return exit::INVALID_CONFIG;
        }
    };
    let master = config.master_seed.resolve();
    let batch = match run_batch(&config, master, args.jobs.unwrap_or_else(default_jobs)) {
        Ok(b) => b,
        Err(e) => {
            eprintln!("error: {e}");
            return exit::INVALID_CONFIG;
        }
    };
    match write_outputs(&config, master, &batch) {
        Ok(_) => {
            println!(
                "wrote {} runs to {} (manifest {})",
                batch.records.len(),
                config.outputs.snapshots.display(),
                config.outputs.manifest.display()
            );
            exit::OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit::IO
        }
    }
}

fn cmd_check(suite: Suite, scale: &Scale) -> u8 {
    match run_suite(suite, scale) {
        Ok(checks) => {
            print!("{}", format_table(&checks));
            if checks.iter().all(|c| c.verdict) {
                exit::OK
            } else {
                exit::FAILED_CHECK
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit::INVALID_CONFIG
        }
    }
}

fn cmd_replay(manifest: &std::path::Path, jobs: usize) -> u8 {
    match replay(manifest, jobs) {
        Ok(ReplayOutcome::Identical) => {
            println!("identical");
            exit::OK
        }
        Ok(ReplayOutcome::Mismatch {
            file,
            line,
            recorded,
            replayed,
        }) => {
            eprintln!("mismatch in {} at line {line}", file.display());
            eprintln!("recorded: {recorded}");
            eprintln!("replayed: {replayed}");
            exit::REPLAY_MISMATCH
        }
        Err(e @ ReplayError::Io { .. }) => {
            eprintln!("error: {e}");
            exit::IO
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit::INVALID_CONFIG
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Check { suite, scale } => cmd_check(suite, &scale),
        Command::Replay { manifest, jobs } => {
            cmd_replay(&manifest, jobs.unwrap_or_else(default_jobs))
        }
        Command::Scenarios { dump: None, .. } => {
            for s in Scenario::ALL {
                println!("{:<10} {}", s.name(), s.description());
            }
            exit::OK
        }
        Command::Scenarios { dump: Some(s), n } => {
            let mut config = ExperimentConfig::new(n, 100.0);
            s.apply(&mut config);
            println!("{}", config.to_json());
            exit::OK
        }
    };
    ExitCode::from(code)
}
