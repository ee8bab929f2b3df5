//! Experiment runner for the population-protocol simulator: batch
//! execution, Monte Carlo check suites, deterministic CSV output and replay.

pub mod batch;
pub mod check;
pub mod config;
pub mod output;
pub mod replay;
pub mod scenarios;

/// Process exit codes.
pub mod exit {
    pub const OK: u8 = 0;
    pub const FAILED_CHECK: u8 = 1;
    pub const INVALID_CONFIG: u8 = 2;
    pub const IO: u8 = 3;
    pub const REPLAY_MISMATCH: u8 = 4;
}
