//! Re-running a batch from its manifest and comparing outputs byte for byte.

use std::path::{Path, PathBuf};

use popsim_core::engine::RunSeed;

use crate::batch::{run_seeds, BatchError};
use crate::config::MasterSeed;
use crate::output::{resets_csv, snapshots_csv, Manifest};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReplayOutcome {
    Identical,
    /// `line` is 1-based; either side is empty when one file is shorter.
    Mismatch {
        file: PathBuf,
        line: usize,
        recorded: String,
        replayed: String,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum ReplayError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("manifest: {0}")]
    Invalid(String),
    #[error(transparent)]
    Batch(#[from] BatchError),
}

pub fn replay(manifest_path: &Path, jobs: usize) -> Result<ReplayOutcome, ReplayError> {
    let io_err = |path: &Path| {
        let path = path.to_path_buf();
        move |source| ReplayError::Io { path, source }
    };
    let manifest = Manifest::read(manifest_path).map_err(|e| match e.kind() {
        std::io::ErrorKind::InvalidData => ReplayError::Invalid(e.to_string()),
        _ => ReplayError::Io {
            path: manifest_path.to_path_buf(),
            source: e,
        },
    })?;
    let MasterSeed::Fixed(master) = manifest.config.master_seed else {
        return Err(ReplayError::Invalid("masterSeed is not resolved".into()));
    };

    let snapshots_path = Manifest::resolve(manifest_path, &manifest.outputs.snapshots);
    let recorded = std::fs::read_to_string(&snapshots_path).map_err(io_err(&snapshots_path))?;
    let resets = match &manifest.outputs.resets {
        Some(p) => {
            let path = Manifest::resolve(manifest_path, p);
            let text = std::fs::read_to_string(&path).map_err(io_err(&path))?;
            Some((path, text))
        }
        None => None,
    };

    let expected: Vec<RunSeed> = (0..manifest.config.runs)
        .map(|run| RunSeed { master, run })
        .collect();
    if manifest.resolved_seeds != expected {
        return Ok(ReplayOutcome::Mismatch {
            file: manifest_path.to_path_buf(),
            line: 0,
            recorded: format!("{:?}", manifest.resolved_seeds),
            replayed: format!("{expected:?}"),
        });
    }

    let mut config = manifest.config.clone();
    config.outputs.resets = manifest.outputs.resets.clone();
    let batch = run_seeds(&config, &expected, jobs)?;
    if let Some(outcome) = compare(&snapshots_path, &recorded, &snapshots_csv(&batch)) {
        return Ok(outcome);
    }
    if let Some((path, text)) = resets {
        if let Some(outcome) = compare(&path, &text, &resets_csv(&batch)) {
            return Ok(outcome);
        }
    }
    Ok(ReplayOutcome::Identical)
}

fn compare(file: &Path, recorded: &str, replayed: &str) -> Option<ReplayOutcome> {
    if recorded == replayed {
        return None;
    }
    let mut a = recorded.split_inclusive('\n');
    let mut b = replayed.split_inclusive('\n');
    let mut line = 1;
    loop {
        match (a.next(), b.next()) {
            (Some(x), Some(y)) if x == y => line += 1,
            (x, y) => {
                let show =
                    |s: Option<&str>| s.unwrap_or_default().trim_end_matches('\n').to_string();
                return Some(ReplayOutcome::Mismatch {
                    file: file.to_path_buf(),
                    line,
                    recorded: show(x),
                    replayed: show(y),
                });
            }
        }
    }
}
