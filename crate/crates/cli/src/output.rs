//! Snapshot and reset-log CSVs, and the run manifest.

use std::fmt::Write as _;
use std::io;
use std::path::{Path, PathBuf};

use popsim_core::engine::RunSeed;
use serde::{Deserialize, Serialize};

use crate::batch::Batch;
use crate::config::{ExperimentConfig, MasterSeed, Outputs};

pub const SNAPSHOT_HEADER: &str =
    "run,parallel_time,n,est_min,est_median,est_max,phase_exchange,phase_hold,phase_reset,resets,max_bits";
pub const RESET_HEADER: &str = "run,agent_id,parallel_time";

pub const TOOL_VERSION: &str = concat!("popsim ", env!("CARGO_PKG_VERSION"));

/// One row per snapshot, ordered by run and then time. Reals are printed
/// with six decimals.
pub fn snapshots_csv(batch: &Batch) -> String {
    let mut out = String::with_capacity(
        64 * batch
            .records
            .iter()
            .map(|r| r.snapshots.len() + 1)
            .sum::<usize>(),
    );
    out.push_str(SNAPSHOT_HEADER);
    out.push('\n');
    for record in sorted(batch) {
        for s in &record.snapshots {
            let [exchange, hold, reset] = s.phase_counts;
            writeln!(
                out,
                "{},{:.6},{},{:.6},{:.6},{:.6},{},{},{},{},{}",
                record.seed.run,
                s.parallel_time,
                s.n,
                s.est_min,
                s.est_median,
                s.est_max,
                exchange,
                hold,
                reset,
                s.resets,
                s.max_bits
            )
            .unwrap();
        }
    }
    out
}

/// One row per logged reset. Runs without a reset log contribute nothing.
pub fn resets_csv(batch: &Batch) -> String {
    let mut out = String::from(RESET_HEADER);
    out.push('\n');
    for record in sorted(batch) {
        for e in record.resets.iter().flatten() {
            writeln!(
                out,
                "{},{},{:.6}",
                record.seed.run, e.agent_id, e.parallel_time
            )
            .unwrap();
        }
    }
    out
}

fn sorted(batch: &Batch) -> Vec<&popsim_core::engine::RunRecord> {
    let mut records: Vec<_> = batch.records.iter().collect();
    records.sort_by_key(|r| r.seed.run);
    records
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Manifest {
    /// The resolved configuration; its seed is never `"entropy"`.
    pub config: ExperimentConfig,
    pub resolved_seeds: Vec<RunSeed>,
    pub tool_version: String,
    /// Output paths, relative ones taken from the manifest's directory.
    pub outputs: Outputs,
}

impl Manifest {
    pub fn read(path: &Path) -> io::Result<Self> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))
    }

    /// `path` as recorded, resolved against the directory of `manifest_path`.
    pub fn resolve(manifest_path: &Path, path: &Path) -> PathBuf {
        match manifest_path.parent() {
            Some(dir) if path.is_relative() => dir.join(path),
            _ => path.to_path_buf(),
        }
    }
}

/// Records `path` relative to `manifest_dir` when it lives there, else as an
/// absolute path.
fn recorded_path(manifest_dir: &Path, path: &Path) -> io::Result<PathBuf> {
    let absolute = std::path::absolute(path)?;
    let dir = std::path::absolute(manifest_dir)?;
    Ok(match absolute.strip_prefix(&dir) {
        Ok(rel) => rel.to_path_buf(),
        Err(_) => absolute,
    })
}

/// Writes the CSVs and the manifest named in `config.outputs`, creating
/// parent directories as needed, and returns the manifest.
pub fn write_outputs(
    config: &ExperimentConfig,
    master_seed: u64,
    batch: &Batch,
) -> io::Result<Manifest> {
    let outputs = &config.outputs;
    write_file(&outputs.snapshots, &snapshots_csv(batch))?;
    if let Some(path) = &outputs.resets {
        write_file(path, &resets_csv(batch))?;
    }

    let manifest_dir = outputs.manifest.parent().unwrap_or(Path::new("."));
    let manifest_dir = if manifest_dir.as_os_str().is_empty() {
        Path::new(".")
    } else {
        manifest_dir
    };
    let mut resolved = config.clone();
    resolved.master_seed = MasterSeed::Fixed(master_seed);
    let manifest = Manifest {
        config: resolved,
        resolved_seeds: batch.seeds(),
        tool_version: TOOL_VERSION.to_string(),
        outputs: Outputs {
            snapshots: recorded_path(manifest_dir, &outputs.snapshots)?,
            manifest: recorded_path(manifest_dir, &outputs.manifest)?,
            resets: outputs
                .resets
                .as_deref()
                .map(|p| recorded_path(manifest_dir, p))
                .transpose()?,
        },
    };
    let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    text.push('\n');
    write_file(&outputs.manifest, &text)?;
    Ok(manifest)
}

fn write_file(path: &Path, contents: &str) -> io::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, contents)
}
