//! Output formatting and atomic file writes.

use std::io::Write;
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;
use crate::error::{CliError, Result};

/// Shortest round-trip scientific notation, stable across runs and platforms.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:e}")
}

/// Canonical JSON of a config; whitespace and key order in the source file
/// do not matter.
pub fn canonical_config(config: &ExperimentConfig) -> String {
    serde_json::to_string(config).expect("config serializes")
}

pub fn config_hash(config: &ExperimentConfig) -> String {
    hex::encode(Sha256::digest(canonical_config(config).as_bytes()))
}

/// Provenance carried by every output file.
#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub command: String,
    pub config_sha256: String,
    pub seed: u64,
    pub config: serde_json::Value,
}

impl Provenance {
    pub fn new(command: &str, config: &ExperimentConfig, seed: u64) -> Self {
        Self {
            command: command.to_string(),
            config_sha256: config_hash(config),
            seed,
            config: serde_json::to_value(config).expect("config serializes"),
        }
    }

    /// `#`-prefixed header lines for CSV outputs.
    pub fn csv_header(&self) -> String {
        format!(
            "# command: {}\n# config_sha256: {}\n# seed: {}\n# config: {}\n",
            self.command, self.config_sha256, self.seed, self.config
        )
    }
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::io(dir, e))?;
    tmp.write_all(contents).map_err(|e| CliError::io(path, e))?;
    tmp.as_file().sync_all().map_err(|e| CliError::io(path, e))?;
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}
