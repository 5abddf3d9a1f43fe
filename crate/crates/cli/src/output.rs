use std::fs;
use std::path::{Path, PathBuf};

use abers_core::StudyReport;
use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::CliError;

/// SHA-256 of the canonical form of the resolved configuration.
pub fn config_hash(cfg: &RunConfig) -> String {
    hex::encode(Sha256::digest(cfg.canonical().as_bytes()))
}

pub fn emit_csv(report: &StudyReport, path: &Path) -> Result<(), CliError> {
    fs::write(path, report.to_csv_string()).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.to_path_buf(),
        source,
    })
}

/// Writes `key=value` lines. Used for data that must stay out of the
/// deterministic CSV files, such as wall time.
pub fn emit_meta(path: &Path, entries: &[(&str, String)]) -> Result<PathBuf, CliError> {
    let text: String = entries.iter().map(|(k, v)| format!("{k}={v}\n")).collect();
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(path.to_path_buf())
}
