//! Batch front-end: reads a run configuration, executes one experiment and
//! writes plot-ready CSV files.
//!
//! CSV output is deterministic: the same configuration yields byte-identical
//! files. Each file carries the SHA-256 of the resolved configuration as
//! `# config_hash=` metadata. Timing goes to a separate `run.meta` file.

use std::path::PathBuf;

pub mod config;
pub mod experiment;
pub mod output;

pub use config::{
    load_config, parse_config, parse_config_with, ConfigError, Experiment, ParseOptions, RunConfig,
};
pub use experiment::{run_experiment, RunSummary};
pub use output::{config_hash, emit_csv};

pub const EXIT_CHECKS_FAILED: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_SOLVER: u8 = 3;
pub const EXIT_IO: u8 = 4;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(#[from] ConfigError),
    #[error("solver aborted: {0}")]
    Solver(#[from] abers_core::Error),
    #[error("cannot write {}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(ConfigError::Read { .. }) => EXIT_IO,
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Solver(_) => EXIT_SOLVER,
            CliError::Io { .. } => EXIT_IO,
        }
    }
}
