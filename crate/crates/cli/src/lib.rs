//! Batch front-end: reads a JSON run configuration, runs one command and
//! writes `results.json` plus per-resolution `errors.csv` tables.

pub mod config;
pub mod output;
pub mod run;

use std::path::Path;

use bdies_core::BdiesError;
use thiserror::Error;

pub use config::{load_config, parse_config, Command, RunConfig};
pub use run::{run, Outcome};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("{0}")]
    Core(#[from] BdiesError),
    #[error("i/o error: {0}")]
    Io(String),
}

/// Writes the artifacts of a finished run into `dir`.
pub fn write_outcome(dir: &Path, outcome: &Outcome) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("creating {}: {e}", dir.display())))?;
    output::write_json(&dir.join("results.json"), &outcome.results)?;
    for (name, rows) in &outcome.tables {
        output::write_errors_csv(&dir.join(name), rows)?;
    }
    Ok(())
}

/// Sizes the global thread pool from `BDIES2D_THREADS`, if set.
pub fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Config(format!("{THREADS_VAR} must be a positive integer, got `{value}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(format!("thread pool: {e}")))
}

pub const THREADS_VAR: &str = "BDIES2D_THREADS";
