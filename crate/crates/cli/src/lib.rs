//! Experiment runner for the `oet` binary: configuration, figure presets and
//! CSV/JSON output.

use std::path::PathBuf;

pub mod config;
pub mod dataset;
pub mod experiments;
pub mod reproduce;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] oet_core::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("output: {0}")]
    Stream(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("refusing to write non-finite value {0}")]
    NonFinite(f64),
}
