//! Experiment runner for bundle signal representations: builds bundles,
//! sweeps cover parameters, compares spectra, denoises landscapes and dumps
//! dictionaries, writing plot-ready CSV/JSON.

pub mod commands;
pub mod config;
pub mod error;
pub mod landscape;
pub mod output;

pub use commands::{run, Command};
pub use config::{ExperimentConfig, LoadedConfig};
pub use error::{CliError, Result};
