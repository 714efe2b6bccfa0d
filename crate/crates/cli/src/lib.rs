//! Experiment runner for the `fkdg` solver: TOML configs, shipped presets,
//! CSV/text/SVG reports and expectation checks.

pub mod config;
pub mod error;
pub mod presets;
pub mod runner;
pub mod svg;

pub use config::ExperimentConfig;
pub use error::{CliError, CliResult};
