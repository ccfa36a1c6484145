//! Command-line driver for `lieflow-core`: run configuration, checkpoints,
//! CSV/JSON artifacts and the `train`, `flow`, `eval` and `selfcheck`
//! commands.

pub mod checkpoint;
pub mod cli;
pub mod commands;
pub mod config;
mod error;
pub mod report;
pub mod selfcheck;
pub mod tables;

pub use error::{CliError, Result};
