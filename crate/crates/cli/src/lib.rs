//! Command-line pipeline: config parsing, snapshot archives, reports and the
//! `solve`, `certify`, `verify` and `gronwall` commands.

pub mod commands;
pub mod config;
pub mod error;
pub mod report;
pub mod snapshot;

pub use config::Config;
pub use error::{CliError, CliResult};
