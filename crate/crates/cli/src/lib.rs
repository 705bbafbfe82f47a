//! Library side of the `dqc` command: configuration, sweeps, output rows and
//! the validation harness.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod sweep;
pub mod validate;

pub use commands::{run, Cli, Command};
pub use error::{CliError, Result};
