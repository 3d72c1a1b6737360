//! Command-line driver: config loading, subcommands and the check suite.

pub mod checks;
pub mod commands;
pub mod config;
pub mod error;
pub mod record;

pub use error::CliError;
