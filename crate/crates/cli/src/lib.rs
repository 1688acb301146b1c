//! Command-line front end: share files on disk and report commands.

pub mod args;
pub mod commands;
pub mod error;
pub mod flowspec;
pub mod format;

pub use args::Cli;
pub use commands::run;
pub use error::{CliError, CliResult};
