//! Front end for the `hokcov` command: configuration, data ingestion, model
//! records, and the subcommands that write CSV, SVG and text outputs.

pub mod commands;
pub mod config;
pub mod error;
pub mod ingest;
pub mod record;
pub mod svg;

pub use commands::{run, Command};
pub use config::RunConfig;
pub use error::{CliError, CliResult};
