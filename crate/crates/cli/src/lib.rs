//! Command-line front end for `scalemix`: configuration, CSV ingestion,
//! multi-chain orchestration and output files.

pub mod config;
pub mod error;
pub mod ingest;
pub mod output;
pub mod run;

pub use config::{Args, ColumnKind, ColumnSchema, ConfigFile, Mode, RunConfig};
pub use error::{CliError, CliResult};
pub use ingest::{ingest, read_table, Dataset, Table};
pub use run::{orchestrate, RunReport};

/// Parses flags, resolves the configuration and runs it.
pub fn run_args(args: &Args) -> CliResult<RunReport> {
    orchestrate(&RunConfig::resolve(args)?)
}
