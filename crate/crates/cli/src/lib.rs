//! Instance ingestion, run configuration and experiment orchestration for the
//! `robust-alloc` command-line tool.

pub mod config;
pub mod error;
pub mod experiment;
pub mod io;

pub use config::{Overrides, RunConfig};
pub use error::CliError;
pub use experiment::{build_set, generate, run_experiment, CellOutcome, Mode, Outcome, Status};
pub use io::{parse_instance, parse_instance_reader, parse_instance_str, read_budget, write_instance, Schema};
