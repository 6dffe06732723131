//! Command-line pipelines over the grounder, the reasoner, the embedding
//! models and the evaluation harness.

pub mod commands;
pub mod config;
pub mod error;
pub mod pipeline;

pub use commands::{run, Cli, Command};
pub use config::RunConfig;
pub use error::CliError;
