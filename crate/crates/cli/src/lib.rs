//! File formats, run configuration, replicate pipelines and the `rdsnet`
//! command-line tool on top of [`rdsnet_core`].

pub mod commands;
pub mod config;
pub mod error;
pub mod format;
pub mod pipeline;

pub use config::RunConfig;
pub use error::{CliError, Result};
