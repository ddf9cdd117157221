//! Configuration, orchestration and file formats for the `fkp` command.

pub mod commands;
pub mod config;
pub mod error;
pub mod manifest;
pub mod snapshot;
pub mod verify;

pub use commands::{exit_code, run};
pub use config::{parse_config, parse_config_str, RunConfig, Subcommand};
pub use error::{CliError, Result};
pub use manifest::RunManifest;
pub use snapshot::Snapshot;
