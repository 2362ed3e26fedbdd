//! Files, parallel replication and the `hetnet` command line for
//! [`hetnet_core`].
//!
//! * [`config`]: JSON network configuration.
//! * [`io`]: CSV tables, sample files with their metadata sidecar, JSON reports.
//! * [`parallel`]: rayon replication, identical to the sequential order.
//! * [`figure`]: radial-density curves of the two-tier example network.
//! * [`cli`]: subcommands and exit codes.

pub mod cli;
pub mod config;
pub mod figure;
pub mod io;
pub mod parallel;

use std::path::{Path, PathBuf};

pub use config::{parse_model, serialize_model, ConfigError};

#[derive(Debug, thiserror::Error)]
pub enum AppError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Core(#[from] hetnet_core::Error),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl AppError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        Self::Io { path: path.to_path_buf(), source }
    }

    /// 3 for an infeasible truncation, 2 for every other failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Core(hetnet_core::Error::Infeasible { .. }) => 3,
            _ => 2,
        }
    }
}
