//! Command-line front end for the tripartite protocol simulator.
//!
//! Exit statuses: 0 success, 2 usage or configuration error, 3 a declared
//! invariant failed, 4 I/O failure.

pub mod config;
pub mod report;
pub mod run;

use std::path::PathBuf;

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_INVARIANT: u8 = 3;
pub const EXIT_IO: u8 = 4;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Simulation(#[from] tripartite_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        use tripartite_core::Error as E;
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Io { .. } => EXIT_IO,
            CliError::Simulation(E::Config(_) | E::OutOfRange(_) | E::Empty(_) | E::ModelLimit(_)) => EXIT_USAGE,
            CliError::Simulation(_) => EXIT_INVARIANT,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}
