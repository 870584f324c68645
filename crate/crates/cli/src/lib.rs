//! Experiment drivers: wavenumber sweeps, GMRES studies, verification reports,
//! plots and geometry dumps.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod geometry_dump;
pub mod gmres_study;
pub mod plot;
pub mod sweep;
pub mod verify;

mod table;

use thiserror::Error;

pub use config::{BetaChoice, ConfigFile, EtaSchedule, OperatorSpec};
pub use geometry_dump::dump_geometry;
pub use gmres_study::{run_gmres_study, GmresRow};
pub use plot::emit_plot;
pub use sweep::{run_sweep, FittedSlope, SweepOptions, SweepRecord, SweepRow};
pub use verify::{run_oracle_circle, run_verify, VerifyReport};

/// Environment variable holding the number of worker slots.
pub const WORKERS_ENV: &str = "HELMBEM_WORKERS";

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Bem(#[from] helmbem::BemError),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("configuration: {0}")]
    Config(String),

    #[error("{0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, CliError>;

pub(crate) fn io_err(path: &std::path::Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Worker slots from [`WORKERS_ENV`], else the available parallelism.
pub fn worker_count() -> usize {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}
