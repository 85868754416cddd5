//! Experiment configuration, orchestration and trace persistence.
//!
//! An experiment is a TOML file naming an instance family, a solver and its
//! settings. [`run_experiment`] builds the instance for every repetition,
//! solves it, certifies the gaps and optionally writes a CSV trace, a binary
//! iterate sidecar and a JSON summary per run.

mod config;
mod run;
mod trace;

pub use config::{
    Auto, ExperimentConfig, GeometrySpec, InstanceSpec, L0Setting, OutputSpec, SetSpec, SolverKind, SolverSpec,
    SCHEMA_VERSION,
};
pub use run::{
    apply_variant, compare_solvers, counters_consistent, format_table, run_experiment, run_single, ComparisonRow,
    RunOutcome, RunSummary,
};
pub use trace::{
    load_trace, read_iterates, read_trace_csv, save_trace, sums_from_trace, write_iterates, write_trace_csv,
};

use std::path::Path;

use thiserror::Error;

use crate::problems::ProblemError;
use crate::solver::SolverError;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{field}: {message}")]
    Config { field: String, message: String },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("malformed trace: {0}")]
    Trace(String),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Problem(#[from] ProblemError),
}

impl HarnessError {
    pub fn config(field: &str, message: impl Into<String>) -> Self {
        HarnessError::Config { field: field.to_string(), message: message.into() }
    }

    pub fn io(path: &Path, err: std::io::Error) -> Self {
        HarnessError::Io { path: path.display().to_string(), message: err.to_string() }
    }

    /// Prefixes the error with the file it came from.
    pub fn with_path(self, path: &Path) -> Self {
        match self {
            HarnessError::Config { field, message } => {
                HarnessError::Config { field: format!("{}: {field}", path.display()), message }
            }
            HarnessError::Trace(m) => HarnessError::Trace(format!("{}: {m}", path.display())),
            other => other,
        }
    }
}

impl From<csv::Error> for HarnessError {
    fn from(e: csv::Error) -> Self {
        HarnessError::Trace(e.to_string())
    }
}
