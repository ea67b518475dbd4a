//! Experiment harness behind the `uavrelay` binary: sweeps, analytic vs
//! simulated comparisons, altitude planning and CSV output.
//!
//! Exit codes: 0 success, 1 configuration or usage error, 2 I/O error,
//! 3 validation failure, 4 infeasible plan.

pub mod commands;
pub mod output;
pub mod sweep;

pub use commands::*;
pub use output::ResultRow;
pub use sweep::{Overrides, Preset, SweepPlan, SweepSpec, SweepVar};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Config(#[from] uavrelay::scenario::ConfigFileError),
    #[error(transparent)]
    Model(#[from] uavrelay::Error),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
    #[error("{0} grid point(s) failed validation")]
    ValidationFailed(usize),
    #[error(transparent)]
    Infeasible(uavrelay::PlanError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config(_) | CliError::Model(_) => 1,
            CliError::Io(_) | CliError::Csv(_) => 2,
            CliError::ValidationFailed(_) => 3,
            CliError::Infeasible(_) => 4,
        }
    }
}

impl From<uavrelay::ValidationError> for CliError {
    fn from(e: uavrelay::ValidationError) -> Self {
        CliError::Model(e.into())
    }
}
