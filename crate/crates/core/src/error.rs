use std::path::PathBuf;

use thiserror::Error;

use crate::model::ValidationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid model specification: {0}")]
    InvalidSpec(ValidationReport),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix entry ({row}, {col}) is negative or not finite: {value}")]
    NegativeEntry { row: usize, col: usize, value: f64 },

    #[error("state entry {index} is negative or not finite: {value}")]
    InvalidState { index: usize, value: f64 },

    #[error("power iteration did not converge after {iterations} iterations (relative gap {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("matrix I - T is singular")]
    SingularMatrix,

    #[error("matrix is reducible; no positive eigenvector")]
    Reducible,

    #[error("growth ordering violated: lambda = {lambda}, R0 = {r0}")]
    OrderingViolation { lambda: f64, r0: f64 },

    #[error("negative discriminant {0:e} in two-pool reproduction number")]
    NegativeDiscriminant(f64),

    #[error("gradient undefined at ({phi_s}, {phi_r}): {reason}")]
    GradientUndefined {
        phi_s: f64,
        phi_r: f64,
        reason: &'static str,
    },

    #[error("parameter {param} cannot be perturbed: {reason}")]
    Perturbation { param: String, reason: String },

    #[error("unknown parameter handle `{0}`")]
    UnknownParameter(String),

    #[error("operation requires density-dependent rules on every transition")]
    NotDensityDependent,

    #[error("operation requires allocations strictly inside (0, 1)")]
    BoundaryAllocation,

    #[error("orbit from initial condition {start} did not settle within {steps} steps")]
    OrbitNotSettled { start: usize, steps: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("spec file: {0}")]
    SpecFormat(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
