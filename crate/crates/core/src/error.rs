use thiserror::Error;

/// Errors raised by estimation, modelling and simulation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("kernel `{kernel}` does not support {operation}")]
    UnsupportedOperation {
        kernel: &'static str,
        operation: &'static str,
    },

    /// The local design stayed numerically singular after every widening step.
    #[error("singular local design at x = {x}{}", index.map(|i| format!(" (observation {i})")).unwrap_or_default())]
    SingularDesign { x: f64, index: Option<usize> },

    #[error("invalid sample size {n}: {reason}")]
    InvalidSize { n: usize, reason: &'static str },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("all errors are zero; the sum of squares vanishes")]
    DegenerateErrors,

    #[error("mean-zero constraint is infeasible: zero is not strictly inside the range of the errors")]
    InfeasibleConstraint,

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("all {replications} replications failed")]
    AllReplicationsFailed { replications: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
