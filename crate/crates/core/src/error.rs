use thiserror::Error;

/// Errors produced by the numerics, model, integrator and benchmark layers.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is numerically singular (pivot {pivot:e} at column {column})")]
    SingularMatrix { column: usize, pivot: f64 },

    #[error("non-finite value encountered during evaluation")]
    NonFiniteEvaluation,

    #[error("direction vector norm {norm:e} is at or below the floor {floor:e}")]
    ZeroDirection { norm: f64, floor: f64 },

    #[error("Newton iteration stopped after {iterations} steps with residual {residual:e}")]
    NewtonDidNotConverge { iterations: usize, residual: f64 },

    #[error("integration failed at step {index}: {source}")]
    StepFailed { index: usize, source: Box<Error> },

    #[error("time grids do not nest: node t = {time} has no matching reference node")]
    GridMismatch { time: f64 },

    #[error("invalid time grid: {0}")]
    InvalidGrid(String),

    #[error("Riccati iteration did not converge after {iterations} iterations (residual {residual:e})")]
    AreNotConverged { iterations: usize, residual: f64 },

    #[error("Riccati solution is not stabilizing")]
    NotStabilizing,

    #[error("no stabilizing feedback gain found in the seed scan")]
    NoStabilizingSeed,

    #[error("unknown example `{0}`")]
    UnknownExample(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
