use thiserror::Error;

/// Errors raised by the solver and its verification tooling.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum NsvError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("tensor is not symmetric (asymmetry {asymmetry:.3e})")]
    NonSymmetric { asymmetry: f64 },

    #[error("matrix is not orthogonal (|QQ^T - I| = {defect:.3e})")]
    NotOrthogonal { defect: f64 },

    #[error("velocity field is not divergence-free (max |k.u(k)| = {defect:.3e})")]
    NotDivergenceFree { defect: f64 },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("fixed-point iteration did not converge at t = {time} after {iterations} iterations (last update {residual:.3e})")]
    FixedPointDiverged {
        time: f64,
        iterations: usize,
        residual: f64,
    },

    #[error("non-finite state at t = {time}")]
    NonFinite { time: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for NsvError {
    fn from(e: std::io::Error) -> Self {
        NsvError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, NsvError>;
