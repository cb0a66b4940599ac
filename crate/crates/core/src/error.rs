use thiserror::Error;

/// Errors produced by the toolkit.
#[derive(Debug, Error)]
pub enum PinqError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("{what} needs {qubits} qubits, above the ceiling of {ceiling}")]
    TooLarge {
        what: &'static str,
        qubits: usize,
        ceiling: usize,
    },

    #[error("unsupported term {index} ({term}): {reason}")]
    UnsupportedTerm {
        index: usize,
        term: String,
        reason: String,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NonHermitian(f64),

    #[error(
        "iterative solver did not converge after {iterations} iterations (residual {residual:e})"
    )]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("malformed step {index}: {reason}")]
    MalformedStep { index: usize, reason: String },

    #[error("post-selection probability underflow at step {step}")]
    SurvivalUnderflow { step: usize },

    #[error("target unreachable: {0}")]
    Unreachable(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, PinqError>;
