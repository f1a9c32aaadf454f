//! Error type shared by every module, with a stable mapping to process exit
//! codes for the command-line front end.

use thiserror::Error;

/// Errors surfaced by laboratory operations.
#[derive(Debug, Error)]
pub enum RfError {
    /// Malformed request: bad shapes, empty windows, unknown names.
    #[error("argument error: {0}")]
    Argument(String),

    /// Input violates a documented precondition of the operation.
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// Input is degenerate (all-zero coefficients, empty set, zero norm).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// An iterative numeric procedure failed to converge; the message
    /// carries the refinement trace.
    #[error("numeric failure: {0}")]
    Numeric(String),

    /// The denominator of a ratio vanished identically; distinct from
    /// floating-point overflow.
    #[error("infinite ratio: {0}")]
    InfiniteRatio(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl RfError {
    /// Stable exit-code contract: 2 usage, 3 precondition, 4 i/o, 5 numeric.
    pub fn exit_code(&self) -> i32 {
        match self {
            RfError::Argument(_) => 2,
            RfError::Precondition(_) | RfError::Degenerate(_) | RfError::InfiniteRatio(_) => 3,
            RfError::Io(_) => 4,
            RfError::Numeric(_) => 5,
        }
    }
}

pub type Result<T> = std::result::Result<T, RfError>;
