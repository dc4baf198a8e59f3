use thiserror::Error;

/// Failures raised by the geometric operations.
///
/// Every variant is a contract violation on the caller's side or a numeric
/// abort; nothing here is recoverable by retrying.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("algebra mismatch: {0}")]
    AlgebraMismatch(String),

    #[error("dimension mismatch in {what}: expected {expected}, got {got}")]
    Dimension {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("projection mismatch ({what}): residual {residual:.3e}")]
    ProjectionMismatch { what: &'static str, residual: f64 },

    #[error("constraint violated ({what}): residual {residual:.3e}")]
    Constraint { what: &'static str, residual: f64 },

    #[error("not orthogonal: residual {0:.3e}")]
    NotOrthogonal(f64),

    #[error("element is not in the reducible set: residual {residual:.3e}")]
    NotReducible { residual: f64 },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("non-finite state at step {step}")]
    NumericAbort { step: usize },

    #[error("unsupported: {0}")]
    Unsupported(&'static str),

    #[error("invalid structure constants: {0}")]
    InvalidAlgebra(String),

    #[error("bad config: {0}")]
    Config(String),

    #[error("lagrangian is not invariant under the tangent action{0}")]
    NotInvariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;
