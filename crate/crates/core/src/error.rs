use thiserror::Error;

/// Errors raised by the linear algebra kernels, problem evaluation and solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum NlError {
    #[error("matrix is numerically singular: pivot {index} has magnitude below the floor 1e-{floor_digits}")]
    SingularMatrix { index: usize, floor_digits: u32 },

    #[error("Jacobian is numerically singular at the current iterate (pivot {index})")]
    SingularJacobian { index: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("point outside the domain of {problem}: {reason}")]
    DomainError { problem: String, reason: String },

    #[error("unknown problem `{0}`")]
    UnknownProblem(String),

    #[error("invalid size {size} for {problem}: {reason}")]
    InvalidSize {
        problem: String,
        size: usize,
        reason: &'static str,
    },

    #[error("need at least {needed} usable norms, found {found}")]
    InsufficientData { needed: usize, found: usize },

    #[error("degenerate sequence: {0}")]
    DegenerateSequence(&'static str),

    #[error("iteration did not converge: {0}")]
    NoConvergence(String),

    #[error("working precision must be at least {min} bits, got {bits}")]
    InvalidPrecision { bits: u32, min: u32 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T, E = NlError> = std::result::Result<T, E>;
