use thiserror::Error;

/// Errors produced anywhere in the simulator.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian: max |M - M†| = {deviation:.3e} exceeds {tolerance:.3e}")]
    NotHermitian { deviation: f64, tolerance: f64 },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("Hilbert dimension {dim} exceeds the configured maximum {max}")]
    DimensionOverflow { dim: usize, max: usize },

    #[error("unknown subsystem `{0}`")]
    UnknownSubsystem(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("numerical invariant violated: {0}")]
    InvariantViolation(String),

    #[error("eigendecomposition failed: {0}")]
    Eigen(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code for the CLI: 2 for configuration problems,
    /// 3 for numerical-invariant violations, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::DimensionMismatch { .. }
            | Error::DimensionOverflow { .. }
            | Error::UnknownSubsystem(_)
            | Error::InvalidConfig(_) => 2,
            Error::NotHermitian { .. } | Error::InvariantViolation(_) | Error::Eigen(_) => 3,
            Error::Io(_) => 1,
        }
    }
}
