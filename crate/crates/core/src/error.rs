use thiserror::Error;

/// Errors raised by the simulation library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid Hilbert space: {0}")]
    InvalidSpace(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("operator is not Hermitian (max-norm defect {defect:.3e})")]
    NotHermitian { defect: f64 },

    #[error("operator is not unitary (max-norm defect {defect:.3e})")]
    NotUnitary { defect: f64 },

    #[error("basis is not orthonormal (max Gram defect {defect:.3e})")]
    NotOrthonormal { defect: f64 },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid pulse schedule: {0}")]
    InvalidSchedule(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("argument {x} outside the supported range |x| <= {limit}")]
    OutOfRange { x: f64, limit: f64 },

    #[error("trace drifted by {drift:.3e} during propagation")]
    TraceDrift { drift: f64 },

    #[error("channel is not completely positive (min Choi eigenvalue {min_eigenvalue:.3e})")]
    NotCompletelyPositive { min_eigenvalue: f64 },

    #[error("leakage {leakage:.3e} out of the logical subspace; schedule looks mis-compiled")]
    Leakage { leakage: f64 },

    #[error("time-step refinement failed: {0}")]
    StepResolution(String),

    #[error("unsupported combination: {0}")]
    Unsupported(String),
}

impl Error {
    /// True for failures that indicate a broken numerical result rather
    /// than bad input.
    pub fn is_integrity_failure(&self) -> bool {
        matches!(
            self,
            Error::TraceDrift { .. }
                | Error::NotCompletelyPositive { .. }
                | Error::Leakage { .. }
                | Error::StepResolution(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
