use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unit index {index} out of range for a network of {n} units")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("infeasible degree sequence: {0}")]
    InfeasibleDegrees(String),

    #[error("enumeration cap exceeded: {needed} binary variables requested, cap is {cap}")]
    EnumerationCap { needed: usize, cap: usize },

    #[error("optimizer did not converge after {iterations} iterations (gradient norm {gradient_norm:.3e})")]
    NonConvergence { iterations: usize, gradient_norm: f64 },

    #[error("likelihood appears unbounded: coefficient {index} is diverging (value {value:.3})")]
    Separation { index: usize, value: f64 },

    #[error("information matrix is singular")]
    SingularInformation,

    #[error("covariance matrix is not positive semidefinite (smallest eigenvalue {0:.3e})")]
    NotPositiveSemidefinite(f64),

    #[error("usage error: {0}")]
    Usage(String),

    #[error("{failed} of {total} replicates failed, above the {limit:.0}% abort threshold")]
    ReplicateFailures { failed: usize, total: usize, limit: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures that come from the optimizer rather than bad input.
    pub fn is_convergence_failure(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence { .. } | Error::Separation { .. } | Error::SingularInformation
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
