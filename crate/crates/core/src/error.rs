use thiserror::Error;

/// Errors raised by the simulation, gate and planning routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error(
        "integration accuracy: norm drift {drift:.3e} after {steps} steps exceeds {limit:.1e}"
    )]
    IntegrationAccuracy {
        drift: f64,
        steps: usize,
        limit: f64,
    },

    #[error(
        "phonon truncation: top Fock level reached population {population:.3e} (limit {limit:.1e})"
    )]
    FockTruncation { population: f64, limit: f64 },

    #[error("infeasible plan: {0}")]
    Infeasible(String),

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
