use thiserror::Error;

/// Errors raised by the simulation library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument is outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Matrix shapes are incompatible.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// A matrix that should be a density matrix is not one.
    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    /// A Kraus set violates the completeness relation.
    #[error("invalid channel: completeness error {deviation:e} exceeds tolerance")]
    InvalidChannel { deviation: f64 },

    /// QBER is undefined because nothing can be detected.
    #[error("undefined operating point: coincidence probability is zero")]
    UndefinedOperatingPoint,

    /// A Monte Carlo run produced no sifted events.
    #[error("insufficient statistics: {0}")]
    InsufficientStatistics(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
