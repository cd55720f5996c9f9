use thiserror::Error;

/// Errors raised by the special-function, sampling and statistics layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A series ran out of its term budget before meeting its tolerance.
    #[error("{context}: series did not converge within {terms} terms")]
    NonConvergence { context: &'static str, terms: usize },

    /// Adaptive quadrature could not reach the requested tolerance.
    #[error("{context}: quadrature error estimate {estimate:e} above tolerance {tolerance:e}")]
    Quadrature {
        context: &'static str,
        estimate: f64,
        tolerance: f64,
    },

    /// Eigenvalues are too close for the determinant-ratio formula.
    #[error("degenerate spectrum: {0}")]
    DegenerateSpectrum(String),

    /// A model parameter violates one of its invariants.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A computed probability fell outside [0, 1] beyond the allowed slack,
    /// or a matrix that must be definite was not.
    #[error("numerical consistency: {0}")]
    NumericalConsistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;
