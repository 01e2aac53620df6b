//! Crate-wide error type.

/// Errors produced by any operation in this crate.
///
/// The variants mirror how failures should be reported to a user: bad
/// arguments are [`Error::Domain`] or [`Error::Validation`], statistical
/// preconditions that a concrete sample fails are [`Error::Precondition`],
/// and breakdowns of the numerics themselves are [`Error::Numerical`].
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Structured input (a plan, a file, a parameter set) failed validation.
    #[error("validation error: {0}")]
    Validation(String),

    /// The sample at hand violates a precondition of the estimator.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The sample is degenerate for this statistic (zero variance, zero spacing).
    #[error("degenerate sample: {0}")]
    DegenerateSample(String),

    /// Too few observations or cells to carry out the procedure.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// A numerical routine failed to converge or produced a non-finite value.
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
