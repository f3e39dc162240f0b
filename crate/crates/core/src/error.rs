use thiserror::Error;

/// Errors raised by the toolkit.
///
/// Variants map onto the CLI exit-code contract: [`Error::Domain`],
/// [`Error::Argument`], [`Error::Dimension`] and [`Error::Validation`] are
/// usage/validation failures; [`Error::Resource`] is a resource-cap failure.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A matrix left the cone a function is defined on (e.g. `ln` of a
    /// matrix with a non-positive eigenvalue).
    #[error("domain error: {what} (offending eigenvalue {eigenvalue:e})")]
    Domain { what: String, eigenvalue: f64 },

    #[error("argument error: {0}")]
    Argument(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    /// Input is not Hermitian within the construction tolerance.
    #[error("matrix is not Hermitian: asymmetry {asymmetry:e} exceeds tolerance {tolerance:e}")]
    NotHermitian { asymmetry: f64, tolerance: f64 },

    /// Enumeration budget exceeded.
    #[error("resource cap exceeded: {what} needs {required} > {limit}; {advice}")]
    Resource {
        what: String,
        required: u128,
        limit: u128,
        advice: String,
    },

    #[error("eigensolver failed to converge (residual {residual:e})")]
    EigenSolve { residual: f64 },

    /// Ensemble file validation failure, naming the summand/atom at fault.
    #[error("validation error at summand {summand}{}: {message}", atom.map(|a| format!(", atom {a}")).unwrap_or_default())]
    Validation {
        summand: usize,
        atom: Option<usize>,
        message: String,
    },

    #[error("numerical overflow: {0}")]
    Overflow(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    pub(crate) fn domain(what: impl Into<String>, eigenvalue: f64) -> Self {
        Error::Domain {
            what: what.into(),
            eigenvalue,
        }
    }
}
