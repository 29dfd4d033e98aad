use thiserror::Error;

/// Errors raised anywhere in the library.
///
/// Numerical failures carry enough context (best estimate, achieved bound)
/// for a caller to decide whether to retry with a looser configuration.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error in {op}: {reason}")]
    Domain { op: &'static str, reason: String },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("quadrature tolerance not met: estimate {estimate}, error bound {error_bound:e}, requested {requested:e}")]
    ToleranceNotMet {
        estimate: num_complex::Complex64,
        error_bound: f64,
        requested: f64,
    },

    #[error("non-finite value in {0}")]
    Overflow(&'static str),

    #[error("{0}: empty sample set")]
    EmptySample(&'static str),

    #[error("second parameter {b} lies within {tol:e} of an integer; the connection formula is degenerate")]
    NearIntegerParameter { b: f64, tol: f64 },

    #[error("series did not converge in {0}")]
    SeriesDivergence(&'static str),

    #[error("contour truncated too early: tail estimate {tail:e} exceeds {tolerance:e}")]
    TruncationTail { tail: f64, tolerance: f64 },

    #[error("density mass {mass} is outside [0.99, 1.01]")]
    Normalization { mass: f64 },

    #[error("imaginary residue {0:e} of the inversion sum is too large")]
    ImaginaryResidue(f64),

    #[error("{0} is out of range")]
    OutOfRange(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(op: &'static str, reason: impl Into<String>) -> Error {
    Error::Domain {
        op,
        reason: reason.into(),
    }
}
