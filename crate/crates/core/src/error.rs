use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum OscError {
    #[error("unknown polynomial family `{0}`")]
    UnknownFamily(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("point {value} lies outside the domain of definition (radius {radius})")]
    OutOfDomain { value: f64, radius: f64 },

    #[error("{what} did not converge within {iterations} iterations")]
    NonConvergence { what: &'static str, iterations: usize },

    #[error("dimension {dim} too small: {reason}")]
    DimensionTooSmall { dim: usize, reason: String },

    #[error("moment table covers indices up to {available}, need {required}")]
    InsufficientMoments { available: usize, required: usize },

    #[error("no orthogonality measure available for a custom family")]
    MissingMeasure,

    #[error("{0} evaluated at a pole")]
    Pole(&'static str),

    #[error("non-finite value computing {0}")]
    Overflow(&'static str),
}

pub type Result<T> = std::result::Result<T, OscError>;
