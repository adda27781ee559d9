use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid argument `{name}`: {reason}")]
    InvalidArgument { name: &'static str, reason: String },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("points coincide")]
    CoincidentPoints,

    #[error("direction is not a unit vector (|omega| = {norm})")]
    NonUnitDirection { norm: f64 },

    #[error("evaluation at s = {s} lies inside the exclusion zone of the support [{lo}, {hi}]")]
    TangencyExclusion { s: f64, lo: f64, hi: f64 },

    #[error("grid too small: {0}")]
    InsufficientGrid(String),

    #[error("profile does not decay at the grid ends (|end| = {end_value:.3e}, peak {peak:.3e})")]
    NotDecayed { end_value: f64, peak: f64 },

    #[error("domain is not convex: {0}")]
    NonConvex(String),

    #[error("bump support exceeds domain: {0}")]
    SupportOutsideDomain(String),

    #[error("point {0:?} is not inside the domain")]
    OutsideDomain(Vec<f64>),

    #[error("mismatch: {0}")]
    Mismatch(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidArgument {
        name,
        reason: reason.into(),
    }
}
