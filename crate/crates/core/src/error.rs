use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("series truncated at order {got}, need at least {needed}")]
    InsufficientOrder { needed: usize, got: usize },

    #[error("q-series is not a weight-{weight} form: residual nonzero at q^{index}")]
    NoFit { weight: usize, index: usize },

    #[error("no weight-{weight} modular lift of e = {e} with integral q-expansion")]
    NoLift { weight: usize, e: String },

    #[error("unknown framed element `{0}`")]
    UnknownElement(String),

    #[error("missing intersection number <x^{x_power} y^{y_power}>")]
    MissingIntersection { x_power: usize, y_power: usize },

    #[error("intersection data rejected by rule `{rule}`: {detail}")]
    ValidationFailure { rule: &'static str, detail: String },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("witness needs scaling by 3^{needed}, above the limit 3^{limit}")]
    ScalingLimit { needed: usize, limit: usize },

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Stable machine-readable tag used in CLI error JSON.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidArgument(_) => "invalid_argument",
            Error::InsufficientOrder { .. } => "insufficient_order",
            Error::NoFit { .. } => "no_fit",
            Error::NoLift { .. } => "no_lift",
            Error::UnknownElement(_) => "unknown_element",
            Error::MissingIntersection { .. } => "missing_intersection",
            Error::ValidationFailure { .. } => "validation_failure",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::ScalingLimit { .. } => "scaling_limit",
            Error::Parse(_) => "parse",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
