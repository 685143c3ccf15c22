use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Error)]
pub enum GrlError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("numerical failure: {message}")]
    NumericalFailure { message: String, location: Option<Vec<f64>> },

    #[error("ambiguous classification: coordinate {index} ({value}) is within {distance:e} of {near}")]
    AmbiguousClassification {
        index: usize,
        value: f64,
        near: String,
        distance: f64,
    },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("insufficient support: {0}")]
    InsufficientSupport(String),

    #[error("truncation K={requested} leaves tail bound {tail:e}; use K >= {suggested}")]
    Truncation {
        requested: usize,
        suggested: usize,
        tail: f64,
    },

    #[error("phase undefined at orbit step {step}: |value| = {modulus:e}")]
    PhaseUndefined { step: usize, modulus: f64 },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed input: {0}")]
    Parse(String),
}

impl GrlError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        GrlError::InvalidArgument(msg.into())
    }

    pub(crate) fn numerical(msg: impl Into<String>) -> Self {
        GrlError::NumericalFailure {
            message: msg.into(),
            location: None,
        }
    }

    pub(crate) fn numerical_at(msg: impl Into<String>, location: Vec<f64>) -> Self {
        GrlError::NumericalFailure {
            message: msg.into(),
            location: Some(location),
        }
    }
}

impl From<serde_json::Error> for GrlError {
    fn from(e: serde_json::Error) -> Self {
        GrlError::Parse(e.to_string())
    }
}

impl From<csv::Error> for GrlError {
    fn from(e: csv::Error) -> Self {
        GrlError::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, GrlError>;
