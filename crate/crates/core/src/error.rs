use thiserror::Error;

/// Errors raised by the analysis routines.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A parameter or input failed validation before any computation ran.
    #[error("invalid input: {0}")]
    Validation(String),

    /// A rational composition or equation collapsed onto a pole.
    #[error("degenerate: {0}")]
    Degenerate(String),

    #[error("insufficient data: need {needed}, have {have} ({what})")]
    InsufficientData {
        what: &'static str,
        needed: usize,
        have: usize,
    },

    /// Quadrature did not reach the requested tolerance.
    #[error("accuracy: estimate {estimate} with error bound {bound} exceeds tolerance {tolerance}")]
    Accuracy { estimate: f64, bound: f64, tolerance: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    /// True for failures of a numerical procedure rather than of its inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Accuracy { .. } | Error::InsufficientData { .. } | Error::Degenerate(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
