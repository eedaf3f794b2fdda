//! Error type shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument `{param}`: {reason}")]
    InvalidArgument { param: &'static str, reason: String },

    #[error("out-of-order event: timestamp {timestamp_ms} ms is earlier than last seen {last_seen_ms} ms")]
    OutOfOrder { timestamp_ms: u64, last_seen_ms: u64 },

    #[error("duplicate entry for sector `{0}`")]
    DuplicateSector(crate::sector::Sector),

    #[error("validation failed:\n{}", violations.join("\n"))]
    Validation { violations: Vec<String> },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn invalid_argument(param: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidArgument {
            param,
            reason: reason.into(),
        }
    }

    pub fn validation(violations: Vec<String>) -> Self {
        Error::Validation { violations }
    }
}

/// Checks that `value` is finite and strictly positive.
pub(crate) fn positive_finite(param: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::invalid_argument(
            param,
            format!("expected a finite value > 0, got {value}"),
        ))
    }
}

/// Checks that `value` lies in the closed interval `[lo, hi]`.
pub(crate) fn in_range(param: &'static str, value: f64, lo: f64, hi: f64) -> Result<f64> {
    if value.is_finite() && value >= lo && value <= hi {
        Ok(value)
    } else {
        Err(Error::invalid_argument(
            param,
            format!("expected a value in [{lo}, {hi}], got {value}"),
        ))
    }
}
