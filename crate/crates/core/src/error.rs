use thiserror::Error;

/// Errors raised by the transform, norm and verification routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("nonpositive weight value {value} at index {index}")]
    NonPositiveWeight { index: i64, value: f64 },

    /// A requested index range is not covered by the data window.
    #[error("range [{lo}, {hi}] is outside the available window [{window_lo}, {window_hi}]")]
    OutOfWindow {
        lo: i64,
        hi: i64,
        window_lo: i64,
        window_hi: i64,
    },

    #[error("sequence is not mean-zero (sum = {sum:e})")]
    NotMeanZero { sum: f64 },

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Short machine-readable code used in report rows.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Empty(_) => "empty",
            Error::InvalidParameter(_) => "invalid-parameter",
            Error::NonPositiveWeight { .. } => "nonpositive-weight",
            Error::OutOfWindow { .. } => "out-of-window",
            Error::NotMeanZero { .. } => "not-mean-zero",
            Error::Parse(_) => "parse",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_within(lo: i64, hi: i64, window_lo: i64, window_hi: i64) -> Result<()> {
    if lo < window_lo || hi > window_hi {
        Err(Error::OutOfWindow {
            lo,
            hi,
            window_lo,
            window_hi,
        })
    } else {
        Ok(())
    }
}
