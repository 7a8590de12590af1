use alloc::string::String;

/// Errors raised by the pricing engines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation (NaN, non-positive spot, ...).
    #[error("domain error: {0}")]
    Domain(String),
    /// Dates or expiries are not strictly increasing, or an evaluation time is past the first date.
    #[error("schedule error: {0}")]
    Schedule(String),
    /// A covariance matrix is not positive definite and cannot be reduced to one.
    #[error("covariance is not positive definite (smallest eigenvalue {eigenvalue:e})")]
    NotPositiveDefinite {
        /// Smallest eigenvalue of the correlation matrix.
        eigenvalue: f64,
    },
    /// Endogenous recovery with barriers on both sides of `n/R`.
    #[error("unsupported barrier regime: barriers {below} <= n/R = {threshold} and {above} > n/R")]
    UnsupportedRegime {
        /// Number of barriers at or below `n/R`.
        below: usize,
        /// Number of barriers above `n/R`.
        above: usize,
        /// The threshold `n/R`.
        threshold: f64,
    },
    /// The request is structurally invalid (wrong lengths, order too high, ...).
    #[error("invalid input: {0}")]
    Invalid(String),
}

impl Error {
    /// Stable machine-readable code for the error.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Domain(_) => "DOMAIN",
            Error::Schedule(_) => "SCHEDULE_ORDER",
            Error::NotPositiveDefinite { .. } => "NOT_POSITIVE_DEFINITE",
            Error::UnsupportedRegime { .. } => "UNSUPPORTED_REGIME",
            Error::Invalid(_) => "INVALID_INPUT",
        }
    }
}

/// Result alias used across the crate.
pub type Result<T> = core::result::Result<T, Error>;

macro_rules! bail {
    ($kind:ident, $($arg:tt)*) => {
        return Err($crate::Error::$kind(alloc::format!($($arg)*)))
    };
}
pub(crate) use bail;
