use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors raised by the library. Each variant belongs to one module, see
/// [`Error::module`].
#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("row {row}: {reason}")]
    Parse { row: usize, reason: String },
    #[error("series is empty")]
    EmptySeries,
    #[error("non-finite sample at index {index}")]
    NonFinite { index: usize },
    #[error("price at index {index} is not strictly positive ({value})")]
    NonPositivePrice { index: usize, value: f64 },
    #[error("horizon {horizon} must be positive and shorter than the series ({len} samples)")]
    HorizonTooLarge { horizon: usize, len: usize },
    #[error("volatility window {window} is invalid for {len} returns (need 2 <= T <= len)")]
    VolatilityWindow { window: usize, len: usize },

    #[error("invalid window: {0}")]
    InvalidWindow(String),
    #[error("series of length {len} is shorter than window n={n} (needs n+1 samples)")]
    SeriesTooShort { len: usize, n: usize },

    #[error("invalid lag grid: {0}")]
    InvalidLags(String),
    #[error("no jointly valid positions for n={n}, tau={tau}")]
    EmptyValidRange { n: usize, tau: i64 },
    #[error("ensemble is empty or its members disagree in shape")]
    EnsembleShape,

    #[error("parameter out of domain: {0}")]
    Domain(String),
    #[error("({tau_hat}, {theta}) lies outside the region of case {case}")]
    RegionMismatch { case: u8, tau_hat: f64, theta: f64 },
    #[error("quadrature did not reach tolerance {tolerance:e} (estimated error {estimate:e})")]
    Quadrature { tolerance: f64, estimate: f64 },

    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),

    #[error("scaling curve needs at least 4 points, got {0}")]
    TooFewPoints(usize),
    #[error("scaling curve value at n={n} is not positive ({value})")]
    NonPositiveValue { n: f64, value: f64 },

    #[error("mean squared return is zero; leverage normalization undefined")]
    DegenerateDenominator,
}

impl Error {
    /// Name of the module that raised the error.
    pub fn module(&self) -> &'static str {
        use Error::*;
        match self {
            Io { .. }
            | Parse { .. }
            | EmptySeries
            | NonFinite { .. }
            | NonPositivePrice { .. }
            | HorizonTooLarge { .. }
            | VolatilityWindow { .. } => "series_core",
            InvalidWindow(_) | SeriesTooShort { .. } => "moving_average",
            InvalidLags(_) | EmptyValidRange { .. } | EnsembleShape => "xcorr_estimator",
            Domain(_) | RegionMismatch { .. } | Quadrature { .. } => "analytic_fbm",
            InvalidSpec(_) => "fbm_generator",
            TooFewPoints(_) | NonPositiveValue { .. } => "hurst_scaling",
            DegenerateDenominator => "finance_pipeline",
        }
    }
}
