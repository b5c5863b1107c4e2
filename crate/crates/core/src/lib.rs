//! Detrending-moving-average cross-correlation of long-range correlated
//! series: the time-averaged estimator, its asymptotic fBm closed forms,
//! a coherent fBm pair generator, exponent fits and a returns–volatility
//! pipeline.

pub mod analytic;
pub mod error;
pub mod fbm;
pub mod finance;
pub mod hurst;
pub mod moving_average;
pub mod quadrature;
pub mod series;
pub mod stats;
pub mod tsv;
pub mod xcorr;

pub use error::{Error, Result};
pub use moving_average::{Summation, WindowSpec};
pub use series::{IngestSpec, Series};
pub use xcorr::{LagGrid, XcorrOptions, XcorrResult};
