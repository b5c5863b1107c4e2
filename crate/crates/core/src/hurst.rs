//! Exponent estimation from log-log scaling curves.

use crate::error::{Error, Result};
use crate::moving_average::WindowSpec;
use crate::series::Series;
use crate::stats::ols;
use crate::tsv::{comment_block, fmt_f64};
use crate::xcorr::{auto_scaling_curve_with, cross_scaling_curve, XcorrOptions};

/// Smallest window of the default grid.
pub const DEFAULT_MIN_WINDOW: usize = 16;
/// The default grid stops at `N / DEFAULT_MAX_DIVISOR`.
pub const DEFAULT_MAX_DIVISOR: usize = 50;
pub const DEFAULT_RATIO: f64 = 1.3;

/// Result of a straight-line fit of `ln value` against `ln n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingFit {
    /// `slope / 2`. For an auto curve this is `H`; for a cross curve it is
    /// the mean of the two exponents.
    pub exponent: f64,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub n_min: usize,
    pub n_max: usize,
    pub points: Vec<(usize, f64)>,
}

impl ScalingFit {
    /// Two-column TSV (`n value`) with the fit summary as comment lines.
    pub fn to_tsv(&self, extra_header: &str) -> String {
        let mut out = comment_block(extra_header);
        out.push_str(&format!(
            "# exponent={}\n# slope={}\n# intercept={}\n# r_squared={}\n# n_range={}..{}\n",
            fmt_f64(self.exponent),
            fmt_f64(self.slope),
            fmt_f64(self.intercept),
            fmt_f64(self.r_squared),
            self.n_min,
            self.n_max
        ));
        out.push_str("n\tvalue\n");
        for (n, v) in &self.points {
            out.push_str(&format!("{n}\t{}\n", fmt_f64(*v)));
        }
        out
    }
}

/// OLS of `(ln n, ln value)`; needs at least four points, all positive.
pub fn fit_scaling(curve: &[(usize, f64)]) -> Result<ScalingFit> {
    if curve.len() < 4 {
        return Err(Error::TooFewPoints(curve.len()));
    }
    if let Some(&(n, value)) = curve.iter().find(|(_, v)| !(*v > 0.0 && v.is_finite())) {
        return Err(Error::NonPositiveValue { n: n as f64, value });
    }
    let xs: Vec<f64> = curve.iter().map(|(n, _)| (*n as f64).ln()).collect();
    let ys: Vec<f64> = curve.iter().map(|(_, v)| v.ln()).collect();
    let (slope, intercept, r_squared) = ols(&xs, &ys);
    Ok(ScalingFit {
        exponent: slope / 2.0,
        slope,
        intercept,
        r_squared,
        n_min: curve.iter().map(|p| p.0).min().unwrap_or(0),
        n_max: curve.iter().map(|p| p.0).max().unwrap_or(0),
        points: curve.to_vec(),
    })
}

/// Geometric windows from 16 to `len / 50` with ratio 1.3.
pub fn default_windows(len: usize, theta: f64) -> Result<Vec<WindowSpec>> {
    WindowSpec::geometric(
        DEFAULT_MIN_WINDOW,
        len / DEFAULT_MAX_DIVISOR,
        DEFAULT_RATIO,
        theta,
    )
}

/// `H` of one series from `C_xx(0; n) ∝ n^{2H}`.
pub fn auto_exponent(
    x: &Series,
    windows: &[WindowSpec],
    opts: &XcorrOptions,
) -> Result<ScalingFit> {
    fit_scaling(&auto_scaling_curve_with(x, windows, opts)?)
}

/// `(H1 + H2)/2` of a pair from `C_xy(0; n) ∝ n^{H1+H2}`.
pub fn cross_exponent(
    x: &Series,
    y: &Series,
    windows: &[WindowSpec],
    opts: &XcorrOptions,
) -> Result<ScalingFit> {
    fit_scaling(&cross_scaling_curve(x, y, windows, opts)?)
}
