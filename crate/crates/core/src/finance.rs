//! Returns–volatility cross-correlation and the leverage function
//! `L(τ) = ⟨σ_T(t+τ)² r(t)⟩ / ⟨r(t)²⟩²`.
//!
//! Index conventions, in absolute samples of the price series:
//! `r(t) = ln P(t+t') − ln P(t)` sits at `t`, and `σ_T(t)` is the sample
//! standard deviation of `r(t−T+1 ..= t)`. A positive `τ` therefore pairs a
//! return with the volatility of a window ending `τ` samples after the
//! return starts.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::moving_average::WindowSpec;
use crate::series::{log_returns, rolling_volatility, Series};
use crate::stats::{aggregate, MeanSe};
use crate::tsv::{comment_block, fmt_f64};
use crate::xcorr::{cross_correlation_with, LagGrid, XcorrOptions, XcorrResult};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeveragePoint {
    pub tau: i64,
    /// `None` where the estimator cell fell below the count floor.
    pub value: Option<f64>,
    pub numerator: Option<f64>,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LeverageCurve {
    pub points: Vec<LeveragePoint>,
    pub horizon: usize,
    pub vol_window: usize,
    pub window: WindowSpec,
    /// `(mean of r²)²`.
    pub denominator: f64,
}

impl LeverageCurve {
    pub fn value(&self, tau: i64) -> Option<f64> {
        self.points
            .iter()
            .find(|p| p.tau == tau)
            .and_then(|p| p.value)
    }

    /// Columns `tau L numerator count`; absent cells are omitted.
    pub fn to_tsv(&self, extra_header: &str) -> String {
        let mut out = comment_block(extra_header);
        out.push_str(&format!(
            "# horizon={}\n# vol_window={}\n# n={}\n# theta={}\n# denominator={}\n",
            self.horizon,
            self.vol_window,
            self.window.n,
            self.window.theta,
            fmt_f64(self.denominator)
        ));
        out.push_str("tau\tL\tnumerator\tcount\n");
        for p in &self.points {
            if let (Some(v), Some(num)) = (p.value, p.numerator) {
                out.push_str(&format!(
                    "{}\t{}\t{}\t{}\n",
                    p.tau,
                    fmt_f64(v),
                    fmt_f64(num),
                    p.count
                ));
            }
        }
        out
    }
}

fn returns_and_vol(prices: &Series, horizon: usize, vol_window: usize) -> Result<(Series, Series)> {
    let r = log_returns(prices, horizon)?;
    let vol = rolling_volatility(&r, vol_window)?;
    Ok((r, vol))
}

fn powered(vol: &Series, power: u32) -> Result<Series> {
    match power {
        1 => Ok(vol.clone()),
        2 => {
            let sq = vol.values().iter().map(|v| v * v).collect();
            Ok(Series::with_origin(sq, vol.origin_index)?.with_unit(vol.axis_unit.clone()))
        }
        p => Err(Error::Domain(format!(
            "volatility power must be 1 or 2, got {p}"
        ))),
    }
}

/// `C_xy` with `x = r` and `y = σ_T^power`, `power ∈ {1, 2}`.
pub fn return_vol_xcorr(
    prices: &Series,
    horizon: usize,
    vol_window: usize,
    power: u32,
    windows: &[WindowSpec],
    lags: &LagGrid,
    opts: &XcorrOptions,
) -> Result<XcorrResult> {
    let (r, vol) = returns_and_vol(prices, horizon, vol_window)?;
    let y = powered(&vol, power)?;
    cross_correlation_with(&r, &y, windows, lags, opts)
}

/// Leverage function of one price series. The numerator is the
/// estimator applied to `(r, σ_T²)` with a single shared window.
pub fn leverage_curve(
    prices: &Series,
    horizon: usize,
    vol_window: usize,
    window: &WindowSpec,
    lags: &LagGrid,
    opts: &XcorrOptions,
) -> Result<LeverageCurve> {
    let (r, _) = returns_and_vol(prices, horizon, vol_window)?;
    let m2 = r.values().iter().map(|v| v * v).sum::<f64>() / r.len() as f64;
    let denominator = m2 * m2;
    if denominator.is_nan() || denominator <= 0.0 {
        return Err(Error::DegenerateDenominator);
    }
    let num = return_vol_xcorr(
        prices,
        horizon,
        vol_window,
        2,
        std::slice::from_ref(window),
        lags,
        opts,
    )?;
    let points = lags
        .lags()
        .iter()
        .enumerate()
        .map(|(li, &tau)| {
            let cell = num.cell(0, li);
            LeveragePoint {
                tau,
                value: cell.map(|c| c.value / denominator),
                numerator: cell.map(|c| c.value),
                count: cell.map_or(0, |c| c.count),
            }
        })
        .collect();
    Ok(LeverageCurve {
        points,
        horizon,
        vol_window,
        window: *window,
        denominator,
    })
}

/// Ensemble mean and standard error of `L(τ)` over independent price
/// series from `make_prices(i)`.
pub fn leverage_ensemble<F>(
    realizations: usize,
    make_prices: F,
    horizon: usize,
    vol_window: usize,
    window: &WindowSpec,
    lags: &LagGrid,
    opts: &XcorrOptions,
) -> Result<Vec<(i64, Option<MeanSe>)>>
where
    F: Fn(usize) -> Result<Series> + Sync,
{
    if realizations == 0 {
        return Err(Error::EnsembleShape);
    }
    let grids = (0..realizations)
        .into_par_iter()
        .map(|i| {
            let p = make_prices(i)?;
            let c = leverage_curve(&p, horizon, vol_window, window, lags, opts)?;
            Ok(c.points.iter().map(|p| p.value).collect::<Vec<_>>())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(lags.lags().iter().copied().zip(aggregate(&grids)).collect())
}

/// Synthetic price models with known return–volatility coupling.
pub mod synthetic {
    use super::*;

    const BURN_IN: usize = 500;

    /// Log-volatility driven by past negative shocks only:
    /// `h(t) = persistence·h(t−1) − coupling·e(t−1)·[e(t−1) < 0]`,
    /// `r(t) = scale·exp(h(t))·e(t)` with standard normal `e`.
    #[derive(Debug, Clone, Copy, PartialEq)]
    pub struct AsymmetricModel {
        pub persistence: f64,
        pub coupling: f64,
        pub scale: f64,
    }

    impl Default for AsymmetricModel {
        fn default() -> Self {
            Self {
                persistence: 0.97,
                coupling: 0.08,
                scale: 0.01,
            }
        }
    }

    fn to_prices(returns: impl Iterator<Item = f64>, len: usize) -> Series {
        let mut logp = 100f64.ln();
        let mut out = Vec::with_capacity(len);
        out.push(100.0);
        for r in returns.take(len - 1) {
            logp += r;
            out.push(logp.exp());
        }
        Series::new(out).expect("finite prices")
    }

    impl AsymmetricModel {
        /// `len` prices starting at 100, after a 500-step burn-in.
        pub fn prices(&self, len: usize, seed: u64) -> Series {
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            let mut h = 0.0;
            let mut prev = 0.0;
            let mut step = move || {
                let shock = if prev < 0.0 { prev } else { 0.0 };
                h = self.persistence * h - self.coupling * shock;
                let e: f64 = StandardNormal.sample(&mut rng);
                prev = e;
                self.scale * h.exp() * e
            };
            for _ in 0..BURN_IN {
                step();
            }
            to_prices(std::iter::repeat_with(step), len.max(1))
        }
    }

    /// Geometric random walk with i.i.d. normal returns of width `scale`.
    pub fn iid_prices(len: usize, scale: f64, seed: u64) -> Series {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let step = move || {
            let e: f64 = StandardNormal.sample(&mut rng);
            scale * e
        };
        to_prices(std::iter::repeat_with(step), len.max(1))
    }
}
