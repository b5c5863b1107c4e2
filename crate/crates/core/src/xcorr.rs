//! Moving-average detrended cross-correlation `C_xy(τ; n)`.
//!
//! For each window `n` both series are detrended with the same
//! [`WindowSpec`]; the estimate at lag `τ` is the mean of
//! `[x(t) − x̃(t)]·[y(t+τ) − ỹ(t+τ)]` over every absolute index `t` where
//! both residuals exist. Series are aligned through their `origin_index`,
//! so derived series (e.g. trailing volatility) pair up correctly.
//!
//! Each `(n, τ)` cell is normalized by its own sample count. Cells with
//! fewer than [`XcorrOptions::min_count`] positions are reported absent.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::moving_average::{detrend_with, Summation, WindowSpec, Windowed};
use crate::series::Series;
use crate::stats::{aggregate, MeanSe};
use crate::tsv::fmt_f64;

pub const DEFAULT_MIN_COUNT: usize = 100;

/// Strictly increasing list of integer lags, in samples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LagGrid(Vec<i64>);

impl LagGrid {
    pub fn new(lags: Vec<i64>) -> Result<Self> {
        if lags.is_empty() {
            return Err(Error::InvalidLags("empty".into()));
        }
        if lags.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidLags(
                "lags must be strictly increasing".into(),
            ));
        }
        Ok(Self(lags))
    }

    /// `lo, lo+step, …, ≤ hi`.
    pub fn range(lo: i64, hi: i64, step: i64) -> Result<Self> {
        if step <= 0 || lo > hi {
            return Err(Error::InvalidLags(format!("empty range {lo}:{hi}:{step}")));
        }
        let count = (hi as i128 - lo as i128) / step as i128 + 1;
        if count > 10_000_000 {
            return Err(Error::InvalidLags(format!("{count} lags is too many")));
        }
        Self::new((0..count as i64).map(|k| lo + k * step).collect())
    }

    /// `-m ..= m` in unit steps.
    pub fn symmetric(max_lag: usize) -> Self {
        let m = max_lag as i64;
        Self((-m..=m).collect())
    }

    /// Parses `lo:hi[:step]` or a comma-separated list such as `-5,0,5`.
    pub fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        let bad = |what: &str| Error::InvalidLags(format!("{what} in {text:?}"));
        if text.contains(':') {
            let parts: Vec<&str> = text.split(':').map(str::trim).collect();
            if !(2..=3).contains(&parts.len()) {
                return Err(bad("expected lo:hi[:step]"));
            }
            let num = |s: &str| s.parse::<i64>().map_err(|_| bad("bad integer"));
            let lo = num(parts[0])?;
            let hi = num(parts[1])?;
            let step = if parts.len() == 3 { num(parts[2])? } else { 1 };
            Self::range(lo, hi, step)
        } else {
            let lags = text
                .split(',')
                .map(|s| s.trim().parse::<i64>().map_err(|_| bad("bad integer")))
                .collect::<Result<Vec<_>>>()?;
            Self::new(lags)
        }
    }

    pub fn lags(&self) -> &[i64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn max_abs(&self) -> i64 {
        self.0
            .iter()
            .map(|l| l.unsigned_abs().min(i64::MAX as u64) as i64)
            .max()
            .unwrap_or(0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XcorrOptions {
    /// Cells averaging fewer positions than this are reported absent.
    pub min_count: usize,
    pub summation: Summation,
}

impl Default for XcorrOptions {
    fn default() -> Self {
        Self {
            min_count: DEFAULT_MIN_COUNT,
            summation: Summation::Auto,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XcorrCell {
    pub value: f64,
    /// Number of positions `t` averaged.
    pub count: usize,
}

/// One output row, as written to TSV.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XcorrRow {
    pub n: usize,
    pub tau: i64,
    pub tau_hat: f64,
    pub value: f64,
    pub count: usize,
}

/// `C_xy` over a `(window, lag)` grid, row-major by window.
#[derive(Debug, Clone, PartialEq)]
pub struct XcorrResult {
    pub windows: Vec<WindowSpec>,
    pub lags: LagGrid,
    cells: Vec<Option<XcorrCell>>,
    /// Values have been multiplied by `n^(−scale_exponent)`; 0 when raw.
    pub scale_exponent: f64,
}

impl XcorrResult {
    pub fn cell(&self, window: usize, lag: usize) -> Option<XcorrCell> {
        self.cells[window * self.lags.len() + lag]
    }

    /// Looks a cell up by window length and lag value.
    pub fn get(&self, n: usize, tau: i64) -> Option<XcorrCell> {
        let wi = self.windows.iter().position(|w| w.n == n)?;
        let li = self.lags.lags().binary_search(&tau).ok()?;
        self.cell(wi, li)
    }

    pub fn value(&self, n: usize, tau: i64) -> Option<f64> {
        self.get(n, tau).map(|c| c.value)
    }

    /// Present `(τ, value)` pairs for one window.
    pub fn curve(&self, window: usize) -> Vec<(i64, f64)> {
        self.lags
            .lags()
            .iter()
            .enumerate()
            .filter_map(|(li, &tau)| self.cell(window, li).map(|c| (tau, c.value)))
            .collect()
    }

    /// All present cells in window-major, lag-minor order.
    pub fn rows(&self) -> Vec<XcorrRow> {
        let mut rows = Vec::new();
        for (wi, w) in self.windows.iter().enumerate() {
            for (li, &tau) in self.lags.lags().iter().enumerate() {
                if let Some(c) = self.cell(wi, li) {
                    rows.push(XcorrRow {
                        n: w.n,
                        tau,
                        tau_hat: tau as f64 / w.n as f64,
                        value: c.value,
                        count: c.count,
                    });
                }
            }
        }
        rows
    }

    /// TSV with columns `n tau tau_hat value count`, preceded by `#` comment
    /// lines carrying `extra_header` and the window position.
    pub fn to_tsv(&self, extra_header: &str) -> String {
        let mut out = crate::tsv::comment_block(extra_header);
        let theta = self.windows.first().map_or(0.0, |w| w.theta);
        let _ = writeln!(out, "# theta={}", fmt_f64(theta));
        let _ = writeln!(out, "# scale_exponent={}", fmt_f64(self.scale_exponent));
        out.push_str("n\ttau\ttau_hat\tvalue\tcount\n");
        for r in self.rows() {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}",
                r.n,
                r.tau,
                fmt_f64(r.tau_hat),
                fmt_f64(r.value),
                r.count
            );
        }
        out
    }

    /// Reads the format written by [`XcorrResult::to_tsv`].
    pub fn from_tsv(text: &str) -> Result<Self> {
        let mut theta = 0.0;
        let mut scale_exponent = 0.0;
        let mut saw_header = false;
        let mut rows: Vec<(usize, XcorrRow)> = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let row = i + 1;
            let line = line.trim_end_matches('\r');
            if let Some(comment) = line.strip_prefix('#') {
                let comment = comment.trim();
                let parse = |v: &str| -> Result<f64> {
                    v.trim()
                        .parse::<f64>()
                        .ok()
                        .filter(|x| x.is_finite())
                        .ok_or_else(|| Error::Parse {
                            row,
                            reason: format!("bad number {v:?}"),
                        })
                };
                if let Some(v) = comment.strip_prefix("theta=") {
                    theta = parse(v)?;
                } else if let Some(v) = comment.strip_prefix("scale_exponent=") {
                    scale_exponent = parse(v)?;
                }
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            if !saw_header {
                let cols: Vec<&str> = line.split('\t').map(str::trim).collect();
                if cols != ["n", "tau", "tau_hat", "value", "count"] {
                    return Err(Error::Parse {
                        row,
                        reason: "expected header n, tau, tau_hat, value, count".into(),
                    });
                }
                saw_header = true;
                continue;
            }
            rows.push((row, parse_row(row, line)?));
        }
        if !saw_header {
            return Err(Error::Parse {
                row: text.lines().count().max(1),
                reason: "missing column header".into(),
            });
        }
        if rows.is_empty() {
            return Err(Error::EmptySeries);
        }
        let ns: BTreeSet<usize> = rows.iter().map(|(_, r)| r.n).collect();
        let taus: BTreeSet<i64> = rows.iter().map(|(_, r)| r.tau).collect();
        let windows = ns
            .into_iter()
            .map(|n| WindowSpec::new(n, theta))
            .collect::<Result<Vec<_>>>()?;
        let lags = LagGrid::new(taus.into_iter().collect())?;
        let mut cells = vec![None; windows.len() * lags.len()];
        for (row, r) in rows {
            let wi = windows
                .iter()
                .position(|w| w.n == r.n)
                .expect("window collected above");
            let li = lags
                .lags()
                .binary_search(&r.tau)
                .expect("lag collected above");
            let slot = &mut cells[wi * lags.len() + li];
            if slot.is_some() {
                return Err(Error::Parse {
                    row,
                    reason: format!("duplicate cell n={} tau={}", r.n, r.tau),
                });
            }
            *slot = Some(XcorrCell {
                value: r.value,
                count: r.count,
            });
        }
        Ok(Self {
            windows,
            lags,
            cells,
            scale_exponent,
        })
    }
}

fn parse_row(row: usize, line: &str) -> Result<XcorrRow> {
    let cols: Vec<&str> = line.split('\t').map(str::trim).collect();
    let err = |reason: String| Error::Parse { row, reason };
    if cols.len() != 5 {
        return Err(err(format!("expected 5 columns, found {}", cols.len())));
    }
    let n: usize = cols[0]
        .parse()
        .map_err(|_| err(format!("bad n {:?}", cols[0])))?;
    let tau: i64 = cols[1]
        .parse()
        .map_err(|_| err(format!("bad tau {:?}", cols[1])))?;
    let tau_hat: f64 = cols[2]
        .parse()
        .map_err(|_| err(format!("bad tau_hat {:?}", cols[2])))?;
    let value: f64 = cols[3]
        .parse()
        .map_err(|_| err(format!("bad value {:?}", cols[3])))?;
    let count: usize = cols[4]
        .parse()
        .map_err(|_| err(format!("bad count {:?}", cols[4])))?;
    if !value.is_finite() || !tau_hat.is_finite() {
        return Err(err("non-finite value".into()));
    }
    if count == 0 {
        return Err(err("count must be positive".into()));
    }
    if n < 2 {
        return Err(err(format!("window n={n} must be at least 2")));
    }
    Ok(XcorrRow {
        n,
        tau,
        tau_hat,
        value,
        count,
    })
}

/// Positions `t` with `a` valid at `t` and `b` valid at `t + τ`.
fn overlap(a: &Windowed, b: &Windowed, tau: i64) -> (i64, i64) {
    let lo = a.first_index.max(b.first_index - tau);
    let hi = a.end_index().min(b.end_index() - tau);
    (lo, hi)
}

fn lagged_mean(a: &Windowed, b: &Windowed, tau: i64) -> (f64, usize) {
    let (lo, hi) = overlap(a, b, tau);
    if hi <= lo {
        return (0.0, 0);
    }
    let ai = (lo - a.first_index) as usize;
    let bi = (lo + tau - b.first_index) as usize;
    let len = (hi - lo) as usize;
    let sum: f64 = a.values[ai..ai + len]
        .iter()
        .zip(&b.values[bi..bi + len])
        .map(|(x, y)| x * y)
        .sum();
    (sum / len as f64, len)
}

fn check_inputs(x: &Series, y: &Series, windows: &[WindowSpec], lags: &LagGrid) -> Result<()> {
    if windows.is_empty() {
        return Err(Error::InvalidWindow("no windows given".into()));
    }
    let len = x.len().max(y.len()) as i64;
    if lags.max_abs() >= len {
        return Err(Error::InvalidLags(format!(
            "|tau| = {} is not shorter than the series ({len})",
            lags.max_abs()
        )));
    }
    Ok(())
}

fn finish_cell(
    n: usize,
    tau: i64,
    value: f64,
    count: usize,
    min_count: usize,
) -> Result<Option<XcorrCell>> {
    match count {
        0 => Err(Error::EmptyValidRange { n, tau }),
        c if c < min_count => Ok(None),
        _ => Ok(Some(XcorrCell { value, count })),
    }
}

/// `C_xy(τ; n)` for every window and lag, time-averaged over `t`.
pub fn cross_correlation(
    x: &Series,
    y: &Series,
    windows: &[WindowSpec],
    lags: &LagGrid,
) -> Result<XcorrResult> {
    cross_correlation_with(x, y, windows, lags, &XcorrOptions::default())
}

pub fn cross_correlation_with(
    x: &Series,
    y: &Series,
    windows: &[WindowSpec],
    lags: &LagGrid,
    opts: &XcorrOptions,
) -> Result<XcorrResult> {
    check_inputs(x, y, windows, lags)?;
    let detrended = windows
        .par_iter()
        .map(|w| {
            let a = detrend_with(x, w, opts.summation)?;
            let b = detrend_with(y, w, opts.summation)?;
            Ok((a, b))
        })
        .collect::<Result<Vec<_>>>()?;
    let nl = lags.len();
    let cells = (0..windows.len() * nl)
        .into_par_iter()
        .map(|i| {
            let (a, b) = &detrended[i / nl];
            let tau = lags.lags()[i % nl];
            let (value, count) = lagged_mean(a, b, tau);
            finish_cell(windows[i / nl].n, tau, value, count, opts.min_count)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(XcorrResult {
        windows: windows.to_vec(),
        lags: lags.clone(),
        cells,
        scale_exponent: 0.0,
    })
}

/// Same estimate as [`cross_correlation`] for one window and all lags in
/// `-max_lag ..= max_lag`, using one FFT correlation of the detrended
/// residuals and exact per-lag counts.
pub fn cross_correlation_fft(
    x: &Series,
    y: &Series,
    window: &WindowSpec,
    max_lag: usize,
    opts: &XcorrOptions,
) -> Result<XcorrResult> {
    cross_correlation_fft_grid(
        x,
        y,
        std::slice::from_ref(window),
        &LagGrid::symmetric(max_lag),
        opts,
    )
}

/// FFT evaluation over an arbitrary window list and lag grid, one
/// transform pair per window.
pub fn cross_correlation_fft_grid(
    x: &Series,
    y: &Series,
    windows: &[WindowSpec],
    lags: &LagGrid,
    opts: &XcorrOptions,
) -> Result<XcorrResult> {
    check_inputs(x, y, windows, lags)?;
    let per_window = windows
        .par_iter()
        .map(|w| fft_cells(x, y, w, lags, opts))
        .collect::<Result<Vec<_>>>()?;
    Ok(XcorrResult {
        windows: windows.to_vec(),
        lags: lags.clone(),
        cells: per_window.into_iter().flatten().collect(),
        scale_exponent: 0.0,
    })
}

fn fft_cells(
    x: &Series,
    y: &Series,
    window: &WindowSpec,
    lags: &LagGrid,
    opts: &XcorrOptions,
) -> Result<Vec<Option<XcorrCell>>> {
    let a = detrend_with(x, window, opts.summation)?;
    let b = detrend_with(y, window, opts.summation)?;
    let (la, lb) = (a.len(), b.len());
    // Any lag with a non-empty overlap maps to m in (−la, lb), which a
    // circle of at least la + lb points holds without wrap-around.
    let size = (la + lb).next_power_of_two();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(size);
    let inv = planner.plan_fft_inverse(size);
    let pad = |v: &[f64]| {
        let mut buf = vec![Complex::new(0.0, 0.0); size];
        for (slot, &x) in buf.iter_mut().zip(v) {
            slot.re = x;
        }
        buf
    };
    let mut fa = pad(&a.values);
    let mut fb = pad(&b.values);
    fwd.process(&mut fa);
    fwd.process(&mut fb);
    // R(m) = Σ_i a_i b_{i+m}  ⇔  IFFT(conj(A)·B)
    let mut prod: Vec<Complex<f64>> = fa.iter().zip(&fb).map(|(p, q)| p.conj() * q).collect();
    inv.process(&mut prod);
    let scale = 1.0 / size as f64;
    let shift = a.first_index - b.first_index;
    lags.lags()
        .iter()
        .map(|&tau| {
            let (lo, hi) = overlap(&a, &b, tau);
            let count = (hi - lo).max(0) as usize;
            let value = if count == 0 {
                0.0
            } else {
                prod[(tau + shift).rem_euclid(size as i64) as usize].re * scale / count as f64
            };
            finish_cell(window.n, tau, value, count, opts.min_count)
        })
        .collect()
}

/// `C_xx(0; n)` for each window, the mean squared detrended residual.
/// Windows whose cell falls below the count floor are left out.
pub fn auto_scaling_curve(x: &Series, windows: &[WindowSpec]) -> Result<Vec<(usize, f64)>> {
    auto_scaling_curve_with(x, windows, &XcorrOptions::default())
}

pub fn auto_scaling_curve_with(
    x: &Series,
    windows: &[WindowSpec],
    opts: &XcorrOptions,
) -> Result<Vec<(usize, f64)>> {
    let r = cross_correlation_with(x, x, windows, &LagGrid(vec![0]), opts)?;
    Ok(zero_lag_curve(&r))
}

/// `C_xy(0; n)` for each window, the cross analogue of
/// [`auto_scaling_curve`].
pub fn cross_scaling_curve(
    x: &Series,
    y: &Series,
    windows: &[WindowSpec],
    opts: &XcorrOptions,
) -> Result<Vec<(usize, f64)>> {
    let r = cross_correlation_with(x, y, windows, &LagGrid(vec![0]), opts)?;
    Ok(zero_lag_curve(&r))
}

fn zero_lag_curve(r: &XcorrResult) -> Vec<(usize, f64)> {
    let li = r.lags.lags().binary_search(&0).expect("lag 0 present");
    r.windows
        .iter()
        .enumerate()
        .filter_map(|(wi, w)| r.cell(wi, li).map(|c| (w.n, c.value)))
        .collect()
}

/// Multiplies every value by `n^(−(h1+h2))`. Any real exponents are
/// accepted; `h1 = h2 = 0` is the identity.
pub fn collapse_transform(r: &XcorrResult, h1: f64, h2: f64) -> XcorrResult {
    let s = h1 + h2;
    let nl = r.lags.len();
    let cells = r
        .cells
        .iter()
        .enumerate()
        .map(|(i, c)| {
            c.map(|c| XcorrCell {
                value: c.value * (r.windows[i / nl].n as f64).powf(-s),
                count: c.count,
            })
        })
        .collect();
    XcorrResult {
        windows: r.windows.clone(),
        lags: r.lags.clone(),
        cells,
        scale_exponent: r.scale_exponent + s,
    }
}

/// Ensemble mean and standard error of `C_xy` over independent realizations.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleResult {
    pub windows: Vec<WindowSpec>,
    pub lags: LagGrid,
    cells: Vec<Option<MeanSe>>,
    pub realizations: usize,
}

impl EnsembleResult {
    pub fn cell(&self, window: usize, lag: usize) -> Option<MeanSe> {
        self.cells[window * self.lags.len() + lag]
    }

    pub fn get(&self, n: usize, tau: i64) -> Option<MeanSe> {
        let wi = self.windows.iter().position(|w| w.n == n)?;
        let li = self.lags.lags().binary_search(&tau).ok()?;
        self.cell(wi, li)
    }
}

/// Runs the time-averaged estimator on `realizations` pairs produced by
/// `make_pair(i)` and averages the grids. Pairs are built and consumed in
/// parallel; the result does not depend on scheduling.
pub fn cross_correlation_ensemble<F>(
    realizations: usize,
    make_pair: F,
    windows: &[WindowSpec],
    lags: &LagGrid,
    opts: &XcorrOptions,
) -> Result<EnsembleResult>
where
    F: Fn(usize) -> Result<(Series, Series)> + Sync,
{
    if realizations == 0 {
        return Err(Error::EnsembleShape);
    }
    let grids = (0..realizations)
        .into_par_iter()
        .map(|i| {
            let (x, y) = make_pair(i)?;
            let r = cross_correlation_with(&x, &y, windows, lags, opts)?;
            Ok(r.cells
                .iter()
                .map(|c| c.map(|c| c.value))
                .collect::<Vec<_>>())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EnsembleResult {
        windows: windows.to_vec(),
        lags: lags.clone(),
        cells: aggregate(&grids),
        realizations,
    })
}
