//! Series container, delimited-text ingestion and the preprocessing
//! transforms applied before correlation analysis.
//!
//! Every index in this crate is a sample count. A [`Series`] carries an
//! `origin_index` so that derived series (returns, rolling volatility) stay
//! aligned with the samples they were computed from.

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::error::{Error, Result};

/// A uniformly sampled, finite, real-valued sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    values: Vec<f64>,
    /// Free-text unit of the sampling axis, e.g. `"minutes"` or `"bp"`.
    pub axis_unit: String,
    /// Absolute index of `values[0]`.
    pub origin_index: i64,
}

impl Series {
    /// Wraps `values` with origin 0. Rejects empty input and non-finite
    /// samples.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        Self::with_origin(values, 0)
    }

    pub fn with_origin(values: Vec<f64>, origin_index: i64) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySeries);
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self {
            values,
            axis_unit: String::new(),
            origin_index,
        })
    }

    pub fn with_unit(mut self, unit: impl Into<String>) -> Self {
        self.axis_unit = unit.into();
        self
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Absolute index one past the last sample.
    pub fn end_index(&self) -> i64 {
        self.origin_index + self.values.len() as i64
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Multiplies every sample by `a`, keeping metadata.
    pub fn scaled(&self, a: f64) -> Self {
        Self {
            values: self.values.iter().map(|v| v * a).collect(),
            axis_unit: self.axis_unit.clone(),
            origin_index: self.origin_index,
        }
    }

    fn derived(&self, values: Vec<f64>, origin_index: i64) -> Self {
        Self {
            values,
            axis_unit: self.axis_unit.clone(),
            origin_index,
        }
    }
}

/// Which column of a delimited text file holds the values.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IngestSpec {
    pub column_index: usize,
    pub delimiter: char,
    /// Number of leading data rows to skip (header lines).
    pub skip_header: usize,
}

impl Default for IngestSpec {
    fn default() -> Self {
        Self {
            column_index: 0,
            delimiter: '\t',
            skip_header: 0,
        }
    }
}

/// Loads one column of a delimited text file.
///
/// Blank lines and lines starting with `#` are ignored, so files written by
/// the CLI can be read back. Row numbers in errors are 1-based line numbers.
pub fn load_series(path: impl AsRef<Path>, spec: &IngestSpec) -> Result<Series> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_series(BufReader::new(file), spec).map_err(|e| match e {
        Error::Io { source, .. } => Error::Io {
            path: path.to_path_buf(),
            source,
        },
        other => other,
    })
}

/// Parses delimited text from any reader; the engine behind [`load_series`].
pub fn parse_series<R: BufRead>(reader: R, spec: &IngestSpec) -> Result<Series> {
    let mut values = Vec::new();
    let mut skipped = 0;
    for (lineno, line) in reader.lines().enumerate() {
        let row = lineno + 1;
        let line = line.map_err(|source| Error::Io {
            path: Default::default(),
            source,
        })?;
        let trimmed = line.trim_end_matches(['\r', '\n']);
        if trimmed.trim().is_empty() || trimmed.starts_with('#') {
            continue;
        }
        if skipped < spec.skip_header {
            skipped += 1;
            continue;
        }
        let cell =
            split_cell(trimmed, spec.delimiter, spec.column_index).ok_or_else(|| Error::Parse {
                row,
                reason: format!("missing column {}", spec.column_index),
            })?;
        let cell = cell.trim();
        let value: f64 = cell.parse().map_err(|_| Error::Parse {
            row,
            reason: format!("not a number: {cell:?}"),
        })?;
        if !value.is_finite() {
            return Err(Error::Parse {
                row,
                reason: format!("non-finite value {cell:?}"),
            });
        }
        values.push(value);
    }
    Series::new(values)
}

fn split_cell(line: &str, delimiter: char, column: usize) -> Option<&str> {
    if delimiter.is_whitespace() && delimiter != '\t' {
        line.split_whitespace().nth(column)
    } else {
        line.split(delimiter).nth(column)
    }
}

/// Subtracts the sample mean and integrates: `out[k] = Σ_{j≤k} (s[j] − mean)`.
///
/// Turns a stationary-looking profile (e.g. a structural parameter along a
/// chromosome) into a walk the estimator can detrend.
pub fn mean_subtract_integrate(s: &Series) -> Series {
    let mean = s.mean();
    let mut acc = 0.0;
    let out = s
        .values
        .iter()
        .map(|v| {
            acc += v - mean;
            acc
        })
        .collect();
    s.derived(out, s.origin_index)
}

/// Log returns over `horizon` samples, `r[k] = ln p[k+horizon] − ln p[k]`.
/// The output keeps the origin of `p`, so `r(t)` is indexed by its start.
pub fn log_returns(p: &Series, horizon: usize) -> Result<Series> {
    if horizon == 0 || horizon >= p.len() {
        return Err(Error::HorizonTooLarge {
            horizon,
            len: p.len(),
        });
    }
    if let Some((index, &value)) = p.values.iter().enumerate().find(|(_, v)| **v <= 0.0) {
        return Err(Error::NonPositivePrice { index, value });
    }
    let logs: Vec<f64> = p.values.iter().map(|v| v.ln()).collect();
    let out = logs
        .iter()
        .zip(&logs[horizon..])
        .map(|(a, b)| b - a)
        .collect();
    Ok(p.derived(out, p.origin_index))
}

/// Trailing rolling sample standard deviation (divisor `T − 1`).
///
/// `out[j]` covers `r[j ..= j+T−1]` and is placed at the absolute index of
/// the window's last return, i.e. `origin_index = r.origin_index + T − 1`.
pub fn rolling_volatility(r: &Series, window: usize) -> Result<Series> {
    let len = r.len();
    if window < 2 || window > len {
        return Err(Error::VolatilityWindow { window, len });
    }
    let t = window as f64;
    let out = r
        .values
        .windows(window)
        .map(|w| {
            let mean = w.iter().sum::<f64>() / t;
            let ss: f64 = w.iter().map(|v| (v - mean) * (v - mean)).sum();
            (ss / (t - 1.0)).sqrt()
        })
        .collect();
    Ok(r.derived(out, r.origin_index + window as i64 - 1))
}
