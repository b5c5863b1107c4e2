//! θ-positioned moving averages computed in O(N) from prefix sums.
//!
//! For window length `n` and position `θ`, with `p = ⌊θn⌋`, the average at
//! `t` is the plain mean of `s[t−k]` for `k ∈ [−p, n−p]` (n+1 samples).
//! θ = 0 is the trailing window, θ = 1/2 the centered one. Positions whose
//! window leaves the series are not part of the output.

use crate::error::{Error, Result};
use crate::series::Series;

/// Series longer than this use compensated prefix sums under
/// [`Summation::Auto`].
pub const COMPENSATED_THRESHOLD: usize = 10_000_000;

/// Window length `n` and position `θ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowSpec {
    pub n: usize,
    pub theta: f64,
}

impl WindowSpec {
    pub fn new(n: usize, theta: f64) -> Result<Self> {
        let w = Self { n, theta };
        w.validate()?;
        Ok(w)
    }

    pub fn trailing(n: usize) -> Result<Self> {
        Self::new(n, 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidWindow(format!("n={} (need n >= 2)", self.n)));
        }
        if !(0.0..=1.0).contains(&self.theta) {
            return Err(Error::InvalidWindow(format!(
                "theta={} (need 0 <= theta <= 1)",
                self.theta
            )));
        }
        Ok(())
    }

    /// `⌊θn⌋`: how many samples of the window lie ahead of `t`.
    pub fn lead(&self) -> usize {
        ((self.theta * self.n as f64).floor() as usize).min(self.n)
    }

    /// Number of samples averaged (`n + 1`).
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.n + 1
    }

    /// `n = start, start+step, …, ≤ stop`.
    pub fn arithmetic(start: usize, stop: usize, step: usize, theta: f64) -> Result<Vec<Self>> {
        if step == 0 || start > stop {
            return Err(Error::InvalidWindow(format!(
                "empty progression {start}:{stop}:{step}"
            )));
        }
        (start..=stop)
            .step_by(step)
            .map(|n| Self::new(n, theta))
            .collect()
    }

    /// Geometric progression from `min` to `max` with the given ratio,
    /// rounded to integers with duplicates removed. Both ends are included.
    pub fn geometric(min: usize, max: usize, ratio: f64, theta: f64) -> Result<Vec<Self>> {
        if ratio.is_nan() || ratio <= 1.0 || min > max || min < 2 {
            return Err(Error::InvalidWindow(format!(
                "geometric grid {min}..{max} ratio {ratio}"
            )));
        }
        let mut ns: Vec<usize> = Vec::new();
        let mut x = min as f64;
        while x.round() <= max as f64 {
            let n = (x.round() as usize).min(max);
            if ns.last() != Some(&n) {
                ns.push(n);
            }
            x *= ratio;
        }
        if ns.last() != Some(&max) {
            ns.push(max);
        }
        ns.into_iter().map(|n| Self::new(n, theta)).collect()
    }

    /// Parses a window list: `lo:hi[:step]` (arithmetic), `geom:min:max:ratio`
    /// or a comma-separated list such as `16,32,64`.
    pub fn parse_list(text: &str, theta: f64) -> Result<Vec<Self>> {
        let text = text.trim();
        let bad = |what: &str| Error::InvalidWindow(format!("{what} in {text:?}"));
        let int = |s: &str| s.trim().parse::<usize>().map_err(|_| bad("bad integer"));
        if let Some(rest) = text.strip_prefix("geom:") {
            let parts: Vec<&str> = rest.split(':').collect();
            if parts.len() != 3 {
                return Err(bad("expected geom:min:max:ratio"));
            }
            let ratio = parts[2]
                .trim()
                .parse::<f64>()
                .map_err(|_| bad("bad ratio"))?;
            if ratio.is_nan() || ratio < 1.01 {
                return Err(bad("ratio must be at least 1.01"));
            }
            Self::geometric(int(parts[0])?, int(parts[1])?, ratio, theta)
        } else if text.contains(':') {
            let parts: Vec<&str> = text.split(':').collect();
            if !(2..=3).contains(&parts.len()) {
                return Err(bad("expected lo:hi[:step]"));
            }
            let step = if parts.len() == 3 { int(parts[2])? } else { 1 };
            let (lo, hi) = (int(parts[0])?, int(parts[1])?);
            if step > 0 && hi.saturating_sub(lo) / step >= 100_000 {
                return Err(bad("too many windows"));
            }
            Self::arithmetic(lo, hi, step, theta)
        } else {
            let mut ns = text.split(',').map(int).collect::<Result<Vec<_>>>()?;
            ns.sort_unstable();
            ns.dedup();
            ns.into_iter().map(|n| Self::new(n, theta)).collect()
        }
    }
}

/// Prefix-sum accumulation mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Summation {
    /// Compensated above [`COMPENSATED_THRESHOLD`] samples.
    #[default]
    Auto,
    Plain,
    Compensated,
}

/// Values defined on a contiguous range of absolute indices.
#[derive(Debug, Clone, PartialEq)]
pub struct Windowed {
    /// Absolute index of `values[0]`.
    pub first_index: i64,
    pub values: Vec<f64>,
    pub window: WindowSpec,
}

impl Windowed {
    /// Value at absolute index `t`, or `None` outside the validity range.
    pub fn get(&self, t: i64) -> Option<f64> {
        let k = t - self.first_index;
        if k < 0 {
            return None;
        }
        self.values.get(k as usize).copied()
    }

    /// Absolute index one past the last valid position.
    pub fn end_index(&self) -> i64 {
        self.first_index + self.values.len() as i64
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

fn check_fits(s: &Series, w: &WindowSpec) -> Result<()> {
    w.validate()?;
    if s.len() < w.len() {
        return Err(Error::SeriesTooShort {
            len: s.len(),
            n: w.n,
        });
    }
    Ok(())
}

/// Window sums `Σ s[k−n+p ..= k+p]` for every valid local index `k`.
fn window_sums(values: &[f64], w: &WindowSpec, mode: Summation) -> Vec<f64> {
    let compensated = match mode {
        Summation::Auto => values.len() > COMPENSATED_THRESHOLD,
        Summation::Plain => false,
        Summation::Compensated => true,
    };
    let width = w.len();
    let count = values.len() + 1 - width;
    if compensated {
        // Neumaier prefix sums stored as (sum, correction) pairs.
        let mut hi = Vec::with_capacity(values.len() + 1);
        let mut lo = Vec::with_capacity(values.len() + 1);
        let (mut sum, mut comp) = (0.0f64, 0.0f64);
        hi.push(0.0);
        lo.push(0.0);
        for &v in values {
            let t = sum + v;
            if sum.abs() >= v.abs() {
                comp += (sum - t) + v;
            } else {
                comp += (v - t) + sum;
            }
            sum = t;
            hi.push(sum);
            lo.push(comp);
        }
        (0..count)
            .map(|i| (hi[i + width] - hi[i]) + (lo[i + width] - lo[i]))
            .collect()
    } else {
        let mut prefix = Vec::with_capacity(values.len() + 1);
        let mut acc = 0.0;
        prefix.push(acc);
        for &v in values {
            acc += v;
            prefix.push(acc);
        }
        (0..count).map(|i| prefix[i + width] - prefix[i]).collect()
    }
}

/// Moving average `η(t)` on its validity range.
pub fn moving_average(s: &Series, w: &WindowSpec) -> Result<Windowed> {
    moving_average_with(s, w, Summation::Auto)
}

pub fn moving_average_with(s: &Series, w: &WindowSpec, mode: Summation) -> Result<Windowed> {
    check_fits(s, w)?;
    let inv = 1.0 / w.len() as f64;
    let values = window_sums(s.values(), w, mode)
        .into_iter()
        .map(|sum| sum * inv)
        .collect();
    Ok(Windowed {
        first_index: s.origin_index + (w.n - w.lead()) as i64,
        values,
        window: *w,
    })
}

/// Residual `s(t) − η(t)` on the validity range of the moving average.
pub fn detrend(s: &Series, w: &WindowSpec) -> Result<Windowed> {
    detrend_with(s, w, Summation::Auto)
}

pub fn detrend_with(s: &Series, w: &WindowSpec, mode: Summation) -> Result<Windowed> {
    let mut ma = moving_average_with(s, w, mode)?;
    let offset = w.n - w.lead();
    for (m, &x) in ma.values.iter_mut().zip(&s.values()[offset..]) {
        *m = x - *m;
    }
    Ok(ma)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive(s: &[f64], w: &WindowSpec) -> Vec<Option<f64>> {
        let p = w.lead() as i64;
        let n = w.n as i64;
        (0..s.len() as i64)
            .map(|t| {
                let lo = t - (n - p);
                let hi = t + p;
                if lo < 0 || hi >= s.len() as i64 {
                    return None;
                }
                let sum: f64 = (-p..=n - p).map(|k| s[(t - k) as usize]).sum();
                Some(sum / (n + 1) as f64)
            })
            .collect()
    }

    #[test]
    fn trailing_hand_value() {
        let s = Series::new(vec![0.0, 1.0, 2.0, 3.0, 4.0]).unwrap();
        let ma = moving_average(&s, &WindowSpec::trailing(2).unwrap()).unwrap();
        assert_eq!(ma.first_index, 2);
        assert_eq!(ma.get(2), Some(1.0));
        assert_eq!(ma.get(1), None);
        assert_eq!(ma.get(5), None);
        assert_eq!(ma.len(), 3);
    }

    #[test]
    fn constant_is_preserved() {
        let s = Series::new(vec![3.25; 40]).unwrap();
        for theta in [0.0, 0.3, 0.5, 1.0] {
            for n in [2, 5, 39] {
                let ma = moving_average(&s, &WindowSpec::new(n, theta).unwrap()).unwrap();
                assert!(ma.values.iter().all(|&v| v == 3.25));
                assert_eq!(ma.len(), 40 - n);
            }
        }
    }

    #[test]
    fn centered_window_keeps_ramp() {
        let s = Series::new((0..20).map(f64::from).collect()).unwrap();
        let ma = moving_average(&s, &WindowSpec::new(2, 0.5).unwrap()).unwrap();
        assert_eq!(ma.first_index, 1);
        for (k, v) in ma.values.iter().enumerate() {
            assert_eq!(*v, (k + 1) as f64);
        }
    }

    #[test]
    fn forward_window_at_theta_one() {
        let s = Series::new(vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let ma = moving_average(&s, &WindowSpec::new(2, 1.0).unwrap()).unwrap();
        assert_eq!(ma.first_index, 0);
        assert_eq!(ma.values, vec![2.0, 3.0]);
    }

    #[test]
    fn matches_naive_for_all_positions() {
        let s: Vec<f64> = (0..300)
            .map(|i| ((i * 37 % 101) as f64).sin() * 10.0)
            .collect();
        let series = Series::new(s.clone()).unwrap();
        for theta in [0.0, 0.25, 0.5, 0.9, 1.0] {
            for n in [2, 7, 64] {
                let w = WindowSpec::new(n, theta).unwrap();
                let fast = moving_average(&series, &w).unwrap();
                for (t, expect) in naive(&s, &w).into_iter().enumerate() {
                    let got = fast.get(t as i64);
                    match (expect, got) {
                        (None, None) => {}
                        (Some(a), Some(b)) => assert!((a - b).abs() < 1e-12 * 10.0),
                        other => panic!("validity mismatch at {t}: {other:?}"),
                    }
                }
            }
        }
    }

    #[test]
    fn compensated_matches_plain() {
        let s = Series::new((0..5000).map(|i| 1e6 + (i as f64).cos()).collect()).unwrap();
        let w = WindowSpec::trailing(50).unwrap();
        let a = moving_average_with(&s, &w, Summation::Plain).unwrap();
        let b = moving_average_with(&s, &w, Summation::Compensated).unwrap();
        for (x, y) in a.values.iter().zip(&b.values) {
            assert!((x - y).abs() < 1e-6);
        }
    }

    #[test]
    fn rejects_short_series_and_bad_specs() {
        let s = Series::new(vec![1.0, 2.0, 3.0]).unwrap();
        assert!(matches!(
            moving_average(&s, &WindowSpec { n: 3, theta: 0.0 }),
            Err(Error::SeriesTooShort { len: 3, n: 3 })
        ));
        assert!(WindowSpec::new(1, 0.0).is_err());
        assert!(WindowSpec::new(4, 1.5).is_err());
        assert!(WindowSpec::new(4, f64::NAN).is_err());
    }

    #[test]
    fn progressions() {
        let a = WindowSpec::arithmetic(100, 500, 100, 0.0).unwrap();
        assert_eq!(
            a.iter().map(|w| w.n).collect::<Vec<_>>(),
            [100, 200, 300, 400, 500]
        );
        let g = WindowSpec::geometric(16, 1024, 1.3, 0.0).unwrap();
        assert_eq!(g.first().unwrap().n, 16);
        assert_eq!(g.last().unwrap().n, 1024);
        assert!(g.windows(2).all(|p| p[0].n < p[1].n));
        assert!(WindowSpec::geometric(16, 8, 1.3, 0.0).is_err());
    }

    #[test]
    fn window_lists() {
        let ns = |t: &str| {
            WindowSpec::parse_list(t, 0.0).map(|v| v.iter().map(|w| w.n).collect::<Vec<_>>())
        };
        assert_eq!(ns("100:500:100").unwrap(), [100, 200, 300, 400, 500]);
        assert_eq!(ns("4:6").unwrap(), [4, 5, 6]);
        assert_eq!(ns("64, 16,32,16").unwrap(), [16, 32, 64]);
        assert_eq!(ns("geom:10:20:1.5").unwrap(), [10, 15, 20]);
        assert!(ns("geom:10:20:1.0").is_err());
        assert!(ns("1,2").is_err());
        assert!(ns("2:3:4:5").is_err());
        assert!(ns("x").is_err());
        assert!(ns("2:18446744073709551615").is_err());
        assert!(ns("geom:2:18446744073709551615:1.01").is_ok());
        let w = WindowSpec::parse_list("9999999999999999999", 1.0).unwrap()[0];
        assert_eq!(w.lead(), w.n);
    }
}
