//! Pairs of fractional Brownian motions driven by one noise realization.
//!
//! Both paths are built by spectral synthesis on a circle of `M = 4N`
//! frequencies. Each Hurst exponent gets its own real, non-negative
//! frequency kernel: the square root of the circulant-embedding spectrum of
//! exact fractional Gaussian noise. The *same* complex Gaussian draws pass
//! through both kernels, so every frequency is perfectly coherent across
//! the pair and the cross-covariance takes the `t^s + u^s − |u−t|^s` shape
//! with `s = H1 + H2`. Each marginal path is exact fBm with unit-variance
//! increments; only the first `N − 1` of the `M` increments are used.
//!
//! The cross-covariance matches the analytic form up to one scale factor
//! that depends on the kernels. [`PairGenerator::calibration`] fits it once
//! from the generator's exact covariance (no sampling involved).

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::analytic::coefficient_d;
use crate::error::{Error, Result};
use crate::series::Series;

/// Frequency-circle length relative to the path length.
pub const OVERSAMPLING: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Method {
    /// Shared complex Gaussian draws filtered by per-H circulant kernels.
    #[default]
    SharedSpectral,
}

impl Method {
    pub fn tag(self) -> &'static str {
        match self {
            Method::SharedSpectral => "shared-spectral",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FbmPairSpec {
    pub h1: f64,
    pub h2: f64,
    /// Path length `N`, including `B(0) = 0`.
    pub length: usize,
    /// Seeds a ChaCha20 stream; the seed alone fixes both paths.
    pub seed: u64,
    pub method: Method,
}

impl FbmPairSpec {
    pub fn new(h1: f64, h2: f64, length: usize, seed: u64) -> Self {
        Self {
            h1,
            h2,
            length,
            seed,
            method: Method::SharedSpectral,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, h) in [("H1", self.h1), ("H2", self.h2)] {
            if !(h > 0.0 && h < 1.0) {
                return Err(Error::InvalidSpec(format!("{name}={h} must lie in (0, 1)")));
            }
        }
        if self.length < 2 {
            return Err(Error::InvalidSpec(format!(
                "length {} must be at least 2",
                self.length
            )));
        }
        Ok(())
    }
}

/// A generated pair together with its spec and scale calibration.
#[derive(Debug, Clone)]
pub struct FbmPair {
    pub x: Series,
    pub y: Series,
    pub spec: FbmPairSpec,
    /// `c` such that the generator's cross-covariance ≈ `c · D·(t^s + u^s − |u−t|^s)`.
    pub calibration: f64,
}

/// Autocovariance of unit-variance fractional Gaussian noise at lag `k`.
pub fn fgn_autocovariance(k: usize, h: f64) -> f64 {
    let k = k as f64;
    let e = 2.0 * h;
    0.5 * ((k + 1.0).powf(e) - 2.0 * k.powf(e) + (k - 1.0).abs().powf(e))
}

/// Eigenvalues of the circulant embedding of fGn autocovariance on `m` points.
fn circulant_spectrum(h: f64, m: usize, fft: &dyn Fft<f64>) -> Vec<f64> {
    let mut row: Vec<Complex<f64>> = (0..m)
        .map(|k| Complex::new(fgn_autocovariance(k.min(m - k), h), 0.0))
        .collect();
    fft.process(&mut row);
    // The embedding is non-negative definite for fGn; clip rounding noise.
    row.iter().map(|c| c.re.max(0.0)).collect()
}

/// Precomputed kernels for one `(H1, H2, N)`; generates pairs per seed.
pub struct PairGenerator {
    h1: f64,
    h2: f64,
    length: usize,
    kernel1: Vec<f64>,
    kernel2: Vec<f64>,
    /// Cross-covariance of increments at lags `0..M`.
    increment_cross: Vec<f64>,
    inverse: Arc<dyn Fft<f64>>,
    calibration: f64,
}

impl std::fmt::Debug for PairGenerator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PairGenerator")
            .field("h1", &self.h1)
            .field("h2", &self.h2)
            .field("length", &self.length)
            .field("calibration", &self.calibration)
            .finish()
    }
}

impl PairGenerator {
    pub fn new(h1: f64, h2: f64, length: usize) -> Result<Self> {
        FbmPairSpec::new(h1, h2, length, 0).validate()?;
        let m = OVERSAMPLING * length;
        let mut planner = FftPlanner::<f64>::new();
        let forward = planner.plan_fft_forward(m);
        let inverse = planner.plan_fft_inverse(m);
        let lam1 = circulant_spectrum(h1, m, forward.as_ref());
        let lam2 = if h2 == h1 {
            lam1.clone()
        } else {
            circulant_spectrum(h2, m, forward.as_ref())
        };
        let norm = 1.0 / m as f64;
        let kernel1: Vec<f64> = lam1.iter().map(|l| (l * norm).sqrt()).collect();
        let kernel2: Vec<f64> = lam2.iter().map(|l| (l * norm).sqrt()).collect();

        let mut cross: Vec<Complex<f64>> = kernel1
            .iter()
            .zip(&kernel2)
            .map(|(a, b)| Complex::new(a * b, 0.0))
            .collect();
        inverse.process(&mut cross);
        let increment_cross = cross.iter().map(|c| c.re).collect();

        let mut gen = Self {
            h1,
            h2,
            length,
            kernel1,
            kernel2,
            increment_cross,
            inverse,
            calibration: f64::NAN,
        };
        gen.calibration = gen.fit_calibration()?;
        Ok(gen)
    }

    pub fn length(&self) -> usize {
        self.length
    }

    /// Fitted scale `c`, see [`FbmPair::calibration`].
    pub fn calibration(&self) -> f64 {
        self.calibration
    }

    /// `Σ_{i,j<m} r12(j−i)`: cross-covariance of the two paths at equal times.
    fn equal_time_cross(&self, m: usize) -> f64 {
        let r = &self.increment_cross;
        let (mut s1, mut s2) = (0.0, 0.0);
        for (k, &rk) in r.iter().enumerate().take(m).skip(1) {
            s1 += rk;
            s2 += k as f64 * rk;
        }
        m as f64 * r[0] + 2.0 * (m as f64 * s1 - s2)
    }

    /// Exact `Cov(B_H1(t), B_H2(u))` of the generated paths.
    pub fn path_cross_covariance(&self, t: usize, u: usize) -> f64 {
        let d = t.abs_diff(u);
        0.5 * (self.equal_time_cross(t) + self.equal_time_cross(u) - self.equal_time_cross(d))
    }

    /// Relative least squares of the exact covariance against the analytic
    /// form over `t = t0, 2t0, … ≤ N/4`, `u ∈ {t, 1.5t, 2t}`.
    fn fit_calibration(&self) -> Result<f64> {
        let s = self.h1 + self.h2;
        let d = coefficient_d(self.h1, self.h2)?;
        let top = (self.length / 4).max(1);
        let mut t = 8.min(top);
        let mut ratios = Vec::new();
        while t <= top {
            for u in [t, t + t / 2, 2 * t] {
                if u >= self.length {
                    continue;
                }
                let (tf, uf) = (t as f64, u as f64);
                let model = d * (tf.powf(s) + uf.powf(s) - (uf - tf).abs().powf(s));
                ratios.push(self.path_cross_covariance(t, u) / model);
            }
            t *= 2;
        }
        Ok(ratios.iter().sum::<f64>() / ratios.len() as f64)
    }

    /// Draws the pair for `seed`. Identical exponents give identical paths.
    pub fn generate(&self, seed: u64) -> (Series, Series) {
        let m = self.kernel1.len();
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let draws: Vec<Complex<f64>> = (0..m)
            .map(|_| {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = StandardNormal.sample(&mut rng);
                Complex::new(re, im)
            })
            .collect();
        let x = self.filter(&draws, &self.kernel1);
        let y = if self.h1 == self.h2 {
            x.clone()
        } else {
            self.filter(&draws, &self.kernel2)
        };
        (x, y)
    }

    fn filter(&self, draws: &[Complex<f64>], kernel: &[f64]) -> Series {
        let mut buf: Vec<Complex<f64>> = draws.iter().zip(kernel).map(|(z, k)| z * k).collect();
        self.inverse.process(&mut buf);
        let mut path = Vec::with_capacity(self.length);
        let mut acc = 0.0;
        path.push(acc);
        for c in &buf[..self.length - 1] {
            acc += c.re;
            path.push(acc);
        }
        Series::new(path).expect("finite, non-empty path")
    }
}

/// Generates the pair described by `spec`.
pub fn generate_pair(spec: &FbmPairSpec) -> Result<FbmPair> {
    spec.validate()?;
    let gen = PairGenerator::new(spec.h1, spec.h2, spec.length)?;
    let (x, y) = gen.generate(spec.seed);
    Ok(FbmPair {
        x,
        y,
        spec: *spec,
        calibration: gen.calibration(),
    })
}

/// One fBm path; the first member of a pair with equal exponents.
pub fn generate_single(h: f64, length: usize, seed: u64) -> Result<Series> {
    Ok(generate_pair(&FbmPairSpec::new(h, h, length, seed))?.x)
}
