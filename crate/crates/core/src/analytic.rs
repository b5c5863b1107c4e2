//! Large-window asymptotics of `C_xy(τ̂)` for two fractional Brownian
//! motions driven by the same noise.
//!
//! With `s = H1 + H2`, scaled lag `τ̂ = τ/n` and window position `θ`, the
//! asymptotic cross-correlation is `n^s · D_s · bracket(τ̂, θ, s)` where
//!
//! ```text
//! bracket = −|τ̂|^s + ∫|τ̂−h|^s dh + ∫|τ̂+k|^s dk − ∬|τ̂−h+k|^s dh dk
//! ```
//!
//! and every integral runs over `[−θ, 1−θ]`. For `0 ≤ τ̂ < 1` the bracket has
//! one closed form in each of four regions of the `(τ̂, θ)` square; the
//! trailing window (`θ = 0`) lands in region 3.
//! [`master_integral_quadrature`] evaluates the bracket directly and serves
//! as the oracle for the closed forms.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quadrature::Quadrature;

/// Slack used when deciding whether a point sits on a region boundary.
const REGION_SLACK: f64 = 1e-12;

fn check_hurst(h: f64, name: &str) -> Result<()> {
    if h > 0.0 && h < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name}={h} must lie in (0, 1)")))
    }
}

fn check_theta(theta: f64) -> Result<()> {
    if (0.0..=1.0).contains(&theta) {
        Ok(())
    } else {
        Err(Error::Domain(format!("theta={theta} must lie in [0, 1]")))
    }
}

fn check_tau_hat(tau_hat: f64) -> Result<()> {
    if (0.0..1.0).contains(&tau_hat) {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "tau_hat={tau_hat} must lie in [0, 1)"
        )))
    }
}

fn check_n(n: f64) -> Result<()> {
    if n > 0.0 && n.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("n={n} must be positive")))
    }
}

/// `(H1, H2, θ)` with the derived exponent sum and coefficient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticParams {
    pub h1: f64,
    pub h2: f64,
    pub theta: f64,
}

impl AnalyticParams {
    pub fn new(h1: f64, h2: f64, theta: f64) -> Result<Self> {
        check_hurst(h1, "H1")?;
        check_hurst(h2, "H2")?;
        check_theta(theta)?;
        Ok(Self { h1, h2, theta })
    }

    pub fn s(&self) -> f64 {
        self.h1 + self.h2
    }

    pub fn d(&self) -> f64 {
        coefficient_from_sum(self.s())
    }
}

fn coefficient_from_sum(s: f64) -> f64 {
    1.0 / (libm::tgamma(s + 1.0) * (PI * s / 2.0).sin())
}

/// `D_{H1,H2} = −(2/π)·cos(sπ/2)·Γ(−s)`, evaluated as the equivalent
/// `1 / (Γ(s+1)·sin(πs/2))`, which stays finite through `s = 1`.
pub fn coefficient_d(h1: f64, h2: f64) -> Result<f64> {
    let s = h1 + h2;
    if !(s > 0.0 && s < 2.0) {
        return Err(Error::Domain(format!("H1+H2={s} must lie in (0, 2)")));
    }
    Ok(coefficient_from_sum(s))
}

/// The coefficient in its original `−(2/π)·cos(sπ/2)·Γ(−s)` form. Undefined
/// at `s = 1`, where it is a `0·∞` limit.
pub fn coefficient_d_literal(s: f64) -> Result<f64> {
    if !(s > 0.0 && s < 2.0) || s == 1.0 {
        return Err(Error::Domain(format!(
            "literal coefficient undefined at s={s}"
        )));
    }
    // Γ(−s) = Γ(2−s) / ((−s)(1−s)), two steps of the recurrence.
    let gamma_neg = libm::tgamma(2.0 - s) / ((-s) * (1.0 - s));
    Ok(-(2.0 / PI) * (s * PI / 2.0).cos() * gamma_neg)
}

/// `⟨B_H1(t) B_H2(t+τ)⟩ = D·(t^s + (t+τ)^s − |τ|^s)` for `t > 0`, `t+τ > 0`.
pub fn fbm_cross_covariance(t: f64, tau: f64, h1: f64, h2: f64) -> Result<f64> {
    check_hurst(h1, "H1")?;
    check_hurst(h2, "H2")?;
    if !(t > 0.0 && t + tau > 0.0) {
        return Err(Error::Domain(format!(
            "need t > 0 and t + tau > 0 (t={t}, tau={tau})"
        )));
    }
    let s = h1 + h2;
    Ok(coefficient_from_sum(s) * (t.powf(s) + (t + tau).powf(s) - tau.abs().powf(s)))
}

/// Double-integral term `∬|τ̂−h+k|^s`, the same in every region.
fn window_pair_term(tau_hat: f64, s: f64) -> f64 {
    ((1.0 - tau_hat).powf(2.0 + s) - 2.0 * tau_hat.powf(2.0 + s) + (1.0 + tau_hat).powf(2.0 + s))
        / ((1.0 + s) * (2.0 + s))
}

/// Trailing-window (`θ = 0`) asymptote:
/// `n^s·D·[−τ̂^s + ((1+τ̂)^{1+s} + (1−τ̂)^{1+s})/(1+s) − ∬-term]`.
pub fn asymptotic_xcorr_theta0(tau_hat: f64, h1: f64, h2: f64, n: f64) -> Result<f64> {
    check_tau_hat(tau_hat)?;
    check_hurst(h1, "H1")?;
    check_hurst(h2, "H2")?;
    check_n(n)?;
    let s = h1 + h2;
    let bracket = -tau_hat.powf(s)
        + ((1.0 + tau_hat).powf(1.0 + s) + (1.0 - tau_hat).powf(1.0 + s)) / (1.0 + s)
        - window_pair_term(tau_hat, s);
    Ok(n.powf(s) * coefficient_from_sum(s) * bracket)
}

/// The four `(τ̂, θ)` regions with distinct closed forms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Case {
    /// `τ̂ < θ`, `τ̂ + θ < 1`
    One,
    /// `τ̂ < θ`, `τ̂ + θ > 1`
    Two,
    /// `τ̂ > θ`, `τ̂ + θ < 1`
    Three,
    /// `τ̂ > θ`, `τ̂ + θ > 1`
    Four,
}

impl Case {
    pub const ALL: [Case; 4] = [Case::One, Case::Two, Case::Three, Case::Four];

    pub fn id(self) -> u8 {
        match self {
            Case::One => 1,
            Case::Two => 2,
            Case::Three => 3,
            Case::Four => 4,
        }
    }

    pub fn from_id(id: u8) -> Result<Self> {
        match id {
            1 => Ok(Case::One),
            2 => Ok(Case::Two),
            3 => Ok(Case::Three),
            4 => Ok(Case::Four),
            _ => Err(Error::Domain(format!("case id {id} must be 1..=4"))),
        }
    }

    /// Region containing `(τ̂, θ)`; boundary points go to the lower id.
    pub fn select(tau_hat: f64, theta: f64) -> Self {
        match (tau_hat <= theta, tau_hat + theta <= 1.0) {
            (true, true) => Case::One,
            (true, false) => Case::Two,
            (false, true) => Case::Three,
            (false, false) => Case::Four,
        }
    }

    /// Closed-region membership, with a little slack on the boundaries.
    pub fn contains(self, tau_hat: f64, theta: f64) -> bool {
        let below = tau_hat <= theta + REGION_SLACK;
        let above = tau_hat >= theta - REGION_SLACK;
        let inside = tau_hat + theta <= 1.0 + REGION_SLACK;
        let outside = tau_hat + theta >= 1.0 - REGION_SLACK;
        match self {
            Case::One => below && inside,
            Case::Two => below && outside,
            Case::Three => above && inside,
            Case::Four => above && outside,
        }
    }
}

/// `x^p` for `x ≥ 0`, clamping rounding-level negatives on region edges.
fn pos_pow(x: f64, p: f64) -> f64 {
    x.max(0.0).powf(p)
}

/// Bracket of the named case at unit `n` and unit `D`.
pub fn case_bracket(case: Case, tau_hat: f64, theta: f64, s: f64) -> Result<f64> {
    check_tau_hat(tau_hat)?;
    check_theta(theta)?;
    if !(s > 0.0 && s < 2.0) {
        return Err(Error::Domain(format!("s={s} must lie in (0, 2)")));
    }
    if !case.contains(tau_hat, theta) {
        return Err(Error::RegionMismatch {
            case: case.id(),
            tau_hat,
            theta,
        });
    }
    let p = 1.0 + s;
    let t = tau_hat;
    // ∫|τ̂+k|^s dk over [−θ, 1−θ]
    let lead = match case {
        Case::One | Case::Two => pos_pow(1.0 + t - theta, p) + pos_pow(theta - t, p),
        Case::Three | Case::Four => pos_pow(1.0 + t - theta, p) - pos_pow(t - theta, p),
    };
    // ∫|τ̂−h|^s dh over [−θ, 1−θ]
    let lag = match case {
        Case::One | Case::Three => pos_pow(1.0 - t - theta, p) + pos_pow(t + theta, p),
        Case::Two | Case::Four => pos_pow(t + theta, p) - pos_pow(t + theta - 1.0, p),
    };
    Ok(-t.powf(s) - window_pair_term(t, s) + (lead + lag) / p)
}

/// Closed form of the named case, `n^s·D·bracket`.
pub fn case_formula(case: Case, tau_hat: f64, theta: f64, h1: f64, h2: f64, n: f64) -> Result<f64> {
    check_hurst(h1, "H1")?;
    check_hurst(h2, "H2")?;
    check_n(n)?;
    let s = h1 + h2;
    Ok(n.powf(s) * coefficient_from_sum(s) * case_bracket(case, tau_hat, theta, s)?)
}

/// [`case_formula`] with the region picked by [`Case::select`].
pub fn asymptotic_xcorr(tau_hat: f64, theta: f64, h1: f64, h2: f64, n: f64) -> Result<(Case, f64)> {
    let case = Case::select(tau_hat, theta);
    Ok((case, case_formula(case, tau_hat, theta, h1, h2, n)?))
}

/// Absolute error target of [`master_integral_quadrature`].
pub const QUADRATURE_TOLERANCE: f64 = 1e-10;

/// Evaluates the bracket (unit `n`, unit `D`) by adaptive quadrature,
/// splitting every integral at the kinks of `|·|^s`. Accepts `−1 < τ̂ < 1`,
/// so negative lags can be evaluated as the integrand is written.
pub fn master_integral_quadrature(tau_hat: f64, theta: f64, h1: f64, h2: f64) -> Result<f64> {
    check_hurst(h1, "H1")?;
    check_hurst(h2, "H2")?;
    check_theta(theta)?;
    if !(tau_hat > -1.0 && tau_hat < 1.0) {
        return Err(Error::Domain(format!(
            "tau_hat={tau_hat} must lie in (-1, 1)"
        )));
    }
    let s = h1 + h2;
    let (lo, hi) = (-theta, 1.0 - theta);
    let outer = Quadrature::with_tolerance(QUADRATURE_TOLERANCE / 10.0);
    let inner = Quadrature::with_tolerance(QUADRATURE_TOLERANCE / 100.0);

    let single_h = outer.integrate(|h| (tau_hat - h).abs().powf(s), lo, hi, &[tau_hat])?;
    let single_k = outer.integrate(|k| (tau_hat + k).abs().powf(s), lo, hi, &[-tau_hat])?;

    // The inner integrand kinks at k = h − τ̂; as a function of h the inner
    // integral is non-smooth where that kink crosses the k-limits.
    let inner_failed = std::cell::Cell::new(None);
    let row =
        |h: f64| match inner.integrate(|k| (tau_hat - h + k).abs().powf(s), lo, hi, &[h - tau_hat])
        {
            Ok(v) => v,
            Err(e) => {
                inner_failed.set(Some(e.to_string()));
                0.0
            }
        };
    let double = outer.integrate(row, lo, hi, &[tau_hat - theta, tau_hat + 1.0 - theta])?;
    if let Some(msg) = inner_failed.take() {
        return Err(Error::Domain(format!("inner quadrature failed: {msg}")));
    }
    Ok(-tau_hat.abs().powf(s) + single_h + single_k - double)
}
