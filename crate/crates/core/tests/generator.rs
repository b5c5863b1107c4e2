use dmaxcorr::analytic::{coefficient_d, fbm_cross_covariance};
use dmaxcorr::fbm::{generate_pair, generate_single, FbmPairSpec, PairGenerator};
use dmaxcorr::hurst::fit_scaling;
use rayon::prelude::*;

fn mean_se(v: &[f64]) -> (f64, f64) {
    let r = v.len() as f64;
    let m = v.iter().sum::<f64>() / r;
    let var = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (r - 1.0);
    (m, (var / r).sqrt())
}

#[test]
fn two_point_path_is_one_normal_draw() {
    let p = generate_single(0.5, 2, 11).unwrap();
    assert_eq!(p.values()[0], 0.0);
    assert!(p.values()[1].is_finite() && p.values()[1] != 0.0);
    // Flat spectrum: the single increment is the real part of a unit-variance sum.
    let draws: Vec<f64> = (0..4000)
        .map(|s| generate_single(0.5, 2, s).unwrap().values()[1])
        .collect();
    let (m, se) = mean_se(&draws);
    let var = draws.iter().map(|x| x * x).sum::<f64>() / draws.len() as f64;
    assert!(m.abs() < 3.0 * se);
    assert!((var - 1.0).abs() < 0.07, "{var}");
}

#[test]
fn brownian_increments_are_uncorrelated() {
    let n = 1 << 14;
    let p = generate_single(0.5, n, 2024).unwrap();
    let inc: Vec<f64> = p.values().windows(2).map(|w| w[1] - w[0]).collect();
    let m = inc.iter().sum::<f64>() / inc.len() as f64;
    let c0: f64 = inc.iter().map(|x| (x - m).powi(2)).sum();
    let c1: f64 = inc.windows(2).map(|w| (w[0] - m) * (w[1] - m)).sum();
    let rho = c1 / c0;
    assert!(rho.abs() < 3.0 / (n as f64).sqrt(), "rho={rho}");
    let var = c0 / inc.len() as f64;
    assert!((var - 1.0).abs() < 0.05, "{var}");
    // Kurtosis near 3 for Gaussian increments.
    let k = inc.iter().map(|x| (x - m).powi(4)).sum::<f64>() / inc.len() as f64 / (var * var);
    assert!((k - 3.0).abs() < 0.25, "kurtosis {k}");
}

fn ensemble(h: f64, len: usize, reps: u64) -> Vec<Vec<f64>> {
    let gen = PairGenerator::new(h, h, len).unwrap();
    (0..reps)
        .into_par_iter()
        .map(|s| gen.generate(s).0.into_values())
        .collect()
}

#[test]
fn variance_grows_as_t_to_2h() {
    for h in [0.3, 0.7] {
        let len = 1024;
        let paths = ensemble(h, len, 3000);
        let curve: Vec<(usize, f64)> = [4usize, 8, 16, 32, 64, 128, 256, 512]
            .iter()
            .map(|&t| {
                (
                    t,
                    paths.iter().map(|p| p[t] * p[t]).sum::<f64>() / paths.len() as f64,
                )
            })
            .collect();
        let fit = fit_scaling(&curve).unwrap();
        assert!((fit.exponent - h).abs() < 0.05, "H={h}: {}", fit.exponent);

        let t = len / 8;
        let ratio = curve.iter().find(|c| c.0 == 2 * t).unwrap().1
            / curve.iter().find(|c| c.0 == t).unwrap().1;
        let expect = 2f64.powf(2.0 * h);
        assert!(
            (ratio / expect - 1.0).abs() < 0.05,
            "H={h}: ratio {ratio} vs {expect}"
        );
    }
}

#[test]
fn ensemble_cross_covariance_matches_closed_form() {
    let (h1, h2, len) = (0.5, 0.77, 1024);
    let gen = PairGenerator::new(h1, h2, len).unwrap();
    let (t, tau) = (len / 4, len / 8);
    let prods: Vec<f64> = (0..10_000u64)
        .into_par_iter()
        .map(|s| {
            let (x, y) = gen.generate(s);
            x.values()[t] * y.values()[t + tau]
        })
        .collect();
    let (m, se) = mean_se(&prods);
    let expect = gen.calibration() * fbm_cross_covariance(t as f64, tau as f64, h1, h2).unwrap();
    assert!((m - expect).abs() < 3.0 * se, "{m} ± {se} vs {expect}");
}

#[test]
fn cross_covariance_shape_fits_one_constant() {
    for (h1, h2) in [(0.5, 0.77), (0.3, 0.8), (0.5, 0.8)] {
        let len = 4096;
        let gen = PairGenerator::new(h1, h2, len).unwrap();
        let c = gen.calibration();
        let mut pts = Vec::new();
        for t in [64usize, 128, 256, 512, 1024] {
            for tau in [0usize, 32, 128, 512, 1024] {
                let model = c * fbm_cross_covariance(t as f64, tau as f64, h1, h2).unwrap();
                pts.push((gen.path_cross_covariance(t, t + tau), model));
            }
        }
        let hi = pts.iter().map(|p| p.1).fold(f64::MIN, f64::max);
        let lo = pts.iter().map(|p| p.1).fold(f64::MAX, f64::min);
        let worst = pts.iter().map(|(g, m)| (g - m).abs()).fold(0.0, f64::max);
        assert!(
            worst < 0.05 * (hi - lo),
            "({h1},{h2}): residual {worst} of range {}",
            hi - lo
        );
    }
}

#[test]
fn calibration_is_stored_and_positive() {
    let p = generate_pair(&FbmPairSpec::new(0.5, 0.8, 2048, 3)).unwrap();
    let gen = PairGenerator::new(0.5, 0.8, 2048).unwrap();
    assert_eq!(p.calibration, gen.calibration());
    assert!(p.calibration > 0.0);
    let d = coefficient_d(0.6, 0.6).unwrap();
    let same = PairGenerator::new(0.6, 0.6, 2048).unwrap().calibration();
    assert!((same * 2.0 * d - 1.0).abs() < 1e-9);
}
