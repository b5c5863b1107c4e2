use dmaxcorr::fbm::{generate_single, PairGenerator};
use dmaxcorr::hurst::auto_exponent;
use dmaxcorr::stats::aggregate;
use dmaxcorr::xcorr::{
    auto_scaling_curve, cross_correlation, cross_correlation_ensemble, cross_correlation_fft,
    cross_correlation_with,
};
use dmaxcorr::{LagGrid, Series, WindowSpec, XcorrOptions};
use rayon::prelude::*;

#[test]
fn zero_lag_self_correlation_is_the_scaling_curve() {
    let x = generate_single(0.5, 5000, 4).unwrap();
    let ws = WindowSpec::arithmetic(10, 50, 10, 0.0).unwrap();
    let r = cross_correlation(&x, &x, &ws, &LagGrid::new(vec![-3, 0, 3]).unwrap()).unwrap();
    for (n, v) in auto_scaling_curve(&x, &ws).unwrap() {
        assert_eq!(r.value(n, 0), Some(v));
    }
}

#[test]
fn fft_path_on_a_long_pair() {
    let gen = PairGenerator::new(0.5, 0.77, 4096).unwrap();
    let (x, y) = gen.generate(17);
    let w = WindowSpec::trailing(64).unwrap();
    let opts = XcorrOptions::default();
    let direct = cross_correlation_with(&x, &y, &[w], &LagGrid::symmetric(512), &opts).unwrap();
    let fft = cross_correlation_fft(&x, &y, &w, 512, &opts).unwrap();
    let scale = direct
        .curve(0)
        .iter()
        .map(|p| p.1.abs())
        .fold(0.0, f64::max);
    for (d, f) in direct.rows().iter().zip(fft.rows()) {
        assert_eq!((d.tau, d.count), (f.tau, f.count));
        assert!((d.value - f.value).abs() <= 1e-9 * scale, "tau {}", d.tau);
    }
    // Degenerate single-lag grid.
    let one = cross_correlation_fft(&x, &y, &w, 0, &opts).unwrap();
    assert_eq!(one.rows().len(), 1);
    assert!((one.value(64, 0).unwrap() - direct.value(64, 0).unwrap()).abs() <= 1e-9 * scale);
}

#[test]
fn independent_walks_average_to_zero() {
    let ws = [WindowSpec::trailing(32).unwrap()];
    let lags = LagGrid::new(vec![-64, -16, 0, 16, 64]).unwrap();
    let e = cross_correlation_ensemble(
        1000,
        |i| {
            let i = i as u64;
            Ok((
                generate_single(0.5, 2048, 2 * i)?,
                generate_single(0.5, 2048, 2 * i + 1)?,
            ))
        },
        &ws,
        &lags,
        &XcorrOptions::default(),
    )
    .unwrap();
    for &tau in lags.lags() {
        let c = e.get(32, tau).unwrap();
        assert!(
            c.mean.abs() < 3.0 * c.std_err,
            "tau {tau}: {} ± {}",
            c.mean,
            c.std_err
        );
    }
}

#[test]
fn auto_scaling_slopes() {
    let len = 1 << 17;
    let ws = WindowSpec::geometric(10, len / 50, 1.3, 0.0).unwrap();
    let opts = XcorrOptions::default();
    let b = auto_exponent(&generate_single(0.5, len, 101).unwrap(), &ws, &opts).unwrap();
    assert!((b.slope - 1.0).abs() < 0.05, "Brownian slope {}", b.slope);
    let f = auto_exponent(&generate_single(0.7, len, 102).unwrap(), &ws, &opts).unwrap();
    assert!((f.slope - 1.4).abs() < 0.1, "H=0.7 slope {}", f.slope);
}

#[test]
fn dropping_early_positions_keeps_the_average() {
    let (h1, h2, len) = (0.5, 0.77, 4096);
    let gen = PairGenerator::new(h1, h2, len).unwrap();
    let w = WindowSpec::trailing(64).unwrap();
    let lags = LagGrid::range(-128, 128, 32).unwrap();
    let opts = XcorrOptions::default();
    let valid = len - w.n;
    let drop = valid / 10;
    let diffs: Vec<Vec<Option<f64>>> = (0..200u64)
        .into_par_iter()
        .map(|s| {
            let (x, y) = gen.generate(s);
            let full = cross_correlation_with(&x, &y, &[w], &lags, &opts).unwrap();
            let cut =
                |z: &Series| Series::with_origin(z.values()[drop..].to_vec(), drop as i64).unwrap();
            let part = cross_correlation_with(&cut(&x), &cut(&y), &[w], &lags, &opts).unwrap();
            (0..lags.len())
                .map(|li| Some(full.cell(0, li)?.value - part.cell(0, li)?.value))
                .collect()
        })
        .collect();
    for (tau, d) in lags.lags().iter().zip(aggregate(&diffs)) {
        let d = d.unwrap();
        assert!(
            d.mean.abs() < 3.0 * d.std_err,
            "tau {tau}: {} ± {}",
            d.mean,
            d.std_err
        );
    }
}

#[test]
fn features_sit_at_fixed_scaled_lags() {
    // For this pair the curve peaks at τ = 0 and stays positive, so the
    // features tracked are the peak and the half-height lags on both sides.
    let (h1, h2, len) = (0.5, 0.77, 1 << 14);
    let gen = PairGenerator::new(h1, h2, len).unwrap();
    let ks: Vec<i64> = (-20..=20).collect();
    let feats: Vec<(i64, f64, f64)> = [100usize, 200, 400]
        .iter()
        .map(|&n| {
            let w = [WindowSpec::trailing(n).unwrap()];
            let lags = LagGrid::new(ks.iter().map(|k| k * n as i64 / 10).collect()).unwrap();
            let e = cross_correlation_ensemble(
                100,
                |i| Ok(gen.generate(i as u64)),
                &w,
                &lags,
                &XcorrOptions::default(),
            )
            .unwrap();
            let curve: Vec<f64> = (0..ks.len())
                .map(|li| e.cell(0, li).unwrap().mean)
                .collect();
            let peak = (0..curve.len())
                .max_by(|&a, &b| curve[a].total_cmp(&curve[b]))
                .unwrap();
            let half = curve[peak] / 2.0;
            let cross = |step: i64| {
                let mut i = peak as i64;
                while curve[(i + step) as usize] > half {
                    i += step;
                }
                let (a, b) = (curve[i as usize], curve[(i + step) as usize]);
                (ks[i as usize] as f64 + step as f64 * (a - half) / (a - b)) / 10.0
            };
            (ks[peak], cross(1), cross(-1))
        })
        .collect();
    for f in &feats {
        assert_eq!(f.0, 0, "{feats:?}");
        assert!(f.1 > 0.1 && f.2 < -0.1, "{feats:?}");
        assert!((f.1 - feats[0].1).abs() < 0.05, "{feats:?}");
        assert!((f.2 - feats[0].2).abs() < 0.05, "{feats:?}");
    }
}
