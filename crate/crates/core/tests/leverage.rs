use dmaxcorr::finance::synthetic::{iid_prices, AsymmetricModel};
use dmaxcorr::finance::{leverage_ensemble, return_vol_xcorr};
use dmaxcorr::stats::aggregate;
use dmaxcorr::{LagGrid, WindowSpec, XcorrOptions};
use rayon::prelude::*;

const LEN: usize = 20_000;

fn setup() -> (WindowSpec, LagGrid, XcorrOptions) {
    (
        WindowSpec::trailing(100).unwrap(),
        LagGrid::range(-50, 200, 10).unwrap(),
        XcorrOptions::default(),
    )
}

#[test]
fn null_model_is_flat() {
    let (w, lags, opts) = setup();
    let e = leverage_ensemble(
        40,
        |i| Ok(iid_prices(LEN, 0.01, 1000 + i as u64)),
        1,
        20,
        &w,
        &lags,
        &opts,
    )
    .unwrap();
    for (tau, c) in e {
        let c = c.unwrap();
        assert!(
            c.mean.abs() < 3.0 * c.std_err,
            "tau {tau}: {} ± {}",
            c.mean,
            c.std_err
        );
    }
}

#[test]
fn down_market_coupling_gives_negative_leverage() {
    let (w, lags, opts) = setup();
    let m = AsymmetricModel::default();
    let e =
        leverage_ensemble(40, |i| Ok(m.prices(LEN, i as u64)), 1, 20, &w, &lags, &opts).unwrap();
    let means: Vec<(i64, f64)> = e.iter().map(|(t, c)| (*t, c.unwrap().mean)).collect();
    let at = |tau: i64| means.iter().find(|p| p.0 == tau).unwrap().1;
    assert!(at(10) < 0.0 && at(20) < 0.0, "{means:?}");
    let min = means.iter().map(|p| p.1).fold(f64::MAX, f64::min);
    let max = means.iter().map(|p| p.1).fold(f64::MIN, f64::max);
    assert!(min.abs() > max.abs(), "min {min} max {max}");
    // Relaxes toward zero at long lags.
    assert!(at(200).abs() < 0.5 * min.abs());
}

#[test]
fn volatility_power_keeps_zero_crossings() {
    let (w, lags, opts) = setup();
    let m = AsymmetricModel::default();
    let crossing = |power: u32| {
        let grids: Vec<Vec<Option<f64>>> = (0..40u64)
            .into_par_iter()
            .map(|i| {
                let r =
                    return_vol_xcorr(&m.prices(LEN, i), 1, 20, power, &[w], &lags, &opts).unwrap();
                (0..lags.len())
                    .map(|li| r.cell(0, li).map(|c| c.value))
                    .collect()
            })
            .collect();
        let mean: Vec<f64> = aggregate(&grids).iter().map(|c| c.unwrap().mean).collect();
        // First lag after the negative dip where the curve turns non-negative.
        let dip = (0..mean.len())
            .min_by(|&a, &b| mean[a].total_cmp(&mean[b]))
            .unwrap();
        (dip..mean.len()).find(|&i| mean[i] >= 0.0)
    };
    let (a, b) = (crossing(1), crossing(2));
    assert!(a.is_some() && b.is_some());
    assert!(a.unwrap().abs_diff(b.unwrap()) <= 1, "{a:?} vs {b:?}");
}
