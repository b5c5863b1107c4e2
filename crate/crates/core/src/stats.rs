//! Small descriptive-statistics helpers shared by the ensemble paths.

/// Mean and standard error of the mean for one grid cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanSe {
    pub mean: f64,
    /// Sample standard deviation over `√R`; `NaN` for a single realization.
    pub std_err: f64,
}

/// Aggregates per-realization grids cell by cell. A cell missing from any
/// realization is missing from the result.
pub fn aggregate(grids: &[Vec<Option<f64>>]) -> Vec<Option<MeanSe>> {
    let Some(first) = grids.first() else {
        return Vec::new();
    };
    let r = grids.len() as f64;
    (0..first.len())
        .map(|i| {
            let vals: Option<Vec<f64>> =
                grids.iter().map(|g| g.get(i).copied().flatten()).collect();
            let vals = vals?;
            let mean = vals.iter().sum::<f64>() / r;
            let std_err = if vals.len() > 1 {
                let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (r - 1.0);
                (var / r).sqrt()
            } else {
                f64::NAN
            };
            Some(MeanSe { mean, std_err })
        })
        .collect()
}

/// Ordinary least squares `y = intercept + slope·x`; returns
/// `(slope, intercept, r²)`.
pub fn ols(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 {
        1.0
    } else {
        (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0)
    };
    (slope, intercept, r2)
}
