use dmaxcorr::analytic::*;

fn grid(k: usize) -> impl Iterator<Item = f64> + Clone {
    // Cell midpoints avoid the τ̂ = 1 edge while still crossing every boundary.
    (0..k).map(move |i| (i as f64 + 0.5) / k as f64)
}

#[test]
fn coefficient_forms_agree() {
    for i in 1..20 {
        if i == 10 {
            continue;
        }
        let s = i as f64 / 10.0;
        let stable = coefficient_d(s / 2.0, s / 2.0).unwrap();
        let literal = coefficient_d_literal(s).unwrap();
        assert!(
            (stable - literal).abs() <= 1e-12 * stable.abs(),
            "s={s}: {stable} vs {literal}"
        );
        assert!(stable > 0.0);
    }
}

#[test]
fn closed_forms_match_quadrature() {
    for s in [0.2, 0.9, 1.0, 1.5, 1.8] {
        for t in grid(8) {
            for theta in grid(8).chain([0.0, 1.0]) {
                let case = Case::select(t, theta);
                let closed = case_bracket(case, t, theta, s).unwrap();
                let quad = master_integral_quadrature(t, theta, s / 2.0, s / 2.0).unwrap();
                assert!(
                    (closed - quad).abs() < 1e-8,
                    "s={s} tau_hat={t} theta={theta} case {}: {closed} vs {quad}",
                    case.id()
                );
            }
        }
    }
}

#[test]
fn exponents_enter_only_through_their_sum() {
    let a = master_integral_quadrature(0.3, 0.2, 0.35, 0.75).unwrap();
    let b = master_integral_quadrature(0.3, 0.2, 0.55, 0.55).unwrap();
    assert!((a - b).abs() < 1e-12);
    let (_, x) = asymptotic_xcorr(0.3, 0.2, 0.35, 0.75, 10.0).unwrap();
    let (_, y) = asymptotic_xcorr(0.3, 0.2, 0.55, 0.55, 10.0).unwrap();
    assert_eq!(x, y);
}

#[test]
fn boundaries_are_continuous() {
    for s in [0.4, 1.0, 1.7] {
        for i in 0..50 {
            let u = i as f64 / 50.0;
            // τ̂ = θ, shared by cases 1|3 (below the anti-diagonal) or 2|4.
            let (pair, t) = if u <= 0.5 {
                ((Case::One, Case::Three), u)
            } else {
                ((Case::Two, Case::Four), u)
            };
            let a = case_bracket(pair.0, t, t, s).unwrap();
            let b = case_bracket(pair.1, t, t, s).unwrap();
            assert!((a - b).abs() < 1e-12, "diag s={s} t={t}");
            // τ̂ + θ = 1, shared by cases 1|2 or 3|4.
            let theta = 1.0 - u;
            let pair = if u <= theta {
                (Case::One, Case::Two)
            } else {
                (Case::Three, Case::Four)
            };
            let a = case_bracket(pair.0, u, theta, s).unwrap();
            let b = case_bracket(pair.1, u, theta, s).unwrap();
            assert!((a - b).abs() < 1e-12, "anti s={s} t={u}");
        }
    }
}

#[test]
fn trailing_window_is_case_three() {
    for s in [0.3, 1.0, 1.6] {
        for t in grid(20) {
            assert_eq!(
                Case::select(t, 0.0),
                if t == 0.0 { Case::One } else { Case::Three }
            );
            let (h1, h2) = (s / 2.0, s / 2.0);
            let general = case_formula(Case::Three, t, 0.0, h1, h2, 1.0).unwrap();
            let special = asymptotic_xcorr_theta0(t, h1, h2, 1.0).unwrap();
            assert!((general - special).abs() < 1e-14, "s={s} t={t}");
        }
    }
}

#[test]
fn window_scaling_is_a_pure_power() {
    let (h1, h2) = (0.5, 0.77);
    for t in [0.0, 0.25, 0.6] {
        let (_, base) = asymptotic_xcorr(t, 0.3, h1, h2, 1.0).unwrap();
        for n in [2.0, 100.0, 12345.0] {
            let (_, v) = asymptotic_xcorr(t, 0.3, h1, h2, n).unwrap();
            assert!((v / base - n.powf(h1 + h2)).abs() < 1e-12 * n.powf(h1 + h2));
        }
    }
}

#[test]
fn negative_lag_mirrors_window_position() {
    for s in [0.5, 1.27] {
        for t in [0.05, 0.3, 0.7] {
            for theta in [0.0, 0.2, 0.5, 0.9] {
                let neg = master_integral_quadrature(-t, theta, s / 2.0, s / 2.0).unwrap();
                let pos = master_integral_quadrature(t, 1.0 - theta, s / 2.0, s / 2.0).unwrap();
                assert!((neg - pos).abs() < 1e-9, "s={s} t={t} theta={theta}");
                let closed = case_bracket(Case::select(t, 1.0 - theta), t, 1.0 - theta, s).unwrap();
                assert!((neg - closed).abs() < 1e-8);
            }
        }
    }
}

#[test]
fn brownian_trailing_hand_values() {
    // s = 1, θ = 0: bracket = −τ̂ + (1+τ̂)²/2 + (1−τ̂)²/2 − [(1−τ̂)³ − 2τ̂³ + (1+τ̂)³]/6
    //             = 2/3 − τ̂ + τ̂³/3, which vanishes at τ̂ = 1.
    for t in grid(10) {
        let expect = 2.0 / 3.0 - t + t * t * t / 3.0;
        let got = asymptotic_xcorr_theta0(t, 0.5, 0.5, 1.0).unwrap();
        assert!((got - expect).abs() < 1e-14, "{t}: {got} vs {expect}");
    }
}
