mod common;

use common::{erfcx, log_space, ml_series, ml_talbot, rel_err, simpson_log};
use fracshe::special_fn::{gamma, recip_gamma};
use fracshe::{inv_sub_density, laplace_ml, ml_dt, ml_neg, stable_density, FracOrder, MittagLeffler, Policy, SpecialFnError};

fn order(b: f64) -> FracOrder<f64> {
    FracOrder::new(b).unwrap()
}

#[test]
fn half_order_matches_erfcx() {
    let b = order(0.5);
    for x in log_space(1e-3, 1e3, 60) {
        let v = ml_neg(b, x).unwrap();
        assert!(rel_err(v, erfcx(x)) < 1e-8, "x={x} got {v} want {}", erfcx(x));
    }
}

#[test]
fn agrees_with_series_where_series_is_trustworthy() {
    let mut compared = 0;
    for i in 1..=9 {
        let beta = i as f64 / 10.0;
        for x in log_space(1e-3, 1e3, 40) {
            let (s, cond) = ml_series(beta, x);
            if cond > 1e3 || !s.is_finite() {
                continue;
            }
            let v = ml_neg(order(beta), x).unwrap();
            assert!(rel_err(v, s) < 1e-10, "beta={beta} x={x} got {v} series {s}");
            compared += 1;
        }
    }
    assert!(compared > 100, "only {compared} overlaps");
}

#[test]
fn agrees_with_talbot_inversion() {
    for beta in [0.2, 0.35, 0.5, 0.65, 0.8, 0.95] {
        for x in log_space(1e-2, 1e3, 25) {
            let v = ml_neg(order(beta), x).unwrap();
            let t = ml_talbot(beta, x, 1.0);
            assert!(rel_err(v, t) < 1e-8, "beta={beta} x={x} got {v} talbot {t}");
        }
    }
}

#[test]
fn classical_order_is_the_exponential() {
    for x in [0.0f64, 0.3, 7.0, 300.0] {
        assert_eq!(ml_neg(FracOrder::classical(), x).unwrap(), (-x).exp());
    }
}

#[test]
fn rejects_bad_arguments() {
    assert!(FracOrder::new(0.0).is_err());
    assert!(FracOrder::new(1.0 + 1e-12).is_err());
    assert!(FracOrder::new(f64::NAN).is_err());
    assert!(matches!(ml_neg(order(0.5), -1.0), Err(SpecialFnError::Domain { .. })));
    assert!(ml_dt(order(0.5), 1.0, 0.0).is_err());
    assert!(stable_density(FracOrder::classical(), 1.0).is_err());
    let bad = Policy {
        series_cutoff: 10.0,
        asymptotic_cutoff: 5.0,
        ..Policy::default()
    };
    assert!(MittagLeffler::new(order(0.5), bad).is_err());
}

#[test]
fn derivative_matches_central_difference() {
    for beta in [0.3, 0.5, 0.75, 0.9] {
        let ml = MittagLeffler::new(order(beta), Policy::default()).unwrap();
        for x in [0.05, 0.8, 3.0, 20.0, 120.0] {
            let h = 1e-4 * x;
            let fd = (ml.eval(x + h).unwrap() - ml.eval(x - h).unwrap()) / (2.0 * h);
            let d = ml.eval_deriv(x).unwrap();
            assert!(d <= 0.0);
            assert!(rel_err(d, fd) < 1e-6, "beta={beta} x={x} d={d} fd={fd}");
        }
    }
}

#[test]
fn time_derivative_matches_central_difference() {
    let (beta, lam): (f64, f64) = (0.6, 2.5);
    for t in [0.1, 1.0, 4.0] {
        let h = 1e-5 * t;
        let f = |s: f64| ml_neg(order(beta), lam * s.powf(beta)).unwrap();
        let fd = (f(t + h) - f(t - h)) / (2.0 * h);
        assert!(rel_err(ml_dt(order(beta), lam, t).unwrap(), fd) < 1e-6);
    }
}

#[test]
fn gamma_matches_reference() {
    for x in [0.1, 0.5, 1.0, 2.5, 7.3, 20.0, 150.0] {
        let want = statrs::function::gamma::gamma(x);
        assert!(rel_err(gamma(x), want) < 5e-13, "x={x}");
        assert!(rel_err(recip_gamma(x), 1.0 / want) < 5e-13);
    }
    for n in 0..6 {
        assert_eq!(recip_gamma(-(n as f64)), 0.0);
    }
}

#[test]
fn stable_density_half_closed_form() {
    let b = order(0.5);
    for u in log_space(1e-2, 1e3, 30) {
        let want = (-1.0 / (4.0 * u)).exp() / (2.0 * std::f64::consts::PI.sqrt() * u.powf(1.5));
        let got = stable_density(b, u).unwrap();
        assert!(rel_err(got, want) < 1e-9, "u={u} got {got} want {want}");
    }
}

#[test]
fn inverse_subordinator_laplace_transform() {
    let (beta, t, lam): (f64, f64, f64) = (0.7, 1.3, 1.7);
    let f = |s: f64| (-lam * s).exp() * inv_sub_density(order(beta), t, s).unwrap();
    let got = simpson_log(f, 1e-10, 60.0, 4000);
    let want = ml_neg(order(beta), lam * t.powf(beta)).unwrap();
    assert!((got - want).abs() < 1e-7, "got {got} want {want}");
}

#[test]
fn laplace_transform_closed_form() {
    let (beta, lam, theta): (f64, f64, f64) = (0.6, 0.8, 1.5);
    let f = |t: f64| (-theta * t).exp() * ml_neg(order(beta), lam * t.powf(beta)).unwrap();
    let got = simpson_log(f, 1e-12, 60.0, 4000);
    let want = laplace_ml(order(beta), lam, theta).unwrap();
    assert!(rel_err(got, want) < 1e-7, "got {got} want {want}");
}

#[test]
fn single_precision_tracks_double() {
    let b32 = FracOrder::new(0.6f32).unwrap();
    for x in [0.01f32, 0.5, 4.0, 40.0, 400.0] {
        let lo = ml_neg(b32, x).unwrap() as f64;
        let hi = ml_neg(order(0.6), x as f64).unwrap();
        assert!(rel_err(lo, hi) < 1e-4, "x={x} f32 {lo} f64 {hi}");
    }
}
