use concurrent_codes::model::{
    self, expected_hallucinations, live_branches, marks_expected, ExponentMode,
};
use concurrent_codes::special::{erf, erfinv, lambert_w_series};
use concurrent_codes::model::ModelParams;
use proptest::prelude::*;
use statrs::distribution::{ContinuousCDF, Normal};

// Independent bisection oracle for the small root of m (L - log2 m) = z.
fn small_root(z: f64, l: f64) -> f64 {
    let f = |m: f64| m * (l - m.log2()) - z;
    let (mut lo, mut hi) = (1e-12, 2f64.powf(l) / std::f64::consts::E);
    for _ in 0..300 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

// Large root, beyond the maximizer.
fn large_root(z: f64, l: f64) -> f64 {
    let f = |m: f64| m * (l - m.log2()) - z;
    let (mut lo, mut hi) = (2f64.powf(l) / std::f64::consts::E, 2f64.powf(l));
    for _ in 0..300 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

// 30-digit references computed with mpmath
#[test]
fn erf_matches_high_precision_values() {
    let cases: [(f64, f64); 4] = [
        (0.5, 0.520499877813046537682746653892),
        (2.28, 0.998737661150219050493756863845),
        (2.5, 0.99959304798255504106043578426),
        (2.9, 0.999958902121900541142004123158),
    ];
    for (x, want) in cases {
        assert!((erf(x) - want).abs() < 2e-15, "x = {x}");
        assert!((erf(-x) + want).abs() < 2e-15, "x = -{x}");
    }
}

// statrs itself is only good to ~1e-10 in places (0.5 is off by 5e-11)
#[test]
fn erf_matches_statrs() {
    for i in -600..=600 {
        let x = i as f64 / 100.0;
        let want = statrs::function::erf::erf(x);
        assert!((erf(x) - want).abs() < 1e-10, "x = {x}");
    }
}

#[test]
fn erfinv_matches_statrs() {
    for i in -99..=99 {
        let y = i as f64 / 100.0;
        let want = statrs::function::erf::erf_inv(y);
        assert!((erfinv(y).unwrap() - want).abs() < 1e-9, "y = {y}");
    }
}

#[test]
fn signal_threshold_is_upper_tail_inverse() {
    for &(mu, sigma) in &[(0.0, 0.1), (1.0, 2.0), (-0.5, 0.3)] {
        let g = Normal::new(mu, sigma).unwrap();
        for i in 1..100 {
            let n_t = i as f64 / 100.0;
            let e_t = model::signal_threshold(mu, sigma, n_t).unwrap();
            assert!((g.sf(e_t) - n_t).abs() < 1e-8, "n_t = {n_t}");
        }
    }
}

#[test]
fn numeric_inversion_agrees_with_bisection_oracle() {
    for z in [1.0, 10.0, 66.78, 150.0, 335.6, 376.0] {
        let got = model::messages_from_marks_numeric(z, 10).unwrap();
        assert!((got - small_root(z, 10.0)).abs() < 1e-6, "z = {z}");
    }
}

#[test]
fn series_returns_large_root() {
    for z in [10.0, 50.0, 200.0] {
        let got = model::messages_from_marks_series(z, 10, 60).unwrap();
        assert!((got - large_root(z, 10.0)).abs() < 1e-3 * got, "z = {z}: {got}");
    }
}

#[test]
fn branches_decline_below_half_noise() {
    for &q in &[0.1, 0.3, 0.45, 0.49] {
        let p = ModelParams::<f64>::new(32, 10, 2, 2048).unwrap().with_noise(q).unwrap();
        for i in 8..10 {
            assert!(live_branches(i + 1, &p) < live_branches(i, &p), "q = {q} i = {i}");
        }
    }
}

#[test]
fn hallucinations_cross_one_at_threshold() {
    for m in [8u64, 16, 32, 64, 128] {
        let t = model::threshold_ng::<f64>(m, 10, 2, ExponentMode::Floor).unwrap();
        let p = ModelParams::<f64>::new(m, 10, 2, 2048).unwrap();
        let h = expected_hallucinations(&p.with_gap(t).unwrap());
        assert!((h - 1.0).abs() < 1e-9, "m = {m}: {h}");
    }
}

#[test]
fn floor_curve_jumps_continuous_curve_is_smooth() {
    let ms: Vec<u64> = (1..=100).collect();
    let floor = model::marks_threshold_curve::<f64>(ms.clone(), 10, 2, 1024, ExponentMode::Floor).unwrap();
    let cont = model::marks_threshold_curve::<f64>(ms, 10, 2, 1024, ExponentMode::Continuous).unwrap();
    let max_step = |c: &[(u64, f64)]| {
        c.windows(2)
            .skip(10)
            .map(|w| (w[1].1 - w[0].1).abs())
            .fold(0.0, f64::max)
    };
    assert!(max_step(&floor) > 3.0 * max_step(&cont));
}

#[test]
fn generic_instantiations_agree() {
    let p64 = ModelParams::<f64>::new(20, 10, 2, 2048).unwrap().with_noise(0.3).unwrap();
    let p32 = ModelParams::<f32>::new(20, 10, 2, 2048).unwrap().with_noise(0.3).unwrap();
    for i in 1..=10 {
        let a = live_branches(i, &p64);
        let b = live_branches(i, &p32) as f64;
        assert!((a - b).abs() < 1e-4 * a.max(1.0));
    }
    assert!((erf(0.7f32) as f64 - erf(0.7f64)).abs() < 1e-6);
}

proptest! {
    #[test]
    fn marks_inversion_round_trip(m in 1.0f64..376.7) {
        let z = marks_expected(m, 10);
        let back = model::messages_from_marks_numeric(z, 10).unwrap();
        prop_assert!((back - m).abs() < 1e-6);
    }

    #[test]
    fn lambert_defining_identity(x in -0.2f64..0.2) {
        let w = lambert_w_series(x, 30).unwrap();
        prop_assert!((w * w.exp() - x).abs() < 1e-6);
    }

    #[test]
    fn erfinv_identity(y in -0.999999f64..0.999999) {
        prop_assert!((erf(erfinv(y).unwrap()) - y).abs() < 1e-9);
    }

    #[test]
    fn load_grows_with_noise(m in 1u64..200, a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let p = ModelParams::<f64>::new(m, 10, 2, 2048).unwrap();
        let l_lo = model::computational_load(&p.with_noise(lo).unwrap());
        let l_hi = model::computational_load(&p.with_noise(hi).unwrap());
        prop_assert!(l_lo <= l_hi + 1e-9);
    }
}
