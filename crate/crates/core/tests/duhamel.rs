mod common;

use common::*;
use heat_trace::duhamel::{
    bound_term_k, free_factor, tail_bound, trace_total, trace_w1, trace_w2, trace_wk_mc, SeriesOptions,
};
use heat_trace::oracle::heat_trace_direct;
use heat_trace::{Potential64, Stream};
use proptest::prelude::*;

#[test]
fn w1_closed_form() {
    let v = well(grid(8.0, 1024), 1.0, 1.0);
    let t = 0.01;
    let w1 = trace_w1(&v, t).unwrap();
    let expected = (4.0 * std::f64::consts::PI * t).powf(-0.5) * t * -2.0;
    assert!(rel(w1, expected) < 1e-12);
    assert!((w1 + 0.0564190).abs() < 1e-7);
    assert_eq!(trace_w1(&v.scaled(2.0), t).unwrap(), 2.0 * w1);
    assert_eq!(trace_w1(&Potential64::zero(grid(8.0, 1024)), t).unwrap(), 0.0);
    assert!(trace_w1(&v, 0.0).is_err());
}

#[test]
fn w2_small_time_limit_is_half_the_l2_norm() {
    // For the indicator the approach is 1 - √(πt)/8 + O(t); 0.1% needs t ≲ 2e-5.
    let v = well(grid(8.0, 4096), 1.0, 1.0);
    let t = 1e-4;
    let w2 = trace_w2(&v, t).unwrap();
    let normalised = w2.value / (t * t * free_factor(t, 1));
    let corrected = 1.0 - (std::f64::consts::PI * t).sqrt() / 8.0;
    assert!((normalised - corrected).abs() < 2e-4, "{normalised} vs {corrected}");
    assert!(w2.error_estimate < 1e-8 * w2.value);

    let v = well(grid(8.0, 16384), 1.0, 1.0);
    let t = 1e-5;
    let normalised = trace_w2(&v, t).unwrap().value / (t * t * free_factor(t, 1));
    assert!((normalised - 1.0).abs() < 1e-3, "{normalised}");
}

#[test]
fn w2_of_zero_is_zero() {
    assert_eq!(trace_w2(&Potential64::zero(grid(8.0, 1024)), 0.1).unwrap().value, 0.0);
}

#[test]
fn w2_normalised_value_decreases_in_time() {
    let v = well(grid(8.0, 2048), 1.0, 1.0);
    let mut last = f64::INFINITY;
    for &t in &[1e-4, 1e-3, 1e-2, 0.05, 0.2, 1.0] {
        let n = trace_w2(&v, t).unwrap().value / (t * t * free_factor(t, 1));
        assert!(n <= last);
        last = n;
    }
}

#[test]
fn zero_field_has_exactly_zero_monte_carlo_terms() {
    let z = Potential64::zero(grid(8.0, 512));
    let est = trace_wk_mc(&z, 0.1, 3, 1000, Stream::new(1)).unwrap();
    assert_eq!(est.trace, 0.0);
    assert_eq!(est.bt.std_error, 0.0);
    assert!(trace_wk_mc(&z, 0.1, 2, 1000, Stream::new(1)).is_err());
    assert!(trace_wk_mc(&z, 0.1, 3, 10, Stream::new(1)).is_err());
}

#[test]
fn smooth_bt_approaches_its_limit_linearly() {
    // For a smooth field B_t - B₀ = O(t): a decade in t buys a decade in the gap.
    let v = bump(grid(8.0, 2048), 1.0, 1.0);
    let b0 = v.lp_norm_pow(3.0) / 6.0;
    let gap = |t: f64| {
        let est = trace_wk_mc(&v, t, 3, 200_000, Stream::new(2)).unwrap().bt;
        assert!(est.std_error < 1e-5);
        est.value - b0
    };
    let (g2, g3) = (gap(1e-2), gap(1e-3));
    let ratio = g2 / g3;
    assert!((5.0..20.0).contains(&ratio), "{g2} / {g3}");
    assert!(g3.abs() < 2e-4);
}

#[test]
fn well_bt_bias_shrinks_with_time() {
    // The indicator carries an O(√t) edge correction, so B_t approaches -1/3 and 1/12 from above.
    let v = well(grid(8.0, 2048), 1.0, 1.0);
    for (k, b0) in [(3usize, -1.0 / 3.0), (4, 1.0 / 12.0)] {
        let gaps: Vec<f64> = [1e-2, 1e-3]
            .iter()
            .map(|&t| {
                let bt = trace_wk_mc(&v, t, k, 200_000, Stream::new(k as u64)).unwrap().bt;
                assert!(bt.std_error <= 0.01);
                (bt.value - b0).abs()
            })
            .collect();
        assert!(gaps[1] < gaps[0], "k = {k}: {gaps:?}");
        assert!(gaps[1] < 0.01);
    }
}

#[test]
fn bt_obeys_the_lk_holder_bound() {
    let v = well(grid(8.0, 1024), 1.0, 1.0);
    for &t in &[1e-3, 0.01, 0.1, 1.0] {
        let bt = trace_wk_mc(&v, t, 3, 20_000, Stream::new(7)).unwrap().bt;
        assert!(bt.value.abs() <= 2.0 + 3.0 * bt.std_error);
    }
}

#[test]
fn power_of_two_scaling_is_exact() {
    let v = random_mixed(grid(6.0, 512), 11, 1.0);
    for k in 3..=5 {
        let a = trace_wk_mc(&v, 0.05, k, 5000, Stream::new(3)).unwrap();
        let b = trace_wk_mc(&v.scaled(2.0), 0.05, k, 5000, Stream::new(3)).unwrap();
        assert_eq!(b.bt.value, a.bt.value * 2f64.powi(k as i32));
        let c = trace_wk_mc(&v.scaled(0.7), 0.05, k, 5000, Stream::new(3)).unwrap();
        assert!(rel(c.bt.value, a.bt.value * 0.7f64.powi(k as i32)) < 1e-12);
    }
}

#[test]
fn tail_bound_decreases_to_zero() {
    let v = well(grid(8.0, 512), 1.0, 1.0);
    let mut last = f64::INFINITY;
    for kmax in 1..=12 {
        let b = tail_bound(kmax, 0.2, &v).unwrap();
        assert!(b.is_finite() && b < last);
        last = b;
    }
    assert!(last < 1e-8);
    assert_eq!(tail_bound(3, 0.2, &Potential64::zero(grid(8.0, 512))).unwrap(), 0.0);
    assert!(tail_bound(3, 1.5, &v).is_err());
}

#[test]
fn measured_terms_sit_below_the_bound() {
    let v = well(grid(8.0, 1024), 1.0, 1.0);
    for &t in &[0.05, 0.2] {
        for k in 3..=5 {
            let est = trace_wk_mc(&v, t, k, 50_000, Stream::new(k as u64)).unwrap();
            let bound = bound_term_k(&v, k, t).unwrap();
            assert!(est.trace.abs() <= bound + 3.0 * est.trace_std_error, "k = {k}, t = {t}");
        }
    }
}

#[test]
fn series_matches_oracle_on_the_well() {
    let v = well(grid(8.0, 1024), 1.0, 1.0);
    let t = 0.05;
    let series = trace_total(&v, t, SeriesOptions::default(), Stream::new(4)).unwrap();
    let oracle = heat_trace_direct(&v, t).unwrap();
    let allowed = (3.0 * series.std_error() + series.tail_bound + oracle.error_estimate).max(1e-4);
    assert!((series.total - oracle.value).abs() <= allowed, "{} vs {}", series.total, oracle.value);
    assert_eq!(series.terms.len(), 6);
    let sum: f64 = series.terms.iter().map(|t| t.signed()).sum();
    assert_eq!(sum, series.total);
}

#[test]
fn series_of_zero_is_zero() {
    let z = Potential64::zero(grid(8.0, 512));
    let s = trace_total(&z, 0.1, SeriesOptions { samples: 1000, ..Default::default() }, Stream::new(1)).unwrap();
    assert_eq!(s.total, 0.0);
    assert_eq!(s.tail_bound, 0.0);
}

#[test]
fn series_leading_term_has_the_oracle_sign() {
    let v = well(grid(8.0, 1024), 1.0, 1.0);
    let t = 0.01;
    let s = trace_total(&v, t, SeriesOptions { samples: 20_000, ..Default::default() }, Stream::new(5)).unwrap();
    let lead = s.total / free_factor(t, 1) / t;
    assert!((lead - 2.0).abs() < 0.1, "{lead}");
}

#[test]
fn series_matches_oracle_on_random_fields() {
    let g = grid(8.0, 1024);
    for seed in 0..3 {
        let v = random_mixed(g, 100 + seed, 1.0);
        let t = 0.05;
        let s = trace_total(&v, t, SeriesOptions { samples: 50_000, ..Default::default() }, Stream::new(seed)).unwrap();
        let o = heat_trace_direct(&v, t).unwrap();
        let allowed = 3.0 * (s.std_error() + s.tail_bound + o.error_estimate);
        assert!((s.total - o.value).abs() <= allowed, "seed {seed}: {} vs {}", s.total, o.value);
    }
}

#[test]
fn tolerance_request_is_enforced() {
    let v = well(grid(8.0, 512), 1.0, 1.0);
    let opts = SeriesOptions { kmax: 3, samples: 1000, tolerance: Some(1e-12) };
    assert!(matches!(trace_total(&v, 0.5, opts, Stream::new(1)), Err(heat_trace::Error::NonConvergence(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn every_term_respects_the_trace_class_bound(seed in 0u64..1000, t in 0.02f64..0.5) {
        let v = random_mixed(grid(6.0, 512), seed, 1.0);
        prop_assert!(trace_w1(&v, t).unwrap().abs() <= bound_term_k(&v, 1, t).unwrap());
        prop_assert!(trace_w2(&v, t).unwrap().value <= bound_term_k(&v, 2, t).unwrap());
        for k in 3..=4 {
            let est = trace_wk_mc(&v, t, k, 4000, Stream::new(seed)).unwrap();
            prop_assert!(est.trace.abs() <= bound_term_k(&v, k, t).unwrap() + 3.0 * est.trace_std_error);
        }
    }
}
