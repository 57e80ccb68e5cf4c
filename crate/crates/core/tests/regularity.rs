mod common;

use common::*;
use heat_trace::duhamel::{free_factor, trace_w2, PowerSpectrum};
use heat_trace::fields::sobolev_norm;
use heat_trace::kernels::SimplexPoint;
use heat_trace::oracle::OracleSpectrum;
use heat_trace::quad::gauss_legendre;
use heat_trace::regularity::*;
use heat_trace::{mollify, Error, Potential64, Stream};
use num_traits::ToPrimitive;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn w2_samples(v: &Potential64, ts: &[f64]) -> Vec<HeatTracePoint> {
    ts.iter()
        .map(|&t| {
            let w = trace_w2(v, t).unwrap();
            HeatTracePoint { t, value: w.value, std_error: w.error_estimate }
        })
        .collect()
}

#[test]
fn a_table_matches_beta_quadrature() {
    let (x, w) = gauss_legendre(40);
    for j in 0..12u32 {
        // ∫₀¹ (v(1-v))^j dv on [0, 1].
        let beta: f64 = x
            .iter()
            .zip(&w)
            .map(|(&x, &w)| {
                let v = 0.5 * (x + 1.0);
                0.5 * w * (v * (1.0 - v)).powi(j as i32)
            })
            .sum();
        let fact: f64 = (1..=j).map(|i| i as f64).product();
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        let oracle = sign * beta / (2.0 * fact);
        assert!(rel(a_coeff(j), oracle) < 1e-12, "a_{j}: {} vs {oracle}", a_coeff(j));
        assert!(rel(beta_moment(j).to_f64().unwrap(), beta) < 1e-12);
    }
    assert_eq!(a_coeff(0), 0.5);
    assert_eq!(a_coeff(1), -1.0 / 12.0);
    assert_eq!(a_coeff(2), 1.0 / 120.0);
}

#[test]
fn expexp_examples() {
    assert_eq!(expexp_remainder(1, 0.0).unwrap(), 1.0);
    assert!((expexp_remainder(1, 1.0).unwrap() - (1.0 - (-1.0f64).exp())).abs() < 1e-15);
    let h = 1e-7;
    let slope: f64 = (expexp_remainder(2, h).unwrap() - expexp_remainder(2, 0.0).unwrap()) / h;
    assert!((slope + 1.0 / 3.0).abs() < 1e-6, "{slope}");
    assert!(expexp_remainder(2, -0.1).is_err());
    assert!(expexp_remainder(2, f64::NAN).is_err());
    assert!((expexp_remainder(3, 0.5f32).unwrap() - expexp_remainder(3, 0.5f64).unwrap() as f32).abs() < 1e-6);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn expexp_is_a_bounded_lagrange_remainder(m in 1u32..10, s in 0.0f64..60.0) {
        let r = expexp_remainder(m, s).unwrap();
        prop_assert!((0.0..=1.0).contains(&r));
        // e^{-s} = Σ_{j<m} (-s)^j/j! + r (-1)^m s^m/m!, checked where the partial sum does not cancel badly.
        if s <= 2.0 {
            let mut partial = 0.0;
            let mut term = 1.0;
            for j in 0..m {
                partial += term;
                term *= -s / (j + 1) as f64;
            }
            let rebuilt = partial + r * term;
            prop_assert!((rebuilt - (-s).exp()).abs() < 1e-14, "{rebuilt}");
        }
    }
}

#[test]
fn heat_coefficients_of_the_well() {
    let v = well(grid(8.0, 4096), 1.0, 1.0);
    let hc = heat_coefficients(&v, 0, 3, Stream::new(1)).unwrap();
    assert!((hc.source(2, 0).unwrap() - 1.0).abs() < 1e-10);
    assert!((hc.source(3, 0).unwrap() + 1.0 / 3.0).abs() < 1e-10);
    assert!((hc.order(1).unwrap() - 2.0).abs() < 1e-10);
    assert!((hc.order(2).unwrap() - 1.0).abs() < 1e-10);
    assert_eq!(hc.a_table[0], a_coeff_exact(0));
}

#[test]
fn heat_coefficients_of_zero_vanish() {
    let z = Potential64::zero(grid(8.0, 512));
    let hc = heat_coefficients(&z, 2, 4, Stream::new(1)).unwrap();
    assert!(hc.sources.iter().all(|s| s.value == 0.0));
    assert!(hc.orders.iter().all(|o| o.1 == 0.0));
    assert!(matches!(heat_coefficients(&z, 3, 4, Stream::new(1)), Err(Error::Unsupported(_))));
}

#[test]
fn first_derivative_coefficient_of_the_bump() {
    let v = bump(grid(8.0, 4096), 1.0, 1.0);
    let d1 = sobolev_norm(&v, 1.0).unwrap().squared;
    let hc = heat_coefficients(&v, 1, 2, Stream::new(1)).unwrap();
    assert!(rel(hc.source(2, 1).unwrap(), -d1 / 12.0) < 1e-12);
}

#[test]
fn synthetic_expansion_is_recovered_exactly() {
    let (c1, c2) = (1.7, -0.6);
    let samples: Vec<HeatTracePoint> = geometric_grid(1e-3, 0.5, 30)
        .into_iter()
        .map(|t| HeatTracePoint { t, value: free_factor(t, 1) * (c1 * t + c2 * t * t), std_error: 0.0 })
        .collect();
    let fit = fit_expansion(&samples, 1, 2.0).unwrap();
    let (a, _) = fit.coefficient(1.0).unwrap();
    let (b, _) = fit.coefficient(2.0).unwrap();
    assert!((a - c1).abs() < 1e-10 && (b - c2).abs() < 1e-10, "{a} {b}");
    assert!(fit.coefficient(1.5).unwrap().0.abs() < 1e-10);
    assert!(fit.divergence_exponent >= 2.0);
    assert_eq!(fit.residuals.len(), samples.len());
}

#[test]
fn too_many_powers_are_refused() {
    let samples: Vec<HeatTracePoint> = geometric_grid(1e-4, 1e-2, 80)
        .into_iter()
        .map(|t| HeatTracePoint { t, value: t.sqrt(), std_error: 1e-12 })
        .collect();
    assert!(matches!(fit_expansion(&samples, 1, 12.0), Err(Error::IllConditioned(_))));
    assert!(fit_expansion(&samples[..5], 1, 3.0).is_err());
}

#[test]
fn second_coefficient_is_half_the_l2_norm() {
    let g = grid(8.0, 4096);
    let ts = geometric_grid(1e-4, 1e-2, 40);
    for v in [well(g, 1.0, 1.0), bump(g, 1.0, 1.0), random_bumps(g, 21, 1.0)] {
        let target = 0.5 * sobolev_norm(&v, 0.0).unwrap().squared;
        let fit = fit_expansion_with(&w2_samples(&v, &ts), 1, FitOptions::new(2.0, 4.5)).unwrap();
        let (c2, _) = fit.coefficient(2.0).unwrap();
        assert!(rel(c2, target) < 0.01, "{c2} vs {target}");
    }
}

#[test]
fn third_coefficient_of_the_bump() {
    let v = bump(grid(8.0, 4096), 1.0, 1.0);
    let target = -sobolev_norm(&v, 1.0).unwrap().squared / 12.0;
    let fit = fit_expansion_with(&w2_samples(&v, &geometric_grid(1e-4, 1e-2, 40)), 1, FitOptions::new(2.0, 4.5)).unwrap();
    let (c3, _) = fit.coefficient(3.0).unwrap();
    assert!(rel(c3, target) < 0.02, "{c3} vs {target}");
}

#[test]
fn oracle_trace_of_the_well_has_a_half_power() {
    let v = well(grid(8.0, 2048), 1.0, 1.0);
    let spectrum = OracleSpectrum::compute(&v).unwrap();
    let samples: Vec<HeatTracePoint> = geometric_grid(1e-3, 0.5, 40)
        .into_iter()
        .map(|t| {
            let o = spectrum.trace(t).unwrap();
            HeatTracePoint { t, value: o.value, std_error: o.error_estimate }
        })
        .collect();
    let fit = fit_expansion(&samples, 1, 4.0).unwrap();
    let (c1, _) = fit.coefficient(1.0).unwrap();
    let (c2, _) = fit.coefficient(2.0).unwrap();
    let (c52, se) = fit.coefficient(2.5).unwrap();
    assert!((c1 - 2.0).abs() < 1e-3, "{c1}");
    assert!((c2 - 1.0).abs() < 0.01, "{c2}");
    // -√π/8 from the √t edge correction of ‖V‖²/2.
    assert!(c52.abs() > 10.0 * se && (c52 + 0.2216).abs() < 0.02, "{c52} ± {se}");
}

#[test]
fn smooth_field_has_no_half_powers() {
    // Fit error here = statistical SE plus the shift when one more power is admitted;
    // the SEs alone only see quadrature noise, not truncation of the asymptotic series.
    let g = grid(8.0, 4096);
    let ts = geometric_grid(1e-4, 1e-2, 40);
    let half_powers = |v: &Potential64| {
        let samples = w2_samples(v, &ts);
        let a = fit_expansion_with(&samples, 1, FitOptions::new(2.0, 4.5)).unwrap();
        let b = fit_expansion_with(&samples, 1, FitOptions::new(2.0, 5.0)).unwrap();
        let (c, se) = a.coefficient(2.5).unwrap();
        let shift = (b.coefficient(2.5).unwrap().0 - c).abs();
        (c, (se * se + shift * shift).sqrt())
    };
    let (c, err) = half_powers(&bump(g, 1.0, 1.0));
    assert!(c.abs() <= 3.0 * err, "{c} ± {err}");
    assert!(err < 1e-4);
    let (c, err) = half_powers(&well(g, 1.0, 1.0));
    assert!(c.abs() > 20.0 * err, "{c} ± {err}");
}

#[test]
fn classifier_separates_the_well_from_the_bump() {
    let g = grid(4.0, 4096);
    let w = classify_regularity(&well(g, 1.0, 1.0), 2).unwrap();
    assert_eq!(w.max_passing, Some(0));
    assert_eq!(w.order(1).unwrap().verdict, Verdict::Divergent);
    let div = w.divergence_exponent.unwrap();
    assert!((div + 0.5).abs() < 0.1, "{div}");

    let b = classify_regularity(&bump(g, 1.0, 1.0), 3).unwrap();
    assert!(b.passes(3), "{:?}", b.max_passing);
    for m in 0..=3 {
        assert_eq!(b.order(m).unwrap().verdict, Verdict::Bounded);
    }
}

#[test]
fn zero_field_passes_every_order() {
    let r = classify_regularity(&Potential64::zero(grid(4.0, 4096)), 4).unwrap();
    assert_eq!(r.max_passing, Some(4));
    assert_eq!(r.divergence_exponent, None);
    assert!(r.coefficients.iter().all(|&c| c == 0.0));
}

#[test]
fn mollification_buys_regularity() {
    let g = grid(4.0, 8192);
    let w = well(g, 1.0, 1.0);
    let passing: Vec<usize> = [0.05, 0.1, 0.2, 0.4]
        .iter()
        .map(|&eps| classify_regularity(&mollify(&w, eps).unwrap(), 4).unwrap().max_passing.unwrap())
        .collect();
    assert!(passing.windows(2).all(|p| p[0] <= p[1]), "{passing:?}");
    assert!(passing[0] < passing[1] && passing[0] >= 1, "{passing:?}");
    assert!(passing[3] > passing[0]);
}

#[test]
fn first_order_remainder_blows_up_like_inverse_root_t() {
    let g = grid(4.0, 8192);
    let spec = PowerSpectrum::new(&well(g, 1.0, 1.0));
    let ratio = w2_remainder(&spec, 1, 1e-4) / w2_remainder(&spec, 1, 1e-2);
    assert!((8.0..12.0).contains(&ratio), "{ratio}");

    let b = bump(g, 1.0, 1.0);
    let target = -sobolev_norm(&b, 1.0).unwrap().squared / 12.0;
    let r = w2_remainder(&PowerSpectrum::new(&b), 1, 1e-5);
    assert!(rel(r, target) < 1e-3, "{r} vs {target}");
}

#[test]
fn gnm_two_fields_is_cauchy_schwarz() {
    let g = grid(8.0, 4096);
    let u = bump(g, 1.0, 1.5);
    for m in 1..=3u32 {
        let rep = gnm_check(&[&u, &u], &[vec![m], vec![m]], m).unwrap();
        assert!(rep.ratio <= 0.25 * (1.0 + 1e-9), "m = {m}: {}", rep.ratio);
        assert!(rep.ratio > 0.24);
    }
    assert!(gnm_check(&[&u, &u], &[vec![2], vec![1]], 1).is_err());
}

#[test]
fn gnm_ratio_is_dilation_invariant() {
    let g = grid(8.0, 32768);
    let ratios: Vec<f64> = [1.0, 2.0, 4.0]
        .iter()
        .map(|&delta| {
            let u = bump(g, 0.8, 4.0 / delta);
            gnm_check(&[&u, &u, &u], &[vec![1], vec![1], vec![0]], 1).unwrap().ratio
        })
        .collect();
    for r in &ratios[1..] {
        assert!(rel(*r, ratios[0]) < 1e-6, "{ratios:?}");
    }
}

#[test]
fn gnm_holder_case_is_below_one() {
    let g = grid(8.0, 4096);
    for seed in 0..20 {
        let u = random_bumps(g, seed, 1.0);
        let rep = gnm_check(&[&u, &u, &u], &[vec![1], vec![1], vec![0]], 1).unwrap();
        // ∫|u'|²|u| ≤ ‖u‖∞‖u'‖₂², and the right side carries (3‖u‖∞)(2‖u'‖₂)².
        assert!(rep.ratio <= 1.0 / 12.0 + 1e-12, "seed {seed}: {}", rep.ratio);
    }
}

#[test]
fn gnm_family_is_bounded_per_class() {
    let g = grid(8.0, 4096);
    let classes: [(usize, Vec<Vec<u32>>, u32); 4] = [
        (2, vec![vec![1], vec![1]], 1),
        (3, vec![vec![1], vec![1], vec![0]], 1),
        (3, vec![vec![2], vec![1], vec![1]], 2),
        (4, vec![vec![2], vec![2], vec![0], vec![0]], 2),
    ];
    for (k, alphas, m) in &classes {
        let worst = (0..50)
            .map(|seed| {
                let fields: Vec<Potential64> = (0..*k as u64).map(|i| random_bumps(g, 1000 * seed + i, 1.0)).collect();
                let refs: Vec<&Potential64> = fields.iter().collect();
                gnm_check(&refs, alphas, *m).unwrap().ratio
            })
            .fold(0.0, f64::max);
        assert!(worst.is_finite() && worst < 1.0, "{alphas:?}: {worst}");
    }
}

#[test]
fn holder_bound_with_a_vanishing_field() {
    let g = grid(6.0, 1024);
    let u = bump(g, 1.0, 1.0);
    let z = Potential64::zero(g);
    let r = SimplexPoint::new(vec![0.2, 0.6, 0.9]).unwrap();
    let rep = holder_pbound(&[&u, &z, &u], &[2.0, 2.0, f64::INFINITY], &r, 0.1, 2000, Stream::new(1)).unwrap();
    assert_eq!(rep.form.value, 0.0);
    assert!(rep.holds && rep.margin >= 0.0);
    assert!(holder_pbound(&[&u, &u, &u], &[2.0, 3.0, 3.0], &r, 0.1, 100, Stream::new(1)).is_err());
}

#[test]
fn holder_bound_holds_for_three_fields() {
    let g = grid(6.0, 1024);
    let r = SimplexPoint::new(vec![0.1, 0.45, 0.8]).unwrap();
    for seed in 0..5 {
        let f: Vec<Potential64> = (0..3).map(|i| random_bumps(g, 10 * seed + i, 1.0)).collect();
        let rep = holder_pbound(&[&f[0], &f[1], &f[2]], &[2.0, 2.0, f64::INFINITY], &r, 0.05, 20_000, Stream::new(seed))
            .unwrap();
        assert!(rep.holds && rep.converged, "seed {seed}: {rep:?}");
    }
}

#[test]
fn holder_bound_holds_uniformly_over_the_simplex() {
    let g = grid(6.0, 1024);
    let f: Vec<Potential64> = (0..4).map(|i| random_mixed(g, 40 + i, 1.0)).collect();
    let refs: Vec<&Potential64> = f.iter().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for i in 0..20 {
        let r = SimplexPoint::<f64>::sample(4, &mut rng);
        let rep = holder_pbound(&refs, &[f64::INFINITY, 2.0, 2.0, f64::INFINITY], &r, 0.1, 5000, Stream::new(i)).unwrap();
        assert!(rep.holds, "r = {:?}: {rep:?}", r.r());
    }
}
