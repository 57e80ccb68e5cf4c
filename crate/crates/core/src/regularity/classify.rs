use rayon::prelude::*;

use super::coefficients::a_coeff;
use super::fit::{geometric_grid, loglog_slope, robust_slope};
use super::remainder::remainder_unchecked;
use crate::duhamel::{symmetric_v_rule, PowerSpectrum};
use crate::error::{invalid, Result};
use crate::fields::Potential;
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// The normalized remainder stays bounded as `t ↓ 0`.
    Bounded,
    /// It grows like `t^{exponent}` with `exponent < -tolerance`.
    Divergent,
    /// The data cannot separate the two: slope too noisy or `t` below grid resolution.
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrderReport {
    pub m: usize,
    pub verdict: Verdict,
    /// Robust log-log slope of `|R_m(t)|`.
    pub slope: f64,
    pub slope_std_error: f64,
    /// `(t, R_m(t))` over the fit window.
    pub curve: Vec<(f64, f64)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RegularityReport {
    pub orders: Vec<OrderReport>,
    /// Largest `m` such that every order `0..=m` is bounded.
    pub max_passing: Option<usize>,
    /// Slope at the first order that is not bounded.
    pub divergence_exponent: Option<f64>,
    /// `c_{2+j} = a_j ‖|D|^j V‖²` for the passing orders.
    pub coefficients: Vec<f64>,
}

impl RegularityReport {
    pub fn order(&self, m: usize) -> Option<&OrderReport> {
        self.orders.iter().find(|o| o.m == m)
    }

    pub fn passes(&self, m: usize) -> bool {
        self.max_passing.is_some_and(|p| p >= m)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClassifyOptions {
    pub t_min: f64,
    pub t_max: f64,
    pub samples: usize,
    /// `Bounded` when the slope is at least `-tolerance`.
    pub tolerance: f64,
    pub max_slope_error: f64,
    /// Smallest admissible `t_min ξ_max²`.
    pub min_resolution: f64,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        Self { t_min: 1e-4, t_max: 1e-2, samples: 21, tolerance: 0.1, max_slope_error: 0.1, min_resolution: 25.0 }
    }
}

/// `R_m(t)`: the part of `(4πt)^{n/2} tr W₂(t)` left after the orders `t², …, t^{m+1}`, over `t^{m+2}`.
///
/// With `r_m` from [`expexp_remainder`](super::expexp_remainder),
/// `R_m(t) = ½ (-1)^m/m! ∫₀¹ (2π)^{-n}∫ r_m(t v(1-v)|ξ|²) (v(1-v))^m |ξ|^{2m} |V̂|² dξ dv`,
/// which tends to `a_m ‖|D|^m V‖²` when `V ∈ H^m`.
pub fn w2_remainder(spec: &PowerSpectrum, m: usize, t: f64) -> f64 {
    let mi = m as i32;
    let fact: f64 = (1..=m).map(|i| i as f64).product();
    let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
    let inner: f64 = symmetric_v_rule(t * spec.max_xi2, 32)
        .iter()
        .map(|&(v, w)| {
            let q = v * (1.0 - v);
            w * q.powi(mi) * spec.integrate(|x| remainder_unchecked(m as u32, t * q * x) * x.powi(mi))
        })
        .sum();
    0.5 * sign / fact * inner
}

pub fn classify_regularity<T: Real>(v: &Potential<T>, m_max: usize) -> Result<RegularityReport> {
    classify_regularity_with(v, m_max, ClassifyOptions::default())
}

pub fn classify_regularity_with<T: Real>(v: &Potential<T>, m_max: usize, opts: ClassifyOptions) -> Result<RegularityReport> {
    if !(opts.t_min > 0.0 && opts.t_max > opts.t_min) || opts.samples < 3 {
        return Err(invalid("classifier window needs 0 < t_min < t_max and at least 3 samples"));
    }
    let spec = PowerSpectrum::new(v);
    spec.check_aliasing()?;
    let ts = geometric_grid(opts.t_min, opts.t_max, opts.samples);
    let resolved = opts.t_min * spec.max_xi2 >= opts.min_resolution;
    let mut orders = Vec::with_capacity(m_max + 1);
    for m in 0..=m_max {
        let curve: Vec<(f64, f64)> = ts.par_iter().map(|&t| (t, w2_remainder(&spec, m, t))).collect();
        let report = if curve.iter().all(|p| p.1 == 0.0) {
            OrderReport { m, verdict: Verdict::Bounded, slope: 0.0, slope_std_error: 0.0, curve }
        } else {
            let slope = robust_slope(&curve);
            let (_, se) = loglog_slope(&curve);
            let verdict = if !resolved || !(se <= opts.max_slope_error) || !slope.is_finite() {
                Verdict::Inconclusive
            } else if slope >= -opts.tolerance {
                Verdict::Bounded
            } else {
                Verdict::Divergent
            };
            OrderReport { m, verdict, slope, slope_std_error: se, curve }
        };
        log::debug!("order {m}: slope {:.4} ± {:.4} → {:?}", report.slope, report.slope_std_error, report.verdict);
        orders.push(report);
    }
    let first_fail = orders.iter().position(|o| o.verdict != Verdict::Bounded);
    let max_passing = match first_fail {
        Some(0) => None,
        Some(i) => Some(i - 1),
        None => Some(m_max),
    };
    let divergence_exponent = first_fail.map(|i| orders[i].slope);
    let passing = max_passing.map_or(0, |p| p + 1);
    let coefficients = (0..passing).map(|j| a_coeff(j as u32) * spec.integrate(|x| x.powi(j as i32))).collect();
    Ok(RegularityReport { orders, max_passing, divergence_exponent, coefficients })
}
