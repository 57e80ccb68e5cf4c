use nalgebra::{DMatrix, DVector};

use crate::duhamel::free_factor;
use crate::error::{invalid, Error, Result};

/// One sample of a heat-trace quantity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HeatTracePoint {
    pub t: f64,
    pub value: f64,
    pub std_error: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FitOptions {
    /// Smallest power; powers run over `p_min, p_min + ½, …, p_max`.
    pub p_min: f64,
    pub p_max: f64,
    /// Designs with a larger condition number are refused.
    pub max_condition: f64,
}

impl FitOptions {
    pub fn new(p_min: f64, p_max: f64) -> Self {
        Self { p_min, p_max, max_condition: 1e10 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExpansionFit {
    pub powers: Vec<f64>,
    pub coefficients: Vec<f64>,
    pub std_errors: Vec<f64>,
    /// `(t, (y - fit)/t^{p_max})` for every sample, `y = (4πt)^{n/2}·value`.
    pub residuals: Vec<(f64, f64)>,
    pub condition_number: f64,
    /// Log-log slope of `|residual curve|` over the two smallest decades of `t`;
    /// `+∞` when every residual is within three standard errors of zero.
    pub divergence_exponent: f64,
}

impl ExpansionFit {
    pub fn coefficient(&self, p: f64) -> Option<(f64, f64)> {
        self.powers.iter().position(|&q| (q - p).abs() < 1e-9).map(|i| (self.coefficients[i], self.std_errors[i]))
    }
}

/// Least squares `Σ_t (y - x_i)² … ` slope of `log|y|` on `log t`, with its standard error.
pub(crate) fn loglog_slope(points: &[(f64, f64)]) -> (f64, f64) {
    let pts: Vec<(f64, f64)> = points.iter().filter(|p| p.1 != 0.0).map(|&(t, y)| (t.ln(), y.abs().ln())).collect();
    let n = pts.len() as f64;
    if pts.len() < 3 {
        return (f64::NAN, f64::INFINITY);
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let resid: f64 = pts.iter().map(|p| (p.1 - my - slope * (p.0 - mx)).powi(2)).sum();
    (slope, (resid / (n - 2.0) / sxx).sqrt())
}

/// Theil–Sen slope of `log|y|` against `log t`.
pub(crate) fn robust_slope(points: &[(f64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = points.iter().filter(|p| p.1 != 0.0).map(|&(t, y)| (t.ln(), y.abs().ln())).collect();
    let mut slopes = Vec::new();
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            if pts[j].0 != pts[i].0 {
                slopes.push((pts[j].1 - pts[i].1) / (pts[j].0 - pts[i].0));
            }
        }
    }
    if slopes.is_empty() {
        return f64::NAN;
    }
    slopes.sort_by(f64::total_cmp);
    let n = slopes.len();
    if n % 2 == 1 {
        slopes[n / 2]
    } else {
        0.5 * (slopes[n / 2 - 1] + slopes[n / 2])
    }
}

/// Fits `(4πt)^{n/2}·value ≈ Σ_p c_p t^p` over half-integer powers `1 ≤ p ≤ p_max`.
pub fn fit_expansion(samples: &[HeatTracePoint], dim: usize, p_max: f64) -> Result<ExpansionFit> {
    fit_expansion_with(samples, dim, FitOptions::new(1.0, p_max))
}

pub fn fit_expansion_with(samples: &[HeatTracePoint], dim: usize, opts: FitOptions) -> Result<ExpansionFit> {
    let steps = ((opts.p_max - opts.p_min) * 2.0).round();
    if !(steps >= 0.0) || ((opts.p_max - opts.p_min) * 2.0 - steps).abs() > 1e-9 {
        return Err(invalid("p_max - p_min must be a nonnegative multiple of 1/2"));
    }
    let powers: Vec<f64> = (0..=steps as usize).map(|i| opts.p_min + 0.5 * i as f64).collect();
    let np = powers.len();
    if samples.len() < 3 * np {
        return Err(invalid(format!("{} samples for {np} powers; need at least {}", samples.len(), 3 * np)));
    }
    let t_min = samples.iter().map(|s| s.t).fold(f64::INFINITY, f64::min);
    let t_max = samples.iter().map(|s| s.t).fold(0.0, f64::max);
    if !(t_min > 0.0) || t_max / t_min < 99.0 {
        return Err(invalid(format!("t-grid spans [{t_min:e}, {t_max:e}]; need at least two decades")));
    }
    let y: Vec<f64> = samples.iter().map(|s| s.value / free_factor(s.t, dim)).collect();
    let sigma: Vec<f64> = samples
        .iter()
        .zip(&y)
        .map(|(s, &yi)| {
            let se = s.std_error / free_factor(s.t, dim);
            (se * se + (1e-14 * yi).powi(2)).sqrt()
        })
        .collect();
    if y.iter().all(|&v| v == 0.0) {
        return Ok(ExpansionFit {
            powers,
            coefficients: vec![0.0; np],
            std_errors: vec![0.0; np],
            residuals: samples.iter().map(|s| (s.t, 0.0)).collect(),
            condition_number: 1.0,
            divergence_exponent: f64::INFINITY,
        });
    }
    let floor = sigma.iter().cloned().filter(|s| *s > 0.0).fold(f64::INFINITY, f64::min);
    let sigma: Vec<f64> = sigma.iter().map(|&s| if s > 0.0 { s } else { floor.min(1e-300).max(f64::MIN_POSITIVE) }).collect();
    let mut a = DMatrix::<f64>::zeros(samples.len(), np);
    for (i, s) in samples.iter().enumerate() {
        for (j, &p) in powers.iter().enumerate() {
            a[(i, j)] = s.t.powf(p) / sigma[i];
        }
    }
    let col_scale: Vec<f64> = (0..np).map(|j| a.column(j).norm()).collect();
    for j in 0..np {
        let c = col_scale[j];
        a.column_mut(j).iter_mut().for_each(|x| *x /= c);
    }
    let b = DVector::from_iterator(samples.len(), y.iter().zip(&sigma).map(|(v, s)| v / s));
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let condition_number = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if condition_number > opts.max_condition {
        return Err(Error::IllConditioned(condition_number));
    }
    let x = svd.solve(&b, 0.0).map_err(|e| Error::NonConvergence(e.to_string()))?;
    let fitted = &a * &x;
    let dof = samples.len().saturating_sub(np).max(1) as f64;
    let chi2: f64 = (&b - &fitted).iter().map(|r| r * r).sum();
    let scale = (chi2 / dof).max(1.0);
    let ata_inv = (a.transpose() * &a).try_inverse().ok_or(Error::IllConditioned(condition_number))?;
    let coefficients: Vec<f64> = (0..np).map(|j| x[j] / col_scale[j]).collect();
    let std_errors: Vec<f64> = (0..np).map(|j| (ata_inv[(j, j)] * scale).sqrt() / col_scale[j]).collect();
    let mut noise_only = true;
    let residuals: Vec<(f64, f64)> = samples
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let model: f64 = powers.iter().zip(&coefficients).map(|(&p, &c)| c * s.t.powf(p)).sum();
            let r = y[i] - model;
            if r.abs() > 3.0 * sigma[i] {
                noise_only = false;
            }
            (s.t, r / s.t.powf(opts.p_max))
        })
        .collect();
    let divergence_exponent = if noise_only {
        f64::INFINITY
    } else {
        let window: Vec<(f64, f64)> = residuals.iter().copied().filter(|r| r.0 <= 100.0 * t_min * (1.0 + 1e-9)).collect();
        robust_slope(&window)
    };
    Ok(ExpansionFit { powers, coefficients, std_errors, residuals, condition_number, divergence_exponent })
}

/// `n` points geometrically spaced over `[t_min, t_max]`.
pub fn geometric_grid(t_min: f64, t_max: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![t_min];
    }
    let ratio = (t_max / t_min).ln() / (n - 1) as f64;
    (0..n).map(|i| t_min * (ratio * i as f64).exp()).collect()
}
