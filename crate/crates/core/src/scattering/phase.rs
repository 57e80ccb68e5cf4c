use num_complex::Complex64 as C64;
use rayon::prelude::*;

use super::transfer::Propagator;
use crate::error::{invalid, Error, Result};
use crate::fields::Potential;
use crate::scalar::Real;

/// Unwrapped scattering phase `σ = (1/2πi) log det S` on a real grid.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseData {
    pub lambda: Vec<f64>,
    pub sigma: Vec<f64>,
    pub sigma_prime: Vec<f64>,
}

/// `det S = M₁₁/M₂₂ = conj(M₂₂)/M₂₂` on the real axis, so `σ = -arg(M₂₂)/π`
/// and `σ' = -Im(M₂₂'/M₂₂)/π`.
pub(crate) fn phase_point(p: &Propagator<'_, impl Real>, lambda: f64) -> Result<(f64, f64)> {
    if p.is_zero() {
        return Ok((0.0, 0.0));
    }
    let z = C64::new(lambda, 0.0);
    let m22 = p.transfer(z)?.outgoing();
    let d = p.transfer_derivative(z)?[1][1];
    Ok((-m22.arg() / std::f64::consts::PI, -(d / m22).im / std::f64::consts::PI))
}

/// `σ'(λ)` at one real `λ ≠ 0`.
pub fn phase_derivative<T: Real>(v: &Potential<T>, lambda: f64) -> Result<f64> {
    check_lambda(lambda)?;
    Ok(phase_point(&Propagator::new(v)?, lambda)?.1)
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda.is_finite() && lambda > 0.0 {
        Ok(())
    } else {
        Err(invalid(format!("phase grid nodes must be positive, got {lambda}")))
    }
}

/// Nearest representative of `raw` modulo 2 to `predicted`.
fn branch(raw: f64, predicted: f64) -> f64 {
    raw + 2.0 * ((predicted - raw) / 2.0).round()
}

/// `σ(b) - σ(a)`, refining until each step agrees with the trapezoid of `σ'` to ¼.
fn increment(p: &Propagator<'_, impl Real>, a: (f64, f64, f64), b: (f64, f64, f64)) -> Result<f64> {
    let predicted = 0.5 * (a.2 + b.2) * (b.0 - a.0);
    let raw = b.1 - a.1;
    let step = branch(raw, predicted);
    if (step - predicted).abs() < 0.25 {
        return Ok(step);
    }
    if b.0 - a.0 < 1e-6 {
        return Err(Error::NonConvergence(format!("phase unwrapping ambiguous on [{}, {}]", a.0, b.0)));
    }
    let mid = 0.5 * (a.0 + b.0);
    let (s, d) = phase_point(p, mid)?;
    let m = (mid, s, d);
    Ok(increment(p, a, m)? + increment(p, m, b)?)
}

/// `σ` and `σ'` on an increasing positive grid. The branch is fixed by the
/// principal value at the largest node, where `σ → 0` at high energy.
pub fn scattering_phase<T: Real>(v: &Potential<T>, lambda_grid: &[f64]) -> Result<PhaseData> {
    if lambda_grid.is_empty() {
        return Err(invalid("empty phase grid"));
    }
    for w in lambda_grid.windows(2) {
        if !(w[1] > w[0]) {
            return Err(invalid("phase grid must be strictly increasing"));
        }
    }
    check_lambda(lambda_grid[0])?;
    let p = Propagator::new(v)?;
    let points: Vec<(f64, f64)> = lambda_grid.par_iter().map(|&l| phase_point(&p, l)).collect::<Result<_>>()?;
    let steps: Vec<f64> = (0..lambda_grid.len().saturating_sub(1))
        .into_par_iter()
        .map(|i| {
            let a = (lambda_grid[i], points[i].0, points[i].1);
            let b = (lambda_grid[i + 1], points[i + 1].0, points[i + 1].1);
            increment(&p, a, b)
        })
        .collect::<Result<_>>()?;
    let n = lambda_grid.len();
    let mut sigma = vec![0.0; n];
    sigma[n - 1] = points[n - 1].0;
    for i in (0..n - 1).rev() {
        sigma[i] = sigma[i + 1] - steps[i];
    }
    Ok(PhaseData { lambda: lambda_grid.to_vec(), sigma, sigma_prime: points.iter().map(|p| p.1).collect() })
}
