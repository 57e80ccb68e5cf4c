use nalgebra::{DMatrix, DVector};

use super::phase::{phase_point, PhaseData};
use super::resonance::{bound_state_energies, Resonance};
use super::transfer::Propagator;
use crate::error::{invalid, Result};
use crate::fields::Potential;
use crate::kernels::gamma_moment;
use crate::oracle::heat_trace_direct;
use crate::quad::adaptive_gk;
use crate::scalar::Real;

/// Both sides of the Birman–Krein heat-trace identity at one `t`.
#[derive(Clone, Debug, PartialEq)]
pub struct BirmanKreinReport {
    pub t: f64,
    /// `tr(e^{-tP_V} - e^{-tP₀})` from the dense oracle.
    pub lhs: f64,
    pub lhs_error: f64,
    /// `∫₀^Λ σ'(λ) e^{-tλ²} dλ`.
    pub phase_integral: f64,
    /// `Σ e^{tμ_k²}` over bound states `-μ_k²`.
    pub bound_state_sum: f64,
    pub bound_state_energies: Vec<f64>,
    pub cutoff: f64,
    /// `phase_integral + bound_state_sum + (m - 1)/2` for the selected `m`.
    pub rhs: f64,
    /// Zero-resonance multiplicity in `{0, 1}` giving the smaller residual.
    pub m_selected: u32,
    /// `|lhs - rhs|` for `m = 0` and `m = 1`.
    pub residuals: [f64; 2],
    pub residual: f64,
    /// `min_m |lhs - phase_integral - bound_state_sum - m/2|`, the zero-energy
    /// term in its higher-dimensional form, kept for comparison.
    pub residual_without_threshold_shift: f64,
    /// `residual ≤ tolerance · |lhs|`.
    pub passes: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BirmanKreinOptions {
    /// Upper limit `Λ` of the `λ`-integral; default `e^{-tΛ²} = 1e-12`.
    pub cutoff: Option<f64>,
    pub tolerance: f64,
}

impl Default for BirmanKreinOptions {
    fn default() -> Self {
        Self { cutoff: None, tolerance: 0.01 }
    }
}

pub fn birman_krein_check<T: Real>(v: &Potential<T>, t: f64) -> Result<BirmanKreinReport> {
    birman_krein_check_with(v, t, BirmanKreinOptions::default())
}

pub fn birman_krein_check_with<T: Real>(v: &Potential<T>, t: f64, opts: BirmanKreinOptions) -> Result<BirmanKreinReport> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(invalid(format!("time {t} must be positive")));
    }
    let prop = Propagator::new(v)?;
    let cutoff = opts.cutoff.unwrap_or_else(|| (1e12f64.ln() / t).sqrt());
    if !(cutoff > 0.0) {
        return Err(invalid("λ cutoff must be positive"));
    }
    let lhs = heat_trace_direct(v, t)?;
    let phase_integral = if prop.is_zero() {
        0.0
    } else {
        let f = |l: f64| phase_point(&prop, l).map(|p| p.1).unwrap_or(f64::NAN) * (-t * l * l).exp();
        adaptive_gk(f, 0.0, cutoff, 1e-11, 1e-11)?.0
    };
    let energies = bound_state_energies(v)?;
    let bound_state_sum: f64 = energies.iter().map(|e| (-t * e).exp()).sum();
    let base = phase_integral + bound_state_sum;
    // On the line the zero-energy term is (m - 1)/2: the free operator has m = 1 and both sides vanish.
    let residuals = [(lhs.value - base + 0.5).abs(), (lhs.value - base).abs()];
    let residual_without_threshold_shift = (lhs.value - base).abs().min((lhs.value - base - 0.5).abs());
    let m_selected = if residuals[1] < residuals[0] { 1 } else { 0 };
    let residual = residuals[m_selected as usize];
    let rhs = base + 0.5 * (m_selected as f64 - 1.0);
    let passes = residual <= opts.tolerance * lhs.value.abs() || (lhs.value == 0.0 && residual == 0.0);
    if !passes {
        log::warn!("Birman–Krein at t = {t}: residuals {residuals:?} exceed {} of |lhs| = {:.3e}", opts.tolerance, lhs.value.abs());
    }
    Ok(BirmanKreinReport {
        t,
        lhs: lhs.value,
        lhs_error: lhs.error_estimate,
        phase_integral,
        bound_state_sum,
        bound_state_energies: energies,
        cutoff,
        rhs,
        m_selected,
        residuals,
        residual,
        residual_without_threshold_shift,
        passes,
    })
}

/// Comparison of `σ'` with its resonance expansion.
#[derive(Clone, Debug, PartialEq)]
pub struct BreitWignerReport {
    pub cutoff: f64,
    pub resonances_used: usize,
    /// Coefficients of the quadratic background fitted to what the sums leave over.
    pub background: [f64; 3],
    /// `sup |σ' - resonance sum - bound-state sum - background|` on the grid.
    pub misfit: f64,
    /// `∫ (σ' - background - resonance sum)` over the grid (trapezoid).
    pub integrated_phase: f64,
    /// The bound-state part of the same integral, `-(1/π)Σ_k [atan(λ/μ_k)]` between the grid ends.
    pub bound_state_prediction: f64,
    pub bound_states: usize,
}

/// `-(1/π) Σ_j Im λ_j/|λ - λ_j|²` over a resonance set closed under `λ ↦ -conj λ`,
/// which equals the paired form `Σ_{Re λ_j ≥ 0}[…/|λ-λ_j|² + …/|λ+λ_j|²]`.
pub fn resonance_sum(resonances: &[Resonance], lambda: f64) -> f64 {
    resonances
        .iter()
        .map(|r| r.multiplicity as f64 * r.lambda.im / (lambda - r.lambda).norm_sqr())
        .sum::<f64>()
        * (-1.0 / std::f64::consts::PI)
}

/// Fits `σ'` on the phase grid with resonances of modulus at most `cutoff`.
pub fn breit_wigner_levinson(phase: &PhaseData, resonances: &[Resonance], bound_state_energies: &[f64], cutoff: f64) -> Result<BreitWignerReport> {
    let n = phase.lambda.len();
    if n < 4 {
        return Err(invalid("need at least four phase nodes"));
    }
    let pi = std::f64::consts::PI;
    let used: Vec<Resonance> = resonances.iter().copied().filter(|r| r.lambda.norm() <= cutoff).collect();
    let mus: Vec<f64> = bound_state_energies.iter().map(|e| (-e).max(0.0).sqrt()).collect();
    let bound = |l: f64| -> f64 { mus.iter().map(|m| m / (l * l + m * m)).sum::<f64>() * (-1.0 / pi) };
    let rest: Vec<f64> = (0..n)
        .map(|i| {
            let l = phase.lambda[i];
            phase.sigma_prime[i] - resonance_sum(&used, l) - bound(l)
        })
        .collect();
    let a = DMatrix::from_fn(n, 3, |i, j| phase.lambda[i].powi(j as i32));
    let b = DVector::from_vec(rest.clone());
    let coef = a.clone().svd(true, true).solve(&b, 1e-14).map_err(|e| crate::error::Error::NonConvergence(e.to_string()))?;
    let background = [coef[0], coef[1], coef[2]];
    let bg = |l: f64| background[0] + background[1] * l + background[2] * l * l;
    let misfit = (0..n).map(|i| (rest[i] - bg(phase.lambda[i])).abs()).fold(0.0, f64::max);
    let mut integrated_phase = 0.0;
    for i in 0..n - 1 {
        let (l0, l1) = (phase.lambda[i], phase.lambda[i + 1]);
        let f0 = phase.sigma_prime[i] - bg(l0) - resonance_sum(&used, l0);
        let f1 = phase.sigma_prime[i + 1] - bg(l1) - resonance_sum(&used, l1);
        integrated_phase += 0.5 * (f0 + f1) * (l1 - l0);
    }
    let (lo, hi) = (phase.lambda[0], phase.lambda[n - 1]);
    let bound_state_prediction = -mus.iter().map(|m| (hi / m).atan() - (lo / m).atan()).sum::<f64>() / pi;
    if used.is_empty() && !resonances.is_empty() {
        log::warn!("no resonance within cutoff {cutoff}");
    }
    Ok(BreitWignerReport {
        cutoff,
        resonances_used: used.len(),
        background,
        misfit,
        integrated_phase,
        bound_state_prediction,
        bound_states: mus.len(),
    })
}

/// `∫₀^∞ g'(λ) e^{-tλ²} dλ` for the odd polynomial `g(λ) = Σ_j coeffs[j] λ^j` of degree at most `n`.
pub fn weighted_phase_integral(coeffs: &[f64], t: f64, n: usize) -> Result<f64> {
    let degree = coeffs.iter().rposition(|&c| c != 0.0);
    if let Some(d) = degree {
        if d > n {
            return Err(invalid(format!("polynomial degree {d} exceeds {n}")));
        }
    }
    if coeffs.iter().enumerate().any(|(j, &c)| j % 2 == 0 && c != 0.0) {
        return Err(invalid("g must be odd: even-degree coefficients must vanish"));
    }
    let mut total = 0.0;
    for (j, &c) in coeffs.iter().enumerate() {
        if c != 0.0 {
            total += j as f64 * c * gamma_moment(j as u32 - 1, t)?;
        }
    }
    if degree.is_none() && !(t > 0.0) {
        return Err(invalid(format!("time {t} must be positive")));
    }
    Ok(total)
}
