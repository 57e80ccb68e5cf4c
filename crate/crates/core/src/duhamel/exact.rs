use crate::error::{invalid, Error, Result};
use crate::fields::{fourier, Potential, ALIASING_LIMIT};
use crate::quad::gauss_legendre;
use crate::scalar::Real;

pub(crate) fn check_time(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("time {t} must be positive and finite")))
    }
}

/// `(4πt)^{-n/2}`.
pub fn free_factor(t: f64, dim: usize) -> f64 {
    (4.0 * std::f64::consts::PI * t).powf(-0.5 * dim as f64)
}

/// `tr W₁(t) = (4πt)^{-n/2} t ∫V` (unsigned).
pub fn trace_w1<T: Real>(v: &Potential<T>, t: f64) -> Result<T> {
    check_time(t)?;
    Ok(v.integral() * T::lit(free_factor(t, v.dim()) * t))
}

/// `|V̂|²` collapsed onto distinct `|ξ|²` values, with the measure `(2π)^{-n}(π/L)^n` folded in.
#[derive(Clone, Debug)]
pub struct PowerSpectrum {
    pub xi2: Vec<f64>,
    pub mass: Vec<f64>,
    /// Share of `Σ|V̂|²` at `|ξ| ≥ 0.9 ξ_max`.
    pub tail_fraction: f64,
    pub max_xi2: f64,
}

impl PowerSpectrum {
    pub fn new<T: Real>(v: &Potential<T>) -> Self {
        let rep = fourier(v);
        let grid = *v.grid();
        let scale = grid.dual_cell_volume() / (2.0 * std::f64::consts::PI).powi(grid.dim() as i32);
        let mut pairs: Vec<(f64, f64)> = rep
            .coeffs()
            .iter()
            .enumerate()
            .map(|(k, c)| (grid.frequency_norm_sq(k), c.norm_sqr().f64() * scale))
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let cut = (0.9 * grid.max_frequency()).powi(2);
        let total: f64 = pairs.iter().map(|p| p.1).sum();
        let tail: f64 = pairs.iter().filter(|p| p.0 >= cut).map(|p| p.1).sum();
        let mut xi2 = Vec::new();
        let mut mass: Vec<f64> = Vec::new();
        for (x, m) in pairs {
            if xi2.last() == Some(&x) {
                *mass.last_mut().unwrap() += m;
            } else {
                xi2.push(x);
                mass.push(m);
            }
        }
        let max_xi2 = xi2.last().copied().unwrap_or(0.0);
        Self { xi2, mass, tail_fraction: if total > 0.0 { tail / total } else { 0.0 }, max_xi2 }
    }

    /// `(2π)^{-n}∫ w(|ξ|²) |V̂|² dξ` on the dual grid.
    pub fn integrate(&self, w: impl Fn(f64) -> f64) -> f64 {
        self.xi2.iter().zip(&self.mass).map(|(&x, &m)| w(x) * m).sum()
    }

    /// `F(s) = (2π)^{-n}∫ e^{-s|ξ|²}|V̂|² dξ`.
    pub fn heat(&self, s: f64) -> f64 {
        self.integrate(|x| (-s * x).exp())
    }

    pub fn check_aliasing(&self) -> Result<()> {
        if self.tail_fraction > ALIASING_LIMIT {
            Err(Error::Aliasing { fraction: self.tail_fraction, limit: ALIASING_LIMIT })
        } else {
            Ok(())
        }
    }
}

/// Nodes and weights for `∫₀¹ g(v) dv` with `g` symmetric under `v → 1-v`:
/// Gauss–Legendre panels on `[0, ½]`, halving toward `v = 0` until
/// `v · scale < 1e-3`, weights doubled. Suits integrands with an endpoint
/// layer of width `~1/scale`.
pub fn symmetric_v_rule(scale: f64, order: usize) -> Vec<(f64, f64)> {
    let mut edges = vec![0.5];
    let mut x = 0.5;
    while x * scale > 1e-3 && x > 1e-300 {
        x *= 0.5;
        edges.push(x);
    }
    edges.push(0.0);
    edges.reverse();
    let (nodes, weights) = gauss_legendre(order);
    let mut out = Vec::with_capacity((edges.len() - 1) * order);
    for p in edges.windows(2) {
        let half = 0.5 * (p[1] - p[0]);
        let mid = 0.5 * (p[1] + p[0]);
        for (xi, wi) in nodes.iter().zip(&weights) {
            out.push((mid + half * xi, 2.0 * half * wi));
        }
    }
    out
}

/// The symmetric `v`-integral at `order` nodes per panel, with the difference
/// to the half-order rule as error estimate.
pub fn symmetric_v_integral(g: impl Fn(f64) -> f64, scale: f64, order: usize) -> (f64, f64) {
    let fine: f64 = symmetric_v_rule(scale, order).iter().map(|&(v, w)| w * g(v)).sum();
    let coarse: f64 = symmetric_v_rule(scale, order / 2).iter().map(|&(v, w)| w * g(v)).sum();
    (fine, (fine - coarse).abs())
}

/// Result of the spectral evaluation of `tr W₂`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct W2Value {
    pub value: f64,
    /// Absolute quadrature error estimate.
    pub error_estimate: f64,
    pub tail_fraction: f64,
}

/// `tr W₂(t) = ½t²(4πt)^{-n/2} ∫₀¹ (2π)^{-n}∫ e^{-t(1-v)v|ξ|²}|V̂(ξ)|² dξ dv` (unsigned).
pub fn trace_w2<T: Real>(v: &Potential<T>, t: f64) -> Result<W2Value> {
    check_time(t)?;
    let spec = PowerSpectrum::new(v);
    spec.check_aliasing()?;
    Ok(trace_w2_from(&spec, t, v.dim()))
}

pub fn trace_w2_from(spec: &PowerSpectrum, t: f64, dim: usize) -> W2Value {
    let (integral, err) = symmetric_v_integral(|v| spec.heat(t * v * (1.0 - v)), t * spec.max_xi2, 32);
    let pre = 0.5 * t * t * free_factor(t, dim);
    W2Value { value: pre * integral, error_estimate: pre * err, tail_fraction: spec.tail_fraction }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{GridSpec, Shape};

    #[test]
    fn w1_closed_form() {
        let g = GridSpec::new(1, 8.0, 1024).unwrap();
        let p: Potential<f64> = Potential::from_shape(g, Shape::Well { depth: 1.0, half_width: 1.0 }).unwrap();
        let v = trace_w1(&p, 0.01).unwrap();
        let expect = (4.0 * std::f64::consts::PI * 0.01f64).powf(-0.5) * 0.01 * -2.0;
        assert!((v - expect).abs() < 1e-14);
        assert!(trace_w1(&p, 0.0).is_err());
    }

    #[test]
    fn v_integral_of_polynomial() {
        let (v, e) = symmetric_v_integral(|v| (v * (1.0 - v)).powi(3), 1e6, 32);
        assert!((v - 1.0 / 140.0).abs() < 1e-15);
        assert!(e < 1e-15);
    }
}
