use crate::error::{invalid, Result};
use crate::quad::adaptive_gk;

/// `Γ(k/2)` for a positive integer `k`, by the half-integer recursion.
pub fn gamma_half(k: u32) -> f64 {
    assert!(k >= 1);
    let (mut g, mut x) = if k % 2 == 0 { (1.0, 1.0) } else { (std::f64::consts::PI.sqrt(), 0.5) };
    let target = k as f64 / 2.0;
    while x < target {
        g *= x;
        x += 1.0;
    }
    g
}

/// `∫₀^∞ λ^k e^{-tλ²} dλ = ½ Γ((k+1)/2) t^{-(k+1)/2}`.
pub fn gamma_moment(k: u32, t: f64) -> Result<f64> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(invalid(format!("gamma_moment needs t > 0, got {t}")));
    }
    Ok(0.5 * gamma_half(k + 1) * t.powf(-0.5 * (k as f64 + 1.0)))
}

/// Value of `I(s) = (1/π)∫₀^∞ e^{-sr²}/(1+r²) dr` and of its small-`s` residual.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HalfBound {
    pub s: f64,
    pub value: f64,
    /// `I(s) - ½eˢ`, which behaves like `b₀ √s` as `s → 0`.
    pub residual: f64,
    pub error_estimate: f64,
}

/// Quadrature of `I(s)` on `[0, 40/√s]` with the Gaussian tail bounded analytically.
pub fn half_bound_expansion(s: f64) -> Result<HalfBound> {
    if !(s > 0.0 && s <= 1.0) {
        return Err(invalid(format!("half_bound_expansion needs 0 < s ≤ 1, got {s}")));
    }
    let cut = 40.0 / s.sqrt();
    let f = |r: f64| (-s * r * r).exp() / (1.0 + r * r);
    // Split at the Lorentzian scale so the adaptive rule sees both regimes.
    let (a, ea) = adaptive_gk(f, 0.0, 1.0, 1e-16, 1e-14)?;
    let (b, eb) = adaptive_gk(f, 1.0, cut, 1e-16, 1e-14)?;
    // ∫_X^∞ e^{-sr²}/(1+r²) ≤ e^{-sX²}/(2 s X³).
    let tail = (-s * cut * cut).exp() / (2.0 * s * cut.powi(3));
    let value = (a + b) / std::f64::consts::PI;
    Ok(HalfBound {
        s,
        value,
        residual: value - 0.5 * s.exp(),
        error_estimate: (ea + eb + tail) / std::f64::consts::PI,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_half_values() {
        assert!((gamma_half(1) - std::f64::consts::PI.sqrt()).abs() < 1e-15);
        assert_eq!(gamma_half(2), 1.0);
        assert_eq!(gamma_half(8), 6.0);
        assert!((gamma_half(5) - 0.75 * std::f64::consts::PI.sqrt()).abs() < 1e-15);
    }
}
