use super::potential::Potential;
use super::spectral::{fourier, SpectralRep};
use crate::error::{invalid, Error, Result};
use crate::scalar::Real;

/// Fraction of the integrand mass above which the top decile of `|ξ|` flags aliasing.
pub const ALIASING_LIMIT: f64 = 0.01;

/// A spectral quadratic quantity together with its aliasing diagnostic.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralNorm {
    /// The squared norm.
    pub squared: f64,
    /// Share of the integrand carried by `|ξ| ≥ 0.9 ξ_max`.
    pub tail_fraction: f64,
}

impl SpectralNorm {
    pub fn aliased(&self) -> bool {
        self.tail_fraction > ALIASING_LIMIT
    }

    /// Turns the diagnostic into an error when the tail is too heavy.
    pub fn checked(self) -> Result<f64> {
        if self.aliased() {
            Err(Error::Aliasing { fraction: self.tail_fraction, limit: ALIASING_LIMIT })
        } else {
            Ok(self.squared)
        }
    }
}

/// `(2π)^{-n} Σ w(|ξ|²)|V̂|² (π/L)^n` with the tail share of the integrand.
pub fn weighted_norm<T: Real>(rep: &SpectralRep<T>, w: impl Fn(f64) -> f64) -> SpectralNorm {
    let grid = rep.grid();
    let cut = (0.9 * grid.max_frequency()).powi(2);
    let scale = grid.dual_cell_volume() / (2.0 * std::f64::consts::PI).powi(grid.dim() as i32);
    let (mut total, mut tail) = (0.0, 0.0);
    for (k, c) in rep.coeffs().iter().enumerate() {
        let xi2 = grid.frequency_norm_sq(k);
        let v = w(xi2) * c.norm_sqr().f64();
        total += v;
        if xi2 >= cut {
            tail += v;
        }
    }
    let tail_fraction = if total > 0.0 { tail / total } else { 0.0 };
    SpectralNorm { squared: total * scale, tail_fraction }
}

/// Homogeneous `‖|D|^s V‖²_{L²} = (2π)^{-n}∫|ξ|^{2s}|V̂|² dξ`.
///
/// A heavy spectral tail is logged as a warning; inspect `tail_fraction`
/// or call [`SpectralNorm::checked`] to make it fatal.
pub fn sobolev_norm<T: Real>(p: &Potential<T>, s: f64) -> Result<SpectralNorm> {
    if !(s >= 0.0 && s.is_finite()) {
        return Err(invalid(format!("Sobolev order {s} must be a nonnegative real")));
    }
    let out = weighted_norm(&fourier(p), |xi2| if s == 0.0 { 1.0 } else { xi2.powf(s) });
    if out.aliased() {
        log::warn!("sobolev_norm(s = {s}): {:.2}% of the mass sits near the Nyquist frequency", 100.0 * out.tail_fraction);
    }
    Ok(out)
}

/// Inhomogeneous `‖V‖²_{H^m} = (2π)^{-n}∫(1 + |ξ|²)^m |V̂|² dξ`.
pub fn hm_norm<T: Real>(p: &Potential<T>, m: u32) -> SpectralNorm {
    weighted_norm(&fourier(p), |xi2| (1.0 + xi2).powi(m as i32))
}
