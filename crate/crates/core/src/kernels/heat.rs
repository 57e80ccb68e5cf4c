use crate::error::{invalid, Result};
use crate::fields::SpectralRep;
use crate::scalar::Real;

/// Free heat flow `e^{-sP₀}` on the dual grid: multiplies `V̂(ξ)` by `e^{-s|ξ|²}`.
pub fn heat_propagate<T: Real>(field: &SpectralRep<T>, s: f64) -> Result<SpectralRep<T>> {
    if !(s >= 0.0 && s.is_finite()) {
        return Err(invalid(format!("heat time {s} must be nonnegative")));
    }
    if s == 0.0 {
        return Ok(field.clone());
    }
    Ok(field.map_radial(|xi2| (-s * xi2).exp()))
}
