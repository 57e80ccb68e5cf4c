use super::potential::Potential;
use crate::error::{invalid, Error, Result};
use crate::scalar::Real;

/// Discrete mollifier: the compact bump `exp(-1/(1-|x/ε|²))` on the grid, normalised to unit sum.
///
/// Returns per-sample offsets (in cells, one entry per axis) and weights.
fn mollifier_stencil(dim: usize, h: f64, eps: f64) -> (Vec<[i64; 3]>, Vec<f64>) {
    let reach = (eps / h).ceil() as i64;
    let mut offsets = Vec::new();
    let mut weights = Vec::new();
    let side = 2 * reach + 1;
    for s in 0..side.pow(dim as u32) {
        let mut rest = s;
        let mut o = [0i64; 3];
        let mut r2 = 0.0;
        for item in o.iter_mut().take(dim) {
            *item = rest % side - reach;
            rest /= side;
            r2 += (*item as f64 * h / eps).powi(2);
        }
        if r2 < 1.0 {
            offsets.push(o);
            weights.push((-1.0 / (1.0 - r2)).exp());
        }
    }
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    (offsets, weights)
}

/// `V_ε = φ_ε ∗ V` by direct discrete convolution.
///
/// The stencil is nonnegative with unit sum, so the sup norm and every
/// Fourier-weighted norm contract exactly on the grid. Support grows by `ε`.
pub fn mollify<T: Real>(p: &Potential<T>, eps: f64) -> Result<Potential<T>> {
    let grid = *p.grid();
    let h = grid.spacing();
    if !(eps.is_finite() && eps >= 2.0 * h) {
        return Err(invalid(format!("mollifier width {eps} below grid resolution 2h = {}", 2.0 * h)));
    }
    if p.is_zero() {
        return Ok(p.clone());
    }
    let radius = p.support_radius() + eps;
    if radius > grid.guard_radius() {
        return Err(Error::SupportExceedsGuard { radius, limit: grid.guard_radius() });
    }
    let dim = grid.dim();
    let n = grid.points() as i64;
    let (offsets, weights) = mollifier_stencil(dim, h, eps);
    let mut acc = vec![0.0f64; grid.len()];
    let mut idx = [0usize; 3];
    let mut tgt = [0usize; 3];
    for src in p.support_indices() {
        let v = p.values()[src].f64();
        grid.unravel(src, &mut idx[..dim]);
        for (o, &w) in offsets.iter().zip(&weights) {
            for d in 0..dim {
                tgt[d] = (idx[d] as i64 + o[d]).rem_euclid(n) as usize;
            }
            acc[grid.ravel(&tgt[..dim])] += w * v;
        }
    }
    // Exact arithmetic cannot leave [-‖V‖∞, ‖V‖∞]; clamp away the rounding.
    let bound = p.linf_norm().f64();
    Potential::from_values(grid, acc.into_iter().map(|x| T::lit(x.clamp(-bound, bound))).collect(), radius)
}
