use crate::duhamel::{multilinear_form_at, McValue};
use crate::error::{invalid, Result};
use crate::fields::{derivative, fourier, weighted_norm, Potential};
use crate::kernels::SimplexPoint;
use crate::rng::Stream;
use crate::scalar::Real;

/// Both sides of a Gagliardo–Nirenberg–Moser product estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GnmReport {
    /// `‖Π ∂^{α_j} u_j‖_{L¹}`.
    pub lhs: f64,
    /// `(Σ‖u_j‖_∞)^{k-2} (Σ‖|D|^m u_j‖₂)²`.
    pub rhs: f64,
    pub ratio: f64,
}

/// Evaluates the product estimate for `fields` differentiated by `alphas`
/// (one multi-index per field, total order `2m`, each at most `m`).
pub fn gnm_check<T: Real>(fields: &[&Potential<T>], alphas: &[Vec<u32>], m: u32) -> Result<GnmReport> {
    let k = fields.len();
    if k < 2 || alphas.len() != k {
        return Err(invalid("need at least two fields and one multi-index per field"));
    }
    let grid = *fields[0].grid();
    if fields.iter().any(|f| *f.grid() != grid) {
        return Err(invalid("all fields must share one grid"));
    }
    let orders: Vec<u32> = alphas.iter().map(|a| a.iter().sum()).collect();
    if orders.iter().sum::<u32>() != 2 * m || orders.iter().any(|&o| o > m) || alphas.iter().any(|a| a.len() > grid.dim()) {
        return Err(invalid(format!("multi-indices {alphas:?} must have total order {} and each order ≤ {m}", 2 * m)));
    }
    let mut sup = 0.0;
    let mut dm = 0.0;
    for f in fields {
        sup += f.linf_norm().f64();
        dm += weighted_norm(&fourier(*f), |xi2| xi2.powi(m as i32)).checked()?.sqrt();
    }
    let mut product = vec![1.0; grid.len()];
    for (f, a) in fields.iter().zip(alphas) {
        for (p, d) in product.iter_mut().zip(derivative(*f, a)) {
            *p *= d;
        }
    }
    let lhs = product.iter().map(|p| p.abs()).sum::<f64>() * grid.cell_volume();
    let rhs = sup.powi(k as i32 - 2) * dm * dm;
    let ratio = if rhs > 0.0 { lhs / rhs } else { 0.0 };
    Ok(GnmReport { lhs, rhs, ratio })
}

/// Outcome of one Hölder-type bound on the smoothed multilinear form.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HolderReport {
    pub form: McValue,
    /// `Π ‖v_j‖_{p_j}`.
    pub bound: f64,
    /// `bound - |form|`.
    pub margin: f64,
    /// `|form| ≤ bound + 3 SE`.
    pub holds: bool,
    /// False when the standard error exceeds a tenth of the bound.
    pub converged: bool,
}

/// Checks `|∫G_{r,t}(u') Π v_j| ≤ Π‖v_j‖_{p_j}` at a fixed `r ∈ Σ` for exponents with `Σ 1/p_j = 1`.
pub fn holder_pbound<T: Real>(
    fields: &[&Potential<T>],
    exponents: &[f64],
    r: &SimplexPoint<f64>,
    t: f64,
    samples: usize,
    stream: Stream,
) -> Result<HolderReport> {
    if exponents.len() != fields.len() {
        return Err(invalid("one exponent per field"));
    }
    if exponents.iter().any(|&p| !(p >= 2.0)) {
        return Err(invalid(format!("exponents {exponents:?} must lie in [2, ∞]")));
    }
    let dual: f64 = exponents.iter().map(|p| 1.0 / p).sum();
    if (dual - 1.0).abs() > 1e-12 {
        return Err(invalid(format!("exponents {exponents:?} have Σ1/p = {dual}, not 1")));
    }
    let form = multilinear_form_at(fields, r, t, samples, stream)?;
    let bound: f64 = fields.iter().zip(exponents).map(|(f, &p)| f.lp_norm(p).f64()).product();
    let margin = bound - form.value.abs();
    let holds = form.value.abs() <= bound + 3.0 * form.std_error;
    let converged = form.std_error <= 0.1 * bound.max(f64::MIN_POSITIVE) || form.samples == 0;
    if !converged {
        log::warn!("Hölder check: standard error {:.3e} against bound {bound:.3e}", form.std_error);
    }
    Ok(HolderReport { form, bound, margin, holds, converged })
}
