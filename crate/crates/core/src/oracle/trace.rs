use super::operator::{free_spectrum, DiscreteOperator};
use crate::error::{invalid, Error, Result};
use crate::fields::Potential;
use crate::scalar::Real;

/// Heat-trace difference with a resolution error bar.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleValue {
    pub value: f64,
    /// `|value(N) - value(N/2)|`.
    pub error_estimate: f64,
}

/// `Σ_j (e^{-tλ_j} - e^{-tμ_j})` pairing sorted perturbed and free eigenvalues.
pub fn trace_difference(perturbed: &[f64], free: &[f64], t: f64) -> f64 {
    perturbed
        .iter()
        .zip(free)
        .map(|(&l, &m)| (-t * m).exp() * (-t * (l - m)).exp_m1())
        .sum()
}

/// Discrete spectra of `P_V` at `N` and `N/2`, reusable across times.
#[derive(Clone, Debug)]
pub struct OracleSpectrum {
    pub fine: Vec<f64>,
    pub fine_free: Vec<f64>,
    pub coarse: Vec<f64>,
    pub coarse_free: Vec<f64>,
    support_radius: f64,
    half_width: f64,
}

impl OracleSpectrum {
    pub fn compute<T: Real>(v: &Potential<T>) -> Result<Self> {
        let coarse_pot = v.resampled(v.grid().points() / 2)?;
        let (fine, coarse) = rayon::join(
            || DiscreteOperator::new(v).eigenvalues(),
            || DiscreteOperator::new(&coarse_pot).eigenvalues(),
        );
        Ok(Self {
            fine: fine?,
            fine_free: free_spectrum(v.grid()),
            coarse: coarse?,
            coarse_free: free_spectrum(coarse_pot.grid()),
            support_radius: v.support_radius(),
            half_width: v.grid().half_width(),
        })
    }

    /// Largest `t` allowed by the boundary guard `6√(2t) + R < L`.
    pub fn max_time(&self) -> f64 {
        let room = (self.half_width - self.support_radius) / 6.0;
        0.5 * room * room
    }

    pub fn trace(&self, t: f64) -> Result<OracleValue> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(invalid(format!("time {t} must be positive")));
        }
        if 6.0 * (2.0 * t).sqrt() + self.support_radius >= self.half_width {
            return Err(Error::GuardViolated(format!(
                "heat spread 6√(2t) = {:.3} plus support radius {:.3} reaches the box half-width {:.3}",
                6.0 * (2.0 * t).sqrt(),
                self.support_radius,
                self.half_width
            )));
        }
        let value = trace_difference(&self.fine, &self.fine_free, t);
        let coarse = trace_difference(&self.coarse, &self.coarse_free, t);
        Ok(OracleValue { value, error_estimate: (value - coarse).abs() })
    }
}

/// `tr(e^{-tP_V} - e^{-tP₀})` by dense eigendecomposition on the periodic box.
pub fn heat_trace_direct<T: Real>(v: &Potential<T>, t: f64) -> Result<OracleValue> {
    if v.is_zero() {
        return Ok(OracleValue { value: 0.0, error_estimate: 0.0 });
    }
    let spectrum = OracleSpectrum::compute(v)?;
    spectrum.trace(t)
}

/// Negative eigenvalues `-μ_k²` of the discretised operator.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundStateSet {
    /// Sorted increasingly.
    pub eigenvalues: Vec<f64>,
    /// Per eigenvalue: `|λ(N) - λ(N/2)|`, or infinity when the counts differ.
    pub richardson_error: Vec<f64>,
    /// Per eigenvalue: periodic-image coupling `e^{-2μ(L-R)}` above `1e-6`,
    /// which includes eigenvalues too close to zero for the box.
    pub resolution_limited: Vec<bool>,
}

impl BoundStateSet {
    pub fn count(&self) -> usize {
        self.eigenvalues.len()
    }

    /// `μ_k = √|λ_k|`.
    pub fn mus(&self) -> Vec<f64> {
        self.eigenvalues.iter().map(|e| (-e).sqrt()).collect()
    }
}

pub fn bound_states<T: Real>(v: &Potential<T>) -> Result<BoundStateSet> {
    if v.linf_norm() == T::zero() || v.values().iter().all(|&x| x >= T::zero()) {
        return Ok(BoundStateSet { eigenvalues: vec![], richardson_error: vec![], resolution_limited: vec![] });
    }
    let spectrum = OracleSpectrum::compute(v)?;
    Ok(bound_states_from(&spectrum))
}

pub fn bound_states_from(spectrum: &OracleSpectrum) -> BoundStateSet {
    let fine: Vec<f64> = spectrum.fine.iter().copied().filter(|&e| e < 0.0).collect();
    let coarse: Vec<f64> = spectrum.coarse.iter().copied().filter(|&e| e < 0.0).collect();
    let richardson_error = fine
        .iter()
        .enumerate()
        .map(|(i, e)| if fine.len() == coarse.len() { (e - coarse[i]).abs() } else { f64::INFINITY })
        .collect();
    let room = spectrum.half_width - spectrum.support_radius;
    let resolution_limited = fine.iter().map(|e| (-2.0 * (-e).sqrt() * room).exp() > 1e-6).collect();
    BoundStateSet { eigenvalues: fine, richardson_error, resolution_limited }
}
