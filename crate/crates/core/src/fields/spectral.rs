use num_complex::Complex;
use rustfft::{FftDirection, FftPlanner};

use super::grid::GridSpec;
use super::potential::Potential;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Unnormalised in-place DFT along every axis of a row-major `N^n` array.
pub fn fft_nd<T: Real>(data: &mut [Complex<T>], grid: &GridSpec, direction: FftDirection) {
    let n = grid.points();
    let dim = grid.dim();
    let mut planner = FftPlanner::<T>::new();
    let fft = planner.plan_fft(n, direction);
    let mut line = vec![Complex::new(T::zero(), T::zero()); n];
    let mut scratch = vec![Complex::new(T::zero(), T::zero()); fft.get_inplace_scratch_len()];
    for axis in 0..dim {
        let stride = n.pow((dim - 1 - axis) as u32);
        let block = stride * n;
        for start in (0..data.len()).step_by(block) {
            for offset in 0..stride {
                let base = start + offset;
                for (i, c) in line.iter_mut().enumerate() {
                    *c = data[base + i * stride];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (i, c) in line.iter().enumerate() {
                    data[base + i * stride] = *c;
                }
            }
        }
    }
}

/// Phase linking the DFT of cell-centred samples to `Σ e^{-i x·ξ} V(x)`, per axis.
fn axis_phase<T: Real>(grid: &GridSpec, k: usize) -> Complex<T> {
    let m = grid.signed_index(k);
    let theta = -std::f64::consts::PI * m as f64 / grid.points() as f64;
    let sign = if m.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    Complex::new(T::lit(sign * theta.cos()), T::lit(sign * theta.sin()))
}

fn phases<T: Real>(grid: &GridSpec) -> Vec<Complex<T>> {
    let axis: Vec<Complex<T>> = (0..grid.points()).map(|k| axis_phase(grid, k)).collect();
    let mut idx = [0usize; 3];
    (0..grid.len())
        .map(|flat| {
            grid.unravel(flat, &mut idx[..grid.dim()]);
            idx[..grid.dim()].iter().fold(Complex::new(T::one(), T::zero()), |acc, &k| acc * axis[k])
        })
        .collect()
}

/// Discrete Fourier transform `V̂(ξ) = h^n Σ_x e^{-i x·ξ} V(x)` on the dual grid (FFT order).
#[derive(Clone, Debug)]
pub struct SpectralRep<T: Real> {
    grid: GridSpec,
    coeffs: Vec<Complex<T>>,
}

impl<T: Real> SpectralRep<T> {
    pub fn from_coeffs(grid: GridSpec, coeffs: Vec<Complex<T>>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::Format(format!("expected {} coefficients, got {}", grid.len(), coeffs.len())));
        }
        Ok(Self { grid, coeffs })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    /// Samples `|V̂|²`.
    pub fn power(&self) -> Vec<T> {
        self.coeffs.iter().map(|c| c.norm_sqr()).collect()
    }

    /// Multiplies each coefficient by `f(|ξ|²)`.
    pub fn map_radial(&self, f: impl Fn(f64) -> f64) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, &c)| c * T::lit(f(self.grid.frequency_norm_sq(k))))
            .collect();
        Self { grid: self.grid, coeffs }
    }

    /// Complex samples `h^{-n} N^{-n} Σ_ξ e^{i x·ξ} V̂(ξ)`.
    pub fn inverse_complex(&self) -> Vec<Complex<T>> {
        let ph = phases::<T>(&self.grid);
        let mut data: Vec<Complex<T>> = self.coeffs.iter().zip(&ph).map(|(c, p)| c * p.conj()).collect();
        fft_nd(&mut data, &self.grid, FftDirection::Inverse);
        let scale = T::lit(1.0 / (self.grid.len() as f64 * self.grid.cell_volume()));
        data.iter_mut().for_each(|c| *c = *c * scale);
        data
    }

    /// Real part of the inverse transform.
    pub fn inverse(&self) -> Vec<T> {
        self.inverse_complex().into_iter().map(|c| c.re).collect()
    }

    /// Largest violation of `V̂(-ξ) = conj V̂(ξ)` relative to `max |V̂|`, skipping Nyquist slots.
    pub fn conjugate_symmetry_defect(&self) -> f64 {
        let n = self.grid.points();
        let dim = self.grid.dim();
        let scale = self.coeffs.iter().map(|c| c.norm().f64()).fold(0.0, f64::max);
        if scale == 0.0 {
            return 0.0;
        }
        let mut idx = [0usize; 3];
        let mut worst: f64 = 0.0;
        for flat in 0..self.coeffs.len() {
            self.grid.unravel(flat, &mut idx[..dim]);
            if idx[..dim].iter().any(|&k| k == n / 2) {
                continue;
            }
            for k in idx[..dim].iter_mut() {
                *k = (n - *k) % n;
            }
            let mirror = self.coeffs[self.grid.ravel(&idx[..dim])];
            worst = worst.max((self.coeffs[flat] - mirror.conj()).norm().f64());
        }
        worst / scale
    }
}

/// Forward transform of a potential.
pub fn fourier<T: Real>(p: &Potential<T>) -> SpectralRep<T> {
    let grid = *p.grid();
    let mut data: Vec<Complex<T>> = p.values().iter().map(|&v| Complex::new(v, T::zero())).collect();
    fft_nd(&mut data, &grid, FftDirection::Forward);
    let ph = phases::<T>(&grid);
    let hn = T::lit(grid.cell_volume());
    for (c, p) in data.iter_mut().zip(&ph) {
        *c = *c * *p * hn;
    }
    SpectralRep { grid, coeffs: data }
}

/// Spectral derivative `∂^α V` sampled on the grid (`alpha` has one order per axis).
///
/// Odd derivatives of the Nyquist mode are dropped so the result stays real.
pub fn derivative<T: Real>(p: &Potential<T>, alpha: &[u32]) -> Vec<f64> {
    let grid = *p.grid();
    let dim = grid.dim();
    if alpha.iter().all(|&a| a == 0) {
        return p.values().iter().map(|v| v.f64()).collect();
    }
    let mut data: Vec<Complex<f64>> = p.values().iter().map(|v| Complex::new(v.f64(), 0.0)).collect();
    fft_nd(&mut data, &grid, FftDirection::Forward);
    let n = grid.points();
    let mut idx = [0usize; 3];
    for (flat, c) in data.iter_mut().enumerate() {
        grid.unravel(flat, &mut idx[..dim]);
        let mut factor = Complex::new(1.0, 0.0);
        for d in 0..dim {
            let a = alpha.get(d).copied().unwrap_or(0);
            if a == 0 {
                continue;
            }
            if idx[d] == n / 2 && a % 2 == 1 {
                factor = Complex::new(0.0, 0.0);
                break;
            }
            factor *= Complex::new(0.0, grid.frequency(idx[d])).powu(a);
        }
        *c *= factor;
    }
    fft_nd(&mut data, &grid, FftDirection::Inverse);
    let scale = 1.0 / grid.len() as f64;
    data.iter().map(|c| c.re * scale).collect()
}

/// `(2π)^{-n} Σ_ξ f(|ξ|²) |V̂(ξ)|² (π/L)^n`, the dual-grid quadrature of a radial weight.
pub fn spectral_integral<T: Real>(rep: &SpectralRep<T>, f: impl Fn(f64) -> f64) -> f64 {
    let grid = rep.grid();
    let w = grid.dual_cell_volume() / (2.0 * std::f64::consts::PI).powi(grid.dim() as i32);
    let s: f64 = rep
        .coeffs()
        .iter()
        .enumerate()
        .map(|(k, c)| f(grid.frequency_norm_sq(k)) * c.norm_sqr().f64())
        .sum();
    s * w
}
