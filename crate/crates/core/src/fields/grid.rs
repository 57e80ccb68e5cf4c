use crate::error::{Error, Result};

/// Uniform periodic grid on the box `[-L, L)^n` with `N` points per axis.
///
/// Points are cell centres, `x_j = -L + (j + 1/2) h` with `h = 2L/N`, so the
/// box splits into `N` cells that are symmetric about the origin. The dual
/// grid holds `ξ_k = π k / L` for `k ∈ [-N/2, N/2)`, stored in FFT order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    dim: usize,
    half_width: f64,
    points: usize,
}

impl GridSpec {
    pub fn new(dim: usize, half_width: f64, points: usize) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::InvalidGrid(format!("dimension {dim} not in 1..=3")));
        }
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::InvalidGrid(format!("half width {half_width} must be positive")));
        }
        if points < 16 || points % 2 != 0 {
            return Err(Error::InvalidGrid(format!("N = {points} must be even and at least 16")));
        }
        Ok(Self { dim, half_width, points })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.points as f64
    }

    /// `h^n`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// Dual spacing raised to the dimension, `(π/L)^n`.
    pub fn dual_cell_volume(&self) -> f64 {
        (std::f64::consts::PI / self.half_width).powi(self.dim as i32)
    }

    /// Total number of samples, `N^n`.
    pub fn len(&self) -> usize {
        self.points.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Largest support radius allowed by the periodisation guard, `3L/4`.
    pub fn guard_radius(&self) -> f64 {
        0.75 * self.half_width
    }

    /// Same box, different resolution.
    pub fn with_points(&self, points: usize) -> Result<Self> {
        Self::new(self.dim, self.half_width, points)
    }

    pub fn coordinate(&self, j: usize) -> f64 {
        -self.half_width + (j as f64 + 0.5) * self.spacing()
    }

    /// Signed frequency index for FFT slot `k`.
    pub fn signed_index(&self, k: usize) -> i64 {
        let n = self.points as i64;
        let k = k as i64;
        if k < n / 2 {
            k
        } else {
            k - n
        }
    }

    pub fn frequency(&self, k: usize) -> f64 {
        std::f64::consts::PI * self.signed_index(k) as f64 / self.half_width
    }

    /// Nyquist frequency `π N / (2L)`.
    pub fn max_frequency(&self) -> f64 {
        std::f64::consts::PI * self.points as f64 / (2.0 * self.half_width)
    }

    /// Splits a row-major flat index into per-axis indices (first axis slowest).
    pub fn unravel(&self, mut flat: usize, out: &mut [usize]) {
        for d in (0..self.dim).rev() {
            out[d] = flat % self.points;
            flat /= self.points;
        }
    }

    pub fn ravel(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &i| acc * self.points + i)
    }

    /// Spatial position of the flat sample `flat`.
    pub fn position(&self, flat: usize, out: &mut [f64]) {
        let mut idx = [0usize; 3];
        self.unravel(flat, &mut idx[..self.dim]);
        for d in 0..self.dim {
            out[d] = self.coordinate(idx[d]);
        }
    }

    /// `|ξ|²` at the flat dual index.
    pub fn frequency_norm_sq(&self, flat: usize) -> f64 {
        let mut idx = [0usize; 3];
        self.unravel(flat, &mut idx[..self.dim]);
        idx[..self.dim].iter().map(|&k| self.frequency(k).powi(2)).sum()
    }

    /// `|ξ|²` for every dual sample, in storage order.
    pub fn frequency_norms_sq(&self) -> Vec<f64> {
        (0..self.len()).map(|k| self.frequency_norm_sq(k)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_grids() {
        assert!(GridSpec::new(1, 8.0, 15).is_err());
        assert!(GridSpec::new(1, 8.0, 8).is_err());
        assert!(GridSpec::new(4, 8.0, 16).is_err());
        assert!(GridSpec::new(1, -1.0, 16).is_err());
    }

    #[test]
    fn cells_are_symmetric() {
        let g = GridSpec::new(1, 8.0, 64).unwrap();
        for j in 0..64 {
            assert_eq!(g.coordinate(j), -g.coordinate(63 - j));
        }
        assert_eq!(g.signed_index(32), -32);
        assert_eq!(g.frequency(1), std::f64::consts::PI / 8.0);
    }

    #[test]
    fn ravel_round_trip() {
        let g = GridSpec::new(3, 1.0, 16).unwrap();
        let mut idx = [0; 3];
        for flat in [0, 17, 300, 4095] {
            g.unravel(flat, &mut idx);
            assert_eq!(g.ravel(&idx), flat);
        }
    }
}
