use faer::Mat;
use num_complex::Complex;
use rustfft::FftDirection;

use crate::error::{Error, Result};
use crate::fields::{fft_nd, GridSpec, Potential};
use crate::scalar::Real;

/// Largest `N^n` realised as a dense matrix.
pub const MAX_DENSE: usize = 4096;

/// `P_V = -Δ + V` on the periodic grid: Fourier multiplier `|ξ|²` plus diagonal `V`.
#[derive(Clone, Debug)]
pub struct DiscreteOperator {
    grid: GridSpec,
    potential: Vec<f64>,
}

/// First row of the 1D circulant with symbol `ξ_k²`.
fn laplacian_row(grid: &GridSpec) -> Vec<f64> {
    let g1 = GridSpec::new(1, grid.half_width(), grid.points()).expect("valid axis grid");
    let n = g1.points();
    let mut data: Vec<Complex<f64>> = (0..n).map(|k| Complex::new(g1.frequency(k).powi(2), 0.0)).collect();
    fft_nd(&mut data, &g1, FftDirection::Inverse);
    data.iter().map(|c| c.re / n as f64).collect()
}

impl DiscreteOperator {
    pub fn new<T: Real>(v: &Potential<T>) -> Self {
        Self { grid: *v.grid(), potential: v.values().iter().map(|x| x.f64()).collect() }
    }

    pub fn free(grid: GridSpec) -> Self {
        Self { grid, potential: vec![0.0; grid.len()] }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    /// Matrix-free application `P_V u`.
    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        let mut data: Vec<Complex<f64>> = u.iter().map(|&x| Complex::new(x, 0.0)).collect();
        fft_nd(&mut data, &self.grid, FftDirection::Forward);
        for (k, c) in data.iter_mut().enumerate() {
            *c *= self.grid.frequency_norm_sq(k);
        }
        fft_nd(&mut data, &self.grid, FftDirection::Inverse);
        let scale = 1.0 / self.grid.len() as f64;
        data.iter().zip(u).zip(&self.potential).map(|((c, &x), &v)| c.re * scale + v * x).collect()
    }

    /// Dense realisation, row-major entries through `entry(i, j)`.
    pub fn dense(&self) -> Result<Mat<f64>> {
        let len = self.grid.len();
        if len > MAX_DENSE {
            return Err(Error::Unsupported(format!("dense operator of size {len} exceeds {MAX_DENSE}")));
        }
        let row = laplacian_row(&self.grid);
        let n = self.grid.points();
        let dim = self.grid.dim();
        if dim == 1 {
            return Ok(Mat::from_fn(len, len, |i, j| {
                row[(i + n - j) % n] + if i == j { self.potential[i] } else { 0.0 }
            }));
        }
        Ok(Mat::from_fn(len, len, |i, j| {
            let mut ii = [0usize; 3];
            let mut jj = [0usize; 3];
            self.grid.unravel(i, &mut ii[..dim]);
            self.grid.unravel(j, &mut jj[..dim]);
            let mut differing = None;
            let mut count = 0;
            for d in 0..dim {
                if ii[d] != jj[d] {
                    count += 1;
                    differing = Some(d);
                }
            }
            let lap = match (count, differing) {
                (0, _) => dim as f64 * row[0],
                (1, Some(d)) => row[(ii[d] + n - jj[d]) % n],
                _ => 0.0,
            };
            lap + if i == j { self.potential[i] } else { 0.0 }
        }))
    }

    /// Whether `V` is invariant under `x → -x`.
    fn is_even(&self) -> bool {
        let len = self.potential.len();
        (0..len / 2).all(|i| self.potential[i] == self.potential[len - 1 - i])
    }

    /// Sorted eigenvalues of the dense operator.
    ///
    /// For inversion-symmetric `V` the matrix splits into even and odd
    /// blocks of half size (the cell-centred grid has no fixed points).
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let h = self.dense()?;
        let len = self.grid.len();
        let mut ev = if self.is_even() {
            let half = len / 2;
            let mut out = Vec::with_capacity(len);
            for sign in [1.0, -1.0] {
                let block = Mat::from_fn(half, half, |i, j| h[(i, j)] + sign * h[(i, len - 1 - j)]);
                out.extend(eig(&block)?);
            }
            out
        } else {
            eig(&h)?
        };
        ev.sort_by(f64::total_cmp);
        Ok(ev)
    }
}

fn eig(m: &Mat<f64>) -> Result<Vec<f64>> {
    m.self_adjoint_eigenvalues(faer::Side::Lower).map_err(|e| Error::Eigensolver(format!("{e:?}")))
}

/// Eigenvalues of `-Δ` on the grid, `|ξ|²` over the dual grid, sorted.
pub fn free_spectrum(grid: &GridSpec) -> Vec<f64> {
    let mut ev = grid.frequency_norms_sq();
    ev.sort_by(f64::total_cmp);
    ev
}
