use rand::Rng;

use crate::error::{invalid, Result};
use crate::scalar::Real;

/// Gaps below this are treated as degenerate.
pub const MIN_GAP: f64 = 1e-12;

/// A point `0 < r₁ < … < r_k < 1` of the time simplex `Σ`.
#[derive(Clone, Debug, PartialEq)]
pub struct SimplexPoint<T: Real> {
    r: Vec<T>,
}

impl<T: Real> SimplexPoint<T> {
    pub fn new(r: Vec<T>) -> Result<Self> {
        if r.len() < 2 {
            return Err(invalid("a simplex point needs k ≥ 2 coordinates"));
        }
        let gap = T::lit(MIN_GAP);
        if r[0] <= T::zero() || *r.last().unwrap() >= T::one() {
            return Err(invalid("simplex coordinates must lie in (0, 1)"));
        }
        if r.windows(2).any(|w| w[1] - w[0] < gap) {
            return Err(invalid("simplex coordinates must increase by at least 1e-12"));
        }
        if T::one() + r[0] - *r.last().unwrap() < gap {
            return Err(invalid("wrap-around gap 1 + r₁ - r_k below 1e-12"));
        }
        Ok(Self { r })
    }

    /// Uniform draw on `Σ`: sorted uniforms, resampled when a gap is degenerate.
    pub fn sample<R: Rng + ?Sized>(k: usize, rng: &mut R) -> Self {
        assert!(k >= 2);
        loop {
            let mut r: Vec<f64> = (0..k).map(|_| rng.random::<f64>()).collect();
            r.sort_by(f64::total_cmp);
            if let Ok(p) = Self::new(r.into_iter().map(T::lit).collect()) {
                return p;
            }
        }
    }

    /// Evenly spaced point `r_j = j/(k+1)`.
    pub fn uniform_spacing(k: usize) -> Self {
        Self::new((1..=k).map(|j| T::of(j) / T::of(k + 1)).collect()).unwrap()
    }

    pub fn k(&self) -> usize {
        self.r.len()
    }

    pub fn r(&self) -> &[T] {
        &self.r
    }

    /// `τ_j = r_j - r₁` for `j = 2..=k`, stored from index 0.
    pub fn taus(&self) -> Vec<T> {
        self.r[1..].iter().map(|&x| x - self.r[0]).collect()
    }
}

/// Weights `w_j` and shifts `β_j` of the telescoped chain exponent
/// `Σ_{j<k} w_j |u_j - β_j u_{j+1}|² + w_k |u_k|²`.
///
/// `weights[i]` belongs to `u_{i+2}`; `shifts[i]` is `β_{i+2}`.
#[derive(Clone, Debug, PartialEq)]
pub struct Telescoped<T: Real> {
    pub weights: Vec<T>,
    pub shifts: Vec<T>,
}

pub fn telescope_quadform<T: Real>(r: &SimplexPoint<T>) -> Telescoped<T> {
    let k = r.k();
    let x = r.r();
    let r1 = x[0];
    let mut weights = Vec::with_capacity(k - 1);
    let mut shifts = Vec::with_capacity(k - 2);
    for j in 1..k - 1 {
        let (rj, rn) = (x[j], x[j + 1]);
        weights.push((rn - r1) / ((rn - rj) * (rj - r1)));
        shifts.push((rj - r1) / (rn - r1));
    }
    let rk = x[k - 1];
    weights.push(T::one() / ((T::one() + r1 - rk) * (rk - r1)));
    Telescoped { weights, shifts }
}

fn sq_dist<T: Real>(a: &[T], b: Option<&[T]>, beta: T) -> T {
    match b {
        Some(b) => a.iter().zip(b).map(|(&x, &y)| (x - beta * y) * (x - beta * y)).sum(),
        None => a.iter().map(|&x| x * x).sum(),
    }
}

/// The chain exponent as it arises from the heat kernels, before telescoping.
/// `u` holds `u₂, …, u_k` back to back, `dim` coordinates each.
pub fn raw_exponent<T: Real>(r: &SimplexPoint<T>, u: &[T], dim: usize) -> T {
    let k = r.k();
    let x = r.r();
    let part = |j: usize| &u[(j - 2) * dim..(j - 1) * dim];
    let mut e = sq_dist(part(k), None, T::zero()) / (T::one() + x[0] - x[k - 1]);
    for j in 2..k {
        e = e + sq_dist(part(j + 1), Some(part(j)), T::one()) / (x[j] - x[j - 1]);
    }
    e + sq_dist(part(2), None, T::zero()) / (x[1] - x[0])
}

impl<T: Real> Telescoped<T> {
    pub fn exponent(&self, u: &[T], dim: usize) -> T {
        let m = self.weights.len();
        let part = |i: usize| &u[i * dim..(i + 1) * dim];
        let mut e = self.weights[m - 1] * sq_dist(part(m - 1), None, T::zero());
        for i in 0..m - 1 {
            e = e + self.weights[i] * sq_dist(part(i), Some(part(i + 1)), self.shifts[i]);
        }
        e
    }
}

/// The normalised Gaussian `G_{r,t}` on `(ℝⁿ)^{k-1}`.
#[derive(Clone, Debug)]
pub struct GaussianChain<T: Real> {
    pub r: SimplexPoint<T>,
    pub t: T,
    pub dim: usize,
    pub form: Telescoped<T>,
}

impl<T: Real> GaussianChain<T> {
    pub fn new(r: SimplexPoint<T>, t: T, dim: usize) -> Result<Self> {
        if !(t > T::zero() && t.is_finite()) {
            return Err(invalid(format!("chain time {t} must be positive")));
        }
        let form = telescope_quadform(&r);
        Ok(Self { r, t, dim, form })
    }

    /// `log G_{r,t}(u')` from the raw heat-kernel expression.
    pub fn log_density(&self, u: &[T]) -> T {
        let x = self.r.r();
        let k = x.len();
        let half_n = T::lit(0.5 * self.dim as f64);
        let four_pi_t = T::lit(4.0 * std::f64::consts::PI) * self.t;
        let mut log_norm = T::of(k - 1) * half_n * four_pi_t.ln() + half_n * (T::one() + x[0] - x[k - 1]).ln();
        for j in 1..k {
            log_norm = log_norm + half_n * (x[j] - x[j - 1]).ln();
        }
        -raw_exponent(&self.r, u, self.dim) / (T::lit(4.0) * self.t) - log_norm
    }

    /// Draws `u'` down the telescoped chain: `u_k` first, then `u_j ~ N(β_j u_{j+1}, 2t/w_j)`.
    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, u: &mut [T]) {
        let m = self.form.weights.len();
        let n = self.dim;
        let two_t = T::lit(2.0) * self.t;
        let sd = (two_t / self.form.weights[m - 1]).sqrt();
        for c in &mut u[(m - 1) * n..m * n] {
            *c = sd * T::standard_normal(rng);
        }
        for i in (0..m - 1).rev() {
            let sd = (two_t / self.form.weights[i]).sqrt();
            let beta = self.form.shifts[i];
            for d in 0..n {
                u[i * n + d] = beta * u[(i + 1) * n + d] + sd * T::standard_normal(rng);
            }
        }
    }

    /// Per-axis covariance of `(u_a, u_b)`, `a, b ∈ 2..=k`.
    pub fn covariance(&self, a: usize, b: usize) -> T {
        T::lit(2.0) * self.t * inverse_form_entry(&self.r, a, b)
    }
}

/// Entry `(a, b)` of `Q_r`, the form inverse to the chain exponent:
/// `τ_min(a,b) (1 - τ_max(a,b))` with `τ_j = r_j - r₁`.
pub fn inverse_form_entry<T: Real>(r: &SimplexPoint<T>, a: usize, b: usize) -> T {
    let x = r.r();
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    (x[lo - 1] - x[0]) * (T::one() - (x[hi - 1] - x[0]))
}

/// The full `(k-1)×(k-1)` matrix of `Q_r`, row-major, indices `2..=k`.
pub fn inverse_form<T: Real>(r: &SimplexPoint<T>) -> Vec<T> {
    let m = r.k() - 1;
    let mut q = vec![T::zero(); m * m];
    for a in 0..m {
        for b in 0..m {
            q[a * m + b] = inverse_form_entry(r, a + 2, b + 2);
        }
    }
    q
}

/// Uniform `r ∈ Σ` and `u' ~ G_{r,t}`.
pub fn sample_chain<T: Real, R: Rng + ?Sized>(k: usize, t: T, dim: usize, rng: &mut R) -> Result<(SimplexPoint<T>, Vec<T>)> {
    if k < 2 {
        return Err(invalid("chain needs k ≥ 2"));
    }
    let r = SimplexPoint::sample(k, rng);
    let chain = GaussianChain::new(r, t, dim)?;
    let mut u = vec![T::zero(); (k - 1) * dim];
    chain.sample_into(rng, &mut u);
    Ok((chain.r, u))
}
