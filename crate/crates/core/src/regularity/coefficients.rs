use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};

use crate::error::{Error, Result};
use crate::fields::{derivative, fourier, weighted_norm, Potential};
use crate::kernels::{inverse_form_entry, SimplexPoint};
use crate::rng::Stream;
use crate::scalar::Real;

/// Simplex nodes used for the `Q`-moments.
pub const SIMPLEX_NODES: usize = 100_000;

fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// `a_j = (-1)^j j! / (2 (2j+1)!)`, exactly.
pub fn a_coeff_exact(j: u32) -> BigRational {
    let num = factorial(j as u64);
    let den = BigInt::from(2) * factorial(2 * j as u64 + 1);
    let a = BigRational::new(num, den);
    if j % 2 == 1 {
        -a
    } else {
        a
    }
}

pub fn a_coeff(j: u32) -> f64 {
    a_coeff_exact(j).to_f64().expect("finite rational")
}

/// One unsigned source coefficient `c_{k,k+j}` (from `tr W_k`).
#[derive(Clone, Debug, PartialEq)]
pub struct SourceCoefficient {
    pub k: usize,
    pub j: usize,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HeatCoefficients {
    pub dim: usize,
    /// `(p, c_p)` with `c_p = Σ_k (-1)^k c_{k,p}`, for every order whose sources are all present.
    pub orders: Vec<(usize, f64)>,
    pub sources: Vec<SourceCoefficient>,
    /// `a_0, …, a_m`.
    pub a_table: Vec<BigRational>,
}

impl HeatCoefficients {
    pub fn source(&self, k: usize, j: usize) -> Option<f64> {
        self.sources.iter().find(|s| s.k == k && s.j == j).map(|s| s.value)
    }

    pub fn order(&self, p: usize) -> Option<f64> {
        self.orders.iter().find(|o| o.0 == p).map(|o| o.1)
    }
}

/// `∫_Σ Q_ab dr` and `∫_Σ Q_ab Q_cd dr` for `a, b, c, d ∈ 2..=k`, by uniform simplex sampling.
struct QMoments {
    k: usize,
    first: Vec<f64>,
    second: Vec<f64>,
}

impl QMoments {
    fn sample(k: usize, nodes: usize, stream: Stream) -> Self {
        let m = k - 1;
        let mut first = vec![0.0; m * m];
        let mut second = vec![0.0; m.pow(4)];
        let mut rng = stream.rng();
        let mut q = vec![0.0; m * m];
        for _ in 0..nodes {
            let r = SimplexPoint::<f64>::sample(k, &mut rng);
            for a in 0..m {
                for b in 0..m {
                    q[a * m + b] = inverse_form_entry(&r, a + 2, b + 2);
                }
            }
            for (f, v) in first.iter_mut().zip(&q) {
                *f += v;
            }
            for ab in 0..m * m {
                for cd in 0..m * m {
                    second[ab * m * m + cd] += q[ab] * q[cd];
                }
            }
        }
        let vol = 1.0 / (1..=k).map(|i| i as f64).product::<f64>();
        let scale = vol / nodes as f64;
        first.iter_mut().for_each(|x| *x *= scale);
        second.iter_mut().for_each(|x| *x *= scale);
        Self { k, first, second }
    }

    fn q(&self, a: usize, b: usize) -> f64 {
        let m = self.k - 1;
        self.first[(a - 2) * m + (b - 2)]
    }

    fn qq(&self, a: usize, b: usize, c: usize, d: usize) -> f64 {
        let m = self.k - 1;
        self.second[((a - 2) * m + (b - 2)) * m * m + (c - 2) * m + (d - 2)]
    }
}

/// `∫ Π_i ∂^{α_i} V` with per-factor multi-indices, derivative fields cached.
struct ProductIntegrals<'a, T: Real> {
    v: &'a Potential<T>,
    cache: HashMap<[u32; 3], Vec<f64>>,
}

impl<'a, T: Real> ProductIntegrals<'a, T> {
    fn new(v: &'a Potential<T>) -> Self {
        Self { v, cache: HashMap::new() }
    }

    fn integral(&mut self, alphas: &[[u32; 3]]) -> f64 {
        let dim = self.v.dim();
        for a in alphas {
            if !self.cache.contains_key(a) {
                self.cache.insert(*a, derivative(self.v, &a[..dim]));
            }
        }
        let len = self.v.grid().len();
        let fields: Vec<&Vec<f64>> = alphas.iter().map(|a| &self.cache[a]).collect();
        let s: f64 = (0..len).map(|i| fields.iter().map(|f| f[i]).product::<f64>()).sum();
        s * self.v.grid().cell_volume()
    }
}

/// `(1/j!) ∫_Σ (Σ_ab Q_ab ∇_a·∇_b)^j F(0) dr` with `F(u') = ∫V(u₁)Π_a V(u₁+u_a)du₁`, `j ∈ {1, 2}`.
fn chain_coefficient<T: Real>(ints: &mut ProductIntegrals<T>, moments: &QMoments, j: usize) -> f64 {
    let k = moments.k;
    let dim = ints.v.dim();
    let mut total = 0.0;
    let bump = |alphas: &mut Vec<[u32; 3]>, factor: usize, axis: usize| alphas[factor - 1][axis] += 1;
    match j {
        1 => {
            for a in 2..=k {
                for b in 2..=k {
                    for p in 0..dim {
                        let mut al = vec![[0u32; 3]; k];
                        bump(&mut al, a, p);
                        bump(&mut al, b, p);
                        total += moments.q(a, b) * ints.integral(&al);
                    }
                }
            }
        }
        2 => {
            for a in 2..=k {
                for b in 2..=k {
                    for c in 2..=k {
                        for d in 2..=k {
                            let w = moments.qq(a, b, c, d);
                            for p in 0..dim {
                                for q in 0..dim {
                                    let mut al = vec![[0u32; 3]; k];
                                    bump(&mut al, a, p);
                                    bump(&mut al, b, p);
                                    bump(&mut al, c, q);
                                    bump(&mut al, d, q);
                                    total += w * ints.integral(&al);
                                }
                            }
                        }
                    }
                }
            }
            total *= 0.5;
        }
        _ => unreachable!(),
    }
    total
}

/// Heat invariants up to derivative order `m` from Duhamel terms `k ≤ kmax`.
///
/// * `c_{1,1} = ∫V`, `c_{1,1+j} = 0`;
/// * `c_{2,2+j} = a_j ‖|D|^j V‖²` for every `j ≤ m`;
/// * `c_{k,k} = (1/k!)∫V^k` for `3 ≤ k ≤ 8`;
/// * `c_{k,k+j}` for `k ∈ {3, 4}`, `j ∈ {1, 2}` from the simplex moments of `Q_r`.
///
/// Source values follow the unsigned term convention; `orders` applies `(-1)^k`.
pub fn heat_coefficients<T: Real>(v: &Potential<T>, m: usize, kmax: usize, stream: Stream) -> Result<HeatCoefficients> {
    if kmax < 1 || kmax > 8 {
        return Err(Error::Unsupported(format!("kmax = {kmax} outside 1..=8")));
    }
    if m > 0 && kmax >= 3 && (m > 2 || kmax > 4) {
        return Err(Error::Unsupported(format!(
            "c_(k,k+j) for k ≥ 3 is available for k ≤ 4, j ≤ 2 (asked kmax = {kmax}, m = {m})"
        )));
    }
    let dim = v.dim();
    let rep = fourier(v);
    let mut sources = Vec::new();
    for j in 0..=m {
        sources.push(SourceCoefficient { k: 1, j, value: if j == 0 { v.integral().f64() } else { 0.0 } });
    }
    if kmax >= 2 {
        for j in 0..=m {
            let norm = weighted_norm(&rep, |xi2| xi2.powi(j as i32));
            let norm = if j == 0 { norm.squared } else { norm.checked()? };
            sources.push(SourceCoefficient { k: 2, j, value: a_coeff(j as u32) * norm });
        }
    }
    let values: Vec<f64> = v.values().iter().map(|x| x.f64()).collect();
    let mut ints = ProductIntegrals::new(v);
    for k in 3..=kmax {
        let b0 = values.iter().map(|x| x.powi(k as i32)).sum::<f64>() * v.grid().cell_volume()
            / (1..=k).map(|i| i as f64).product::<f64>();
        sources.push(SourceCoefficient { k, j: 0, value: b0 });
        if m >= 1 {
            let moments = QMoments::sample(k, SIMPLEX_NODES, stream.substream(k as u64));
            for j in 1..=m {
                sources.push(SourceCoefficient { k, j, value: chain_coefficient(&mut ints, &moments, j) });
            }
        }
    }
    let max_order = kmax.min(m + 2);
    let orders = (1..=max_order)
        .map(|p| {
            let c: f64 = sources
                .iter()
                .filter(|s| s.k + s.j == p)
                .map(|s| if s.k % 2 == 0 { s.value } else { -s.value })
                .sum();
            (p, c)
        })
        .collect();
    let a_table = (0..=m as u32).map(a_coeff_exact).collect();
    Ok(HeatCoefficients { dim, orders, sources, a_table })
}

/// Exact `∫₀¹ (v(1-v))^j dv = (j!)²/(2j+1)!`.
pub fn beta_moment(j: u32) -> BigRational {
    let f = factorial(j as u64);
    BigRational::new(f.clone() * f, factorial(2 * j as u64 + 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn a_table_first_entries() {
        assert_eq!(a_coeff_exact(0), BigRational::new(1.into(), 2.into()));
        assert_eq!(a_coeff_exact(1), BigRational::new((-1).into(), 12.into()));
        assert_eq!(a_coeff_exact(2), BigRational::new(1.into(), 120.into()));
        assert!(!num_traits::Zero::is_zero(&a_coeff_exact(7)));
    }
}
