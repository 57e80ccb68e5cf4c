use super::exact::{check_time, free_factor};
use crate::error::{invalid, Result};
use crate::fields::{GridSpec, Potential};
use crate::kernels::{GaussianChain, SimplexPoint};
use crate::rng::{batched_mean, MeanAccumulator, Stream, BATCH_SIZE};
use crate::scalar::Real;

/// Catmull–Rom weights for the points `m-1, m, m+1, m+2` at fraction `f ∈ [0,1)`.
fn cubic_weights(f: f64) -> [f64; 4] {
    let f2 = f * f;
    let f3 = f2 * f;
    [
        0.5 * (-f3 + 2.0 * f2 - f),
        0.5 * (3.0 * f3 - 5.0 * f2 + 2.0),
        0.5 * (-3.0 * f3 + 4.0 * f2 + f),
        0.5 * (f3 - f2),
    ]
}

/// Periodic cubic interpolation of grid fields at points `x_i + u`.
///
/// For a fixed shift the stencil weights are shared by every `x_i`, so they
/// are computed once per shift and applied across the support.
struct Shifter {
    grid: GridSpec,
    /// Per support point, its per-axis indices.
    support: Vec<[usize; 3]>,
    /// First-factor values at the support points.
    anchor: Vec<f64>,
    fields: Vec<Vec<f64>>,
}

impl Shifter {
    fn new<T: Real>(anchor: &Potential<T>, others: &[&Potential<T>]) -> Self {
        let grid = *anchor.grid();
        let dim = grid.dim();
        let mut support = Vec::new();
        let mut values = Vec::new();
        for i in anchor.support_indices() {
            let mut idx = [0usize; 3];
            grid.unravel(i, &mut idx[..dim]);
            support.push(idx);
            values.push(anchor.values()[i].f64());
        }
        let fields = others.iter().map(|p| p.values().iter().map(|v| v.f64()).collect()).collect();
        Self { grid, support, anchor: values, fields }
    }

    /// `h^n Σ_i v₁(x_i) Π_j v_j(x_i + u_j)`, `u` holding one shift per other field.
    fn evaluate(&self, u: &[f64], scratch: &mut [f64]) -> f64 {
        let dim = self.grid.dim();
        let n = self.grid.points() as i64;
        let h = self.grid.spacing();
        scratch.copy_from_slice(&self.anchor);
        for (j, field) in self.fields.iter().enumerate() {
            let mut base = [0i64; 3];
            let mut w = [[0.0; 4]; 3];
            for d in 0..dim {
                let s = u[j * dim + d] / h;
                let m = s.floor();
                base[d] = m as i64 - 1;
                w[d] = cubic_weights(s - m);
            }
            for (acc, idx) in scratch.iter_mut().zip(&self.support) {
                if *acc == 0.0 {
                    continue;
                }
                let mut val = 0.0;
                match dim {
                    1 => {
                        let i0 = idx[0] as i64 + base[0];
                        for (o, wo) in w[0].iter().enumerate() {
                            val += wo * field[(i0 + o as i64).rem_euclid(n) as usize];
                        }
                    }
                    _ => {
                        let stencil = 4usize.pow(dim as u32);
                        for s in 0..stencil {
                            let mut rest = s;
                            let mut flat = 0usize;
                            let mut weight = 1.0;
                            for d in 0..dim {
                                let o = rest % 4;
                                rest /= 4;
                                weight *= w[d][o];
                                flat = flat * n as usize + (idx[d] as i64 + base[d] + o as i64).rem_euclid(n) as usize;
                            }
                            val += weight * field[flat];
                        }
                    }
                }
                *acc *= val;
            }
        }
        scratch.iter().sum::<f64>() * self.grid.cell_volume()
    }
}

/// Mean and standard error of a Monte Carlo estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McValue {
    pub value: f64,
    pub std_error: f64,
    pub samples: usize,
}

impl McValue {
    fn from_acc(acc: MeanAccumulator, scale: f64) -> Self {
        Self { value: acc.mean * scale, std_error: acc.std_error() * scale.abs(), samples: acc.count as usize }
    }
}

/// Estimate of the `k`-linear form `B_t(V, …, V)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BtEstimate {
    pub k: usize,
    pub t: f64,
    pub value: f64,
    pub std_error: f64,
    pub samples_used: usize,
    /// False when the standard error exceeds `|value|`.
    pub converged: bool,
}

/// `B_t` together with `tr W_k(t) = (4πt)^{-n/2} t^k B_t` (unsigned).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WkEstimate {
    pub bt: BtEstimate,
    pub trace: f64,
    pub trace_std_error: f64,
}

fn check_fields<T: Real>(fields: &[&Potential<T>]) -> Result<()> {
    let grid = fields[0].grid();
    if fields.iter().any(|f| f.grid() != grid) {
        return Err(invalid("all fields must share one grid"));
    }
    Ok(())
}

/// `∫_Σ ∫ G_{r,t}(u') v_k(u₁+u_k)⋯v₂(u₁+u₂)v₁(u₁) du dr` for distinct fields.
///
/// `u₁` runs over the grid support of `v₁`; `(r, u')` is sampled, `r`
/// uniformly on `Σ` (volume `1/k!`) and `u'` from the chain.
pub fn multilinear_form<T: Real>(fields: &[&Potential<T>], t: f64, samples: usize, stream: Stream) -> Result<McValue> {
    let k = fields.len();
    if k < 2 {
        return Err(invalid("the multilinear form needs at least two fields"));
    }
    check_time(t)?;
    check_fields(fields)?;
    if fields.iter().any(|f| f.is_zero()) {
        return Ok(McValue { value: 0.0, std_error: 0.0, samples: 0 });
    }
    let dim = fields[0].dim();
    let shifter = Shifter::new(fields[0], &fields[1..]);
    let acc = batched_mean(stream, samples, BATCH_SIZE, |rng, len| {
        let mut acc = MeanAccumulator::default();
        let mut u = vec![0.0; (k - 1) * dim];
        let mut scratch = vec![0.0; shifter.anchor.len()];
        for _ in 0..len {
            let r = SimplexPoint::<f64>::sample(k, rng);
            let chain = GaussianChain::new(r, t, dim).expect("positive time");
            chain.sample_into(rng, &mut u);
            acc.push(shifter.evaluate(&u, &mut scratch));
        }
        acc
    });
    let volume = 1.0 / (1..=k).map(|i| i as f64).product::<f64>();
    Ok(McValue::from_acc(acc, volume))
}

/// The same form at a fixed `r ∈ Σ`, without the simplex integral.
pub fn multilinear_form_at<T: Real>(
    fields: &[&Potential<T>],
    r: &SimplexPoint<f64>,
    t: f64,
    samples: usize,
    stream: Stream,
) -> Result<McValue> {
    let k = fields.len();
    if r.k() != k {
        return Err(invalid("simplex point and field count disagree"));
    }
    check_time(t)?;
    check_fields(fields)?;
    if fields.iter().any(|f| f.is_zero()) {
        return Ok(McValue { value: 0.0, std_error: 0.0, samples: 0 });
    }
    let dim = fields[0].dim();
    let chain = GaussianChain::new(r.clone(), t, dim)?;
    let shifter = Shifter::new(fields[0], &fields[1..]);
    let acc = batched_mean(stream, samples, BATCH_SIZE, |rng, len| {
        let mut acc = MeanAccumulator::default();
        let mut u = vec![0.0; (k - 1) * dim];
        let mut scratch = vec![0.0; shifter.anchor.len()];
        for _ in 0..len {
            chain.sample_into(rng, &mut u);
            acc.push(shifter.evaluate(&u, &mut scratch));
        }
        acc
    });
    Ok(McValue::from_acc(acc, 1.0))
}

/// Hybrid grid × Monte Carlo estimate of `tr W_k(t)` for `k ≥ 3`.
pub fn trace_wk_mc<T: Real>(v: &Potential<T>, t: f64, k: usize, samples: usize, stream: Stream) -> Result<WkEstimate> {
    if k < 3 {
        return Err(invalid("Monte Carlo traces are for k ≥ 3; use trace_w1/trace_w2"));
    }
    if samples < 1000 {
        return Err(invalid(format!("at least 1000 samples required, got {samples}")));
    }
    let fields = vec![v; k];
    let est = multilinear_form(&fields, t, samples, stream)?;
    let zero = v.is_zero();
    let bt = BtEstimate {
        k,
        t,
        value: est.value,
        std_error: est.std_error,
        samples_used: if zero { samples } else { est.samples },
        converged: zero || est.std_error <= est.value.abs(),
    };
    let pre = free_factor(t, v.dim()) * t.powi(k as i32);
    Ok(WkEstimate { bt, trace: pre * bt.value, trace_std_error: pre * bt.std_error })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubic_weights_partition_unity_and_reproduce_lines() {
        for f in [0.0, 0.25, 0.7] {
            let w = cubic_weights(f);
            assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-15);
            let lin: f64 = w.iter().enumerate().map(|(o, wo)| wo * (o as f64 - 1.0)).sum();
            assert!((lin - f).abs() < 1e-15);
        }
        assert_eq!(cubic_weights(0.0), [0.0, 1.0, 0.0, 0.0]);
    }
}
