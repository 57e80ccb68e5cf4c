use rayon::prelude::*;

use super::exact::{check_time, trace_w1, trace_w2};
use super::montecarlo::trace_wk_mc;
use crate::error::{invalid, Error, Result};
use crate::fields::Potential;
use crate::rng::Stream;
use crate::scalar::Real;

/// Geometry constant in `Ĉ = C_GEO ‖V‖∞`.
///
/// Smallest value for which every term `Ĉ^k k^{n/2} t^{k-n/2}/k!` dominates
/// twice the measured `|tr W_k|` over wells with `a ∈ {0.5, 1, 2}`,
/// `V₀ ∈ {0.5, 1, 2}`, `k ≤ 6`, `t ∈ {0.05, 0.2}` in 1D, rounded up.
/// `calibrate_c_geo` reruns the fit.
pub const C_GEO: f64 = 2.3;

fn bound_term(c_hat: f64, k: usize, t: f64, dim: usize) -> f64 {
    let half_n = 0.5 * dim as f64;
    let ln = k as f64 * c_hat.ln() + half_n * (k as f64).ln() + (k as f64 - half_n) * t.ln() - ln_factorial(k);
    ln.exp()
}

fn ln_factorial(k: usize) -> f64 {
    (2..=k).map(|i| (i as f64).ln()).sum()
}

/// The `k`-th term `Ĉ^k k^{n/2} t^{k-n/2}/k!` of the trace-class bound.
pub fn bound_term_k<T: Real>(v: &Potential<T>, k: usize, t: f64) -> Result<f64> {
    check_bound_time(t)?;
    let c_hat = C_GEO * v.linf_norm().f64();
    if c_hat == 0.0 {
        return Ok(0.0);
    }
    Ok(bound_term(c_hat, k, t, v.dim()))
}

fn check_bound_time(t: f64) -> Result<()> {
    check_time(t)?;
    if t > 1.0 {
        return Err(invalid(format!("trace-class bounds hold for 0 < t ≤ 1, got t = {t}")));
    }
    Ok(())
}

/// `Σ_{k > kmax} Ĉ^k k^{n/2} t^{k-n/2}/k!`.
pub fn tail_bound<T: Real>(kmax: usize, t: f64, v: &Potential<T>) -> Result<f64> {
    check_bound_time(t)?;
    if kmax < 1 {
        return Err(invalid("kmax must be at least 1"));
    }
    let c_hat = C_GEO * v.linf_norm().f64();
    if c_hat == 0.0 {
        return Ok(0.0);
    }
    let mut sum = 0.0;
    for k in kmax + 1..kmax + 400 {
        let term = bound_term(c_hat, k, t, v.dim());
        sum += term;
        if k as f64 > c_hat * t && term <= 1e-17 * sum {
            break;
        }
    }
    Ok(sum)
}

/// One unsigned Duhamel term `tr W_k(t)` with its error bar.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesTerm {
    pub k: usize,
    pub value: f64,
    pub std_error: f64,
}

impl SeriesTerm {
    /// Contribution to the heat trace, `(-1)^k tr W_k`.
    pub fn signed(&self) -> f64 {
        if self.k % 2 == 0 {
            self.value
        } else {
            -self.value
        }
    }
}

/// Sign convention linking the stored terms to `total`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SignConvention {
    /// Terms are stored as unsigned `tr W_k`; the series sums `(-1)^k tr W_k`.
    Alternating,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraceSeries {
    pub t: f64,
    pub terms: Vec<SeriesTerm>,
    pub sign_convention: SignConvention,
    pub tail_bound: f64,
    pub total: f64,
}

impl TraceSeries {
    /// Root-sum-square of the per-term error bars.
    pub fn std_error(&self) -> f64 {
        self.terms.iter().map(|t| t.std_error * t.std_error).sum::<f64>().sqrt()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesOptions {
    pub kmax: usize,
    pub samples: usize,
    /// Fails when tail bound plus standard error exceeds this.
    pub tolerance: Option<f64>,
}

impl Default for SeriesOptions {
    fn default() -> Self {
        Self { kmax: 6, samples: 100_000, tolerance: None }
    }
}

/// `tr(e^{-tP_V} - e^{-tP₀}) ≈ Σ_{k ≤ kmax} (-1)^k tr W_k(t)` with its tail bound.
///
/// Term `k ≥ 3` draws from `stream.substream(k)`.
pub fn trace_total<T: Real>(v: &Potential<T>, t: f64, opts: SeriesOptions, stream: Stream) -> Result<TraceSeries> {
    check_bound_time(t)?;
    if opts.kmax < 1 || opts.kmax > 8 {
        return Err(invalid(format!("kmax = {} outside 1..=8", opts.kmax)));
    }
    let tail = tail_bound(opts.kmax, t, v)?;
    let terms: Vec<Result<SeriesTerm>> = (1..=opts.kmax)
        .into_par_iter()
        .map(|k| match k {
            1 => Ok(SeriesTerm { k, value: trace_w1(v, t)?.f64(), std_error: 0.0 }),
            2 => {
                let w2 = trace_w2(v, t)?;
                Ok(SeriesTerm { k, value: w2.value, std_error: w2.error_estimate })
            }
            _ => {
                let est = trace_wk_mc(v, t, k, opts.samples, stream.substream(k as u64))?;
                Ok(SeriesTerm { k, value: est.trace, std_error: est.trace_std_error })
            }
        })
        .collect();
    let terms = terms.into_iter().collect::<Result<Vec<_>>>()?;
    let total = terms.iter().map(SeriesTerm::signed).sum();
    let series = TraceSeries { t, terms, sign_convention: SignConvention::Alternating, tail_bound: tail, total };
    if let Some(tol) = opts.tolerance {
        let err = tail + series.std_error();
        if err > tol {
            return Err(Error::NonConvergence(format!(
                "series at t = {t}: tail bound {tail:.3e} + standard error {:.3e} exceeds tolerance {tol:.3e}",
                series.std_error()
            )));
        }
    }
    Ok(series)
}

/// Refits `C_GEO` on the calibration family; returns the smallest admissible constant.
pub fn calibrate_c_geo(samples: usize, stream: Stream) -> Result<f64> {
    use crate::fields::{GridSpec, Shape};
    let grid = GridSpec::new(1, 8.0, 1024)?;
    let mut worst: f64 = 0.0;
    for (i, &a) in [0.5, 1.0, 2.0].iter().enumerate() {
        for (j, &depth) in [0.5, 1.0, 2.0].iter().enumerate() {
            let v: Potential<f64> = Potential::from_shape(grid, Shape::Well { depth, half_width: a })?;
            for &t in &[0.05, 0.2] {
                for k in 1..=6 {
                    let measured = match k {
                        1 => trace_w1(&v, t)?.abs(),
                        2 => trace_w2(&v, t)?.value,
                        _ => {
                            let s = stream.substream((i * 3 + j) as u64 * 100 + k as u64);
                            let e = trace_wk_mc(&v, t, k, samples, s)?;
                            e.trace.abs() + 3.0 * e.trace_std_error
                        }
                    };
                    let unit = bound_term(depth, k, t, 1);
                    worst = worst.max((2.0 * measured / unit).powf(1.0 / k as f64));
                }
            }
        }
    }
    Ok(worst)
}
