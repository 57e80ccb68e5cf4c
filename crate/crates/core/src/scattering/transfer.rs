use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::fields::{Potential, Shape};
use crate::scalar::Real;

const I: C64 = C64 { re: 0.0, im: 1.0 };

/// Largest Magnus step on smooth profiles.
const ODE_STEP: f64 = 0.005;

pub(crate) type Mat2 = [[C64; 2]; 2];

fn mul(a: &Mat2, b: &Mat2) -> Mat2 {
    [
        [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
        [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
    ]
}

/// `exp` of the traceless matrix `[[a, b], [c, -a]]`.
fn expm_traceless(a: C64, b: C64, c: C64) -> Mat2 {
    let s2 = a * a + b * c;
    let (ch, shc) = if s2.norm() < 1e-6 {
        (1.0 + s2 / 2.0 + s2 * s2 / 24.0, 1.0 + s2 / 6.0 + s2 * s2 / 120.0)
    } else {
        let s = s2.sqrt();
        (s.cosh(), s.sinh() / s)
    };
    [[ch + shc * a, shc * b], [shc * c, ch - shc * a]]
}

/// Smallest interval holding the support. Crossing empty space costs nothing
/// in the plane-wave basis but loses digits in `(u, u')` off the real axis.
fn extent<T: Real>(v: &Potential<T>) -> (f64, f64) {
    let r = v.support_radius();
    let (lo, hi) = match v.components() {
        Some(cs) => cs
            .iter()
            .filter(|c| c.weight != 0.0)
            .map(|c| (c.center[0] - c.shape.radius(), c.center[0] + c.shape.radius()))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), (c, d)| (a.min(c), b.max(d))),
        None => {
            let g = v.grid();
            let nonzero: Vec<usize> = (0..g.points()).filter(|&j| v.values()[j] != T::zero()).collect();
            match (nonzero.first(), nonzero.last()) {
                (Some(&a), Some(&b)) => (g.coordinate(a) - 0.5 * g.spacing(), g.coordinate(b) + 0.5 * g.spacing()),
                _ => (-r, r),
            }
        }
    };
    if lo < hi {
        (lo.max(-r), hi.min(r))
    } else {
        (-r, r)
    }
}

/// The 1D profile as seen by the ODE solver: the interval to cross, interior
/// break points, and the piece values when the profile is piecewise constant.
#[derive(Clone, Debug)]
pub(crate) struct Profile1D {
    nodes: Vec<f64>,
    spacing: f64,
    pieces: Option<Vec<(f64, f64, f64)>>,
}

impl Profile1D {
    pub(crate) fn new<T: Real>(v: &Potential<T>) -> Result<Self> {
        if v.dim() != 1 {
            return Err(Error::Unsupported(format!("scattering is one-dimensional; potential has dimension {}", v.dim())));
        }
        let spacing = v.grid().spacing();
        if v.is_zero() {
            return Ok(Self { nodes: vec![], spacing, pieces: None });
        }
        let (lo, hi) = extent(v);
        let mut nodes: Vec<f64> = v.breakpoints().into_iter().filter(|&x| x > lo && x < hi).collect();
        nodes.push(lo);
        nodes.push(hi);
        nodes.sort_by(f64::total_cmp);
        nodes.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
        let piecewise_constant = match v.components() {
            Some(cs) => cs.iter().all(|c| c.weight == 0.0 || matches!(c.shape, Shape::Well { .. } | Shape::DeltaApprox { .. })),
            None => true,
        };
        let pieces = piecewise_constant.then(|| nodes.windows(2).map(|w| (w[0], w[1], v.value_at(&[0.5 * (w[0] + w[1])]))).collect());
        Ok(Self { nodes, spacing, pieces })
    }

    pub(crate) fn is_zero(&self) -> bool {
        self.nodes.is_empty()
    }

    pub(crate) fn span(&self) -> (f64, f64) {
        match (self.nodes.first(), self.nodes.last()) {
            (Some(&a), Some(&b)) => (a, b),
            _ => (0.0, 0.0),
        }
    }
}

/// Transfer data for one `λ`: the matrix mapping left plane-wave coefficients
/// `(A, B)` of `A e^{iλx} + B e^{-iλx}` to the right ones.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransferMatrix {
    pub lambda: C64,
    pub entries: Mat2,
}

impl TransferMatrix {
    pub fn det(&self) -> C64 {
        let m = &self.entries;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    /// `M₂₂`, whose zeros are bound states (upper half plane) and resonances (lower).
    pub fn outgoing(&self) -> C64 {
        self.entries[1][1]
    }
}

/// Propagator of `u'' = (V - λ²)u` for `(u, u')` across the support.
pub(crate) struct Propagator<'a, T: Real> {
    v: &'a Potential<T>,
    profile: Profile1D,
}

impl<'a, T: Real> Propagator<'a, T> {
    pub(crate) fn new(v: &'a Potential<T>) -> Result<Self> {
        Ok(Self { v, profile: Profile1D::new(v)? })
    }

    pub(crate) fn is_zero(&self) -> bool {
        self.profile.is_zero()
    }

    pub(crate) fn half_width(&self) -> f64 {
        let (a, b) = self.profile.span();
        a.abs().max(b.abs())
    }

    /// Fundamental matrix by fourth-order Magnus steps (exact on constant pieces,
    /// unimodular by construction).
    fn fundamental(&self, lambda: C64) -> Mat2 {
        let l2 = lambda * lambda;
        let mut phi: Mat2 = [[C64::new(1.0, 0.0), C64::new(0.0, 0.0)], [C64::new(0.0, 0.0), C64::new(1.0, 0.0)]];
        if let Some(pieces) = &self.profile.pieces {
            for &(a, b, val) in pieces {
                let dx = C64::new(b - a, 0.0);
                let e = expm_traceless(C64::new(0.0, 0.0), dx, dx * (val - l2));
                phi = mul(&e, &phi);
            }
            return phi;
        }
        // A λ-independent step keeps M analytic in λ, which the argument principle relies on.
        let h_ode = self.profile.spacing.min(ODE_STEP);
        let g = 0.5 / 3f64.sqrt();
        for w in self.profile.nodes.windows(2) {
            let steps = ((w[1] - w[0]) / h_ode).ceil().max(1.0) as usize;
            let dx = (w[1] - w[0]) / steps as f64;
            for s in 0..steps {
                let x0 = w[0] + s as f64 * dx;
                let w1 = self.v.value_at(&[x0 + (0.5 - g) * dx]) - l2;
                let w2 = self.v.value_at(&[x0 + (0.5 + g) * dx]) - l2;
                let a = (w1 - w2) * (3f64.sqrt() * dx * dx / 12.0);
                let e = expm_traceless(a, C64::new(dx, 0.0), (w1 + w2) * (0.5 * dx));
                phi = mul(&e, &phi);
            }
        }
        phi
    }

    pub(crate) fn transfer(&self, lambda: C64) -> Result<TransferMatrix> {
        if !(lambda.re.is_finite() && lambda.im.is_finite()) || lambda.norm() < 1e-12 {
            return Err(crate::error::invalid(format!("transfer matrix needs finite λ ≠ 0, got {lambda}")));
        }
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        if self.is_zero() {
            return Ok(TransferMatrix { lambda, entries: [[one, zero], [zero, one]] });
        }
        let (xa, xb) = self.profile.span();
        let phi = self.fundamental(lambda);
        let ea = (I * lambda * xa).exp();
        let pa: Mat2 = [[ea, 1.0 / ea], [I * lambda * ea, -I * lambda / ea]];
        let eb = (I * lambda * xb).exp();
        let scale = 1.0 / (-2.0 * I * lambda);
        let pb_inv: Mat2 = [[-I * lambda / eb * scale, -1.0 / eb * scale], [-I * lambda * eb * scale, eb * scale]];
        let m = mul(&pb_inv, &mul(&phi, &pa));
        if m.iter().flatten().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonConvergence(format!("transfer matrix overflowed at λ = {lambda}")));
        }
        Ok(TransferMatrix { lambda, entries: m })
    }

    /// `dM/dλ` from the Cauchy integral on a small circle (the entries are analytic off `λ = 0`).
    pub(crate) fn transfer_derivative(&self, lambda: C64) -> Result<Mat2> {
        const K: usize = 12;
        let rho = (0.05 / self.half_width().max(1.0)).min(0.25 * lambda.norm());
        let mut d = [[C64::new(0.0, 0.0); 2]; 2];
        for k in 0..K {
            let w = C64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / K as f64);
            let m = self.transfer(lambda + rho * w)?.entries;
            for i in 0..2 {
                for j in 0..2 {
                    d[i][j] += m[i][j] / w;
                }
            }
        }
        for row in d.iter_mut() {
            for z in row.iter_mut() {
                *z /= K as f64 * rho;
            }
        }
        Ok(d)
    }

    /// The entire function `2iλ M₂₂(λ)`; for `V = 0` it is `2iλ`.
    pub(crate) fn jost(&self, lambda: C64) -> Result<C64> {
        Ok(2.0 * I * lambda * self.transfer(lambda)?.outgoing())
    }
}

/// Transfer matrix of `-u'' + Vu = λ²u` across the support of a 1D potential.
pub fn transfer_matrix<T: Real>(v: &Potential<T>, lambda: C64) -> Result<TransferMatrix> {
    Propagator::new(v)?.transfer(lambda)
}
