use num_complex::Complex64 as C64;
use rayon::prelude::*;

use super::transfer::Propagator;
use crate::error::{invalid, Error, Result};
use crate::fields::Potential;
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ResonanceClass {
    /// On the negative imaginary axis.
    ImaginaryAxis,
    /// One of a pair `λ, -conj λ`.
    Pair,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Resonance {
    pub lambda: C64,
    pub multiplicity: usize,
    pub class: ResonanceClass,
    /// Last Newton step `|F/F'|`, a distance-to-root estimate.
    pub residual: f64,
}

/// Closed rectangle `[re.0, re.1] × [im.0, im.1]` in the lower half plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Region {
    pub re: (f64, f64),
    pub im: (f64, f64),
}

impl Region {
    pub fn new(re0: f64, re1: f64, im0: f64, im1: f64) -> Result<Self> {
        if !(re0 < re1 && im0 < im1 && im1 <= 0.0) || ![re0, re1, im0, im1].iter().all(|x| x.is_finite()) {
            return Err(invalid(format!("region [{re0}, {re1}]×[{im0}, {im1}] must be a nonempty rectangle with Im ≤ 0")));
        }
        Ok(Self { re: (re0, re1), im: (im0, im1) })
    }

    fn contains(&self, z: C64, slack: f64) -> bool {
        z.re >= self.re.0 - slack && z.re <= self.re.1 + slack && z.im >= self.im.0 - slack && z.im <= self.im.1 + slack
    }
}

#[derive(Clone, Copy, Debug)]
struct Rect {
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
}

impl Rect {
    fn size(&self) -> f64 {
        (self.x1 - self.x0).max(self.y1 - self.y0)
    }

    fn center(&self) -> C64 {
        C64::new(0.5 * (self.x0 + self.x1), 0.5 * (self.y0 + self.y1))
    }

    fn contains(&self, z: C64) -> bool {
        z.re >= self.x0 && z.re <= self.x1 && z.im >= self.y0 && z.im <= self.y1
    }
}

struct Finder<'a, T: Real> {
    prop: Propagator<'a, T>,
    tol: f64,
}

/// Marker error: the contour passes too close to a zero.
struct NearZero;

impl<T: Real> Finder<'_, T> {
    fn f(&self, z: C64) -> Result<C64> {
        self.prop.jost(z)
    }

    fn df(&self, z: C64) -> Result<C64> {
        let i = C64::new(0.0, 1.0);
        let m22 = self.prop.transfer(z)?.outgoing();
        let d = self.prop.transfer_derivative(z)?[1][1];
        Ok(2.0 * i * (m22 + z * d))
    }

    /// Change of `arg F` along the segment, refined until each piece turns less than π/8.
    fn edge(&self, a: C64, b: C64) -> Result<std::result::Result<f64, NearZero>> {
        let pieces = ((b - a).norm() / 0.1).ceil().max(1.0) as usize;
        let pts: Vec<C64> = (0..=pieces).map(|i| a + (b - a) * (i as f64 / pieces as f64)).collect();
        let vals: Vec<C64> = pts.par_iter().map(|&z| self.f(z)).collect::<Result<_>>()?;
        let mut total = 0.0;
        for i in 0..pieces {
            let mut stack = vec![(pts[i], vals[i], pts[i + 1], vals[i + 1])];
            while let Some((z0, f0, z1, f1)) = stack.pop() {
                if f0 == C64::new(0.0, 0.0) || f1 == C64::new(0.0, 0.0) {
                    return Ok(Err(NearZero));
                }
                let ratio = f1 / f0;
                if ratio.arg().abs() < std::f64::consts::PI / 8.0 && ratio.norm().ln().abs() < 1.0 {
                    total += ratio.arg();
                    continue;
                }
                if (z1 - z0).norm() < 1e-3 * self.tol {
                    return Ok(Err(NearZero));
                }
                let zm = 0.5 * (z0 + z1);
                let fm = self.f(zm)?;
                stack.push((zm, fm, z1, f1));
                stack.push((z0, f0, zm, fm));
            }
        }
        Ok(Ok(total))
    }

    fn winding(&self, r: &Rect) -> Result<std::result::Result<usize, NearZero>> {
        let c = [C64::new(r.x0, r.y0), C64::new(r.x1, r.y0), C64::new(r.x1, r.y1), C64::new(r.x0, r.y1)];
        let mut total = 0.0;
        for i in 0..4 {
            match self.edge(c[i], c[(i + 1) % 4])? {
                Ok(d) => total += d,
                Err(e) => return Ok(Err(e)),
            }
        }
        let w = total / (2.0 * std::f64::consts::PI);
        if (w - w.round()).abs() > 0.05 || w.round() < 0.0 {
            return Ok(Err(NearZero));
        }
        Ok(Ok(w.round() as usize))
    }

    fn newton(&self, start: C64) -> Result<Option<(C64, f64)>> {
        let mut z = start;
        let mut last = f64::INFINITY;
        for _ in 0..60 {
            let f = self.f(z)?;
            let d = self.df(z)?;
            if d == C64::new(0.0, 0.0) {
                return Ok(None);
            }
            let step = f / d;
            let size = step.norm();
            let scale = z.norm().max(1.0);
            // Converged, or stalled on the rounding floor of F once well inside the basin.
            if size < 1e-12 * scale || (size < 1e-7 * scale && size >= 0.5 * last) {
                let z = if size < last { z - step } else { z };
                let residual = (self.f(z)? / self.df(z)?).norm();
                return Ok(Some((z, residual)));
            }
            z -= step;
            if !(z.re.is_finite() && z.im.is_finite()) {
                return Ok(None);
            }
            last = size;
        }
        Ok(None)
    }

    fn solve(&self, r: Rect, w: usize, out: &mut Vec<(C64, usize, f64)>) -> Result<()> {
        if w == 0 {
            return Ok(());
        }
        if w == 1 || r.size() < self.tol {
            if let Some((z, res)) = self.newton(r.center())? {
                if r.contains(z) {
                    out.push((z, w, res));
                    return Ok(());
                }
            }
            if r.size() < 1e-3 * self.tol {
                return Err(Error::NonConvergence(format!("{w} zero(s) near {} did not polish", r.center())));
            }
        }
        for attempt in 0..4 {
            let shift = 0.5 + 0.0137 * attempt as f64;
            let xm = r.x0 + shift * (r.x1 - r.x0);
            let ym = r.y0 + shift * (r.y1 - r.y0);
            let kids = [
                Rect { x0: r.x0, x1: xm, y0: r.y0, y1: ym },
                Rect { x0: xm, x1: r.x1, y0: r.y0, y1: ym },
                Rect { x0: r.x0, x1: xm, y0: ym, y1: r.y1 },
                Rect { x0: xm, x1: r.x1, y0: ym, y1: r.y1 },
            ];
            let mut counts = [0usize; 4];
            let mut ok = true;
            for (c, k) in counts.iter_mut().zip(&kids) {
                match self.winding(k)? {
                    Ok(n) => *c = n,
                    Err(NearZero) => {
                        ok = false;
                        break;
                    }
                }
            }
            if ok && counts.iter().sum::<usize>() == w {
                for (k, &c) in kids.iter().zip(&counts) {
                    self.solve(*k, c, out)?;
                }
                return Ok(());
            }
        }
        Err(Error::NonConvergence(format!("could not split the rectangle around {} cleanly", r.center())))
    }
}

/// Resonances of a 1D potential: zeros of `2iλM₂₂(λ)` in the region.
///
/// The returned set is closed under `λ ↦ -conj λ` and may therefore reach
/// outside the region by mirror images.
pub fn find_resonances<T: Real>(v: &Potential<T>, region: Region, tol: f64) -> Result<Vec<Resonance>> {
    if !(tol > 0.0 && tol < 1.0) {
        return Err(invalid(format!("tolerance {tol} must lie in (0, 1)")));
    }
    let prop = Propagator::new(v)?;
    if prop.is_zero() {
        return Ok(Vec::new());
    }
    let top = region.im.1.min(-tol);
    if top <= region.im.0 {
        return Err(invalid("region lies within the tolerance of the real axis"));
    }
    let reach = region.re.0.abs().max(region.re.1.abs());
    // Straddle the imaginary axis off-centre so axis zeros fall inside and the mirror half is searched once.
    let (x0, x1) = if region.re.0 <= 0.0 { (-0.0173 * reach.max(1.0), reach) } else { region.re };
    let finder = Finder { prop, tol };
    let mut found = Vec::new();
    let mut done = false;
    for attempt in 0..4 {
        let pad = 0.37 * tol * attempt as f64;
        let rect = Rect { x0: x0 - pad, x1: x1 + pad, y0: region.im.0 - pad, y1: top };
        match finder.winding(&rect)? {
            Ok(w) => {
                log::debug!("argument principle: {w} zero(s) in {rect:?}");
                finder.solve(rect, w, &mut found)?;
                done = true;
                break;
            }
            Err(NearZero) => log::debug!("contour near a zero; enlarging (attempt {attempt})"),
        }
    }
    if !done {
        return Err(Error::NonConvergence("resonance contour kept passing through zeros".into()));
    }
    let axis = |z: C64| z.re.abs() <= tol.max(1e-8 * z.norm());
    let mut out: Vec<Resonance> = Vec::new();
    let mut push = |z: C64, mult: usize, residual: f64| {
        if out.iter().any(|r| (r.lambda - z).norm() < tol) {
            return;
        }
        let class = if axis(z) { ResonanceClass::ImaginaryAxis } else { ResonanceClass::Pair };
        let z = if class == ResonanceClass::ImaginaryAxis { C64::new(0.0, z.im) } else { z };
        out.push(Resonance { lambda: z, multiplicity: mult, class, residual });
    };
    for &(z, mult, res) in &found {
        let z = if z.re < 0.0 && !axis(z) { C64::new(-z.re, z.im) } else { z };
        push(z, mult, res);
        if !axis(z) {
            push(C64::new(-z.re, z.im), mult, res);
        }
    }
    out.retain(|r| region.contains(r.lambda, tol) || region.contains(C64::new(-r.lambda.re, r.lambda.im), tol));
    out.sort_by(|a, b| a.lambda.re.total_cmp(&b.lambda.re).then(b.lambda.im.total_cmp(&a.lambda.im)));
    Ok(out)
}

/// Bound-state energies `-μ²` (ascending) from sign changes of `μ M₂₂(iμ)`, which is real.
pub fn bound_state_energies<T: Real>(v: &Potential<T>) -> Result<Vec<f64>> {
    let prop = Propagator::new(v)?;
    let depth = -v.values().iter().map(|x| x.f64()).fold(0.0, f64::min);
    if prop.is_zero() || depth <= 0.0 {
        return Ok(Vec::new());
    }
    let mu_max = depth.sqrt() * 1.01;
    let g = |mu: f64| -> Result<f64> { Ok(mu * prop.transfer(C64::new(0.0, mu))?.outgoing().re) };
    const K: usize = 800;
    let mus: Vec<f64> = (1..=K).map(|i| mu_max * i as f64 / K as f64).collect();
    let vals: Vec<f64> = mus.par_iter().map(|&m| g(m)).collect::<Result<_>>()?;
    let mut energies = Vec::new();
    for i in 0..K - 1 {
        if vals[i] == 0.0 {
            energies.push(-mus[i] * mus[i]);
            continue;
        }
        if vals[i].signum() != vals[i + 1].signum() && vals[i + 1] != 0.0 {
            let (mut a, mut b, mut fa) = (mus[i], mus[i + 1], vals[i]);
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                let fm = g(m)?;
                if fm.signum() == fa.signum() {
                    a = m;
                    fa = fm;
                } else {
                    b = m;
                }
                if b - a < 1e-15 * b {
                    break;
                }
            }
            let mu = 0.5 * (a + b);
            energies.push(-mu * mu);
        }
    }
    energies.sort_by(f64::total_cmp);
    Ok(energies)
}
