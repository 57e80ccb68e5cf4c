use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use super::grid::GridSpec;
use crate::error::{invalid, Error, Result};
use crate::scalar::{fabs, Real};

/// Point-value callback of a custom profile, in coordinates relative to its centre.
pub type ProfileFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Radial building blocks for potentials.
#[derive(Clone)]
pub enum Shape {
    /// `-depth · 1_{|x| ≤ half_width}`.
    Well { depth: f64, half_width: f64 },
    /// `amplitude · exp(1 - 1/(1 - (|x|/radius)²))` inside the ball.
    Bump { amplitude: f64, radius: f64 },
    /// Box of unit-`weight` integral and diameter `width`; `(c/ε)·1_{|x|≤ε/2}` in 1D.
    DeltaApprox { weight: f64, width: f64 },
    /// Arbitrary function vanishing outside `radius`, sampled pointwise.
    Custom { func: ProfileFn, radius: f64, smooth: bool },
}

impl fmt::Debug for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Shape::Well { depth, half_width } => write!(f, "Well(depth={depth}, a={half_width})"),
            Shape::Bump { amplitude, radius } => write!(f, "Bump(A={amplitude}, a={radius})"),
            Shape::DeltaApprox { weight, width } => write!(f, "DeltaApprox(c={weight}, eps={width})"),
            Shape::Custom { radius, .. } => write!(f, "Custom(R={radius})"),
        }
    }
}

fn unit_ball_volume(dim: usize) -> f64 {
    match dim {
        1 => 2.0,
        2 => std::f64::consts::PI,
        _ => 4.0 * std::f64::consts::PI / 3.0,
    }
}

fn param(params: &HashMap<String, f64>, keys: &[&str]) -> Result<f64> {
    for k in keys {
        if let Some(&v) = params.get(*k) {
            if !v.is_finite() {
                return Err(invalid(format!("parameter {k} = {v} is not finite")));
            }
            return Ok(v);
        }
    }
    Err(invalid(format!("missing parameter {}", keys[0])))
}

impl Shape {
    /// Builds a shape from a kind name and a parameter map.
    ///
    /// Recognised keys: `well` (`depth`|`V0`, `a`), `bump` (`amplitude`|`A`, `a`),
    /// `delta_approx` (`weight`|`c`, `eps`|`width`).
    pub fn from_params(kind: &str, params: &HashMap<String, f64>) -> Result<Self> {
        let shape = match kind {
            "well" => Shape::Well {
                depth: param(params, &["depth", "V0", "v0"])?,
                half_width: param(params, &["a", "half_width"])?,
            },
            "bump" => Shape::Bump {
                amplitude: param(params, &["amplitude", "A"])?,
                radius: param(params, &["a", "radius"])?,
            },
            "delta_approx" | "delta" => Shape::DeltaApprox {
                weight: param(params, &["weight", "c"])?,
                width: param(params, &["eps", "width"])?,
            },
            "zero" => Shape::Bump { amplitude: 0.0, radius: 1.0 },
            other => return Err(invalid(format!("unknown potential kind '{other}'"))),
        };
        if shape.radius() <= 0.0 {
            return Err(invalid(format!("{shape:?}: radius must be positive")));
        }
        Ok(shape)
    }

    pub fn radius(&self) -> f64 {
        match self {
            Shape::Well { half_width, .. } => *half_width,
            Shape::Bump { radius, .. } => *radius,
            Shape::DeltaApprox { width, .. } => 0.5 * width,
            Shape::Custom { radius, .. } => *radius,
        }
    }

    /// Height and radius of a radial step, for the discontinuous shapes.
    pub fn step(&self, dim: usize) -> Option<(f64, f64)> {
        match self {
            Shape::Well { depth, half_width } => Some((-depth, *half_width)),
            Shape::DeltaApprox { weight, width } => {
                let rho = 0.5 * width;
                Some((weight / (unit_ball_volume(dim) * rho.powi(dim as i32)), rho))
            }
            _ => None,
        }
    }

    /// Point value at offset `x` from the centre.
    pub fn value(&self, x: &[f64]) -> f64 {
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        match self {
            Shape::Bump { amplitude, radius } => {
                let q = r / radius;
                if q < 1.0 {
                    amplitude * (1.0 - 1.0 / (1.0 - q * q)).exp()
                } else {
                    0.0
                }
            }
            Shape::Custom { func, radius, .. } => {
                if r <= *radius {
                    func(x)
                } else {
                    0.0
                }
            }
            _ => {
                let (height, rho) = self.step(x.len()).unwrap();
                if r <= rho {
                    height
                } else {
                    0.0
                }
            }
        }
    }

    /// Average over the axis-aligned cube of side `h` centred at offset `x`.
    fn cell_average(&self, x: &[f64], h: f64) -> f64 {
        let (height, rho) = match self.step(x.len()) {
            Some(s) => s,
            None => return self.value(x),
        };
        let dim = x.len();
        if dim == 1 {
            let lo = (x[0] - 0.5 * h).max(-rho);
            let hi = (x[0] + 0.5 * h).min(rho);
            return height * (hi - lo).max(0.0) / h;
        }
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let half_diag = 0.5 * h * (dim as f64).sqrt();
        if r + half_diag <= rho {
            return height;
        }
        if r - half_diag >= rho {
            return 0.0;
        }
        const SUB: usize = 16;
        let mut inside = 0usize;
        let total = SUB.pow(dim as u32);
        let mut p = [0.0; 3];
        for s in 0..total {
            let mut rest = s;
            for d in 0..dim {
                let i = rest % SUB;
                rest /= SUB;
                p[d] = x[d] + h * ((i as f64 + 0.5) / SUB as f64 - 0.5);
            }
            if p[..dim].iter().map(|v| v * v).sum::<f64>() <= rho * rho {
                inside += 1;
            }
        }
        height * inside as f64 / total as f64
    }
}

/// A shape placed at `center` and multiplied by `weight`.
#[derive(Clone, Debug)]
pub struct Component {
    pub shape: Shape,
    pub center: Vec<f64>,
    pub weight: f64,
}

impl Component {
    pub fn centered(shape: Shape, dim: usize) -> Self {
        Self { shape, center: vec![0.0; dim], weight: 1.0 }
    }

    fn outer_radius(&self) -> f64 {
        self.center.iter().map(|c| c * c).sum::<f64>().sqrt() + self.shape.radius()
    }

    fn offset(&self, x: &[f64], out: &mut [f64]) {
        for d in 0..x.len() {
            out[d] = x[d] - self.center[d];
        }
    }
}

/// Compactly supported real potential sampled on a [`GridSpec`].
///
/// Smooth shapes are sampled pointwise; steps are cell averaged, which keeps
/// `∫V` exact. Values vanish outside `support_radius`, which must respect
/// the guard `R ≤ 3L/4`. The analytic profile, when known, is kept so the
/// potential can be resampled, translated or evaluated off-grid exactly.
#[derive(Clone, Debug)]
pub struct Potential<T: Real> {
    grid: GridSpec,
    values: Vec<T>,
    support_radius: f64,
    linf_norm: T,
    profile: Option<Arc<Vec<Component>>>,
}

impl<T: Real> Potential<T> {
    pub fn zero(grid: GridSpec) -> Self {
        Self {
            grid,
            values: vec![T::zero(); grid.len()],
            support_radius: 0.0,
            linf_norm: T::zero(),
            profile: Some(Arc::new(Vec::new())),
        }
    }

    pub fn from_shape(grid: GridSpec, shape: Shape) -> Result<Self> {
        Self::from_components(grid, vec![Component::centered(shape, grid.dim())])
    }

    pub fn from_components(grid: GridSpec, components: Vec<Component>) -> Result<Self> {
        let dim = grid.dim();
        let h = grid.spacing();
        let mut outer: f64 = 0.0;
        for c in &components {
            if c.center.len() != dim {
                return Err(invalid(format!("component centre has {} coordinates, grid has dimension {dim}", c.center.len())));
            }
            if !(c.weight.is_finite() && c.center.iter().all(|x| x.is_finite())) {
                return Err(invalid("non-finite component parameters"));
            }
            if c.weight != 0.0 {
                outer = outer.max(c.outer_radius());
            }
        }
        let support_radius = if outer > 0.0 { outer + h * (dim as f64).sqrt() } else { 0.0 };
        if support_radius > grid.guard_radius() {
            return Err(Error::SupportExceedsGuard { radius: support_radius, limit: grid.guard_radius() });
        }
        let mut values = vec![T::zero(); grid.len()];
        let mut x = [0.0; 3];
        let mut y = [0.0; 3];
        for (flat, v) in values.iter_mut().enumerate() {
            grid.position(flat, &mut x);
            let mut acc = 0.0;
            for c in &components {
                if c.weight == 0.0 {
                    continue;
                }
                c.offset(&x[..dim], &mut y);
                acc += c.weight * c.shape.cell_average(&y[..dim], h);
            }
            if !acc.is_finite() {
                return Err(invalid("potential evaluates to a non-finite value"));
            }
            *v = T::lit(acc);
        }
        let mut p = Self::assemble(grid, values, support_radius);
        p.profile = Some(Arc::new(components));
        Ok(p)
    }

    /// Wraps raw samples. Fails if any value outside `support_radius` is nonzero.
    pub fn from_values(grid: GridSpec, values: Vec<T>, support_radius: f64) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Format(format!("expected {} values, got {}", grid.len(), values.len())));
        }
        if support_radius > grid.guard_radius() {
            return Err(Error::SupportExceedsGuard { radius: support_radius, limit: grid.guard_radius() });
        }
        let mut x = [0.0; 3];
        for (flat, v) in values.iter().enumerate() {
            if !v.is_finite() {
                return Err(invalid("non-finite sample"));
            }
            grid.position(flat, &mut x);
            let r = x[..grid.dim()].iter().map(|c| c * c).sum::<f64>().sqrt();
            if *v != T::zero() && r > support_radius {
                return Err(invalid(format!("nonzero sample at radius {r} outside support radius {support_radius}")));
            }
        }
        Ok(Self::assemble(grid, values, support_radius))
    }

    fn assemble(grid: GridSpec, values: Vec<T>, support_radius: f64) -> Self {
        let linf_norm = values.iter().fold(T::zero(), |m, &v| m.max(fabs(v)));
        Self { grid, values, support_radius, linf_norm, profile: None }
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn support_radius(&self) -> f64 {
        self.support_radius
    }

    pub fn linf_norm(&self) -> T {
        self.linf_norm
    }

    pub fn components(&self) -> Option<&[Component]> {
        self.profile.as_deref().map(|v| v.as_slice())
    }

    pub fn is_zero(&self) -> bool {
        self.linf_norm == T::zero()
    }

    /// Grid quadrature of `V`.
    pub fn integral(&self) -> T {
        let s: T = self.values.iter().copied().sum();
        s * T::lit(self.grid.cell_volume())
    }

    /// Grid quadrature of `|V|^p`.
    pub fn lp_norm_pow(&self, p: f64) -> T {
        let pp = T::lit(p);
        let s: T = self.values.iter().map(|&v| fabs(v).powf(pp)).sum();
        s * T::lit(self.grid.cell_volume())
    }

    /// `‖V‖_{L^p}`, with `p = ∞` giving the sup norm.
    pub fn lp_norm(&self, p: f64) -> T {
        if p.is_infinite() {
            self.linf_norm
        } else {
            self.lp_norm_pow(p).powf(T::lit(1.0 / p))
        }
    }

    /// Indices of samples with nonzero value.
    pub fn support_indices(&self) -> Vec<usize> {
        (0..self.values.len()).filter(|&i| self.values[i] != T::zero()).collect()
    }

    /// `α V`.
    pub fn scaled(&self, alpha: f64) -> Self {
        let a = T::lit(alpha);
        let mut p = Self::assemble(self.grid, self.values.iter().map(|&v| v * a).collect(), self.support_radius);
        p.profile = self.profile.as_ref().map(|comps| {
            Arc::new(comps.iter().map(|c| Component { weight: c.weight * alpha, ..c.clone() }).collect())
        });
        p
    }

    /// Shift by whole cells along each axis.
    pub fn translated(&self, cells: &[i64]) -> Result<Self> {
        let dim = self.dim();
        if cells.len() != dim {
            return Err(invalid("translation vector has the wrong dimension"));
        }
        let h = self.grid.spacing();
        let norm = cells.iter().map(|&c| (c as f64 * h).powi(2)).sum::<f64>().sqrt();
        let radius = if self.is_zero() { 0.0 } else { self.support_radius + norm };
        if radius > self.grid.guard_radius() {
            return Err(Error::SupportExceedsGuard { radius, limit: self.grid.guard_radius() });
        }
        let n = self.grid.points() as i64;
        let mut values = vec![T::zero(); self.values.len()];
        let mut idx = [0usize; 3];
        for (flat, &v) in self.values.iter().enumerate() {
            if v == T::zero() {
                continue;
            }
            self.grid.unravel(flat, &mut idx[..dim]);
            for d in 0..dim {
                idx[d] = (idx[d] as i64 + cells[d]).rem_euclid(n) as usize;
            }
            values[self.grid.ravel(&idx[..dim])] = v;
        }
        let mut p = Self::assemble(self.grid, values, radius);
        p.profile = self.profile.as_ref().map(|comps| {
            Arc::new(
                comps
                    .iter()
                    .map(|c| Component {
                        center: c.center.iter().zip(cells).map(|(x, &s)| x + s as f64 * h).collect(),
                        ..c.clone()
                    })
                    .collect(),
            )
        });
        Ok(p)
    }

    /// The same potential on a grid with `points` per axis over the same box.
    ///
    /// Rebuilt from the profile when known. Raw samples can only be halved,
    /// by full weighting of neighbouring cells.
    pub fn resampled(&self, points: usize) -> Result<Self> {
        let grid = self.grid.with_points(points)?;
        if points == self.grid.points() {
            return Ok(self.clone());
        }
        if let Some(comps) = &self.profile {
            return Self::from_components(grid, comps.as_ref().clone());
        }
        if self.dim() != 1 || 2 * points != self.grid.points() {
            return Err(Error::Unsupported("raw samples can only be coarsened by a factor 2 in 1D".into()));
        }
        let n = self.grid.points();
        let values = (0..points)
            .map(|j| (self.values[2 * j] + self.values[(2 * j + 1) % n]) * T::lit(0.5))
            .collect();
        Self::from_values(grid, values, self.support_radius + grid.spacing())
    }

    /// Point value at `x`: the analytic profile when known, else the containing cell.
    pub fn value_at(&self, x: &[f64]) -> f64 {
        let dim = self.dim();
        if let Some(comps) = &self.profile {
            let mut y = [0.0; 3];
            return comps
                .iter()
                .map(|c| {
                    c.offset(x, &mut y);
                    c.weight * c.shape.value(&y[..dim])
                })
                .sum();
        }
        let h = self.grid.spacing();
        let l = self.grid.half_width();
        let mut idx = [0usize; 3];
        for d in 0..dim {
            let j = ((x[d] + l) / h).floor();
            if j < 0.0 || j >= self.grid.points() as f64 {
                return 0.0;
            }
            idx[d] = j as usize;
        }
        self.values[self.grid.ravel(&idx[..dim])].f64()
    }

    /// 1D positions where the point values may jump, sorted.
    ///
    /// Step profiles contribute their edges; raw samples contribute every
    /// cell boundary inside the support.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out = Vec::new();
        match &self.profile {
            Some(comps) => {
                for c in comps.iter() {
                    let rho = c.shape.radius();
                    let smooth = matches!(c.shape, Shape::Bump { .. } | Shape::Custom { smooth: true, .. });
                    if !smooth && c.weight != 0.0 {
                        out.push(c.center[0] - rho);
                        out.push(c.center[0] + rho);
                    }
                }
            }
            None => {
                let h = self.grid.spacing();
                let l = self.grid.half_width();
                for j in 0..=self.grid.points() {
                    let x = -l + j as f64 * h;
                    if x.abs() <= self.support_radius + h {
                        out.push(x);
                    }
                }
            }
        }
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    /// Converts the samples to another scalar type.
    pub fn cast<U: Real>(&self) -> Potential<U> {
        let mut p = Potential::<U>::assemble(self.grid, self.values.iter().map(|v| U::lit(v.f64())).collect(), self.support_radius);
        p.profile = self.profile.clone();
        p
    }
}

/// Builds one of the standard potential families centred at the origin.
pub fn make_potential<T: Real>(kind: &str, params: &HashMap<String, f64>, grid: GridSpec) -> Result<Potential<T>> {
    let shape = Shape::from_params(kind, params)?;
    Potential::from_shape(grid, shape)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid1(n: usize) -> GridSpec {
        GridSpec::new(1, 8.0, n).unwrap()
    }

    #[test]
    fn well_integrals_are_exact() {
        let p: Potential<f64> = Potential::from_shape(grid1(1024), Shape::Well { depth: 1.0, half_width: 1.0 }).unwrap();
        assert!((p.integral() + 2.0).abs() < 1e-12);
        assert!((p.lp_norm_pow(2.0) - 2.0).abs() < 1e-12);
        assert_eq!(p.linf_norm(), 1.0);
    }

    #[test]
    fn off_grid_well_keeps_its_integral() {
        let p: Potential<f64> = Potential::from_shape(grid1(1000), Shape::Well { depth: 2.0, half_width: 0.7 }).unwrap();
        assert!((p.integral() + 2.8).abs() < 1e-12);
    }

    #[test]
    fn guard_is_enforced() {
        let r: Result<Potential<f64>> = Potential::from_shape(grid1(256), Shape::Well { depth: 1.0, half_width: 6.5 });
        assert!(matches!(r, Err(Error::SupportExceedsGuard { .. })));
    }

    #[test]
    fn translation_by_cells_matches_rebuild() {
        let g = grid1(256);
        let p: Potential<f64> = Potential::from_shape(g, Shape::Bump { amplitude: 1.0, radius: 1.0 }).unwrap();
        let q = p.translated(&[10]).unwrap();
        let mut c = Component::centered(Shape::Bump { amplitude: 1.0, radius: 1.0 }, 1);
        c.center[0] = 10.0 * g.spacing();
        let r: Potential<f64> = Potential::from_components(g, vec![c]).unwrap();
        for (a, b) in q.values().iter().zip(r.values()) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn two_dimensional_box_integral() {
        let g = GridSpec::new(2, 4.0, 64).unwrap();
        let p: Potential<f64> = Potential::from_shape(g, Shape::DeltaApprox { weight: 1.0, width: 1.0 }).unwrap();
        assert!((p.integral() - 1.0).abs() < 5e-3);
    }
}
