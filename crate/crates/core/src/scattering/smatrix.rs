use num_complex::Complex64 as C64;

use super::transfer::Propagator;
use crate::error::{invalid, Result};
use crate::fields::Potential;
use crate::scalar::Real;

/// `S(λ) = [[t, r_R], [r_L, t]]` for real `λ ≠ 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SMatrix1D {
    pub lambda: f64,
    pub transmission: C64,
    /// Reflection of a wave incoming from the left.
    pub reflection_left: C64,
    pub reflection_right: C64,
}

impl SMatrix1D {
    pub fn entries(&self) -> [[C64; 2]; 2] {
        [[self.transmission, self.reflection_right], [self.reflection_left, self.transmission]]
    }

    pub fn det(&self) -> C64 {
        self.transmission * self.transmission - self.reflection_left * self.reflection_right
    }

    /// `max |S*S - I|` entrywise.
    pub fn unitarity_defect(&self) -> f64 {
        let s = self.entries();
        let mut worst: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                let mut z = C64::new(0.0, 0.0);
                for k in 0..2 {
                    z += s[k][i].conj() * s[k][j];
                }
                if i == j {
                    z -= 1.0;
                }
                worst = worst.max(z.norm());
            }
        }
        worst
    }
}

pub(crate) fn smatrix_from(p: &Propagator<'_, impl Real>, lambda: f64) -> Result<SMatrix1D> {
    if !(lambda.is_finite() && lambda != 0.0) {
        return Err(invalid(format!("the scattering matrix is defined for real λ ≠ 0, got {lambda}")));
    }
    let m = p.transfer(C64::new(lambda, 0.0))?.entries;
    let inv = 1.0 / m[1][1];
    Ok(SMatrix1D { lambda, transmission: inv, reflection_left: -m[1][0] * inv, reflection_right: m[0][1] * inv })
}

pub fn smatrix<T: Real>(v: &Potential<T>, lambda: f64) -> Result<SMatrix1D> {
    smatrix_from(&Propagator::new(v)?, lambda)
}
