use num_traits::Float;

use crate::error::{invalid, Result};
use crate::scalar::Real;

/// `r_m(s)` defined by `e^{-s} = Σ_{j<m} (-s)^j/j! + r_m(s) (-1)^m s^m/m!`.
///
/// Equivalently `r_m(s) = m!Σ_{i≥0} (-s)^i/(m+i)!`, which is summed for
/// `s < m + 1`; larger `s` use the upward recursion
/// `r_{j+1} = (j+1)(1 - r_j)/s` from `r_0 = e^{-s}`, stable there.
pub fn expexp_remainder<T: Real>(m: u32, s: T) -> Result<T> {
    if !(s >= T::zero()) || !s.is_finite() {
        return Err(invalid(format!("expexp_remainder needs s ≥ 0, got {s}")));
    }
    Ok(remainder_unchecked(m, s))
}

pub(crate) fn remainder_unchecked<T: Real>(m: u32, s: T) -> T {
    let mf = T::lit(m as f64);
    if s < mf + T::one() {
        let mut term = T::one();
        let mut sum = T::one();
        let mut i = 1u32;
        loop {
            term = -term * s / T::lit((m + i) as f64);
            sum = sum + term;
            if Float::abs(term) <= T::eps() * Float::abs(sum) || i > 200 {
                break;
            }
            i += 1;
        }
        sum
    } else {
        let mut r = (-s).exp();
        for j in 0..m {
            r = T::lit((j + 1) as f64) * (T::one() - r) / s;
        }
        r
    }
}
