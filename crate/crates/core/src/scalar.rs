//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use rustfft::FftNum;

/// Floating point scalar the toolkit is generic over: `f32` or `f64`.
///
/// `FftNum` pulls in `num_traits::Signed`, whose `abs`/`signum` collide with
/// the `Float` methods of the same name; call those as `Float::abs(x)`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + FftNum
    + Default
    + Display
    + LowerExp
    + Sum
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal. Panics only for values outside the range of `Self`.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    #[inline]
    fn of(n: usize) -> Self {
        Self::from_usize(n).expect("integer representable in scalar type")
    }

    #[inline]
    fn f64(self) -> f64 {
        self.to_f64().expect("scalar convertible to f64")
    }

    /// A standard normal draw, generated in `f64` and converted.
    fn standard_normal<R: rand::Rng + ?Sized>(rng: &mut R) -> Self {
        Self::lit(rand_distr::Distribution::<f64>::sample(&rand_distr::StandardNormal, rng))
    }

    /// Relative machine precision.
    fn eps() -> Self {
        Float::epsilon()
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Absolute value without the `Float`/`Signed` method ambiguity.
#[inline]
pub fn fabs<T: Real>(x: T) -> T {
    Float::abs(x)
}

