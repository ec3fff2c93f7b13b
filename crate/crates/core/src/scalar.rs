use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Real scalar used throughout the crate: `f32` or `f64`.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Converts an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    #[inline]
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count representable in scalar type")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Lifts a real to the complex plane.
#[inline]
pub(crate) fn cplx<T: Real>(re: T) -> Complex<T> {
    Complex::new(re, T::zero())
}

/// Principal argument in (-pi, pi].
#[inline]
pub(crate) fn principal_arg<T: Real>(z: Complex<T>) -> T {
    let a = z.im.atan2(z.re);
    // atan2(-0.0, x<0) yields -pi; fold onto the closed upper end.
    if a <= -T::PI() {
        T::PI()
    } else {
        a
    }
}

/// Principal logarithm with the argument folded into (-pi, pi].
#[inline]
pub(crate) fn principal_ln<T: Real>(z: Complex<T>) -> Complex<T> {
    Complex::new(z.norm().ln(), principal_arg(z))
}

/// Converts a complex value between scalar types.
pub fn cast_complex<A: Real, B: Real>(z: Complex<A>) -> Complex<B> {
    Complex::new(B::lit(z.re.to_f64_lossy()), B::lit(z.im.to_f64_lossy()))
}
