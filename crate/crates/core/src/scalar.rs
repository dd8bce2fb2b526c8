//! Scalar abstraction shared by every numerical routine in the crate.
//!
//! All operators are complex matrices over a real field `T`. The field is
//! `f64` in practice; `f32` is supported with correspondingly looser default
//! tolerances (see [`Real::default_tolerances`]).

use std::fmt::{Debug, Display};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

use crate::tolerance::Tolerances;

/// Real floating-point field underlying the complex matrices.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Default + Debug + Display + Send + Sync + 'static
{
    /// Tolerance set appropriate for the precision of this type.
    fn default_tolerances() -> Tolerances;

    /// Lossy conversion from an `f64` constant.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {
    fn default_tolerances() -> Tolerances {
        Tolerances::double()
    }
}

impl Real for f32 {
    fn default_tolerances() -> Tolerances {
        Tolerances::single()
    }
}

/// Complex scalar over `T`.
pub type C<T> = Complex<T>;

#[inline]
pub(crate) fn czero<T: Real>() -> C<T> {
    C::new(T::zero(), T::zero())
}

#[inline]
pub(crate) fn cone<T: Real>() -> C<T> {
    C::new(T::one(), T::zero())
}

#[inline]
pub(crate) fn creal<T: Real>(x: T) -> C<T> {
    C::new(x, T::zero())
}

/// `|z|^2` without the square root.
#[inline]
pub(crate) fn abs2<T: Real>(z: C<T>) -> T {
    z.re * z.re + z.im * z.im
}
