//! Numeric traits the library is generic over.
//!
//! Two tiers are used. [`Scalar`] is the minimum the Skorokhod map needs
//! (ring operations and an order), so reflection also runs on exact
//! rationals. [`Real`] adds the transcendental functions required by the
//! samplers, special functions and statistics, and is implemented for `f32`
//! and `f64`.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, Num, NumAssign, ToPrimitive};
use rand::Rng;
use rand_distr::{Distribution, Exp1, Open01, StandardNormal};

/// Ordered ring element: enough to run the discrete reflection recursion.
pub trait Scalar: Num + NumAssign + Copy + PartialOrd + Debug + Send + Sync + 'static {}

impl<T> Scalar for T where T: Num + NumAssign + Copy + PartialOrd + Debug + Send + Sync + 'static {}

/// floating point: f32 or f64
pub trait Real:
    Scalar + Float + FloatConst + FromPrimitive + ToPrimitive + Display + Default
{
    /// Lossy conversion from an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("f64 literal representable")
    }

    /// Lossy conversion from a count.
    #[inline]
    fn from_count(n: usize) -> Self {
        <Self as FromPrimitive>::from_usize(n).expect("count representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        ToPrimitive::to_f64(&self).expect("finite conversion to f64")
    }

    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self;

    fn standard_exponential<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// Uniform on the open interval (0, 1).
    fn open_uniform<R: Rng + ?Sized>(rng: &mut R) -> Self;
}

macro_rules! impl_real {
    ($($t:ty),*) => {$(
        impl Real for $t {
            #[inline]
            fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
                StandardNormal.sample(rng)
            }

            #[inline]
            fn standard_exponential<R: Rng + ?Sized>(rng: &mut R) -> Self {
                Exp1.sample(rng)
            }

            #[inline]
            fn open_uniform<R: Rng + ?Sized>(rng: &mut R) -> Self {
                Open01.sample(rng)
            }
        }
    )*};
}

impl_real!(f32, f64);
