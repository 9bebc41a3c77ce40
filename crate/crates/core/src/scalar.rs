//! Scalar abstraction shared by every numeric routine in the crate.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;
use std::str::FromStr;

use num_traits::{Float, FromPrimitive, NumAssignOps, ToPrimitive};
use rand::Rng;
use rand_distr::{Distribution, Gamma, Open01, StandardNormal};

/// Floating point scalar: `f32` or `f64`.
///
/// Besides the arithmetic bounds, the trait carries the handful of random
/// draws the sampler needs so that generic code never has to spell out
/// `StandardNormal: Distribution<T>` style bounds.
pub trait Real:
    Float
    + FromPrimitive
    + ToPrimitive
    + NumAssignOps
    + Sum
    + Default
    + Debug
    + Display
    + LowerExp
    + FromStr
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal. Panics only if the value is unrepresentable,
    /// which never happens for finite literals.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    /// Converts a count.
    fn from_count(n: usize) -> Self {
        Self::from_usize(n).expect("count fits in float")
    }

    /// One draw from N(0, 1).
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// One draw from the open unit interval.
    fn open01<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// One draw from Gamma(shape, rate). Both parameters must be positive
    /// and finite.
    fn sample_gamma<R: Rng + ?Sized>(shape: Self, rate: Self, rng: &mut R) -> Self;
}

macro_rules! impl_real {
    ($t:ty) => {
        impl Real for $t {
            fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
                StandardNormal.sample(rng)
            }

            fn open01<R: Rng + ?Sized>(rng: &mut R) -> Self {
                Open01.sample(rng)
            }

            fn sample_gamma<R: Rng + ?Sized>(shape: Self, rate: Self, rng: &mut R) -> Self {
                Gamma::new(shape, 1.0 / rate)
                    .expect("gamma parameters validated by caller")
                    .sample(rng)
            }
        }
    };
}

impl_real!(f32);
impl_real!(f64);

/// Largest absolute entry, `0` for an empty slice.
pub fn max_abs<T: Real>(x: &[T]) -> T {
    x.iter().fold(T::zero(), |m, &v| m.max(v.abs()))
}

pub fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}
