//! Scalar abstractions.
//!
//! The algebraic core (matrix products, Horner evaluation, Faddeev–LeVerrier,
//! LU solves and the sliding-variable formula) only needs field operations and
//! works over [`Scalar`], which includes exact rationals. Anything that takes
//! square roots, fractional powers or iterates to convergence requires
//! [`Real`], i.e. a floating-point type.

use std::fmt::{Debug, Display};
use std::ops::Neg;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, FromPrimitive, Num, ToPrimitive, Zero};

/// Field element usable by the algebraic routines.
pub trait Scalar:
    Num + Neg<Output = Self> + Clone + PartialOrd + FromPrimitive + ToPrimitive + Debug + Display + Send + Sync + 'static
{
    /// Absolute value.
    fn magnitude(&self) -> Self;

    /// `false` for NaN and infinities. Exact types are always finite.
    fn finite(&self) -> bool;

    /// Converts a relative tolerance into this type's zero threshold.
    ///
    /// Floating types never go below a small multiple of machine epsilon.
    /// Exact types return zero, so only an exact zero counts as negligible.
    fn tolerance(rel: f64) -> Self;

    /// Lossy constructor from an `f64` literal.
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("literal representable in scalar type")
    }

    /// Lossy conversion for reporting.
    fn as_f64(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn max_of(a: Self, b: Self) -> Self {
        if b > a {
            b
        } else {
            a
        }
    }
}

/// Floating-point scalar.
pub trait Real: Scalar + Float {}

macro_rules! impl_float_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            fn magnitude(&self) -> Self {
                self.abs()
            }

            fn finite(&self) -> bool {
                self.is_finite()
            }

            fn tolerance(rel: f64) -> Self {
                (rel as $t).max(<$t>::EPSILON * 16.0)
            }
        }

        impl Real for $t {}
    };
}

impl_float_scalar!(f32);
impl_float_scalar!(f64);

impl Scalar for BigRational {
    fn magnitude(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    fn finite(&self) -> bool {
        true
    }

    fn tolerance(_rel: f64) -> Self {
        Self::zero()
    }
}

/// Exact rational from an integer numerator and denominator.
pub fn ratio(numer: i64, denom: i64) -> BigRational {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}
