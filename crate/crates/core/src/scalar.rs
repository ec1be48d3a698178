use std::cmp::Ordering;
use std::fmt::{Debug, Display};
use std::ops::Neg;

use num_traits::{Float, FromPrimitive, Num, ToPrimitive};

/// Coordinate and weight type accepted by the solvers.
///
/// Comparisons assume finite values, so `partial_cmp` is total in practice.
pub trait Scalar:
    Copy
    + PartialOrd
    + Debug
    + Display
    + Num
    + Neg<Output = Self>
    + ToPrimitive
    + FromPrimitive
    + Send
    + Sync
    + 'static
{
    fn is_finite_value(self) -> bool;

    fn total_cmp(self, other: Self) -> Ordering {
        self.partial_cmp(&other).unwrap_or(Ordering::Equal)
    }

    fn min_of(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    fn max_of(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    fn abs_value(self) -> Self {
        if self < Self::zero() {
            -self
        } else {
            self
        }
    }

    fn two() -> Self {
        Self::one() + Self::one()
    }
}

macro_rules! float_scalar {
    ($($t:ty),*) => {$(
        impl Scalar for $t {
            fn is_finite_value(self) -> bool {
                self.is_finite()
            }
        }
    )*};
}

macro_rules! int_scalar {
    ($($t:ty),*) => {$(
        impl Scalar for $t {
            fn is_finite_value(self) -> bool {
                true
            }
        }
    )*};
}

float_scalar!(f32, f64);
int_scalar!(i32, i64, i128);

/// Floating-point scalars, needed by rotation and by the approximation.
pub trait Real: Scalar + Float {}

impl<T: Scalar + Float> Real for T {}
