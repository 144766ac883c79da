//! Scalar types usable as probabilities.
//!
//! Kernels and distributions are generic over [`Prob`]. Floating point
//! scalars compare within a tolerance; the exact [`Rational`] scalar ignores
//! the tolerance and compares exactly, which keeps 0/1 kernel identities
//! bit-exact.

use std::fmt::Debug;

use num_rational::Ratio;
use num_traits::{Num, ToPrimitive};

/// Exact rational scalar.
pub type Rational = Ratio<i64>;

/// A numeric type that can carry probability mass.
pub trait Prob: Num + Clone + PartialOrd + Debug + Send + Sync + 'static {
    /// Lossy conversion for reporting and for float-only algorithms.
    fn to_f64(&self) -> f64;

    /// Equality up to `tol` (exact types ignore `tol`).
    fn close_to(&self, other: &Self, tol: f64) -> bool;

    /// Whether the type compares exactly.
    const EXACT: bool;
}

macro_rules! impl_float_prob {
    ($f:ty) => {
        impl Prob for $f {
            fn to_f64(&self) -> f64 {
                *self as f64
            }

            fn close_to(&self, other: &Self, tol: f64) -> bool {
                ((*self as f64) - (*other as f64)).abs() <= tol
            }

            const EXACT: bool = false;
        }
    };
}

impl_float_prob!(f32);
impl_float_prob!(f64);

impl Prob for Rational {
    fn to_f64(&self) -> f64 {
        rational_f64(self)
    }

    fn close_to(&self, other: &Self, _tol: f64) -> bool {
        self == other
    }

    const EXACT: bool = true;
}

/// Exact ratio `num / den` with an explicit convention for `0/0`.
pub fn ratio_or(num: usize, den: usize, zero_over_zero: Rational) -> Rational {
    if den == 0 {
        zero_over_zero
    } else {
        Rational::new(num as i64, den as i64)
    }
}

/// Float value of a rational.
pub fn rational_f64(r: &Rational) -> f64 {
    ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
}
