//! Scalar abstraction for cost values.
//!
//! Every table and problem is generic over a [`Cost`]. Integers and
//! rationals give exact comparisons; floats are supported for real-valued
//! instances.

use std::fmt::{Debug, Display};
use std::ops::Add;
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{FromPrimitive, Zero};

/// A non-negative additive cost with a total-enough order for `min`.
pub trait Cost:
    Copy
    + PartialOrd
    + Zero
    + Add<Output = Self>
    + FromPrimitive
    + Debug
    + Display
    + FromStr
    + Send
    + Sync
    + 'static
{
    /// `false` for NaN and infinities. Always `true` for exact types.
    fn is_finite(&self) -> bool {
        true
    }

    /// Lossy conversion used only for reporting.
    fn to_f64(&self) -> f64;
}

macro_rules! exact_int_cost {
    ($($t:ty),*) => {$(
        impl Cost for $t {
            fn to_f64(&self) -> f64 {
                *self as f64
            }
        }
    )*};
}

exact_int_cost!(u32, u64, i32, i64);

impl Cost for f32 {
    fn is_finite(&self) -> bool {
        f32::is_finite(*self)
    }

    fn to_f64(&self) -> f64 {
        *self as f64
    }
}

impl Cost for f64 {
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }

    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Cost for Ratio<i64> {
    fn to_f64(&self) -> f64 {
        *self.numer() as f64 / *self.denom() as f64
    }
}

/// Smaller of two costs, keeping `a` on ties.
#[inline]
pub(crate) fn min_cost<C: Cost>(a: C, b: C) -> C {
    if b < a {
        b
    } else {
        a
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_finiteness() {
        assert!(Cost::is_finite(&1.5f64));
        assert!(!Cost::is_finite(&f64::NAN));
        assert!(!Cost::is_finite(&f32::INFINITY));
        assert!(Cost::is_finite(&7u64));
    }

    #[test]
    fn rational_roundtrips_through_text() {
        let r = Ratio::new(3i64, 4);
        let parsed: Ratio<i64> = r.to_string().parse().unwrap();
        assert_eq!(parsed, r);
        assert_eq!(r.to_f64(), 0.75);
    }
}
