use std::cmp::Ordering;
use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_traits::{Float, FromPrimitive, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Floating-point type the learners are generic over (`f32` or `f64`).
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + FromStr
    + Default
    + Debug
    + Display
    + Send
    + Sync
    + Serialize
    + DeserializeOwned
    + 'static
{
    /// Total order; callers only compare finite values.
    fn total_cmp_s(&self, other: &Self) -> Ordering;

    fn from_usize_s(n: usize) -> Self {
        Self::from_usize(n).expect("count representable as float")
    }

    fn half() -> Self {
        Self::from_f64(0.5).expect("0.5 representable")
    }

    fn two() -> Self {
        Self::one() + Self::one()
    }

    /// Smallest improvement treated as real when comparing accumulated losses of size `scale`.
    fn improvement_tol(scale: Self) -> Self {
        let s = scale.abs() + Self::one();
        s * Self::epsilon() * Self::from_f64(64.0).unwrap()
    }
}

impl Scalar for f32 {
    fn total_cmp_s(&self, other: &Self) -> Ordering {
        self.total_cmp(other)
    }
}

impl Scalar for f64 {
    fn total_cmp_s(&self, other: &Self) -> Ordering {
        self.total_cmp(other)
    }
}

pub(crate) fn sort_scalars<T: Scalar>(values: &mut [T]) {
    values.sort_by(|a, b| a.total_cmp_s(b));
}
