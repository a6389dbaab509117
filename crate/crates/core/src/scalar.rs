//! Floating-point scalar abstraction shared by the numeric core.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, ToPrimitive};
use serde::de::DeserializeOwned;
use serde::Serialize;

/// Real scalar type the charts, models and generators are generic over.
///
/// Implemented for `f32` and `f64`. Distribution quantiles are always
/// evaluated in `f64` and cast into the working type.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
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
    /// Lossy conversion from `f64`.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 is representable in every Scalar")
    }

    /// Lossy conversion from `usize`.
    fn of_count(n: usize) -> Self {
        Self::of(n as f64)
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Neumaier-compensated accumulator.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CompensatedSum<T> {
    sum: T,
    comp: T,
}

impl<T: Scalar> CompensatedSum<T> {
    pub fn new() -> Self {
        Self { sum: T::zero(), comp: T::zero() }
    }

    pub fn add(&mut self, x: T) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp = self.comp + ((self.sum - t) + x);
        } else {
            self.comp = self.comp + ((x - t) + self.sum);
        }
        self.sum = t;
    }

    pub fn value(&self) -> T {
        self.sum + self.comp
    }
}
