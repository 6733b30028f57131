//! Scalar abstraction shared by the geometry, box and statistics code.

use std::fmt::Debug;

use num_traits::{Float, FloatConst, FromPrimitive, NumCast};

/// Floating point scalar: `f32` or `f64`.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + NumCast + Debug + Default + Send + Sync + 'static
{
    /// Lossy conversion from `f64`.
    fn of(v: f64) -> Self {
        <Self as NumCast>::from(v).expect("f64 is representable in every float scalar")
    }

    /// Lossless widening to `f64`.
    fn to_f64_lossless(self) -> f64 {
        <f64 as NumCast>::from(self).expect("float scalars widen to f64")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}
