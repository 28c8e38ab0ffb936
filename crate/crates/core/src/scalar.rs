use std::fmt::Debug;

use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating point type the geometry layer is written against: f32 or f64.
pub trait Scalar:
    Float + FloatConst + FromPrimitive + Debug + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal. Never fails for the two implementors.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Central tolerance set.
///
/// `unit` is used for algebraic identities (unit norms, orthogonality of
/// rotation matrices), `geo` for geometric coincidence (a point lying on a
/// circle, a torus, a region boundary).
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Tolerances {
    pub unit: f64,
    pub geo: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances { unit: 1e-12, geo: 1e-9 };
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}
