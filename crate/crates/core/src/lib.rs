//! Numerical construction of compact embedded minimal surfaces in S³ that
//! desingularize `m` Clifford tori meeting along a great circle.
//!
//! The pipeline: build the pentahedral tessellation of S³ for parameters
//! `(m, ℓ)` ([`tessellation`]), solve a discrete Plateau problem for one
//! fundamental piece ([`plateau`]), replicate it by a finite group of
//! rotations and weld the copies into a closed mesh ([`assembly`]), then check
//! genus, embeddedness, symmetry and area ([`verify`]).

pub mod assembly;
pub mod pipeline;
pub mod plateau;
pub mod s3geom;
mod scalar;
pub mod tessellation;
pub mod verify;

pub use scalar::{Scalar, Tolerances};

pub type S3PointF64 = s3geom::S3Point<f64>;
pub type S3PointF32 = s3geom::S3Point<f32>;
pub type IsometryF64 = s3geom::Isometry<f64>;
pub type IsometryF32 = s3geom::Isometry<f32>;
pub type GreatCircleF64 = s3geom::GreatCircle<f64>;
pub type GreatCircleF32 = s3geom::GreatCircle<f32>;
pub type GeodesicArcF64 = s3geom::GeodesicArc<f64>;
pub type CliffordTorusF64 = s3geom::CliffordTorus<f64>;
pub type CliffordTorusF32 = s3geom::CliffordTorus<f32>;
