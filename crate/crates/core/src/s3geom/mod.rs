//! Spherical geometry of S³ ⊂ R⁴: points, great circles and arcs, Clifford
//! tori, and the rotations (plane rotations, screw motions, half-turns) the
//! construction is built from.
//!
//! Everything here is generic over [`Scalar`](crate::Scalar) and defaults to
//! `f64`.

mod circle;
mod isometry;
mod point;
mod torus;
pub mod vec4;

pub use circle::{GeodesicArc, GreatCircle};
pub use isometry::Isometry;
pub use point::{clifford_chart, geodesic_distance, midpoint, slerp, S3Point};
pub use torus::{torus_distance, CliffordTorus};
pub use vec4::Vec4;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeomError {
    #[error("vector is not unit length (norm {0})")]
    NotUnit(f64),
    #[error("matrix is not orthogonal (‖RRᵀ−I‖∞ = {0:e})")]
    NotOrthogonal(f64),
    #[error("invalid axis indices: {0}")]
    InvalidAxes(String),
    #[error("circle frame is not orthonormal")]
    BadFrame,
    #[error("arc length {0} outside (0, π)")]
    ArcLength(f64),
    #[error("degenerate input")]
    Degenerate,
}

pub fn plane_rotation(i: usize, j: usize, t: f64) -> Result<Isometry, GeomError> {
    Isometry::plane_rotation(i, j, t)
}

pub fn screw_motion(i: usize, j: usize, k: usize, l: usize, t: f64) -> Result<Isometry, GeomError> {
    Isometry::screw_motion(i, j, k, l, t)
}

pub fn screw_motion_circle(c: &GreatCircle, t: f64, s: f64) -> Isometry {
    Isometry::screw_motion_circle(c, t, s)
}

pub fn half_turn(c: &GreatCircle) -> Isometry {
    Isometry::half_turn(c)
}

pub fn polar_circle(c: &GreatCircle) -> GreatCircle {
    c.polar()
}
