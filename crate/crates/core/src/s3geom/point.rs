use serde::{Deserialize, Serialize};

use super::vec4::{self, Vec4};
use super::GeomError;
use crate::scalar::Scalar;

/// A point of the unit 3-sphere S³ ⊂ R⁴.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct S3Point<T = f64>(Vec4<T>);

impl<T: Scalar> S3Point<T> {
    /// Validates that `coords` has unit norm within `tol`.
    pub fn new(coords: Vec4<T>, tol: T) -> Result<Self, GeomError> {
        let n = vec4::norm(&coords);
        if (n - T::one()).abs() > tol || !n.is_finite() {
            return Err(GeomError::NotUnit(n.to_f64().unwrap_or(f64::NAN)));
        }
        Ok(S3Point(coords))
    }

    /// Radial projection onto S³.
    pub fn normalize(coords: Vec4<T>) -> Option<Self> {
        vec4::normalize(&coords).map(S3Point)
    }

    /// Caller guarantees the input is unit within working precision.
    #[inline]
    pub fn from_unit(coords: Vec4<T>) -> Self {
        S3Point(coords)
    }

    /// The standard basis vector eᵢ, 1-based like the coordinates x₁..x₄.
    pub fn axis(i: usize) -> Self {
        S3Point(vec4::basis(i - 1))
    }

    #[inline]
    pub fn coords(&self) -> &Vec4<T> {
        &self.0
    }

    #[inline]
    pub fn dot(&self, other: &Self) -> T {
        vec4::dot(&self.0, &other.0)
    }

    pub fn antipode(&self) -> Self {
        S3Point(vec4::scale(&self.0, -T::one()))
    }

    pub fn distance(&self, other: &Self) -> T {
        geodesic_distance(self, other)
    }

    /// Chordal (R⁴) distance.
    pub fn chord(&self, other: &Self) -> T {
        vec4::dist(&self.0, &other.0)
    }

    pub fn cast<U: Scalar>(&self) -> S3Point<U> {
        S3Point(self.0.map(|c| U::from_f64(c.to_f64().unwrap()).unwrap()))
    }
}

impl<T> From<S3Point<T>> for Vec4<T> {
    fn from(p: S3Point<T>) -> Self {
        p.0
    }
}

/// Great-circle distance on S³, in `[0, π]`.
///
/// Evaluated as `2·atan2(|p−q|, |p+q|)`, which equals `arccos(p·q)` but keeps
/// full relative precision for nearly coincident and nearly antipodal points.
pub fn geodesic_distance<T: Scalar>(p: &S3Point<T>, q: &S3Point<T>) -> T {
    let d = vec4::dist(&p.0, &q.0);
    let s = vec4::norm(&vec4::add(&p.0, &q.0));
    T::lit(2.0) * d.atan2(s)
}

/// Geodesic midpoint of two non-antipodal points.
pub fn midpoint<T: Scalar>(p: &S3Point<T>, q: &S3Point<T>) -> Option<S3Point<T>> {
    S3Point::normalize(vec4::add(&p.0, &q.0))
}

/// Constant-speed geodesic interpolation from `p` (t=0) to `q` (t=1).
pub fn slerp<T: Scalar>(p: &S3Point<T>, q: &S3Point<T>, t: T) -> S3Point<T> {
    let theta = geodesic_distance(p, q);
    if theta < T::lit(1e-300).max(T::epsilon() * T::epsilon()) {
        return *p;
    }
    let s = theta.sin();
    let a = ((T::one() - t) * theta).sin() / s;
    let b = (t * theta).sin() / s;
    let c = vec4::axpy(&vec4::scale(&p.0, a), b, &q.0);
    S3Point::normalize(c).unwrap_or(*p)
}

/// The Clifford torus chart Ψ(x, y) = (cos x sin y, cos x cos y, sin x cos y, sin x sin y).
pub fn clifford_chart<T: Scalar>(x: T, y: T) -> S3Point<T> {
    let (sx, cx) = x.sin_cos();
    let (sy, cy) = y.sin_cos();
    S3Point([cx * sy, cx * cy, sx * cy, sx * sy])
}
