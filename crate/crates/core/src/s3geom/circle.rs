use serde::{Deserialize, Serialize};

use super::point::{geodesic_distance, S3Point};
use super::vec4::{self, Vec4};
use super::GeomError;
use crate::scalar::Scalar;

/// An oriented great circle, given by an ordered orthonormal frame `(u, v)`.
///
/// The point at angle θ is `cos θ·u + sin θ·v`. `(u, v)` and `(u, −v)` describe
/// the same set with opposite orientations.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GreatCircle<T = f64> {
    u: Vec4<T>,
    v: Vec4<T>,
}

impl<T: Scalar> GreatCircle<T> {
    pub fn new(u: Vec4<T>, v: Vec4<T>, tol: T) -> Result<Self, GeomError> {
        let bad = (vec4::norm(&u) - T::one()).abs() > tol
            || (vec4::norm(&v) - T::one()).abs() > tol
            || vec4::dot(&u, &v).abs() > tol;
        if bad {
            return Err(GeomError::BadFrame);
        }
        Ok(GreatCircle { u, v })
    }

    /// Frame assumed orthonormal to working precision.
    pub fn from_frame(u: Vec4<T>, v: Vec4<T>) -> Self {
        GreatCircle { u, v }
    }

    /// The circle through `p`, oriented toward `q`. Fails when `q = ±p`.
    pub fn through(p: &S3Point<T>, q: &S3Point<T>) -> Result<Self, GeomError> {
        let u = *p.coords();
        let v = vec4::reject(q.coords(), &[u]);
        let v = vec4::normalize(&v).ok_or(GeomError::Degenerate)?;
        if vec4::norm(&vec4::reject(q.coords(), &[u])) < T::lit(1e-12) {
            return Err(GeomError::Degenerate);
        }
        Ok(GreatCircle { u, v })
    }

    /// The coordinate circle in the xᵢxⱼ-plane (1-based), oriented eᵢ → eⱼ.
    pub fn coordinate(i: usize, j: usize) -> Result<Self, GeomError> {
        if i == j || !(1..=4).contains(&i) || !(1..=4).contains(&j) {
            return Err(GeomError::InvalidAxes(format!("({i},{j})")));
        }
        Ok(GreatCircle { u: vec4::basis(i - 1), v: vec4::basis(j - 1) })
    }

    pub fn u(&self) -> &Vec4<T> {
        &self.u
    }

    pub fn v(&self) -> &Vec4<T> {
        &self.v
    }

    pub fn point_at(&self, theta: T) -> S3Point<T> {
        let (s, c) = theta.sin_cos();
        S3Point::from_unit(vec4::axpy(&vec4::scale(&self.u, c), s, &self.v))
    }

    /// Unit tangent at angle θ, in the direction of increasing θ.
    pub fn tangent_at(&self, theta: T) -> Vec4<T> {
        let (s, c) = theta.sin_cos();
        vec4::axpy(&vec4::scale(&self.u, -s), c, &self.v)
    }

    /// Angle of the orthogonal projection of `x` onto the circle's plane.
    pub fn angle_of(&self, x: &Vec4<T>) -> T {
        vec4::dot(x, &self.v).atan2(vec4::dot(x, &self.u))
    }

    /// Geodesic distance from `p` to the circle.
    pub fn distance_to(&self, p: &S3Point<T>) -> T {
        let x = p.coords();
        let a = vec4::dot(x, &self.u);
        let b = vec4::dot(x, &self.v);
        let inplane = (a * a + b * b).sqrt();
        let off = vec4::norm(&vec4::reject(x, &[self.u, self.v]));
        off.atan2(inplane)
    }

    /// Nearest point of the circle; `None` for points of the polar circle.
    pub fn project(&self, p: &S3Point<T>) -> Option<S3Point<T>> {
        let x = p.coords();
        let a = vec4::dot(x, &self.u);
        let b = vec4::dot(x, &self.v);
        S3Point::normalize(vec4::axpy(&vec4::scale(&self.u, a), b, &self.v))
    }

    pub fn contains(&self, p: &S3Point<T>, tol: T) -> bool {
        self.distance_to(p) <= tol
    }

    pub fn reversed(&self) -> Self {
        GreatCircle { u: self.u, v: vec4::scale(&self.v, -T::one()) }
    }

    /// The polar great circle: the unit circle of the orthogonal complement
    /// plane, every point of which is at distance π/2 from every point of
    /// `self`. The frame is oriented so that `det[u, v, u', v'] = +1`.
    pub fn polar(&self) -> Self {
        let b = vec4::complete_basis(&[self.u, self.v]);
        let (u2, mut v2) = (b[2], b[3]);
        if vec4::det4(&[self.u, self.v, u2, v2]) < T::zero() {
            v2 = vec4::scale(&v2, -T::one());
        }
        GreatCircle { u: u2, v: v2 }
    }

    /// Orthogonal projector onto the circle's 2-plane, as a 4×4 matrix.
    pub fn plane_projector(&self) -> [[T; 4]; 4] {
        let mut p = [[T::zero(); 4]; 4];
        for (r, row) in p.iter_mut().enumerate() {
            for (c, e) in row.iter_mut().enumerate() {
                *e = self.u[r] * self.u[c] + self.v[r] * self.v[c];
            }
        }
        p
    }

    /// Equality of the underlying point sets (orientation ignored).
    pub fn same_set(&self, other: &Self, tol: T) -> bool {
        let off_u = vec4::norm(&vec4::reject(&other.u, &[self.u, self.v]));
        let off_v = vec4::norm(&vec4::reject(&other.v, &[self.u, self.v]));
        off_u <= tol && off_v <= tol
    }
}

/// The minor great-circle arc between two points at distance in `(0, π)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeodesicArc<T = f64> {
    a: S3Point<T>,
    b: S3Point<T>,
    circle: GreatCircle<T>,
    length: T,
}

impl<T: Scalar> GeodesicArc<T> {
    pub fn new(a: S3Point<T>, b: S3Point<T>) -> Result<Self, GeomError> {
        let length = geodesic_distance(&a, &b);
        let eps = T::lit(1e-12);
        if length <= eps || length >= T::PI() - eps {
            return Err(GeomError::ArcLength(length.to_f64().unwrap_or(f64::NAN)));
        }
        let circle = GreatCircle::through(&a, &b)?;
        Ok(GeodesicArc { a, b, circle, length })
    }

    pub fn start(&self) -> &S3Point<T> {
        &self.a
    }

    pub fn end(&self) -> &S3Point<T> {
        &self.b
    }

    pub fn length(&self) -> T {
        self.length
    }

    /// Great circle carrying the arc, with angle 0 at the start point and
    /// angle `length` at the end point.
    pub fn circle(&self) -> &GreatCircle<T> {
        &self.circle
    }

    /// Point at arclength `s` from the start.
    pub fn point_at(&self, s: T) -> S3Point<T> {
        self.circle.point_at(s)
    }

    /// Arclength parameter of the projection of `x` onto the carrier circle.
    pub fn param_of(&self, x: &Vec4<T>) -> T {
        self.circle.angle_of(x)
    }

    pub fn distance_to(&self, p: &S3Point<T>) -> T {
        let t = self.param_of(p.coords());
        if t >= T::zero() && t <= self.length {
            self.circle.distance_to(p)
        } else {
            geodesic_distance(p, &self.a).min(geodesic_distance(p, &self.b))
        }
    }

    /// Nearest point of the carrier circle, with its parameter clamped to
    /// `[lo, length − lo]`.
    pub fn project_clamped(&self, p: &S3Point<T>, lo: T) -> S3Point<T> {
        let t = self.param_of(p.coords());
        let half = self.length / T::lit(2.0);
        let t = if t < half - T::PI() {
            // closer to the end point going the other way around
            self.length - lo
        } else {
            t.max(lo).min(self.length - lo)
        };
        self.point_at(t)
    }

    pub fn midpoint(&self) -> S3Point<T> {
        self.point_at(self.length / T::lit(2.0))
    }

    pub fn reversed(&self) -> Self {
        GeodesicArc::new(self.b, self.a).expect("reversal of a valid arc")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn polar_of_c12_is_c34() {
        let c12 = GreatCircle::<f64>::coordinate(1, 2).unwrap();
        let c34 = GreatCircle::<f64>::coordinate(3, 4).unwrap();
        assert!(c12.polar().same_set(&c34, 1e-14));
        assert!(c12.polar().polar().same_set(&c12, 1e-14));
    }

    #[test]
    fn arc_rejects_degenerate() {
        let e1 = S3Point::<f64>::axis(1);
        assert!(GeodesicArc::new(e1, e1).is_err());
        assert!(GeodesicArc::new(e1, e1.antipode()).is_err());
    }

    #[test]
    fn arc_parametrization() {
        let arc = GeodesicArc::new(S3Point::<f64>::axis(1), S3Point::axis(2)).unwrap();
        assert!((arc.length() - FRAC_PI_2).abs() < 1e-15);
        assert!(arc.point_at(FRAC_PI_2).chord(&S3Point::axis(2)) < 1e-15);
        let m = arc.midpoint();
        assert!((arc.param_of(m.coords()) - FRAC_PI_2 / 2.0).abs() < 1e-15);
        // A point beyond the end projects back onto the end.
        let beyond = arc.circle().point_at(2.0);
        assert!(arc.project_clamped(&beyond, 0.0).chord(&S3Point::axis(2)) < 1e-15);
        assert!((arc.distance_to(&beyond) - (2.0 - FRAC_PI_2)).abs() < 1e-14);
    }
}
