use serde::{Deserialize, Serialize};

use super::circle::GreatCircle;
use super::isometry::Isometry;
use super::point::S3Point;
use super::vec4::{self, Vec4};
use crate::scalar::Scalar;

/// A Clifford torus, stored as the rotation `Q` carrying the standard torus
/// `{x₁² + x₂² = x₃² + x₄² = 1/2}` onto it.
///
/// In local coordinates `y = Qᵀx`, the torus is equidistant (π/4) from its
/// two axis circles `Q(C₁₂)` and `Q(C₃₄)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CliffordTorus<T = f64> {
    placement: Isometry<T>,
}

impl<T: Scalar> CliffordTorus<T> {
    pub fn standard() -> Self {
        CliffordTorus { placement: Isometry::identity() }
    }

    pub fn from_placement(placement: Isometry<T>) -> Self {
        CliffordTorus { placement }
    }

    /// The torus equidistant from `axis` and its polar circle.
    pub fn around(axis: &GreatCircle<T>) -> Self {
        let polar = axis.polar();
        let q = Isometry::from_columns(&[*axis.u(), *axis.v(), *polar.u(), *polar.v()]);
        CliffordTorus { placement: q }
    }

    pub fn placement(&self) -> &Isometry<T> {
        &self.placement
    }

    /// Image of the torus under an isometry.
    pub fn transformed(&self, g: &Isometry<T>) -> Self {
        CliffordTorus { placement: *g * self.placement }
    }

    /// The axis circle on the positive side (see [`Self::signed_distance`]).
    pub fn axis(&self) -> GreatCircle<T> {
        let q = &self.placement;
        GreatCircle::from_frame(q.apply_vec(&vec4::basis(0)), q.apply_vec(&vec4::basis(1)))
    }

    #[inline]
    pub fn local(&self, x: &Vec4<T>) -> Vec4<T> {
        self.placement.apply_transpose(x)
    }

    /// `(Qᵀx)₁² + (Qᵀx)₂² − 1/2`; zero exactly on the torus.
    pub fn membership_residual(&self, p: &S3Point<T>) -> T {
        let y = self.local(p.coords());
        y[0] * y[0] + y[1] * y[1] - T::lit(0.5)
    }

    /// Geodesic distance to the torus, `|arccos √(y₁² + y₂²) − π/4|`.
    pub fn distance(&self, p: &S3Point<T>) -> T {
        self.signed_distance(p).abs()
    }

    /// Positive on the side containing the axis circle `Q(C₁₂)`.
    pub fn signed_distance(&self, p: &S3Point<T>) -> T {
        let y = self.local(p.coords());
        let a = (y[0] * y[0] + y[1] * y[1]).sqrt();
        let b = (y[2] * y[2] + y[3] * y[3]).sqrt();
        // distance to the axis circle is atan2(b, a)
        T::FRAC_PI_4() - b.atan2(a)
    }

    /// Nearest point of the torus; `None` on either axis circle.
    pub fn project(&self, p: &S3Point<T>) -> Option<S3Point<T>> {
        let y = self.local(p.coords());
        let a = (y[0] * y[0] + y[1] * y[1]).sqrt();
        let b = (y[2] * y[2] + y[3] * y[3]).sqrt();
        let tiny = T::lit(1e-300).max(T::min_positive_value());
        if a <= tiny || b <= tiny {
            return None;
        }
        let h = T::FRAC_1_SQRT_2();
        let z = [y[0] * h / a, y[1] * h / a, y[2] * h / b, y[3] * h / b];
        Some(S3Point::from_unit(self.placement.apply_vec(&z)))
    }

    /// Orthonormal tangent frame of the torus at a torus point.
    pub fn tangent_frame(&self, p: &S3Point<T>) -> [Vec4<T>; 2] {
        let y = self.local(p.coords());
        let t1 = vec4::normalize(&[-y[1], y[0], T::zero(), T::zero()]).unwrap_or(vec4::basis(1));
        let t2 = vec4::normalize(&[T::zero(), T::zero(), -y[3], y[2]]).unwrap_or(vec4::basis(3));
        [self.placement.apply_vec(&t1), self.placement.apply_vec(&t2)]
    }

    /// Unit normal of the torus within T_pS³, pointing toward the axis side.
    pub fn normal(&self, p: &S3Point<T>) -> Option<Vec4<T>> {
        let y = self.local(p.coords());
        let a = (y[0] * y[0] + y[1] * y[1]).sqrt();
        let b = (y[2] * y[2] + y[3] * y[3]).sqrt();
        let tiny = T::lit(1e-300).max(T::min_positive_value());
        if a <= tiny || b <= tiny {
            return None;
        }
        // derivative of the signed distance along the meridian toward the axis
        let n = [y[0] * b / a, y[1] * b / a, -y[2] * a / b, -y[3] * a / b];
        vec4::normalize(&self.placement.apply_vec(&n))
    }

    /// Points where a great circle crosses the torus (0, 2 or 4 of them, or
    /// `None` when the circle lies on the torus).
    pub fn intersect_circle(&self, c: &GreatCircle<T>) -> Option<Vec<S3Point<T>>> {
        // |P(cos θ u + sin θ v)|² − 1/2, P = first two local coordinates
        let yu = self.local(c.u());
        let yv = self.local(c.v());
        let a = yu[0] * yu[0] + yu[1] * yu[1];
        let b = yu[0] * yv[0] + yu[1] * yv[1];
        let cc = yv[0] * yv[0] + yv[1] * yv[1];
        let two = T::lit(2.0);
        let h = (a - cc) / two;
        let r = (h * h + b * b).sqrt();
        let rhs = (T::one() - a - cc) / two;
        if r <= T::lit(1e-14) {
            return if rhs.abs() <= T::lit(1e-14) { None } else { Some(Vec::new()) };
        }
        let ratio = rhs / r;
        if ratio.abs() > T::one() {
            return Some(Vec::new());
        }
        let phase = b.atan2(h);
        let spread = ratio.acos();
        let mut out = Vec::with_capacity(4);
        for two_theta in [phase + spread, phase - spread] {
            let theta = two_theta / two;
            out.push(c.point_at(theta));
            out.push(c.point_at(theta + T::PI()));
            if spread <= T::lit(1e-14) {
                break;
            }
        }
        Some(out)
    }
}

/// Flat-torus helpers. The torus carries the flat metric of
/// `S¹(1/√2) × S¹(1/√2)`; in local angle coordinates `(θ₁, θ₂)` its geodesics
/// are straight lines.
impl<T: Scalar> CliffordTorus<T> {
    /// Local angles `(θ₁, θ₂)` of a point (projected to the torus).
    pub fn local_angles(&self, p: &S3Point<T>) -> (T, T) {
        let y = self.local(p.coords());
        (y[1].atan2(y[0]), y[3].atan2(y[2]))
    }

    pub fn point_at_angles(&self, a: T, b: T) -> S3Point<T> {
        let h = T::FRAC_1_SQRT_2();
        let (sa, ca) = a.sin_cos();
        let (sb, cb) = b.sin_cos();
        S3Point::from_unit(self.placement.apply_vec(&[h * ca, h * sa, h * cb, h * sb]))
    }

    fn angle_deltas(&self, a: &S3Point<T>, b: &S3Point<T>) -> (T, T) {
        let (a1, a2) = self.local_angles(a);
        let (b1, b2) = self.local_angles(b);
        (wrap_angle(b1 - a1), wrap_angle(b2 - a2))
    }

    /// Length of the shortest flat geodesic from `a` to `b` on the torus.
    pub fn flat_distance(&self, a: &S3Point<T>, b: &S3Point<T>) -> T {
        let (d1, d2) = self.angle_deltas(a, b);
        (d1 * d1 + d2 * d2).sqrt() * T::FRAC_1_SQRT_2()
    }

    /// Point at fraction `t` along the shortest flat geodesic from `a` to `b`.
    pub fn flat_lerp(&self, a: &S3Point<T>, b: &S3Point<T>, t: T) -> S3Point<T> {
        let (a1, a2) = self.local_angles(a);
        let (d1, d2) = self.angle_deltas(a, b);
        self.point_at_angles(a1 + t * d1, a2 + t * d2)
    }

    pub fn flat_midpoint(&self, a: &S3Point<T>, b: &S3Point<T>) -> S3Point<T> {
        self.flat_lerp(a, b, T::lit(0.5))
    }

    /// Unit tangent at `a` of the shortest flat geodesic toward `b`.
    pub fn flat_direction(&self, a: &S3Point<T>, b: &S3Point<T>) -> Vec4<T> {
        let (d1, d2) = self.angle_deltas(a, b);
        let [t1, t2] = self.tangent_frame(a);
        vec4::normalize(&vec4::axpy(&vec4::scale(&t1, d1), d2, &t2)).unwrap_or(t1)
    }
}

/// Wraps an angle into `(−π, π]`.
pub(crate) fn wrap_angle<T: Scalar>(x: T) -> T {
    let two_pi = T::PI() + T::PI();
    let mut y = x % two_pi;
    if y > T::PI() {
        y = y - two_pi;
    } else if y <= -T::PI() {
        y = y + two_pi;
    }
    y
}

/// Geodesic distance from `p` to the torus `t`.
pub fn torus_distance<T: Scalar>(p: &S3Point<T>, t: &CliffordTorus<T>) -> T {
    t.distance(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::s3geom::point::clifford_chart;
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn axis_circles_are_at_quarter_pi() {
        let t = CliffordTorus::<f64>::standard();
        let c12 = GreatCircle::coordinate(1, 2).unwrap();
        let c34 = GreatCircle::coordinate(3, 4).unwrap();
        for k in 0..10 {
            let th = k as f64 * 0.63;
            assert!((t.distance(&c12.point_at(th)) - FRAC_PI_4).abs() < 1e-15);
            assert!((t.distance(&c34.point_at(th)) - FRAC_PI_4).abs() < 1e-15);
        }
    }

    #[test]
    fn projection_lands_on_torus() {
        let t = CliffordTorus::<f64>::standard();
        let p = S3Point::normalize([0.9, 0.1, 0.3, -0.2]).unwrap();
        let q = t.project(&p).unwrap();
        assert!(t.membership_residual(&q).abs() < 1e-15);
        assert!((q.distance(&p) - t.distance(&p)).abs() < 1e-14);
    }

    #[test]
    fn around_axis_recovers_standard() {
        let c12 = GreatCircle::<f64>::coordinate(1, 2).unwrap();
        let t = CliffordTorus::around(&c12);
        let p = S3Point::normalize([0.5, -0.5, 0.5, 0.5]).unwrap();
        assert!(t.membership_residual(&p).abs() < 1e-15);
        assert!(t.placement().is_proper());
    }

    #[test]
    fn chart_image_is_equidistant_from_screwed_c12() {
        // The Ψ-torus is the equidistance set of Φ^{π/4}_{1342}(C₁₂) and its polar.
        let screw = Isometry::<f64>::screw_motion(1, 3, 4, 2, FRAC_PI_4).unwrap();
        let axis = GreatCircle::coordinate(1, 2).unwrap();
        let axis = GreatCircle::from_frame(screw.apply_vec(axis.u()), screw.apply_vec(axis.v()));
        let t = CliffordTorus::around(&axis);
        for k in 0..20 {
            let p = clifford_chart(0.37 * k as f64, 1.1 - 0.29 * k as f64);
            assert!(t.membership_residual(&p).abs() < 1e-15);
        }
    }
}
