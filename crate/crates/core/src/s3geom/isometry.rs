use std::ops::Mul;

use serde::{Deserialize, Serialize};

use super::circle::GreatCircle;
use super::point::S3Point;
use super::vec4::{self, Vec4};
use super::GeomError;
use crate::scalar::Scalar;

/// An orthogonal map of R⁴ restricted to S³, stored as a dense 4×4 matrix
/// acting on column vectors.
///
/// All rotation constructors (plane rotations, screw motions, half-turns)
/// produce proper rotations with determinant +1. [`Isometry::reflection`] is
/// the one improper constructor.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Isometry<T = f64> {
    m: [[T; 4]; 4],
}

fn axis_index(i: usize) -> Result<usize, GeomError> {
    if (1..=4).contains(&i) {
        Ok(i - 1)
    } else {
        Err(GeomError::InvalidAxes(format!("axis {i} outside 1..=4")))
    }
}

impl<T: Scalar> Isometry<T> {
    pub fn identity() -> Self {
        let mut m = [[T::zero(); 4]; 4];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = T::one();
        }
        Isometry { m }
    }

    /// Wraps a matrix after checking `‖RRᵀ − I‖∞ ≤ tol`.
    pub fn from_matrix(m: [[T; 4]; 4], tol: T) -> Result<Self, GeomError> {
        let iso = Isometry { m };
        let err = iso.orthogonality_error();
        if err > tol || !err.is_finite() {
            return Err(GeomError::NotOrthogonal(err.to_f64().unwrap_or(f64::NAN)));
        }
        Ok(iso)
    }

    pub fn matrix(&self) -> &[[T; 4]; 4] {
        &self.m
    }

    /// Counterclockwise rotation by `t` in the xᵢxⱼ-plane (1-based axes),
    /// fixing the complementary plane pointwise.
    pub fn plane_rotation(i: usize, j: usize, t: T) -> Result<Self, GeomError> {
        let (a, b) = (axis_index(i)?, axis_index(j)?);
        if a == b {
            return Err(GeomError::InvalidAxes(format!("repeated axis {i}")));
        }
        let (s, c) = t.sin_cos();
        let mut r = Self::identity();
        r.m[a][a] = c;
        r.m[b][b] = c;
        r.m[b][a] = s;
        r.m[a][b] = -s;
        Ok(r)
    }

    /// The screw motion ρᵗᵢⱼ ∘ ρᵗₖₗ; `{i, j, k, l}` must be `{1, 2, 3, 4}`.
    pub fn screw_motion(i: usize, j: usize, k: usize, l: usize, t: T) -> Result<Self, GeomError> {
        let mut seen = [false; 4];
        for x in [i, j, k, l] {
            let a = axis_index(x)?;
            if seen[a] {
                return Err(GeomError::InvalidAxes(format!("({i},{j},{k},{l}) is not a permutation")));
            }
            seen[a] = true;
        }
        Ok(Self::plane_rotation(i, j, t)? * Self::plane_rotation(k, l, t)?)
    }

    /// Rotation by `t` of the plane of `c` (oriented by its frame), fixing the
    /// polar plane pointwise. Restricted to `c` it is the translation by
    /// arclength `t`.
    pub fn translation_along(c: &GreatCircle<T>, t: T) -> Self {
        let (u, v) = (c.u(), c.v());
        let (s, co) = t.sin_cos();
        let mut r = Self::identity();
        for row in 0..4 {
            for col in 0..4 {
                r.m[row][col] = r.m[row][col]
                    + (co - T::one()) * (u[row] * u[col] + v[row] * v[col])
                    + s * (v[row] * u[col] - u[row] * v[col]);
            }
        }
        r
    }

    /// Screw motion with distinct speeds about a circle and its polar:
    /// translation by `t` along `c` composed with translation by `s` along
    /// `c.polar()`.
    pub fn screw_motion_circle(c: &GreatCircle<T>, t: T, s: T) -> Self {
        Self::translation_along(c, t) * Self::translation_along(&c.polar(), s)
    }

    /// The 180° rotation about `c`: fixes `c` pointwise and negates the polar
    /// plane.
    pub fn half_turn(c: &GreatCircle<T>) -> Self {
        let p = c.plane_projector();
        let mut r = Self::identity();
        for row in 0..4 {
            for col in 0..4 {
                r.m[row][col] = T::lit(2.0) * p[row][col] - r.m[row][col];
            }
        }
        r
    }

    /// Reflection across the great sphere `{x · n = 0}`. Improper (det −1).
    pub fn reflection(normal: &Vec4<T>) -> Result<Self, GeomError> {
        let n = vec4::normalize(normal).ok_or(GeomError::Degenerate)?;
        let mut r = Self::identity();
        for row in 0..4 {
            for col in 0..4 {
                r.m[row][col] = r.m[row][col] - T::lit(2.0) * n[row] * n[col];
            }
        }
        Ok(r)
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec4<T>; 4]) -> Self {
        let mut m = [[T::zero(); 4]; 4];
        for (c, col) in cols.iter().enumerate() {
            for r in 0..4 {
                m[r][c] = col[r];
            }
        }
        Isometry { m }
    }

    pub fn inverse(&self) -> Self {
        let mut m = [[T::zero(); 4]; 4];
        for (r, row) in m.iter_mut().enumerate() {
            for (c, e) in row.iter_mut().enumerate() {
                *e = self.m[c][r];
            }
        }
        Isometry { m }
    }

    #[inline]
    pub fn apply_vec(&self, x: &Vec4<T>) -> Vec4<T> {
        let mut y = [T::zero(); 4];
        for (r, out) in y.iter_mut().enumerate() {
            let row = &self.m[r];
            *out = row[0] * x[0] + row[1] * x[1] + row[2] * x[2] + row[3] * x[3];
        }
        y
    }

    /// Transpose action `Rᵀx`.
    #[inline]
    pub fn apply_transpose(&self, x: &Vec4<T>) -> Vec4<T> {
        let mut y = [T::zero(); 4];
        for (c, out) in y.iter_mut().enumerate() {
            *out = self.m[0][c] * x[0] + self.m[1][c] * x[1] + self.m[2][c] * x[2] + self.m[3][c] * x[3];
        }
        y
    }

    #[inline]
    pub fn apply(&self, p: &S3Point<T>) -> S3Point<T> {
        S3Point::from_unit(self.apply_vec(p.coords()))
    }

    /// `‖RRᵀ − I‖∞` (max-abs entry).
    pub fn orthogonality_error(&self) -> T {
        let mut err = T::zero();
        for i in 0..4 {
            for j in 0..4 {
                let mut d = T::zero();
                for k in 0..4 {
                    d = d + self.m[i][k] * self.m[j][k];
                }
                if i == j {
                    d = d - T::one();
                }
                err = err.max(d.abs());
            }
        }
        err
    }

    pub fn determinant(&self) -> T {
        let cols = [0, 1, 2, 3].map(|c| [self.m[0][c], self.m[1][c], self.m[2][c], self.m[3][c]]);
        vec4::det4(&cols)
    }

    pub fn is_proper(&self) -> bool {
        self.determinant() > T::zero()
    }

    /// Max-abs entrywise difference.
    pub fn distance(&self, other: &Self) -> T {
        let mut d = T::zero();
        for r in 0..4 {
            for c in 0..4 {
                d = d.max((self.m[r][c] - other.m[r][c]).abs());
            }
        }
        d
    }

    /// Conjugate `self ∘ g ∘ self⁻¹`.
    pub fn conjugate(&self, g: &Self) -> Self {
        *self * *g * self.inverse()
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::identity(), |acc, _| acc * *self)
    }
}

impl<T: Scalar> Mul for Isometry<T> {
    type Output = Isometry<T>;

    /// Composition: `(a * b)(x) = a(b(x))`.
    fn mul(self, rhs: Self) -> Self {
        let mut m = [[T::zero(); 4]; 4];
        for (r, row) in m.iter_mut().enumerate() {
            for (c, e) in row.iter_mut().enumerate() {
                let mut acc = T::zero();
                for k in 0..4 {
                    acc = acc + self.m[r][k] * rhs.m[k][c];
                }
                *e = acc;
            }
        }
        Isometry { m }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn zero_rotation_is_identity() {
        let r = Isometry::<f64>::plane_rotation(1, 2, 0.0).unwrap();
        assert_eq!(r, Isometry::identity());
        let s = Isometry::<f64>::screw_motion(1, 2, 3, 4, 0.0).unwrap();
        assert_eq!(s, Isometry::identity());
    }

    #[test]
    fn quarter_turn_sends_e1_to_e2() {
        let r = Isometry::<f64>::plane_rotation(1, 2, FRAC_PI_2).unwrap();
        let p = r.apply(&S3Point::axis(1));
        assert!(p.chord(&S3Point::axis(2)) < 1e-15);
    }

    #[test]
    fn invalid_axes_rejected() {
        assert!(Isometry::<f64>::plane_rotation(1, 1, 0.3).is_err());
        assert!(Isometry::<f64>::plane_rotation(0, 2, 0.3).is_err());
        assert!(Isometry::<f64>::plane_rotation(1, 5, 0.3).is_err());
        assert!(Isometry::<f64>::screw_motion(1, 2, 2, 4, 0.3).is_err());
    }

    #[test]
    fn half_turn_fixes_axis_and_is_involution() {
        let c = GreatCircle::<f64>::coordinate(1, 3).unwrap();
        let h = Isometry::half_turn(&c);
        for k in 0..8 {
            let p = c.point_at(k as f64 * 0.7);
            assert!(h.apply(&p).chord(&p) < 1e-15);
        }
        assert!((h * h).distance(&Isometry::identity()) < 1e-15);
        assert!((h.determinant() - 1.0).abs() < 1e-14);
        // polar plane is negated
        let q = c.polar().point_at(0.4);
        assert!(h.apply(&q).chord(&q.antipode()) < 1e-15);
    }

    #[test]
    fn screw_with_equal_speeds_matches_coordinate_screw() {
        let c = GreatCircle::<f64>::coordinate(1, 2).unwrap();
        for t in [0.1, 1.3, -2.0] {
            let a = Isometry::screw_motion_circle(&c, t, t);
            let b = Isometry::screw_motion(1, 2, 3, 4, t).unwrap();
            assert!(a.distance(&b) < 1e-12, "t={t}");
        }
        assert!(Isometry::screw_motion_circle(&c, 0.0, 0.0).distance(&Isometry::identity()) < 1e-15);
    }

    #[test]
    fn reflection_is_improper() {
        let r = Isometry::<f64>::reflection(&[0.0, 0.0, 0.0, 1.0]).unwrap();
        assert!(!r.is_proper());
        assert!((r * r).distance(&Isometry::identity()) < 1e-15);
        let rot = Isometry::<f64>::plane_rotation(2, 4, PI / 3.0).unwrap();
        assert!(rot.is_proper());
    }
}
