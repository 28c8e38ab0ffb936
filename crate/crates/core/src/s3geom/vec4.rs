//! Plain R⁴ vector arithmetic on `[T; 4]`.

use crate::scalar::Scalar;

pub type Vec4<T = f64> = [T; 4];

#[inline]
pub fn dot<T: Scalar>(a: &Vec4<T>, b: &Vec4<T>) -> T {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3]
}

#[inline]
pub fn add<T: Scalar>(a: &Vec4<T>, b: &Vec4<T>) -> Vec4<T> {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2], a[3] + b[3]]
}

#[inline]
pub fn sub<T: Scalar>(a: &Vec4<T>, b: &Vec4<T>) -> Vec4<T> {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]]
}

#[inline]
pub fn scale<T: Scalar>(a: &Vec4<T>, s: T) -> Vec4<T> {
    [a[0] * s, a[1] * s, a[2] * s, a[3] * s]
}

/// `a + s * b`
#[inline]
pub fn axpy<T: Scalar>(a: &Vec4<T>, s: T, b: &Vec4<T>) -> Vec4<T> {
    [a[0] + s * b[0], a[1] + s * b[1], a[2] + s * b[2], a[3] + s * b[3]]
}

#[inline]
pub fn norm_sq<T: Scalar>(a: &Vec4<T>) -> T {
    dot(a, a)
}

#[inline]
pub fn norm<T: Scalar>(a: &Vec4<T>) -> T {
    norm_sq(a).sqrt()
}

#[inline]
pub fn dist<T: Scalar>(a: &Vec4<T>, b: &Vec4<T>) -> T {
    norm(&sub(a, b))
}

/// Unit vector along `a`, or `None` for a (numerically) zero vector.
pub fn normalize<T: Scalar>(a: &Vec4<T>) -> Option<Vec4<T>> {
    let n = norm(a);
    if n <= T::min_positive_value().sqrt() {
        None
    } else {
        Some(scale(a, T::one() / n))
    }
}

pub fn basis<T: Scalar>(i: usize) -> Vec4<T> {
    let mut e = [T::zero(); 4];
    e[i] = T::one();
    e
}

/// Removes the components of `a` along each (orthonormal) vector in `against`.
pub fn reject<T: Scalar>(a: &Vec4<T>, against: &[Vec4<T>]) -> Vec4<T> {
    let mut r = *a;
    for b in against {
        let c = dot(&r, b);
        r = axpy(&r, -c, b);
    }
    r
}

/// Completes an orthonormal family to a basis of R⁴ by Gram-Schmidt over the
/// standard basis, taking the candidates with the largest residual first.
pub fn complete_basis<T: Scalar>(family: &[Vec4<T>]) -> Vec<Vec4<T>> {
    let mut out: Vec<Vec4<T>> = family.to_vec();
    while out.len() < 4 {
        let best = (0..4)
            .map(|i| reject(&basis::<T>(i), &out))
            .max_by(|a, b| norm_sq(a).partial_cmp(&norm_sq(b)).unwrap())
            .unwrap();
        let best = reject(&best, &out);
        out.push(normalize(&best).expect("non-degenerate completion"));
    }
    out
}

/// Determinant of the 4×4 matrix whose columns are `c[0..4]`.
pub fn det4<T: Scalar>(c: &[Vec4<T>; 4]) -> T {
    // m[r][k] = c[k][r]
    let m = |r: usize, k: usize| c[k][r];
    let minor = |r0: usize, r1: usize, r2: usize, k0: usize, k1: usize, k2: usize| {
        m(r0, k0) * (m(r1, k1) * m(r2, k2) - m(r1, k2) * m(r2, k1))
            - m(r0, k1) * (m(r1, k0) * m(r2, k2) - m(r1, k2) * m(r2, k0))
            + m(r0, k2) * (m(r1, k0) * m(r2, k1) - m(r1, k1) * m(r2, k0))
    };
    m(0, 0) * minor(1, 2, 3, 1, 2, 3) - m(0, 1) * minor(1, 2, 3, 0, 2, 3)
        + m(0, 2) * minor(1, 2, 3, 0, 1, 3)
        - m(0, 3) * minor(1, 2, 3, 0, 1, 2)
}

/// Unit vector orthogonal to three given vectors (generalized cross product),
/// `None` when they are linearly dependent.
pub fn cross3<T: Scalar>(a: &Vec4<T>, b: &Vec4<T>, c: &Vec4<T>) -> Option<Vec4<T>> {
    normalize(&cross3_raw(a, b, c))
}

/// Unnormalized generalized cross product; its norm is the 3-volume spanned
/// by `a, b, c`, and `det[x, a, b, c] = x · cross3_raw(a, b, c)`.
pub fn cross3_raw<T: Scalar>(a: &Vec4<T>, b: &Vec4<T>, c: &Vec4<T>) -> Vec4<T> {
    // Cofactor expansion of det[e, a, b, c] along the first column.
    let mut out = [T::zero(); 4];
    for (i, o) in out.iter_mut().enumerate() {
        let e = basis::<T>(i);
        *o = det4(&[e, *a, *b, *c]);
    }
    out
}
