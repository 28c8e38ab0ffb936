//! The pentahedral tessellation of S³ for parameters `(m, ℓ)` and all of its
//! named geometry.
//!
//! Coordinates: `z = x₁ + i x₂`, `w = x₃ + i x₄`, `α = arg z`, `β = arg w`.
//! `C₁ = {w = 0}`, `C₂ = {z = 0}`, `T₀ = {|z| = |w|}` and `D₁ = {|z| ≥ |w|}`.
//! With `k = 2mℓ`, `αⱼ = (j − 1)π/k` and `ψᵢ = (i − 1)π/m`:
//!
//! * `pⱼ = (e^{iαⱼ}, 0)`, `qⱼ = (0, e^{iαⱼ})`, all indices 1-based mod `2k`;
//! * `Tᵢ` is the Clifford torus `{β − α ≡ ψᵢ mod π}`, so `Tᵢ₊ₘ = Tᵢ`;
//! * the ruling of `Tᵢ` through `pⱼ` is oriented toward the side where
//!   `β − α = ψᵢ` (rather than `ψᵢ + π`); `i` runs over `1..=2m`;
//! * `S¹ⱼ` and `S²ⱼ` are the great spheres `{α = αⱼ}` and `{β = αⱼ}`;
//! * `Uⱼⁱ = D₁ ∩ {αⱼ ≤ α ≤ αⱼ₊₁} ∩ {ψᵢ ≤ β − α ≤ ψᵢ₊₁}` and
//!   `Vⱼⁱ = D₂ ∩ {αⱼ ≤ β ≤ αⱼ₊₁} ∩ {ψᵢ ≤ β − α ≤ ψᵢ₊₁}`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::s3geom::{
    vec4, CliffordTorus, GeodesicArc, GeomError, GreatCircle, Isometry, S3Point, Vec4,
};
use crate::Tolerances;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TessellationError {
    #[error("invalid parameters: {0}")]
    Parameter(String),
    #[error("unknown pentahedron label {0:?}")]
    UnknownLabel(PentaLabel),
    #[error("polygon: {0}")]
    Polygon(String),
    #[error(transparent)]
    Geom(#[from] GeomError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Region {
    U,
    V,
}

/// Pentahedron label `(region, i, j)` with `i ∈ 1..=2m`, `j ∈ 1..=2k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PentaLabel {
    pub region: Region,
    pub i: usize,
    pub j: usize,
}

impl PentaLabel {
    pub fn u(i: usize, j: usize) -> Self {
        PentaLabel { region: Region::U, i, j }
    }

    pub fn v(i: usize, j: usize) -> Self {
        PentaLabel { region: Region::V, i, j }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Membership {
    Inside,
    Boundary,
    Outside,
}

/// A closed geodesic polygon given by its cyclic vertex list.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeodesicPolygon {
    vertices: Vec<S3Point>,
}

impl GeodesicPolygon {
    pub fn new(vertices: Vec<S3Point>) -> Result<Self, TessellationError> {
        if vertices.len() < 3 {
            return Err(TessellationError::Polygon("fewer than 3 vertices".into()));
        }
        let poly = GeodesicPolygon { vertices };
        for i in 0..poly.len() {
            GeodesicArc::new(poly.vertices[i], poly.vertices[(i + 1) % poly.len()])?;
        }
        Ok(poly)
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[S3Point] {
        &self.vertices
    }

    /// Edge `i` runs from vertex `i` to vertex `i + 1`.
    pub fn edges(&self) -> Vec<GeodesicArc> {
        (0..self.len())
            .map(|i| GeodesicArc::new(self.vertices[i], self.vertices[(i + 1) % self.len()]).unwrap())
            .collect()
    }

    /// Angle at vertex `i` between the two incident edges.
    pub fn interior_angle(&self, i: usize) -> f64 {
        let n = self.len();
        let p = self.vertices[i];
        let prev = GeodesicArc::new(p, self.vertices[(i + n - 1) % n]).unwrap();
        let next = GeodesicArc::new(p, self.vertices[(i + 1) % n]).unwrap();
        let a = prev.circle().tangent_at(0.0);
        let b = next.circle().tangent_at(0.0);
        vec4::dot(&a, &b).clamp(-1.0, 1.0).acos()
    }

    pub fn external_angle(&self, i: usize) -> f64 {
        PI - self.interior_angle(i)
    }

    /// Minimum distance between non-adjacent edges.
    pub fn min_edge_separation(&self) -> f64 {
        let edges = self.edges();
        let n = edges.len();
        let mut best = f64::INFINITY;
        for a in 0..n {
            for b in a + 1..n {
                if b == a + 1 || (a == 0 && b == n - 1) {
                    continue;
                }
                best = best.min(arc_arc_distance(&edges[a], &edges[b]));
            }
        }
        best
    }

    /// Errors when two non-adjacent edges come within `tol` of each other.
    pub fn check_simple(&self, tol: f64) -> Result<(), TessellationError> {
        let d = self.min_edge_separation();
        if d <= tol {
            return Err(TessellationError::Polygon(format!("self-intersecting (edge gap {d:e})")));
        }
        Ok(())
    }
}

/// Distance between two arcs, by sampling one and refining by golden-section
/// search around the best sample.
pub fn arc_arc_distance(a: &GeodesicArc, b: &GeodesicArc) -> f64 {
    let f = |t: f64| b.distance_to(&a.point_at(t));
    let n = 64;
    let h = a.length() / n as f64;
    let (mut best_t, mut best) = (0.0, f(0.0));
    for s in 1..=n {
        let t = s as f64 * h;
        let v = f(t);
        if v < best {
            best = v;
            best_t = t;
        }
    }
    let (mut lo, mut hi) = ((best_t - h).max(0.0), (best_t + h).min(a.length()));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..60 {
        let x1 = hi - g * (hi - lo);
        let x2 = lo + g * (hi - lo);
        if f(x1) < f(x2) {
            hi = x2;
        } else {
            lo = x1;
        }
    }
    best.min(f(0.5 * (lo + hi)))
}

/// All named geometry for one parameter pair `(m, ℓ)`.
#[derive(Clone, Debug)]
pub struct Configuration {
    pub m: usize,
    pub ell: usize,
    pub k: usize,
    pub tol: Tolerances,
    pub c1: GreatCircle,
    pub c2: GreatCircle,
    /// Through all `p′ⱼ`, oriented `p′₁ → p′₂`.
    pub c3: GreatCircle,
    /// Through all `p″ⱼ`, oriented `p″₁ → p″₂`.
    pub c4: GreatCircle,
    /// Through the flat midpoints of `p′₁p″₁` and `p′₂p″₂` on `T₀`.
    pub c5: GreatCircle,
    pub c6: GreatCircle,
    pub t0: CliffordTorus,
    /// The screw motion with distinct speeds along `C₅` and `C₆` pairing the
    /// two hemispheres of the even surface.
    pub phi: Isometry,
    tori: Vec<CliffordTorus>,
    s1: Vec<Vec4>,
    s2: Vec<Vec4>,
    p: Vec<S3Point>,
    q: Vec<S3Point>,
    p1: Vec<S3Point>,
    p2: Vec<S3Point>,
    /// `rulings[i−1][j−1]`: unit tangent at `pⱼ` of the ruling of `Tᵢ`.
    rulings: Vec<Vec<Vec4>>,
    pub pa: S3Point,
    pub pb: S3Point,
    pub pc: S3Point,
    pub pd: S3Point,
    pub pe: S3Point,
    grid: Vec<S3Point>,
    grid_q: Vec<S3Point>,
}

fn wrap_index(j: isize, n: usize) -> usize {
    (j - 1).rem_euclid(n as isize) as usize
}

impl Configuration {
    pub fn two_k(&self) -> usize {
        2 * self.k
    }

    /// `αⱼ = (j − 1)π/k`.
    pub fn alpha(&self, j: isize) -> f64 {
        (j - 1) as f64 * PI / self.k as f64
    }

    /// `ψᵢ = (i − 1)π/m`.
    pub fn psi(&self, i: isize) -> f64 {
        (i - 1) as f64 * PI / self.m as f64
    }

    pub fn p(&self, j: isize) -> S3Point {
        self.p[wrap_index(j, self.two_k())]
    }

    pub fn q(&self, j: isize) -> S3Point {
        self.q[wrap_index(j, self.two_k())]
    }

    /// `p′ⱼ`, the midpoint of `pⱼqⱼ`.
    pub fn p_prime(&self, j: isize) -> S3Point {
        self.p1[wrap_index(j, self.two_k())]
    }

    /// `p″ⱼ`, the midpoint of the `T₂`-ruling from `pⱼ` to `C₂`.
    pub fn p_dprime(&self, j: isize) -> S3Point {
        self.p2[wrap_index(j, self.two_k())]
    }

    /// `Tᵢ` for any integer `i` (period `m`).
    pub fn torus(&self, i: isize) -> &CliffordTorus {
        &self.tori[wrap_index(i, self.m)]
    }

    /// Normal of `S¹ⱼ`.
    pub fn sphere1(&self, j: isize) -> Vec4 {
        self.s1[wrap_index(j, self.two_k())]
    }

    /// Normal of `S²ⱼ`.
    pub fn sphere2(&self, j: isize) -> Vec4 {
        self.s2[wrap_index(j, self.two_k())]
    }

    /// Unit tangent at `pⱼ` of the ruling `C¹ᵢⱼ` (`i ∈ 1..=2m`).
    pub fn ruling1(&self, i: isize, j: isize) -> Vec4 {
        let ii = wrap_index(i, 2 * self.m);
        let d = self.rulings[ii % self.m][wrap_index(j, self.two_k())];
        if ii >= self.m {
            vec4::scale(&d, -1.0)
        } else {
            d
        }
    }

    /// Unit tangent of the ruling of `Tᵢ` through the point of `C₁` at angle
    /// `a`, oriented as [`Self::ruling1`].
    pub fn ruling_at(&self, i: isize, a: f64) -> Vec4 {
        let p = self.c1.point_at(a);
        let b = a + self.psi(i);
        ruling_direction(&p, self.torus(i), &self.c1.tangent_at(a), &[0.0, 0.0, b.cos(), b.sin()])
    }

    /// The ruled rectangle of `Tᵢ` over the `C₁` arc `[αⱼ, αⱼ₊₁]`, reaching
    /// `T₀`, as a `2ⁿ × 2ⁿ` grid `(a, s) ↦ cos s·C₁(a) + sin s·ruling`.
    pub fn ruled_rectangle(&self, i: isize, j: isize, n: usize) -> (Vec<S3Point>, Vec<[usize; 3]>) {
        let g = 1usize << n;
        let mut pts = Vec::with_capacity((g + 1) * (g + 1));
        for ia in 0..=g {
            let a = self.alpha(j) + ia as f64 * PI / (self.k * g) as f64;
            let base = self.c1.point_at(a);
            let d = self.ruling_at(i, a);
            for is in 0..=g {
                pts.push(along(&base, &d, is as f64 * FRAC_PI_4 / g as f64));
            }
        }
        let idx = |a: usize, s: usize| a * (g + 1) + s;
        let mut tris = Vec::with_capacity(2 * g * g);
        for a in 0..g {
            for s in 0..g {
                tris.push([idx(a, s), idx(a + 1, s), idx(a + 1, s + 1)]);
                tris.push([idx(a, s), idx(a + 1, s + 1), idx(a, s + 1)]);
            }
        }
        (pts, tris)
    }

    /// The great circle `C¹ᵢⱼ`, oriented from `pⱼ` along [`Self::ruling1`].
    pub fn circle1(&self, i: isize, j: isize) -> GreatCircle {
        GreatCircle::from_frame(*self.p(j).coords(), self.ruling1(i, j))
    }

    /// The great circle `C²ᵢⱼ` through `qⱼ` on `Tᵢ` orthogonal to `C₂`,
    /// oriented toward the side where `β − α = ψᵢ`.
    pub fn circle2(&self, i: isize, j: isize) -> GreatCircle {
        let q = self.q(j);
        let n = self.torus(i).normal(&q).expect("qⱼ is off the axes of Tᵢ");
        let d = vec4::cross3(q.coords(), &n, &self.sphere2(j)).expect("independent normals");
        // at qⱼ the ruling heads to a point of C₁ at angle αⱼ − ψᵢ (mod π)
        let t = self.alpha(j) - self.psi(i);
        let guide = [t.cos(), t.sin(), 0.0, 0.0];
        let d = if vec4::dot(&d, &guide) < 0.0 { vec4::scale(&d, -1.0) } else { d };
        GreatCircle::from_frame(*q.coords(), d)
    }

    /// `p̄`: the `4mk` points of `T₀ ∩ ⋃C¹ᵢⱼ`.
    pub fn grid(&self) -> &[S3Point] {
        &self.grid
    }

    /// `q̄`: the points of `T₀ ∩ ⋃C²ᵢⱼ`.
    pub fn grid_q(&self) -> &[S3Point] {
        &self.grid_q
    }

    /// `q₀`: the point of `C₂` with `p″₂` the midpoint of `p₂q₀`.
    pub fn q0(&self) -> S3Point {
        let a = self.p(2);
        let mid = self.p_dprime(2);
        let c = 2.0 * a.dot(&mid);
        S3Point::normalize(vec4::axpy(&vec4::scale(mid.coords(), c), -1.0, a.coords())).unwrap()
    }

    /// `(dist(p_a, p_b), dist(p_b, p_d))`; the configuration inequality asks
    /// for the first not to exceed the second.
    pub fn eq2_distances(&self) -> (f64, f64) {
        (self.pa.distance(&self.pb), self.pb.distance(&self.pd))
    }

    pub fn labels(&self) -> Vec<PentaLabel> {
        let mut out = Vec::with_capacity(8 * self.m * self.k);
        for region in [Region::U, Region::V] {
            for i in 1..=2 * self.m {
                for j in 1..=self.two_k() {
                    out.push(PentaLabel { region, i, j });
                }
            }
        }
        out
    }

    fn check_label(&self, l: PentaLabel) -> Result<(), TessellationError> {
        if l.i == 0 || l.i > 2 * self.m || l.j == 0 || l.j > self.two_k() {
            return Err(TessellationError::UnknownLabel(l));
        }
        Ok(())
    }

    /// `σ·sd(Tᵢ)`: positive where `β − α − ψᵢ ∈ (0, π)` mod 2π.
    fn torus_side(&self, i: isize, x: &S3Point) -> f64 {
        let sd = self.torus(i).signed_distance(x);
        if wrap_index(i, 2 * self.m) < self.m {
            sd
        } else {
            -sd
        }
    }

    /// The five signed distances of `x` to the bounding surfaces of a
    /// pentahedron, oriented positive inside.
    pub fn face_values(&self, l: PentaLabel, x: &S3Point) -> Result<[f64; 5], TessellationError> {
        self.check_label(l)?;
        let (i, j) = (l.i as isize, l.j as isize);
        let sd0 = self.t0.signed_distance(x);
        let (v0, na, nb) = match l.region {
            Region::U => (sd0, self.sphere1(j), self.sphere1(j + 1)),
            Region::V => (-sd0, self.sphere2(j), self.sphere2(j + 1)),
        };
        let c = x.coords();
        Ok([
            v0,
            vec4::dot(c, &na).clamp(-1.0, 1.0).asin(),
            -vec4::dot(c, &nb).clamp(-1.0, 1.0).asin(),
            self.torus_side(i, x),
            -self.torus_side(i + 1, x),
        ])
    }

    /// Inside / boundary / outside with a band of `tol.geo` around the faces.
    pub fn region_membership(&self, l: PentaLabel, x: &S3Point) -> Result<Membership, TessellationError> {
        let v = self.face_values(l, x)?;
        let worst = v.iter().copied().fold(f64::INFINITY, f64::min);
        let eps = self.tol.geo;
        Ok(if worst > eps {
            Membership::Inside
        } else if worst >= -eps {
            Membership::Boundary
        } else {
            Membership::Outside
        })
    }

    /// Labels of every pentahedron that classifies `x` as inside.
    pub fn locate(&self, x: &S3Point) -> Vec<PentaLabel> {
        self.labels()
            .into_iter()
            .filter(|l| self.region_membership(*l, x).unwrap() == Membership::Inside)
            .collect()
    }

    /// A point of the pentahedron from three fractions in `[0, 1]`:
    /// radial (`|z|` for `U`, `|w|` for `V`, from `T₀` outward), angular
    /// across the sphere pair and angular across the torus pair.
    pub fn region_point(&self, l: PentaLabel, f: [f64; 3]) -> Result<S3Point, TessellationError> {
        self.check_label(l)?;
        let r = (FRAC_PI_4 * (1.0 - f[0])).cos();
        let s = (1.0 - r * r).max(0.0).sqrt();
        let ang = self.alpha(l.j as isize) + f[1] * PI / self.k as f64;
        let delta = self.psi(l.i as isize) + f[2] * PI / self.m as f64;
        let c = match l.region {
            Region::U => {
                let b = ang + delta;
                [r * ang.cos(), r * ang.sin(), s * b.cos(), s * b.sin()]
            }
            Region::V => {
                let a = ang - delta;
                [s * a.cos(), s * a.sin(), r * ang.cos(), r * ang.sin()]
            }
        };
        Ok(S3Point::from_unit(c))
    }

    /// Dihedral angle between `T₁` and `S¹₁` at the point `c(s)` of the
    /// ruling `p₁p′₁` at arclength `s`.
    pub fn surface_angle_along_edge(&self, s: f64) -> f64 {
        let c = self.circle1(1, 1).point_at(s);
        let n = self.torus(1).normal(&c).expect("c(s) is off the axes of T₁");
        vec4::dot(&n, &self.sphere1(1)).abs().clamp(0.0, 1.0).acos()
    }

    /// Angles of the parallelogram `A₁¹ = U₁¹ ∩ T₀` at `p′₁, p′₂, p″₂, p″₁`,
    /// measured in the flat metric of `T₀`.
    pub fn parallelogram_angles(&self) -> [f64; 4] {
        let quad = [self.p_prime(1), self.p_prime(2), self.p_dprime(2), self.p_dprime(1)];
        let mut out = [0.0; 4];
        for (i, o) in out.iter_mut().enumerate() {
            let a = self.t0.flat_direction(&quad[i], &quad[(i + 1) % 4]);
            let b = self.t0.flat_direction(&quad[i], &quad[(i + 3) % 4]);
            *o = vec4::dot(&a, &b).clamp(-1.0, 1.0).acos();
        }
        out
    }

    /// Structured dump of the named geometry.
    pub fn dump(&self) -> serde_json::Value {
        let pts = |v: &[S3Point]| v.iter().map(|p| p.coords().to_vec()).collect::<Vec<_>>();
        let circ = |c: &GreatCircle| json!({ "u": c.u(), "v": c.v() });
        json!({
            "m": self.m,
            "ell": self.ell,
            "k": self.k,
            "circles": {
                "C1": circ(&self.c1), "C2": circ(&self.c2), "C3": circ(&self.c3),
                "C4": circ(&self.c4), "C5": circ(&self.c5), "C6": circ(&self.c6),
            },
            "tori": self.tori.iter().map(|t| t.placement().matrix().to_vec()).collect::<Vec<_>>(),
            "spheres1": self.s1,
            "spheres2": self.s2,
            "p": pts(&self.p),
            "q": pts(&self.q),
            "p_prime": pts(&self.p1),
            "p_dprime": pts(&self.p2),
            "pa": self.pa.coords(), "pb": self.pb.coords(), "pc": self.pc.coords(),
            "pd": self.pd.coords(), "pe": self.pe.coords(),
            "grid": pts(&self.grid),
            "phi": self.phi.matrix().to_vec(),
        })
    }
}

/// Removes points within `tol` (chordal) of an earlier point.
pub fn dedup_points(points: &[S3Point], tol: f64) -> Vec<S3Point> {
    let mut out: Vec<S3Point> = Vec::new();
    for p in points {
        if !out.iter().any(|q| q.chord(p) <= tol) {
            out.push(*p);
        }
    }
    out
}

/// Equality of two finite point sets up to `tol`.
pub fn same_point_set(a: &[S3Point], b: &[S3Point], tol: f64) -> bool {
    a.len() == b.len()
        && a.iter().all(|p| b.iter().any(|q| q.chord(p) <= tol))
        && b.iter().all(|p| a.iter().any(|q| q.chord(p) <= tol))
}

fn ruling_direction(p: &S3Point, torus: &CliffordTorus, sphere: &Vec4, guide: &Vec4) -> Vec4 {
    let n = torus.normal(p).expect("point off the torus axes");
    let d = vec4::cross3(p.coords(), &n, sphere).expect("independent normals");
    if vec4::dot(&d, guide) < 0.0 {
        vec4::scale(&d, -1.0)
    } else {
        d
    }
}

fn along(p: &S3Point, d: &Vec4, t: f64) -> S3Point {
    S3Point::from_unit(vec4::axpy(&vec4::scale(p.coords(), t.cos()), t.sin(), d))
}

pub fn build_configuration(m: usize, ell: usize) -> Result<Configuration, TessellationError> {
    build_configuration_with(m, ell, Tolerances::DEFAULT)
}

pub fn build_configuration_with(m: usize, ell: usize, tol: Tolerances) -> Result<Configuration, TessellationError> {
    if m < 2 {
        return Err(TessellationError::Parameter(format!("m = {m}, need m ≥ 2")));
    }
    if ell < 1 {
        return Err(TessellationError::Parameter(format!("ℓ = {ell}, need ℓ ≥ 1")));
    }
    let k = 2 * m * ell;
    let two_k = 2 * k;
    let c1 = GreatCircle::coordinate(1, 2)?;
    let c2 = c1.polar();
    let t0 = CliffordTorus::around(&c1);

    // T₁ is the Hopf-invariant torus through C₁ and C₂ around {w = i z}.
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let axis1 = GreatCircle::new([h, 0.0, 0.0, h], [0.0, h, -h, 0.0], tol.unit)?;
    let t1 = CliffordTorus::around(&axis1);
    let tori: Vec<CliffordTorus> = (0..m)
        .map(|i| t1.transformed(&Isometry::plane_rotation(3, 4, i as f64 * PI / m as f64).unwrap()))
        .collect();

    let alpha = |j: usize| j as f64 * PI / k as f64;
    let p: Vec<S3Point> = (0..two_k).map(|j| c1.point_at(alpha(j))).collect();
    let s1: Vec<Vec4> = (0..two_k).map(|j| c1.tangent_at(alpha(j))).collect();
    let s2: Vec<Vec4> = (0..two_k)
        .map(|j| {
            let a = alpha(j);
            [0.0, 0.0, -a.sin(), a.cos()]
        })
        .collect();

    let rulings: Vec<Vec<Vec4>> = (0..m)
        .map(|i| {
            (0..two_k)
                .map(|j| {
                    let b = alpha(j) + i as f64 * PI / m as f64;
                    ruling_direction(&p[j], &tori[i], &s1[j], &[0.0, 0.0, b.cos(), b.sin()])
                })
                .collect()
        })
        .collect();

    let q: Vec<S3Point> = (0..two_k).map(|j| S3Point::from_unit(rulings[0][j])).collect();
    let p1: Vec<S3Point> = (0..two_k).map(|j| along(&p[j], &rulings[0][j], FRAC_PI_4)).collect();
    let p2: Vec<S3Point> = (0..two_k).map(|j| along(&p[j], &rulings[1][j], FRAC_PI_4)).collect();

    let c3 = GreatCircle::through(&p1[0], &p1[1])?;
    let c4 = GreatCircle::through(&p2[0], &p2[1])?;
    let mid1 = t0.flat_midpoint(&p1[0], &p2[0]);
    let mid2 = t0.flat_midpoint(&p1[1], &p2[1]);
    let c5 = GreatCircle::through(&mid1, &mid2)?;
    let c6 = c5.polar();
    let half = PI / (2.0 * m as f64);
    let phi = Isometry::screw_motion_circle(&c5, -half, PI - half);

    let on_c5 = |x: &S3Point| c5.project(x).expect("point off the polar of C₅");
    let pa = on_c5(&p1[0]);
    let pb = on_c5(&p1[1]);
    let pc = mid2;
    let pd = on_c5(&p2[0]);
    let pe = on_c5(&p2[1]);

    let mut cfg = Configuration {
        m,
        ell,
        k,
        tol,
        c1,
        c2,
        c3,
        c4,
        c5,
        c6,
        t0,
        phi,
        tori,
        s1,
        s2,
        p,
        q,
        p1,
        p2,
        rulings,
        pa,
        pb,
        pc,
        pd,
        pe,
        grid: Vec::new(),
        grid_q: Vec::new(),
    };

    let mut raw = Vec::new();
    let mut raw_q = Vec::new();
    for i in 1..=m as isize {
        for j in 1..=two_k as isize {
            raw.extend(t0.intersect_circle(&cfg.circle1(i, j)).unwrap_or_default());
            raw_q.extend(t0.intersect_circle(&cfg.circle2(i, j)).unwrap_or_default());
        }
    }
    cfg.grid = dedup_points(&raw, 1e3 * tol.geo);
    cfg.grid_q = dedup_points(&raw_q, 1e3 * tol.geo);
    Ok(cfg)
}

/// The odd fundamental hexagon `Γ = p₁ p′₁ p′₂ p₂ p″₂ p″₁`.
pub fn fundamental_polygon_odd(cfg: &Configuration) -> GeodesicPolygon {
    GeodesicPolygon::new(vec![
        cfg.p(1),
        cfg.p_prime(1),
        cfg.p_prime(2),
        cfg.p(2),
        cfg.p_dprime(2),
        cfg.p_dprime(1),
    ])
    .expect("hexagon edges have length in (0, π)")
}

/// One quarter arc of a lattice circle, from a point of `C₁` (family 1) or
/// `C₂` (family 2) to the polar circle.
#[derive(Clone, Copy, Debug)]
pub struct LatticeArc {
    pub i: usize,
    pub j: usize,
    pub arc: GeodesicArc,
}

#[derive(Clone, Debug)]
pub struct LatticeEdges {
    /// `pⱼ → C₂` along the `Tᵢ`-rulings, `i ∈ 1..=2m`.
    pub family1: Vec<LatticeArc>,
    /// `qⱼ → C₁` along the `Tᵢ`-rulings, `i ∈ 1..=2m`.
    pub family2: Vec<LatticeArc>,
}

impl LatticeEdges {
    /// Symmetric Hausdorff distance between `samples`-point samplings of
    /// each arc of one family and the arcs of the other.
    pub fn hausdorff(&self, samples: usize) -> f64 {
        let one_way = |a: &[LatticeArc], b: &[LatticeArc]| {
            let mut worst: f64 = 0.0;
            for x in a {
                for s in 0..=samples {
                    let p = x.arc.point_at(x.arc.length() * s as f64 / samples as f64);
                    let d = b.iter().map(|y| y.arc.distance_to(&p)).fold(f64::INFINITY, f64::min);
                    worst = worst.max(d);
                }
            }
            worst
        };
        one_way(&self.family1, &self.family2).max(one_way(&self.family2, &self.family1))
    }
}

pub fn lattice_edges(cfg: &Configuration) -> LatticeEdges {
    let mut family1 = Vec::new();
    let mut family2 = Vec::new();
    for i in 1..=2 * cfg.m {
        for j in 1..=cfg.two_k() {
            let c = cfg.circle1(i as isize, j as isize);
            let arc = GeodesicArc::new(c.point_at(0.0), c.point_at(FRAC_PI_2)).unwrap();
            family1.push(LatticeArc { i, j, arc });
            let c = cfg.circle2(i as isize, j as isize);
            let arc = GeodesicArc::new(c.point_at(0.0), c.point_at(FRAC_PI_2)).unwrap();
            family2.push(LatticeArc { i, j, arc });
        }
    }
    LatticeEdges { family1, family2 }
}
