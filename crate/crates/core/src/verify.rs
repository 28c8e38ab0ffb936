//! Checks on assembled surfaces: embeddedness, symmetry, area, containment.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::assembly::{angle_defect_total, euler_genus, AssemblyError, ClosedSurfaceMesh};
use crate::pipeline::{expected_genus, Surface, Variant};
use crate::plateau::{coupled_curvature_residual, ConvergenceRecord, TriMesh};
use crate::s3geom::{screw_motion, vec4, GreatCircle, Isometry, Vec4};
use crate::tessellation::{fundamental_polygon_odd, Configuration, Membership, PentaLabel};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum VerifyError {
    #[error("empty mesh")]
    Empty,
    #[error("surfaces compared at different refinement levels ({0} vs {1})")]
    RefinementMismatch(usize, usize),
    #[error(transparent)]
    Topology(#[from] AssemblyError),
}

// ---------------------------------------------------------------------------
// distances between simplices in R⁴

fn sub(a: &Vec4, b: &Vec4) -> Vec4 {
    vec4::sub(a, b)
}

fn dot(a: &Vec4, b: &Vec4) -> f64 {
    vec4::dot(a, b)
}

/// Closest point to `p` on the segment `ab`.
fn closest_on_segment(p: &Vec4, a: &Vec4, b: &Vec4) -> Vec4 {
    let ab = sub(b, a);
    let l = dot(&ab, &ab);
    let t = if l > 0.0 { (dot(&sub(p, a), &ab) / l).clamp(0.0, 1.0) } else { 0.0 };
    vec4::axpy(a, t, &ab)
}

/// Closest point to `p` on a triangle, by Voronoi-region tests that use
/// only dot products and so hold in any dimension.
pub fn closest_on_triangle(p: &Vec4, t: &[Vec4; 3]) -> Vec4 {
    let [a, b, c] = t;
    let ab = sub(b, a);
    let ac = sub(c, a);
    let ap = sub(p, a);
    let (d1, d2) = (dot(&ab, &ap), dot(&ac, &ap));
    if d1 <= 0.0 && d2 <= 0.0 {
        return *a;
    }
    let bp = sub(p, b);
    let (d3, d4) = (dot(&ab, &bp), dot(&ac, &bp));
    if d3 >= 0.0 && d4 <= d3 {
        return *b;
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        return vec4::axpy(a, d1 / (d1 - d3), &ab);
    }
    let cp = sub(p, c);
    let (d5, d6) = (dot(&ab, &cp), dot(&ac, &cp));
    if d6 >= 0.0 && d5 <= d6 {
        return *c;
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        return vec4::axpy(a, d2 / (d2 - d6), &ac);
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && d4 - d3 >= 0.0 && d5 - d6 >= 0.0 {
        return closest_on_segment(p, b, c);
    }
    let denom = va + vb + vc;
    if denom.abs() < f64::MIN_POSITIVE {
        // degenerate triangle: fall back to its edges
        let cands = [closest_on_segment(p, a, b), closest_on_segment(p, b, c), closest_on_segment(p, c, a)];
        return *cands.iter().min_by(|x, y| vec4::dist(p, x).total_cmp(&vec4::dist(p, y))).expect("three candidates");
    }
    let v = vb / denom;
    let w = vc / denom;
    vec4::axpy(&vec4::axpy(a, v, &ab), w, &ac)
}

pub fn point_triangle_distance(p: &Vec4, t: &[Vec4; 3]) -> f64 {
    vec4::dist(p, &closest_on_triangle(p, t))
}

/// Distance between segments `p0p1` and `q0q1`.
pub fn segment_distance(p0: &Vec4, p1: &Vec4, q0: &Vec4, q1: &Vec4) -> f64 {
    let d1 = sub(p1, p0);
    let d2 = sub(q1, q0);
    let r = sub(p0, q0);
    let (a, e, f) = (dot(&d1, &d1), dot(&d2, &d2), dot(&d2, &r));
    let (s, t) = if a <= f64::MIN_POSITIVE && e <= f64::MIN_POSITIVE {
        (0.0, 0.0)
    } else if a <= f64::MIN_POSITIVE {
        (0.0, (f / e).clamp(0.0, 1.0))
    } else {
        let c = dot(&d1, &r);
        if e <= f64::MIN_POSITIVE {
            ((-c / a).clamp(0.0, 1.0), 0.0)
        } else {
            let b = dot(&d1, &d2);
            let den = a * e - b * b;
            let mut s = if den > 1e-14 * a * e { ((b * f - c * e) / den).clamp(0.0, 1.0) } else { 0.0 };
            let mut t = (b * s + f) / e;
            if t < 0.0 {
                t = 0.0;
                s = (-c / a).clamp(0.0, 1.0);
            } else if t > 1.0 {
                t = 1.0;
                s = ((b - c) / a).clamp(0.0, 1.0);
            }
            (s, t)
        }
    };
    vec4::dist(&vec4::axpy(p0, s, &d1), &vec4::axpy(q0, t, &d2))
}

/// Minimizes `|x₀ + Σ cᵢ dᵢ|` over unconstrained `c`; returns the
/// coefficients when the Gram matrix is well conditioned.
fn affine_min<const N: usize>(x0: &Vec4, d: &[Vec4; N]) -> Option<([f64; N], f64)> {
    let mut g = [[0.0; N]; N];
    let mut rhs = [0.0; N];
    let mut scale = 0.0f64;
    for i in 0..N {
        for j in 0..N {
            g[i][j] = dot(&d[i], &d[j]);
        }
        rhs[i] = -dot(&d[i], x0);
        scale = scale.max(g[i][i]);
    }
    if scale == 0.0 {
        return None;
    }
    for col in 0..N {
        let piv = (col..N).max_by(|&i, &j| g[i][col].abs().total_cmp(&g[j][col].abs()))?;
        if g[piv][col].abs() < 1e-10 * scale {
            return None;
        }
        g.swap(col, piv);
        rhs.swap(col, piv);
        for row in col + 1..N {
            let f = g[row][col] / g[col][col];
            for c in col..N {
                g[row][c] -= f * g[col][c];
            }
            rhs[row] -= f * rhs[col];
        }
    }
    let mut x = [0.0; N];
    for row in (0..N).rev() {
        let s: f64 = (row + 1..N).map(|c| g[row][c] * x[c]).sum();
        x[row] = (rhs[row] - s) / g[row][row];
    }
    let r = (0..N).fold(*x0, |acc, i| vec4::axpy(&acc, x[i], &d[i]));
    Some((x, vec4::norm(&r)))
}

fn in_triangle(u: f64, v: f64) -> bool {
    u >= 0.0 && v >= 0.0 && u + v <= 1.0
}

/// Distance between two triangles in R⁴. The minimum is attained in the
/// relative interiors of some pair of faces; vertex and edge pairs are
/// handled in closed form, the remaining pairs by affine least squares.
pub fn triangle_distance(a: &[Vec4; 3], b: &[Vec4; 3]) -> f64 {
    let mut best = f64::INFINITY;
    for p in a {
        best = best.min(point_triangle_distance(p, b));
    }
    for p in b {
        best = best.min(point_triangle_distance(p, a));
    }
    for i in 0..3 {
        for j in 0..3 {
            best = best.min(segment_distance(&a[i], &a[(i + 1) % 3], &b[j], &b[(j + 1) % 3]));
        }
    }
    // edge against triangle interior
    for (s, t) in [(a, b), (b, a)] {
        let (tu, tv) = (sub(&t[1], &t[0]), sub(&t[2], &t[0]));
        for i in 0..3 {
            let e = sub(&s[(i + 1) % 3], &s[i]);
            let x0 = sub(&s[i], &t[0]);
            if let Some(([c, u, v], d)) = affine_min(&x0, &[e, vec4::scale(&tu, -1.0), vec4::scale(&tv, -1.0)]) {
                if (0.0..=1.0).contains(&c) && in_triangle(u, v) {
                    best = best.min(d);
                }
            }
        }
    }
    let x0 = sub(&a[0], &b[0]);
    let dirs = [sub(&a[1], &a[0]), sub(&a[2], &a[0]), sub(&b[0], &b[1]), sub(&b[0], &b[2])];
    if let Some(([s1, s2, t1, t2], d)) = affine_min(&x0, &dirs) {
        if in_triangle(s1, s2) && in_triangle(t1, t2) {
            best = best.min(d);
        }
    }
    best
}

fn chord_to_angle(d: f64) -> f64 {
    2.0 * (0.5 * d).min(1.0).asin()
}

// ---------------------------------------------------------------------------
// spatial hash on triangle centroids

type Cell = [i64; 4];

struct CentroidHash {
    cell: f64,
    map: HashMap<Cell, Vec<usize>>,
    centroids: Vec<Vec4>,
    boxes: Vec<(Vec4, Vec4)>,
}

fn corners(mesh: &ClosedSurfaceMesh, t: usize) -> [Vec4; 3] {
    mesh.triangles[t].map(|v| *mesh.vertices[v].coords())
}

fn bbox(pts: &[Vec4]) -> (Vec4, Vec4) {
    let mut lo = [f64::INFINITY; 4];
    let mut hi = [f64::NEG_INFINITY; 4];
    for p in pts {
        for c in 0..4 {
            lo[c] = lo[c].min(p[c]);
            hi[c] = hi[c].max(p[c]);
        }
    }
    (lo, hi)
}

fn box_gap(a: &(Vec4, Vec4), b: &(Vec4, Vec4)) -> f64 {
    (0..4).map(|c| (a.0[c] - b.1[c]).max(b.0[c] - a.1[c]).max(0.0).powi(2)).sum::<f64>().sqrt()
}

impl CentroidHash {
    /// Cell size chosen so that every triangle within `reach` of a query
    /// point, or of a triangle, has its centroid in a neighbouring cell.
    fn new(mesh: &ClosedSurfaceMesh, reach: f64) -> Self {
        let centroids: Vec<Vec4> = (0..mesh.triangles.len())
            .map(|t| {
                let c = corners(mesh, t);
                vec4::scale(&vec4::add(&vec4::add(&c[0], &c[1]), &c[2]), 1.0 / 3.0)
            })
            .collect();
        let boxes: Vec<_> = (0..mesh.triangles.len()).map(|t| bbox(&corners(mesh, t))).collect();
        let radius = (0..mesh.triangles.len())
            .flat_map(|t| corners(mesh, t).map(|p| vec4::dist(&p, &centroids[t])))
            .fold(0.0, f64::max);
        let cell = reach + 2.0 * radius;
        let mut map: HashMap<Cell, Vec<usize>> = HashMap::new();
        for (t, c) in centroids.iter().enumerate() {
            map.entry(Self::cell_of(cell, c)).or_default().push(t);
        }
        CentroidHash { cell, map, centroids, boxes }
    }

    fn cell_of(cell: f64, p: &Vec4) -> Cell {
        std::array::from_fn(|c| (p[c] / cell).floor() as i64)
    }

    /// Triangles whose centroid lies in the 3⁴ block of cells around `p`,
    /// in increasing index order.
    fn near(&self, p: &Vec4) -> Vec<usize> {
        let c = Self::cell_of(self.cell, p);
        let mut out = Vec::new();
        for x in -1..=1 {
            for y in -1..=1 {
                for z in -1..=1 {
                    for w in -1..=1 {
                        if let Some(ts) = self.map.get(&[c[0] + x, c[1] + y, c[2] + z, c[3] + w]) {
                            out.extend_from_slice(ts);
                        }
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }
}

fn max_edge(mesh: &ClosedSurfaceMesh) -> f64 {
    mesh.triangles
        .iter()
        .flat_map(|t| (0..3).map(move |e| (t[e], t[(e + 1) % 3])))
        .map(|(a, b)| mesh.vertices[a].chord(&mesh.vertices[b]))
        .fold(0.0, f64::max)
}

fn share_vertex(a: &[usize; 3], b: &[usize; 3]) -> bool {
    a.iter().any(|v| b.contains(v))
}

// ---------------------------------------------------------------------------
// embeddedness

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Separation {
    /// Smallest geodesic distance found between triangles sharing no vertex.
    pub min: f64,
    pub pair: Option<(usize, usize)>,
    /// Every pair closer than this is examined.
    pub radius: f64,
}

fn better(a: (f64, Option<(usize, usize)>), b: (f64, Option<(usize, usize)>)) -> (f64, Option<(usize, usize)>) {
    if b.0 < a.0 || (b.0 == a.0 && b.1 < a.1) {
        b
    } else {
        a
    }
}

/// Minimum distance between triangles sharing no vertex. Candidate pairs
/// come from a uniform hash of triangle centroids; pairs farther apart
/// than the longest edge are not examined.
pub fn min_separation(mesh: &ClosedSurfaceMesh) -> Result<Separation, VerifyError> {
    if mesh.triangles.is_empty() {
        return Err(VerifyError::Empty);
    }
    let radius = max_edge(mesh);
    let hash = CentroidHash::new(mesh, radius);
    let best = (0..mesh.triangles.len())
        .into_par_iter()
        .fold(
            || (f64::INFINITY, None),
            |mut best, i| {
                let ti = &mesh.triangles[i];
                let ci = corners(mesh, i);
                for j in hash.near(&hash.centroids[i]) {
                    if j <= i || share_vertex(ti, &mesh.triangles[j]) {
                        continue;
                    }
                    let gap = box_gap(&hash.boxes[i], &hash.boxes[j]);
                    if gap > radius || gap > best.0 {
                        continue;
                    }
                    let d = triangle_distance(&ci, &corners(mesh, j));
                    if d <= radius {
                        best = better(best, (d, Some((i, j))));
                    }
                }
                best
            },
        )
        .reduce(|| (f64::INFINITY, None), better);
    Ok(Separation { min: chord_to_angle(best.0.min(radius)), pair: best.1, radius: chord_to_angle(radius) })
}

/// All-pairs version of [`min_separation`], for small meshes.
pub fn min_separation_brute(mesh: &ClosedSurfaceMesh) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..mesh.triangles.len() {
        for j in i + 1..mesh.triangles.len() {
            if !share_vertex(&mesh.triangles[i], &mesh.triangles[j]) {
                best = best.min(triangle_distance(&corners(mesh, i), &corners(mesh, j)));
            }
        }
    }
    chord_to_angle(best)
}

// ---------------------------------------------------------------------------
// symmetry

/// Max over vertices `v` of the geodesic distance from `f(v)` to the mesh.
/// Distances beyond the longest edge are reported as that edge length.
pub fn map_residual(mesh: &ClosedSurfaceMesh, f: impl Fn(&Vec4) -> Vec4 + Sync) -> Result<f64, VerifyError> {
    if mesh.triangles.is_empty() {
        return Err(VerifyError::Empty);
    }
    let cap = max_edge(mesh);
    let hash = CentroidHash::new(mesh, cap);
    let worst = mesh
        .vertices
        .par_iter()
        .fold(
            || 0.0f64,
            |worst, v| {
                let p = f(v.coords());
                let pb = (p, p);
                let mut best = cap;
                for t in hash.near(&p) {
                    if best <= worst {
                        // this vertex cannot raise the maximum
                        break;
                    }
                    if box_gap(&pb, &hash.boxes[t]) >= best {
                        continue;
                    }
                    best = best.min(point_triangle_distance(&p, &corners(mesh, t)));
                }
                worst.max(best)
            },
        )
        .reduce(|| 0.0, f64::max);
    Ok(chord_to_angle(worst))
}

pub fn symmetry_residual(mesh: &ClosedSurfaceMesh, g: &Isometry) -> Result<f64, VerifyError> {
    map_residual(mesh, |x| g.apply_vec(x))
}

/// Number of vertices sampled by [`reflection_residual`].
pub const REFLECTION_SAMPLES: usize = 256;

/// Uncapped distance from `p` to the mesh, by a pruned linear scan.
fn distance_to_mesh(mesh: &ClosedSurfaceMesh, boxes: &[(Vec4, Vec4)], p: &Vec4) -> f64 {
    let pb = (*p, *p);
    let mut best = f64::INFINITY;
    for (t, b) in boxes.iter().enumerate() {
        if box_gap(&pb, b) < best {
            best = best.min(point_triangle_distance(p, &corners(mesh, t)));
        }
    }
    best
}

/// Lower bound for the residual under the reflection across the great
/// sphere `{x · n = 0}`: the maximum is taken over evenly spaced vertices.
pub fn reflection_residual(mesh: &ClosedSurfaceMesh, normal: &Vec4) -> Result<f64, VerifyError> {
    if mesh.triangles.is_empty() {
        return Err(VerifyError::Empty);
    }
    let n = vec4::normalize(normal).ok_or(VerifyError::Empty)?;
    let boxes: Vec<_> = (0..mesh.triangles.len()).map(|t| bbox(&corners(mesh, t))).collect();
    let stride = mesh.vertices.len().div_ceil(REFLECTION_SAMPLES).max(1);
    let worst = (0..mesh.vertices.len())
        .step_by(stride)
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&v| {
            let x = mesh.vertices[v].coords();
            distance_to_mesh(mesh, &boxes, &vec4::axpy(x, -2.0 * vec4::dot(x, &n), &n))
        })
        .reduce(|| 0.0, f64::max);
    Ok(chord_to_angle(worst))
}

/// Great spheres tested for reflection symmetry: coordinate hyperplanes,
/// the spheres `S¹ⱼ`, `S²ⱼ`, and perpendicular bisectors of hexagon corners.
pub fn reflection_candidates(cfg: &Configuration) -> Vec<(String, Vec4)> {
    let mut out: Vec<(String, Vec4)> = (1..=4).map(|i| (format!("x{i}=0"), vec4::basis(i - 1))).collect();
    for j in 1..=cfg.two_k() as isize {
        out.push((format!("S1_{j}"), cfg.sphere1(j)));
        out.push((format!("S2_{j}"), cfg.sphere2(j)));
    }
    let hex = fundamental_polygon_odd(cfg);
    let v = hex.vertices();
    for a in 0..v.len() {
        for b in a + 1..v.len() {
            if let Some(n) = vec4::normalize(&vec4::sub(v[a].coords(), v[b].coords())) {
                out.push((format!("bisector_{a}{b}"), n));
            }
        }
    }
    out
}

/// Isometries every assembled surface should be invariant under.
pub fn expected_symmetries(surface: &Surface) -> Vec<(String, Isometry)> {
    let cfg = &surface.cfg;
    let screw = Isometry::screw_motion(1, 2, 3, 4, 2.0 * std::f64::consts::PI / cfg.k as f64).expect("valid axes");
    let mut out = vec![("identity".to_string(), Isometry::identity()), ("screw_1234_2pi_over_k".to_string(), screw)];
    let v = fundamental_polygon_odd(cfg).vertices().to_vec();
    let edges: &[usize] = match surface.params.variant {
        Variant::Odd => &[0, 1, 2, 3, 4, 5],
        Variant::Even => &[0, 2, 3, 5],
    };
    for &e in edges {
        if let Ok(c) = GreatCircle::through(&v[e], &v[(e + 1) % 6]) {
            out.push((format!("half_turn_edge_{e}"), Isometry::half_turn(&c)));
        }
    }
    if surface.params.variant == Variant::Even {
        out.push(("phi".to_string(), cfg.phi));
    }
    out
}

// ---------------------------------------------------------------------------
// area and containment

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AreaInput {
    pub area: f64,
    pub refine: usize,
    /// Uncertainty of `area` attributable to the solver.
    pub tolerance: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AreaChecks {
    pub positive: bool,
    pub bound: f64,
    pub below_bound: bool,
    /// `Area(odd) − Area(even)` when an even surface was supplied.
    pub even_margin: Option<f64>,
    pub even_below_odd: Option<bool>,
}

/// Area bound `2mπ²` for the odd surface and, when given, the strict
/// comparison of the even surface against the odd one.
pub fn area_checks(m: usize, odd: &AreaInput, even: Option<&AreaInput>) -> Result<AreaChecks, VerifyError> {
    if !(odd.area > 0.0) {
        return Err(VerifyError::Empty);
    }
    let bound = 2.0 * m as f64 * std::f64::consts::PI.powi(2);
    let mut out = AreaChecks { positive: true, bound, below_bound: odd.area < bound, even_margin: None, even_below_odd: None };
    if let Some(e) = even {
        if !(e.area > 0.0) {
            return Err(VerifyError::Empty);
        }
        if e.refine != odd.refine {
            return Err(VerifyError::RefinementMismatch(odd.refine, e.refine));
        }
        let margin = odd.area - e.area;
        out.even_margin = Some(margin);
        out.even_below_odd = Some(margin > 2.0 * odd.tolerance.max(e.tolerance));
    }
    Ok(out)
}

/// Area change over the last few accepted iterations, scaled to `copies`
/// copies of the piece.
pub fn solver_area_tolerance(record: &ConvergenceRecord, copies: usize) -> f64 {
    let h = &record.history;
    let tail = h.len().saturating_sub(11);
    let drop = match (h.get(tail), h.last()) {
        (Some(a), Some(b)) => (a.area - b.area).abs(),
        _ => f64::INFINITY,
    };
    drop.max(f64::EPSILON * record.final_area) * copies as f64
}

/// Every vertex of `piece` lies inside or on the boundary of `label`.
pub fn containment_check(piece: &TriMesh, cfg: &Configuration, label: PentaLabel) -> bool {
    piece
        .vertices
        .iter()
        .all(|p| matches!(cfg.region_membership(label, p), Ok(Membership::Inside | Membership::Boundary)))
}

// ---------------------------------------------------------------------------
// report

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportParams {
    pub variant: Variant,
    pub m: usize,
    pub ell: usize,
    pub k: usize,
    pub refine: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Convergence {
    pub converged: bool,
    pub iterations: usize,
    pub final_grad_norm: f64,
    pub final_area: f64,
}

impl From<&ConvergenceRecord> for Convergence {
    fn from(r: &ConvergenceRecord) -> Self {
        Convergence { converged: r.converged, iterations: r.iterations, final_grad_norm: r.final_grad_norm, final_area: r.final_area }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurfaceReport {
    pub schema_version: u32,
    pub params: ReportParams,
    pub vertices: usize,
    pub triangles: usize,
    pub copies: usize,
    pub euler: i64,
    pub genus: i64,
    pub expected_genus: i64,
    pub orientable: bool,
    pub area: f64,
    pub area_tolerance: f64,
    pub area_bound: f64,
    pub area_bound_pass: bool,
    pub angle_defect_total: f64,
    /// Geodesic distance; certifies embeddedness only at mesh resolution.
    pub min_separation: f64,
    pub separation_threshold: f64,
    pub embedded: bool,
    pub symmetry_residuals: BTreeMap<String, f64>,
    pub symmetry_threshold: f64,
    pub symmetric: bool,
    /// Tested over a finite candidate family of great spheres only.
    pub reflection_residuals: BTreeMap<String, f64>,
    pub reflection_candidates_only: bool,
    pub no_reflection_symmetry: bool,
    pub containment: bool,
    pub coupled_curvature_residual: Option<f64>,
    pub convergence: Vec<Convergence>,
    pub pole: Option<[f64; 4]>,
}

impl SurfaceReport {
    /// The checks every surface must pass.
    pub fn passed(&self) -> bool {
        self.genus == self.expected_genus
            && self.orientable
            && self.area_bound_pass
            && self.embedded
            && self.symmetric
            && self.containment
            && self.convergence.iter().all(|c| c.converged)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }
}

/// Runs all checks on an assembled surface.
pub fn verify_surface(surface: &Surface) -> Result<SurfaceReport, VerifyError> {
    let p = &surface.params;
    let cfg = &surface.cfg;
    let mesh = &surface.mesh;
    let eps = p.eps_weld;
    let sep = min_separation(mesh)?;
    let mut symmetry_residuals = BTreeMap::new();
    for (label, g) in expected_symmetries(surface) {
        symmetry_residuals.insert(label, symmetry_residual(mesh, &g)?);
    }
    let mut reflection_residuals = BTreeMap::new();
    for (label, n) in reflection_candidates(cfg) {
        reflection_residuals.insert(label, reflection_residual(mesh, &n)?);
    }
    let symmetry_threshold = 10.0 * eps;
    let tolerance = solver_area_tolerance(&surface.piece().record, surface.copies.len());
    let area = AreaInput { area: mesh.area(), refine: p.refine, tolerance };
    let checks = area_checks(p.m, &area, None)?;
    let first = PentaLabel::u(1, 1);
    let containment = containment_check(&surface.hexagon.mesh, cfg, first);
    let mut convergence = vec![Convergence::from(&surface.hexagon.record)];
    if let Some(f) = &surface.free {
        convergence.push(Convergence::from(&f.record));
    }
    Ok(SurfaceReport {
        schema_version: SCHEMA_VERSION,
        params: ReportParams { variant: p.variant, m: p.m, ell: p.ell, k: cfg.k, refine: p.refine },
        vertices: mesh.vertices.len(),
        triangles: mesh.triangles.len(),
        copies: surface.copies.len(),
        euler: surface.topology.euler,
        genus: surface.topology.genus,
        expected_genus: expected_genus(p.m, p.ell),
        orientable: surface.topology.orientable,
        area: area.area,
        area_tolerance: tolerance,
        area_bound: checks.bound,
        area_bound_pass: checks.below_bound,
        angle_defect_total: angle_defect_total(mesh),
        min_separation: sep.min,
        separation_threshold: eps,
        embedded: sep.min > eps,
        symmetric: symmetry_residuals.values().all(|r| *r < symmetry_threshold),
        symmetry_residuals,
        symmetry_threshold,
        no_reflection_symmetry: reflection_residuals.values().all(|r| *r >= symmetry_threshold),
        reflection_residuals,
        reflection_candidates_only: true,
        containment,
        coupled_curvature_residual: surface.free.as_ref().map(|f| coupled_curvature_residual(&f.mesh)),
        convergence,
        pole: None,
    })
}

/// Checks on a bare mesh, e.g. one read back from disk.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeshReport {
    pub schema_version: u32,
    pub vertices: usize,
    pub triangles: usize,
    pub euler: i64,
    pub genus: i64,
    pub orientable: bool,
    pub components: usize,
    pub area: f64,
    pub angle_defect_total: f64,
    pub min_separation: f64,
    pub separation_threshold: f64,
    pub embedded: bool,
    /// Present when `(m, ℓ)` were supplied.
    pub expected_genus: Option<i64>,
    pub area_bound: Option<f64>,
    pub symmetry_residuals: BTreeMap<String, f64>,
    pub symmetry_threshold: f64,
}

impl MeshReport {
    pub fn passed(&self) -> bool {
        self.orientable
            && self.components == 1
            && self.embedded
            && self.expected_genus.is_none_or(|g| g == self.genus)
            && self.area_bound.is_none_or(|b| self.area < b)
            && self.symmetry_residuals.values().all(|r| *r < self.symmetry_threshold)
    }
}

/// Topology and embeddedness of `mesh`; with `(m, ℓ)` also the genus,
/// area bound and screw symmetry expected of the surface.
pub fn verify_mesh(mesh: &ClosedSurfaceMesh, params: Option<(usize, usize)>, eps: f64) -> Result<MeshReport, VerifyError> {
    if mesh.triangles.is_empty() {
        return Err(VerifyError::Empty);
    }
    let topology = euler_genus(mesh)?;
    let sep = min_separation(mesh)?;
    let mut symmetry_residuals = BTreeMap::new();
    if let Some((m, ell)) = params {
        let k = 2 * m * ell;
        let screw = screw_motion(1, 2, 3, 4, 2.0 * std::f64::consts::PI / k as f64).expect("distinct axes");
        symmetry_residuals.insert("screw_1234_2pi_over_k".to_string(), symmetry_residual(mesh, &screw)?);
    }
    Ok(MeshReport {
        schema_version: SCHEMA_VERSION,
        vertices: mesh.vertices.len(),
        triangles: mesh.triangles.len(),
        euler: topology.euler,
        genus: topology.genus,
        orientable: topology.orientable,
        components: topology.components,
        area: mesh.area(),
        angle_defect_total: angle_defect_total(mesh),
        min_separation: sep.min,
        separation_threshold: eps,
        embedded: sep.min > eps,
        expected_genus: params.map(|(m, ell)| expected_genus(m, ell)),
        area_bound: params.map(|(m, _)| 2.0 * m as f64 * std::f64::consts::PI.powi(2)),
        symmetry_residuals,
        symmetry_threshold: 10.0 * eps,
    })
}
