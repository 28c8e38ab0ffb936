use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::PlateauError;
use crate::s3geom::{vec4, CliffordTorus, GeodesicArc, Isometry, S3Point, Vec4};

/// Constraint attached to a mesh vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum VertexTag {
    Interior,
    Fixed,
    OnArc(usize),
    OnTorus(usize),
    /// Position is `isometries[iso]` applied to vertex `source`.
    Coupled { source: usize, iso: usize },
}

/// Constraint carried by a boundary edge; decides where refinement puts its
/// midpoint.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum EdgeKind {
    Arc(usize),
    Torus(usize),
    /// Image of a source edge under `isometries[iso]`.
    Coupled(usize),
}

/// Triangulated surface in S³ with per-vertex constraints.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TriMesh {
    pub vertices: Vec<S3Point>,
    pub triangles: Vec<[usize; 3]>,
    pub tags: Vec<VertexTag>,
    pub arcs: Vec<GeodesicArc>,
    pub tori: Vec<CliffordTorus>,
    pub isometries: Vec<Isometry>,
    /// Constrained edges, keyed by sorted vertex pair.
    pub edge_kinds: BTreeMap<(usize, usize), EdgeKind>,
}

#[inline]
pub(crate) fn edge_key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Flat area of the triangle `abc` in R⁴.
pub fn triangle_area(a: &Vec4, b: &Vec4, c: &Vec4) -> f64 {
    let u = vec4::sub(b, a);
    let v = vec4::sub(c, a);
    let uu = vec4::dot(&u, &u);
    let vv = vec4::dot(&v, &v);
    let uv = vec4::dot(&u, &v);
    0.5 * (uu * vv - uv * uv).max(0.0).sqrt()
}

/// `4√3·A / Σ|e|²`: 1 for equilateral, 0 for degenerate.
pub fn triangle_quality(a: &Vec4, b: &Vec4, c: &Vec4) -> f64 {
    let s = vec4::norm_sq(&vec4::sub(b, a)) + vec4::norm_sq(&vec4::sub(c, b)) + vec4::norm_sq(&vec4::sub(a, c));
    if s == 0.0 {
        return 0.0;
    }
    4.0 * 3f64.sqrt() * triangle_area(a, b, c) / s
}

/// Interior angle at `a` of the flat triangle `abc`.
pub fn corner_angle(a: &Vec4, b: &Vec4, c: &Vec4) -> f64 {
    let u = vec4::sub(b, a);
    let v = vec4::sub(c, a);
    let cross = (vec4::norm_sq(&u) * vec4::norm_sq(&v) - vec4::dot(&u, &v).powi(2)).max(0.0).sqrt();
    cross.atan2(vec4::dot(&u, &v))
}

impl TriMesh {
    /// Unconstrained mesh (all vertices interior).
    pub fn from_raw(vertices: Vec<S3Point>, triangles: Vec<[usize; 3]>) -> Self {
        let tags = vec![VertexTag::Interior; vertices.len()];
        TriMesh {
            vertices,
            triangles,
            tags,
            arcs: Vec::new(),
            tori: Vec::new(),
            isometries: Vec::new(),
            edge_kinds: BTreeMap::new(),
        }
    }

    /// Fan triangulation of a closed boundary loop around `center`.
    ///
    /// `kinds[i]` constrains the edge from `boundary[i]` to `boundary[i + 1]`.
    #[allow(clippy::too_many_arguments)]
    pub fn fan(
        boundary: &[S3Point],
        tags: &[VertexTag],
        kinds: &[EdgeKind],
        center: S3Point,
        arcs: Vec<GeodesicArc>,
        tori: Vec<CliffordTorus>,
        isometries: Vec<Isometry>,
    ) -> Self {
        let n = boundary.len();
        let mut vertices = boundary.to_vec();
        vertices.push(center);
        let mut all_tags = tags.to_vec();
        all_tags.push(VertexTag::Interior);
        let triangles = (0..n).map(|i| [n, i, (i + 1) % n]).collect();
        let edge_kinds = (0..n).map(|i| (edge_key(i, (i + 1) % n), kinds[i])).collect();
        TriMesh { vertices, triangles, tags: all_tags, arcs, tori, isometries, edge_kinds }
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    /// Edge → number of incident triangles, in sorted order.
    pub fn edge_counts(&self) -> BTreeMap<(usize, usize), usize> {
        let mut m = BTreeMap::new();
        for t in &self.triangles {
            for e in 0..3 {
                *m.entry(edge_key(t[e], t[(e + 1) % 3])).or_insert(0) += 1;
            }
        }
        m
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.edge_counts().into_keys().collect()
    }

    pub fn boundary_edges(&self) -> Vec<(usize, usize)> {
        self.edge_counts().into_iter().filter(|(_, c)| *c == 1).map(|(e, _)| e).collect()
    }

    pub fn euler_characteristic(&self) -> i64 {
        let used = {
            let mut u = vec![false; self.vertices.len()];
            for t in &self.triangles {
                for &v in t {
                    u[v] = true;
                }
            }
            u.iter().filter(|x| **x).count()
        };
        used as i64 - self.edge_counts().len() as i64 + self.triangles.len() as i64
    }

    pub fn is_closed(&self) -> bool {
        self.edge_counts().values().all(|c| *c == 2)
    }

    pub fn min_quality(&self) -> (usize, f64) {
        let mut best = (0, f64::INFINITY);
        for (i, t) in self.triangles.iter().enumerate() {
            let [a, b, c] = t.map(|v| *self.vertices[v].coords());
            let q = triangle_quality(&a, &b, &c);
            if q < best.1 {
                best = (i, q);
            }
        }
        best
    }

    /// Where a constrained vertex must be, if anywhere specific.
    fn constraint_residual(&self, v: usize) -> f64 {
        let p = &self.vertices[v];
        match self.tags[v] {
            VertexTag::Interior | VertexTag::Fixed => 0.0,
            VertexTag::OnArc(a) => self.arcs[a].distance_to(p),
            VertexTag::OnTorus(t) => self.tori[t].distance(p),
            VertexTag::Coupled { source, iso } => {
                self.isometries[iso].apply(&self.vertices[source]).distance(p)
            }
        }
    }

    /// Largest violation of any vertex constraint.
    pub fn max_constraint_residual(&self) -> f64 {
        (0..self.vertices.len()).map(|v| self.constraint_residual(v)).fold(0.0, f64::max)
    }

    /// Checks unit norms, index validity, non-degenerate triangles and all
    /// vertex constraints.
    pub fn validate(&self, unit_tol: f64, geo_tol: f64) -> Result<(), PlateauError> {
        if self.tags.len() != self.vertices.len() {
            return Err(PlateauError::InvalidMesh("tag count differs from vertex count".into()));
        }
        for (i, p) in self.vertices.iter().enumerate() {
            let n = vec4::norm(p.coords());
            if (n - 1.0).abs() > unit_tol {
                return Err(PlateauError::InvalidMesh(format!("vertex {i} has norm {n}")));
            }
        }
        for (i, t) in self.triangles.iter().enumerate() {
            if t.iter().any(|&v| v >= self.vertices.len()) {
                return Err(PlateauError::InvalidMesh(format!("triangle {i} has an invalid index")));
            }
            if t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
                return Err(PlateauError::InvalidMesh(format!("triangle {i} repeats a vertex")));
            }
        }
        for (v, tag) in self.tags.iter().enumerate() {
            let bad = match *tag {
                VertexTag::OnArc(a) => a >= self.arcs.len(),
                VertexTag::OnTorus(t) => t >= self.tori.len(),
                VertexTag::Coupled { source, iso } => source >= self.vertices.len() || iso >= self.isometries.len(),
                _ => false,
            };
            if bad {
                return Err(PlateauError::InvalidMesh(format!("vertex {v} references a missing constraint")));
            }
            let r = self.constraint_residual(v);
            if r > geo_tol {
                return Err(PlateauError::InvalidMesh(format!("vertex {v} violates its constraint by {r:e}")));
            }
        }
        Ok(())
    }

    /// 4-to-1 subdivision. Boundary midpoints follow their edge constraint.
    pub fn refine(&self) -> TriMesh {
        let mut out = self.clone();
        let mut mid: HashMap<(usize, usize), usize> = HashMap::new();
        let mut new_kinds = BTreeMap::new();

        let mut order = Vec::new();
        for t in &self.triangles {
            for e in 0..3 {
                let key = edge_key(t[e], t[(e + 1) % 3]);
                if let std::collections::hash_map::Entry::Vacant(e) = mid.entry(key) {
                    e.insert(usize::MAX);
                    order.push(key);
                }
            }
        }
        // coupled midpoints need their source midpoints first
        order.sort_by_key(|k| matches!(self.edge_kinds.get(k), Some(EdgeKind::Coupled(_))));

        for key in order {
            let (a, b) = key;
            let pa = self.vertices[a];
            let pb = self.vertices[b];
            let (pos, tag) = match self.edge_kinds.get(&key) {
                None => (crate::s3geom::midpoint(&pa, &pb).unwrap(), VertexTag::Interior),
                Some(EdgeKind::Arc(i)) => {
                    let m = crate::s3geom::midpoint(&pa, &pb).unwrap();
                    (self.arcs[*i].project_clamped(&m, 0.0), VertexTag::OnArc(*i))
                }
                Some(EdgeKind::Torus(i)) => (self.tori[*i].flat_midpoint(&pa, &pb), VertexTag::OnTorus(*i)),
                Some(EdgeKind::Coupled(iso)) => {
                    let (sa, sb) = match (self.tags[a], self.tags[b]) {
                        (VertexTag::Coupled { source: x, .. }, VertexTag::Coupled { source: y, .. }) => (x, y),
                        _ => panic!("coupled edge {key:?} between uncoupled vertices"),
                    };
                    let src = mid[&edge_key(sa, sb)];
                    (self.isometries[*iso].apply(&out.vertices[src]), VertexTag::Coupled { source: src, iso: *iso })
                }
            };
            let idx = out.vertices.len();
            out.vertices.push(pos);
            out.tags.push(tag);
            mid.insert(key, idx);
            if let Some(kind) = self.edge_kinds.get(&key) {
                new_kinds.insert(edge_key(a, idx), *kind);
                new_kinds.insert(edge_key(idx, b), *kind);
            }
        }

        out.triangles = Vec::with_capacity(4 * self.triangles.len());
        for t in &self.triangles {
            let [a, b, c] = *t;
            let ab = mid[&edge_key(a, b)];
            let bc = mid[&edge_key(b, c)];
            let ca = mid[&edge_key(c, a)];
            out.triangles.push([a, ab, ca]);
            out.triangles.push([ab, b, bc]);
            out.triangles.push([ca, bc, c]);
            out.triangles.push([ab, bc, ca]);
        }
        out.edge_kinds = new_kinds;
        out
    }

    pub fn refined(&self, n: usize) -> TriMesh {
        (0..n).fold(self.clone(), |m, _| m.refine())
    }

    /// Image of the mesh, constraints included, under `g`.
    pub fn transformed(&self, g: &Isometry) -> TriMesh {
        let mut out = self.clone();
        for p in &mut out.vertices {
            *p = g.apply(p);
        }
        for a in &mut out.arcs {
            *a = GeodesicArc::new(g.apply(a.start()), g.apply(a.end())).unwrap();
        }
        for t in &mut out.tori {
            *t = t.transformed(g);
        }
        for h in &mut out.isometries {
            *h = g.conjugate(h);
        }
        out
    }

    /// Flips every triangle's orientation.
    pub fn flipped(&self) -> TriMesh {
        let mut out = self.clone();
        for t in &mut out.triangles {
            t.swap(1, 2);
        }
        out
    }

    /// `π − Σ(incident corner angles)` at each vertex: the discrete turning
    /// angle of the boundary for boundary vertices.
    pub fn angle_sums(&self) -> Vec<f64> {
        let mut s = vec![0.0; self.vertices.len()];
        for t in &self.triangles {
            let p = t.map(|v| *self.vertices[v].coords());
            for c in 0..3 {
                s[t[c]] += corner_angle(&p[c], &p[(c + 1) % 3], &p[(c + 2) % 3]);
            }
        }
        s
    }

    /// One third of the incident triangle areas.
    pub fn dual_areas(&self) -> Vec<f64> {
        let mut s = vec![0.0; self.vertices.len()];
        for t in &self.triangles {
            let [a, b, c] = t.map(|v| *self.vertices[v].coords());
            let ar = triangle_area(&a, &b, &c) / 3.0;
            for &v in t {
                s[v] += ar;
            }
        }
        s
    }

    /// Closed mesh of a Clifford torus on a `2ⁿ × 2ⁿ` grid of its local
    /// angles.
    pub fn torus_grid(torus: &CliffordTorus, n: usize) -> TriMesh {
        let m = 1usize << n;
        let h = 2.0 * std::f64::consts::PI / m as f64;
        let idx = |i: usize, j: usize| (i % m) * m + (j % m);
        let mut vertices = Vec::with_capacity(m * m);
        for i in 0..m {
            for j in 0..m {
                vertices.push(torus.point_at_angles(i as f64 * h, j as f64 * h));
            }
        }
        let mut triangles = Vec::with_capacity(2 * m * m);
        for i in 0..m {
            for j in 0..m {
                let (a, b, c, d) = (idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1));
                triangles.push([a, b, c]);
                triangles.push([a, c, d]);
            }
        }
        TriMesh::from_raw(vertices, triangles)
    }
}

/// Total flat triangle area.
pub fn mesh_area(mesh: &TriMesh) -> f64 {
    mesh.triangles
        .iter()
        .map(|t| {
            let [a, b, c] = t.map(|v| *mesh.vertices[v].coords());
            triangle_area(&a, &b, &c)
        })
        .sum()
}

/// The disk spanned by a fan from `center` over the polygon, refined `n`
/// times. Polygon vertices are fixed; edges are sliding arcs.
pub fn init_disk_mesh_centered(
    polygon: &crate::tessellation::GeodesicPolygon,
    center: S3Point,
    n: usize,
) -> Result<TriMesh, PlateauError> {
    polygon.check_simple(1e-6).map_err(|e| PlateauError::InvalidInput(e.to_string()))?;
    let k = polygon.len();
    let arcs = polygon.edges();
    let tags = vec![VertexTag::Fixed; k];
    let kinds: Vec<EdgeKind> = (0..k).map(EdgeKind::Arc).collect();
    let base = TriMesh::fan(polygon.vertices(), &tags, &kinds, center, arcs, Vec::new(), Vec::new());
    Ok(base.refined(n))
}

/// As [`init_disk_mesh_centered`] with the normalized vertex centroid as
/// center.
pub fn init_disk_mesh(polygon: &crate::tessellation::GeodesicPolygon, n: usize) -> Result<TriMesh, PlateauError> {
    let sum = polygon.vertices().iter().fold([0.0; 4], |a, p| vec4::add(&a, p.coords()));
    let center = S3Point::normalize(sum)
        .ok_or_else(|| PlateauError::InvalidInput("polygon centroid at the origin; give a center".into()))?;
    init_disk_mesh_centered(polygon, center, n)
}
