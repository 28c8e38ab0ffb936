//! Symmetry groups, orbits of a fundamental piece, welding and topology.

use std::collections::{BTreeMap, VecDeque};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::plateau::TriMesh;
use crate::s3geom::{vec4, Isometry, S3Point, Vec4};

/// Matrix and fingerprint coincidence tolerance.
pub const EPS_GRP: f64 = 1e-9;
/// Default vertex identification tolerance.
pub const EPS_WELD: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AssemblyError {
    #[error("group not closed at cap {0}")]
    GroupCap(usize),
    #[error("orbit exceeds cap {0}")]
    OrbitCap(usize),
    #[error("ambiguous copies {0} and {1}: corners agree but centroids differ")]
    Ambiguous(usize, usize),
    #[error("unmatched boundary vertex {vertex} of copy {copy}")]
    Unmatched { copy: usize, vertex: usize },
    #[error("interior vertex {vertex} of copy {copy} coincides with another vertex")]
    InteriorCollision { copy: usize, vertex: usize },
    #[error("edge ({0}, {1}) borders {2} triangles")]
    NotClosed(usize, usize, usize),
    #[error("surface is not orientable")]
    NonOrientable,
    #[error("odd Euler characteristic {0}")]
    OddEuler(i64),
    #[error("empty mesh")]
    Empty,
    #[error("a piece needs exactly six corners")]
    Corners,
}

/// Approximate lookup of points by a scalar projection.
pub(crate) struct NearIndex<const N: usize> {
    cell: f64,
    tol: f64,
    buckets: BTreeMap<i64, Vec<usize>>,
    items: Vec<[f64; N]>,
}

impl<const N: usize> NearIndex<N> {
    pub(crate) fn new(tol: f64) -> Self {
        NearIndex { cell: 4.0 * tol, tol, buckets: BTreeMap::new(), items: Vec::new() }
    }

    fn weight(i: usize) -> f64 {
        1.0 + 0.618 * i as f64
    }

    fn key(&self, x: &[f64; N]) -> i64 {
        let s: f64 = x.iter().enumerate().map(|(i, v)| v * Self::weight(i)).sum();
        (s / self.cell).floor() as i64
    }

    fn dist(a: &[f64; N], b: &[f64; N]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
    }

    pub(crate) fn find(&self, x: &[f64; N]) -> Option<usize> {
        let k = self.key(x);
        let lip = (0..N).map(|i| Self::weight(i).powi(2)).sum::<f64>().sqrt();
        let reach = (lip * self.tol / self.cell).ceil() as i64;
        (k - reach..=k + reach)
            .filter_map(|kk| self.buckets.get(&kk))
            .flatten()
            .copied()
            .filter(|&i| Self::dist(&self.items[i], x) < self.tol)
            .min()
    }

    pub(crate) fn insert(&mut self, x: [f64; N]) -> usize {
        let id = self.items.len();
        self.buckets.entry(self.key(&x)).or_default().push(id);
        self.items.push(x);
        id
    }
}

fn flat(g: &Isometry) -> [f64; 16] {
    let m = g.matrix();
    std::array::from_fn(|i| m[i / 4][i % 4])
}

#[derive(Clone, Debug)]
pub struct IsometryGroup {
    pub elements: Vec<Isometry>,
    pub generators: Vec<Isometry>,
    pub closed: bool,
}

impl IsometryGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn contains(&self, g: &Isometry) -> bool {
        self.elements.iter().any(|e| e.distance(g) < EPS_GRP)
    }
}

/// Closure of `generators` by breadth-first products, deduplicated by
/// matrix distance.
pub fn generate_group(generators: &[Isometry], cap: usize) -> Result<IsometryGroup, AssemblyError> {
    let mut index = NearIndex::<16>::new(EPS_GRP);
    let mut elements = vec![Isometry::identity()];
    index.insert(flat(&elements[0]));
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for g in generators {
            let h = elements[i] * *g;
            let f = flat(&h);
            if index.find(&f).is_none() {
                if elements.len() >= cap {
                    return Err(AssemblyError::GroupCap(cap));
                }
                index.insert(f);
                queue.push_back(elements.len());
                elements.push(h);
            }
        }
    }
    Ok(IsometryGroup { elements, generators: generators.to_vec(), closed: true })
}

/// How a piece continues across one of its boundary edges: the neighbouring
/// copy is `g * map` applied to the piece, with reversed orientation when
/// `flips` is set.
#[derive(Clone, Copy, Debug)]
pub struct Extension {
    pub map: Isometry,
    pub flips: bool,
}

/// One copy `g(piece)` in an orbit, with its orientation and the word of
/// extensions that produced it.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PlacedCopy {
    pub id: usize,
    pub transform: Isometry,
    pub flipped: bool,
    pub word: Vec<usize>,
}

/// Breadth-first orbit of `piece` under the extensions. Copies are
/// identified by the sorted images of the six `corners`; copies whose
/// corners agree must also agree in vertex centroid.
pub fn orbit_fundamental(
    piece: &TriMesh,
    corners: &[usize],
    extensions: &[Extension],
    cap: usize,
) -> Result<Vec<PlacedCopy>, AssemblyError> {
    if piece.vertices.is_empty() {
        return Err(AssemblyError::Empty);
    }
    if corners.len() != 6 {
        return Err(AssemblyError::Corners);
    }
    let fingerprint = |g: &Isometry| {
        let sum = piece.vertices.iter().fold([0.0; 4], |a, p| vec4::add(&a, &g.apply_vec(p.coords())));
        let centroid = vec4::scale(&sum, 1.0 / piece.vertices.len() as f64);
        let mut cs: Vec<Vec4> = corners.iter().map(|&c| g.apply_vec(piece.vertices[c].coords())).collect();
        // generic weights so that nearly equal coordinates cannot swap the order
        let w = [1.0, std::f64::consts::SQRT_2, 3f64.sqrt(), std::f64::consts::PI];
        cs.sort_by(|a, b| vec4::dot(a, &w).total_cmp(&vec4::dot(b, &w)));
        let key: [f64; 24] = std::array::from_fn(|i| cs[i / 4][i % 4]);
        (key, centroid)
    };
    let mut index = NearIndex::<24>::new(EPS_GRP);
    let mut centroids = Vec::new();
    let mut copies = Vec::new();
    let first = PlacedCopy { id: 0, transform: Isometry::identity(), flipped: false, word: Vec::new() };
    let (key, centroid) = fingerprint(&first.transform);
    index.insert(key);
    centroids.push(centroid);
    copies.push(first);
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for (e, ext) in extensions.iter().enumerate() {
            let g = copies[i].transform * ext.map;
            let (key, centroid) = fingerprint(&g);
            match index.find(&key) {
                Some(j) => {
                    if vec4::dist(&centroids[j], &centroid) >= EPS_GRP {
                        return Err(AssemblyError::Ambiguous(j, copies.len()));
                    }
                }
                None => {
                    if copies.len() >= cap {
                        return Err(AssemblyError::OrbitCap(cap));
                    }
                    let mut word = copies[i].word.clone();
                    word.push(e);
                    index.insert(key);
                    centroids.push(centroid);
                    queue.push_back(copies.len());
                    copies.push(PlacedCopy { id: copies.len(), transform: g, flipped: copies[i].flipped ^ ext.flips, word });
                }
            }
        }
    }
    Ok(copies)
}

/// A transformed copy ready to weld; `boundary` marks vertices that must
/// find a partner in another copy.
#[derive(Clone, Debug)]
pub struct MeshCopy {
    pub vertices: Vec<S3Point>,
    pub triangles: Vec<[usize; 3]>,
    pub boundary: Vec<bool>,
}

impl MeshCopy {
    pub fn from_mesh(mesh: &TriMesh) -> Self {
        let mut boundary = vec![false; mesh.vertices.len()];
        for (a, b) in mesh.boundary_edges() {
            boundary[a] = true;
            boundary[b] = true;
        }
        MeshCopy { vertices: mesh.vertices.clone(), triangles: mesh.triangles.clone(), boundary }
    }
}

/// Applies every placement to `piece`, reversing triangles of flipped copies.
pub fn place_copies(piece: &TriMesh, copies: &[PlacedCopy]) -> Vec<MeshCopy> {
    let base = MeshCopy::from_mesh(piece);
    copies
        .par_iter()
        .map(|c| MeshCopy {
            vertices: base.vertices.iter().map(|p| c.transform.apply(p)).collect(),
            triangles: base
                .triangles
                .iter()
                .map(|t| if c.flipped { [t[0], t[2], t[1]] } else { *t })
                .collect(),
            boundary: base.boundary.clone(),
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosedSurfaceMesh {
    pub vertices: Vec<S3Point>,
    pub triangles: Vec<[usize; 3]>,
    /// First `(copy, source vertex)` mapped to each welded vertex.
    pub provenance: Vec<(usize, usize)>,
    /// Number of copy vertices merged into an earlier one.
    pub identified: usize,
}

impl ClosedSurfaceMesh {
    pub fn as_copy(&self) -> MeshCopy {
        MeshCopy { vertices: self.vertices.clone(), triangles: self.triangles.clone(), boundary: vec![false; self.vertices.len()] }
    }

    pub fn area(&self) -> f64 {
        self.triangles
            .iter()
            .map(|t| crate::plateau::triangle_area(self.vertices[t[0]].coords(), self.vertices[t[1]].coords(), self.vertices[t[2]].coords()))
            .sum()
    }

    pub fn edge_counts(&self) -> BTreeMap<(usize, usize), usize> {
        let mut counts = BTreeMap::new();
        for t in &self.triangles {
            for e in 0..3 {
                let (a, b) = (t[e], t[(e + 1) % 3]);
                *counts.entry((a.min(b), a.max(b))).or_insert(0) += 1;
            }
        }
        counts
    }
}

/// Identifies vertices closer than `eps` and checks that the result is a
/// closed surface.
pub fn weld(copies: &[MeshCopy], eps: f64) -> Result<ClosedSurfaceMesh, AssemblyError> {
    if copies.iter().all(|c| c.triangles.is_empty()) {
        return Err(AssemblyError::Empty);
    }
    let mut index = NearIndex::<4>::new(eps);
    let mut vertices = Vec::new();
    let mut provenance = Vec::new();
    let mut hits: Vec<Vec<(usize, usize)>> = Vec::new();
    let mut triangles = Vec::new();
    let mut identified = 0;
    for (ci, c) in copies.iter().enumerate() {
        let map: Vec<usize> = c
            .vertices
            .iter()
            .enumerate()
            .map(|(v, p)| match index.find(p.coords()) {
                Some(w) => {
                    identified += 1;
                    hits[w].push((ci, v));
                    w
                }
                None => {
                    vertices.push(*p);
                    provenance.push((ci, v));
                    hits.push(vec![(ci, v)]);
                    index.insert(*p.coords())
                }
            })
            .collect();
        triangles.extend(c.triangles.iter().map(|t| t.map(|v| map[v])));
    }
    for h in &hits {
        for (n, &(ci, v)) in h.iter().enumerate() {
            let repeated = h[..n].iter().any(|&(o, _)| o == ci);
            if repeated || (h.len() > 1 && !copies[ci].boundary[v]) {
                return Err(AssemblyError::InteriorCollision { copy: ci, vertex: v });
            }
            if h.len() == 1 && copies[ci].boundary[v] {
                return Err(AssemblyError::Unmatched { copy: ci, vertex: v });
            }
        }
    }
    let mesh = ClosedSurfaceMesh { vertices, triangles, provenance, identified };
    if let Some((&(a, b), &n)) = mesh.edge_counts().iter().find(|(_, &n)| n != 2) {
        return Err(AssemblyError::NotClosed(a, b, n));
    }
    Ok(mesh)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Topology {
    pub euler: i64,
    pub genus: i64,
    pub orientable: bool,
    /// The stored triangle orientation is already globally consistent.
    pub consistently_oriented: bool,
    pub components: usize,
}

/// Euler characteristic, genus and orientability of a closed mesh, the last
/// by propagating triangle orientation across edges.
pub fn euler_genus(mesh: &ClosedSurfaceMesh) -> Result<Topology, AssemblyError> {
    if mesh.triangles.is_empty() {
        return Err(AssemblyError::Empty);
    }
    let counts = mesh.edge_counts();
    if let Some((&(a, b), &n)) = counts.iter().find(|(_, &n)| n != 2) {
        return Err(AssemblyError::NotClosed(a, b, n));
    }
    let mut used = vec![false; mesh.vertices.len()];
    mesh.triangles.iter().flatten().for_each(|&v| used[v] = true);
    let v = used.iter().filter(|&&u| u).count() as i64;
    let euler = v - counts.len() as i64 + mesh.triangles.len() as i64;

    // (edge) -> [(triangle, traverses a→b with a<b)]
    let mut sides: BTreeMap<(usize, usize), Vec<(usize, bool)>> = BTreeMap::new();
    for (ti, t) in mesh.triangles.iter().enumerate() {
        for e in 0..3 {
            let (a, b) = (t[e], t[(e + 1) % 3]);
            sides.entry((a.min(b), a.max(b))).or_default().push((ti, a < b));
        }
    }
    let mut nbrs: Vec<Vec<(usize, bool)>> = vec![Vec::new(); mesh.triangles.len()];
    let mut consistent = true;
    for s in sides.values() {
        let ((t1, d1), (t2, d2)) = (s[0], s[1]);
        // same traversal direction means one of the two must flip
        let flip = d1 == d2;
        consistent &= !flip;
        nbrs[t1].push((t2, flip));
        nbrs[t2].push((t1, flip));
    }
    let mut sign = vec![0i8; mesh.triangles.len()];
    let mut components = 0;
    let mut orientable = true;
    for start in 0..mesh.triangles.len() {
        if sign[start] != 0 {
            continue;
        }
        components += 1;
        sign[start] = 1;
        let mut queue = VecDeque::from([start]);
        while let Some(t) = queue.pop_front() {
            for &(u, flip) in &nbrs[t] {
                let want = if flip { -sign[t] } else { sign[t] };
                if sign[u] == 0 {
                    sign[u] = want;
                    queue.push_back(u);
                } else if sign[u] != want {
                    orientable = false;
                }
            }
        }
    }
    if !orientable {
        return Err(AssemblyError::NonOrientable);
    }
    if euler % 2 != 0 {
        return Err(AssemblyError::OddEuler(euler));
    }
    let genus = (2 * components as i64 - euler) / 2;
    Ok(Topology { euler, genus, orientable, consistently_oriented: consistent, components })
}

/// Sum over vertices of `2π` minus the incident flat triangle angles.
pub fn angle_defect_total(mesh: &ClosedSurfaceMesh) -> f64 {
    let mut sums = vec![0.0; mesh.vertices.len()];
    let mut used = vec![false; mesh.vertices.len()];
    for t in &mesh.triangles {
        for c in 0..3 {
            let (a, b, d) = (t[c], t[(c + 1) % 3], t[(c + 2) % 3]);
            let x = |i: usize| mesh.vertices[i].coords();
            sums[a] += crate::plateau::corner_angle(x(a), x(b), x(d));
            used[a] = true;
        }
    }
    sums.iter().zip(&used).filter(|(_, u)| **u).map(|(s, _)| 2.0 * std::f64::consts::PI - s).sum()
}
