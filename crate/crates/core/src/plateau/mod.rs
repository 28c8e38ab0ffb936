//! Discrete Plateau problems on S³.
//!
//! A [`TriMesh`] carries one constraint per vertex: interior vertices move
//! on S³, arc vertices slide along a geodesic arc, torus vertices slide on a
//! Clifford torus and coupled vertices follow the image of another vertex
//! under an isometry. [`minimize_area`] and [`minimize_area_free`] run a
//! projected L-BFGS descent on the chordal area.

mod mesh;
mod solver;

pub use mesh::{
    corner_angle, init_disk_mesh, init_disk_mesh_centered, mesh_area, triangle_area, triangle_quality, EdgeKind,
    TriMesh, VertexTag,
};
pub use solver::{
    area_gradient, coupled_curvature_residual, minimize_area, minimize_area_free, ConvergenceRecord, IterRecord,
    SolveOptions,
};

use thiserror::Error;

use crate::s3geom::{vec4, GeodesicArc, S3Point};
use crate::tessellation::Configuration;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlateauError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),
    #[error("triangle {triangle} collapsed (quality {quality:e})")]
    Collapse { triangle: usize, quality: f64 },
}

/// Initial mesh of the even fundamental piece: the hexagon
/// `p₁ p′₁ p′₂ p₂ p″₂ p″₁` whose edge `p″₂p″₁` is free on `T₀` and whose
/// edge `p′₁p′₂` is its image under `φ`.
pub fn init_free_disk_mesh(cfg: &Configuration, n: usize) -> Result<TriMesh, PlateauError> {
    let loop_pts = [cfg.p(1), cfg.p_prime(1), cfg.p_prime(2), cfg.p(2), cfg.p_dprime(2), cfg.p_dprime(1)];
    let arc = |a: S3Point, b: S3Point| GeodesicArc::new(a, b).map_err(|e| PlateauError::InvalidInput(e.to_string()));
    let arcs = vec![
        arc(loop_pts[0], loop_pts[1])?,
        arc(loop_pts[2], loop_pts[3])?,
        arc(loop_pts[3], loop_pts[4])?,
        arc(loop_pts[5], loop_pts[0])?,
    ];
    let tags = [
        VertexTag::Fixed,
        VertexTag::Coupled { source: 5, iso: 0 },
        VertexTag::Coupled { source: 4, iso: 0 },
        VertexTag::Fixed,
        VertexTag::Fixed,
        VertexTag::Fixed,
    ];
    let kinds = [
        EdgeKind::Arc(0),
        EdgeKind::Coupled(0),
        EdgeKind::Arc(1),
        EdgeKind::Arc(2),
        EdgeKind::Torus(0),
        EdgeKind::Arc(3),
    ];
    let sum = loop_pts.iter().fold([0.0; 4], |a, p| vec4::add(&a, p.coords()));
    let center = S3Point::normalize(sum).expect("hexagon centroid off the origin");
    let base = TriMesh::fan(&loop_pts, &tags, &kinds, center, arcs, vec![cfg.t0], vec![cfg.phi]);
    Ok(base.refined(n))
}

/// Copies vertex positions of `solved` onto `target`, matching vertices of
/// `target` to those of `reference` (the mesh `solved` started from) by
/// position. Coupled vertices are recomputed from their sources.
pub fn transfer_positions(target: &TriMesh, reference: &TriMesh, solved: &TriMesh) -> Result<TriMesh, PlateauError> {
    if reference.vertices.len() != solved.vertices.len() || reference.vertices.len() != target.vertices.len() {
        return Err(PlateauError::InvalidInput("vertex counts differ".into()));
    }
    let mut order: Vec<usize> = (0..reference.vertices.len()).collect();
    let key = |p: &S3Point| p.coords()[0];
    order.sort_by(|&a, &b| key(&reference.vertices[a]).total_cmp(&key(&reference.vertices[b])));
    let keys: Vec<f64> = order.iter().map(|&i| key(&reference.vertices[i])).collect();
    let tol = 1e-9;
    let mut out = target.clone();
    for (v, p) in target.vertices.iter().enumerate() {
        let lo = keys.partition_point(|&k| k < key(p) - tol);
        let hit = order[lo..]
            .iter()
            .take_while(|&&i| key(&reference.vertices[i]) <= key(p) + tol)
            .find(|&&i| reference.vertices[i].chord(p) < tol)
            .ok_or_else(|| PlateauError::InvalidInput(format!("vertex {v} has no counterpart")))?;
        out.vertices[v] = solved.vertices[*hit];
    }
    for v in 0..out.vertices.len() {
        if let VertexTag::Coupled { source, iso } = out.tags[v] {
            out.vertices[v] = out.isometries[iso].apply(&out.vertices[source]);
        }
    }
    Ok(out)
}
