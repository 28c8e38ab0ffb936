//! End-to-end construction of the odd and even surfaces.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::assembly::{
    euler_genus, orbit_fundamental, place_copies, weld, AssemblyError, ClosedSurfaceMesh, Extension, PlacedCopy,
    Topology, EPS_WELD,
};
use crate::plateau::{
    init_disk_mesh, init_free_disk_mesh, minimize_area, minimize_area_free, transfer_positions, ConvergenceRecord,
    PlateauError, SolveOptions, TriMesh,
};
use crate::s3geom::{GreatCircle, Isometry};
use crate::tessellation::{build_configuration, fundamental_polygon_odd, Configuration, TessellationError};

pub const ORBIT_CAP: usize = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Odd,
    Even,
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Variant::Odd => "odd",
            Variant::Even => "even",
        })
    }
}

#[derive(Debug, Error)]
pub enum BuildError {
    #[error("invalid parameters: {0}")]
    Parameter(String),
    #[error(transparent)]
    Tessellation(#[from] TessellationError),
    #[error(transparent)]
    Plateau(#[from] PlateauError),
    #[error(transparent)]
    Assembly(#[from] AssemblyError),
    #[error("solver did not converge for the {0} piece (residual {1:e})")]
    NotConverged(&'static str, f64),
}

#[derive(Clone, Debug)]
pub struct BuildParams {
    pub variant: Variant,
    pub m: usize,
    pub ell: usize,
    pub refine: usize,
    pub solver: SolveOptions,
    pub eps_weld: f64,
}

impl BuildParams {
    pub fn new(variant: Variant, m: usize, ell: usize, refine: usize) -> Self {
        BuildParams { variant, m, ell, refine, solver: SolveOptions::default(), eps_weld: EPS_WELD }
    }

    pub fn validate(&self) -> Result<(), BuildError> {
        if self.m < 2 {
            return Err(BuildError::Parameter(format!("m = {} (need m ≥ 2)", self.m)));
        }
        let min_ell = match self.variant {
            Variant::Odd => 1,
            Variant::Even => 2,
        };
        if self.ell < min_ell {
            return Err(BuildError::Parameter(format!("{} variant needs ℓ ≥ {min_ell}, got {}", self.variant, self.ell)));
        }
        if self.refine < 1 {
            return Err(BuildError::Parameter("refinement level must be ≥ 1".into()));
        }
        if !(self.eps_weld > 0.0) {
            return Err(BuildError::Parameter("weld tolerance must be positive".into()));
        }
        Ok(())
    }
}

/// A solved fundamental piece.
#[derive(Clone, Debug)]
pub struct Piece {
    pub mesh: TriMesh,
    pub record: ConvergenceRecord,
}

#[derive(Clone, Debug)]
pub struct Surface {
    pub params: BuildParams,
    pub cfg: Configuration,
    /// The fixed-boundary hexagon piece `H`.
    pub hexagon: Piece,
    /// The free-boundary piece `K` (even variant only).
    pub free: Option<Piece>,
    pub copies: Vec<PlacedCopy>,
    pub mesh: ClosedSurfaceMesh,
    pub topology: Topology,
}

impl Surface {
    /// The piece that was replicated.
    pub fn piece(&self) -> &Piece {
        self.free.as_ref().unwrap_or(&self.hexagon)
    }

    pub fn area(&self) -> f64 {
        self.mesh.area()
    }
}

/// Half-turns about the great circles through consecutive corners.
fn edge_half_turns(corners: &[crate::s3geom::S3Point], edges: &[usize]) -> Result<Vec<Extension>, BuildError> {
    edges
        .iter()
        .map(|&e| {
            let c = GreatCircle::through(&corners[e], &corners[(e + 1) % corners.len()])
                .map_err(|err| BuildError::Parameter(err.to_string()))?;
            Ok(Extension { map: Isometry::half_turn(&c), flips: true })
        })
        .collect()
}

fn solve_hexagon(cfg: &Configuration, params: &BuildParams) -> Result<(TriMesh, Piece), BuildError> {
    let hex = fundamental_polygon_odd(cfg);
    let init = init_disk_mesh(&hex, params.refine)?;
    let (mesh, record) = minimize_area(&init, &params.solver)?;
    if !record.converged {
        return Err(BuildError::NotConverged("hexagon", record.final_grad_norm));
    }
    Ok((init, Piece { mesh, record }))
}

fn assemble(piece: &TriMesh, extensions: &[Extension], eps: f64) -> Result<(Vec<PlacedCopy>, ClosedSurfaceMesh, Topology), BuildError> {
    let copies = orbit_fundamental(piece, &[0, 1, 2, 3, 4, 5], extensions, ORBIT_CAP)?;
    let mesh = weld(&place_copies(piece, &copies), eps)?;
    let topology = euler_genus(&mesh)?;
    Ok((copies, mesh, topology))
}

/// Solves the hexagon and replicates it by the half-turns about its edges.
pub fn build_odd(params: &BuildParams) -> Result<Surface, BuildError> {
    let params = BuildParams { variant: Variant::Odd, ..params.clone() };
    params.validate()?;
    let cfg = build_configuration(params.m, params.ell)?;
    let (_, hexagon) = solve_hexagon(&cfg, &params)?;
    let corners = fundamental_polygon_odd(&cfg).vertices().to_vec();
    let ext = edge_half_turns(&corners, &[0, 1, 2, 3, 4, 5])?;
    let (copies, mesh, topology) = assemble(&hexagon.mesh, &ext, params.eps_weld)?;
    Ok(Surface { params, cfg, hexagon, free: None, copies, mesh, topology })
}

/// Solves the hexagon, relaxes its edge on `T₀` into a free arc coupled
/// through `φ`, and replicates the result by `φ` and the half-turns about
/// its four remaining edges.
pub fn build_even(params: &BuildParams) -> Result<Surface, BuildError> {
    let params = BuildParams { variant: Variant::Even, ..params.clone() };
    params.validate()?;
    let cfg = build_configuration(params.m, params.ell)?;
    let (init, hexagon) = solve_hexagon(&cfg, &params)?;
    let start = transfer_positions(&init_free_disk_mesh(&cfg, params.refine)?, &init, &hexagon.mesh)?;
    let opts = SolveOptions { relax_sweeps: 0, ..params.solver.clone() };
    let (mesh, record) = minimize_area_free(&start, &cfg.phi, &opts)?;
    if !record.converged {
        return Err(BuildError::NotConverged("free", record.final_grad_norm));
    }
    let corners = fundamental_polygon_odd(&cfg).vertices().to_vec();
    let mut ext = edge_half_turns(&corners, &[0, 2, 3, 5])?;
    ext.push(Extension { map: cfg.phi, flips: false });
    ext.push(Extension { map: cfg.phi.inverse(), flips: false });
    let (copies, closed, topology) = assemble(&mesh, &ext, params.eps_weld)?;
    Ok(Surface { params, cfg, hexagon, free: Some(Piece { mesh, record }), copies, mesh: closed, topology })
}

pub fn build(params: &BuildParams) -> Result<Surface, BuildError> {
    match params.variant {
        Variant::Odd => build_odd(params),
        Variant::Even => build_even(params),
    }
}

/// The genus `1 + 2k(m − 1)` both constructions should produce.
pub fn expected_genus(m: usize, ell: usize) -> i64 {
    let k = 2 * m * ell;
    1 + 2 * k as i64 * (m as i64 - 1)
}
