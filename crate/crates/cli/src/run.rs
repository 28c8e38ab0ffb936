//! The `build`, `verify`, `report` and `config-dump` commands.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use s3min::pipeline::{build, BuildError, BuildParams, Surface, Variant};
use s3min::plateau::SolveOptions;
use s3min::s3geom::{plane_rotation, S3Point};
use s3min::tessellation::build_configuration;
use s3min::verify::{area_checks, verify_mesh, verify_surface, AreaInput, MeshReport, SurfaceReport, VerifyError};
use s3min::Tolerances;
use serde_json::{json, Value};
use thiserror::Error;

use crate::export::{self, Encoding, ExportError, Format};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("build failed: {message}")]
    Build { message: String, diagnostic: Value },
    #[error(transparent)]
    Verify(#[from] VerifyError),
    #[error(transparent)]
    Export(#[from] ExportError),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("{path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

#[derive(Clone, Debug)]
pub struct BuildRequest {
    pub variant: Variant,
    pub m: usize,
    pub ell: usize,
    pub refine: usize,
    pub solver: SolveOptions,
    pub out: PathBuf,
    pub formats: Vec<Format>,
    pub encoding: Encoding,
    pub deterministic: bool,
    pub seed: u64,
}

impl BuildRequest {
    pub fn new(variant: Variant, m: usize, ell: usize, refine: usize, out: impl Into<PathBuf>) -> Self {
        BuildRequest {
            variant,
            m,
            ell,
            refine,
            solver: SolveOptions::default(),
            out: out.into(),
            formats: vec![Format::Ply4],
            encoding: Encoding::Binary,
            deterministic: false,
            seed: 0,
        }
    }

    pub fn params(&self) -> BuildParams {
        BuildParams { solver: self.solver.clone(), ..BuildParams::new(self.variant, self.m, self.ell, self.refine) }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.params().validate().map_err(|e| CliError::Usage(e.to_string()))?;
        self.solver.validate().map_err(|e| CliError::Usage(e.to_string()))
    }

    /// Common file name prefix of the artifacts.
    pub fn stem(&self) -> String {
        format!("{}_m{}_l{}_n{}", self.variant, self.m, self.ell, self.refine)
    }

    fn path(&self, suffix: &str) -> PathBuf {
        self.out.join(format!("{}.{suffix}", self.stem()))
    }
}

/// `e₄` moved by a small rotation drawn from `seed`.
pub fn default_pole(seed: u64) -> S3Point {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut angle = || rng.gen_range(0.01..0.05);
    let g = plane_rotation(1, 4, angle()).expect("axes")
        * plane_rotation(2, 4, angle()).expect("axes")
        * plane_rotation(3, 4, angle()).expect("axes");
    g.apply(&S3Point::axis(4))
}

fn write_json(path: &Path, v: &impl serde::Serialize) -> Result<(), CliError> {
    let mut s = serde_json::to_string_pretty(v).map_err(|source| CliError::Json { path: path.into(), source })?;
    s.push('\n');
    fs::write(path, s)?;
    Ok(())
}

fn diagnostic(req: &BuildRequest, err: &BuildError) -> Value {
    let kind = match err {
        BuildError::Parameter(_) => "parameter",
        BuildError::Tessellation(_) => "tessellation",
        BuildError::Plateau(_) => "plateau",
        BuildError::Assembly(_) => "assembly",
        BuildError::NotConverged(..) => "not_converged",
    };
    json!({
        "error": err.to_string(),
        "kind": kind,
        "params": { "variant": req.variant, "m": req.m, "ell": req.ell, "refine": req.refine },
    })
}

pub struct BuildOutcome {
    pub surface: Surface,
    pub report: SurfaceReport,
    pub files: Vec<PathBuf>,
}

/// Builds, verifies and exports one surface into `req.out`.
pub fn run_build(req: &BuildRequest) -> Result<BuildOutcome, CliError> {
    req.validate()?;
    fs::create_dir_all(&req.out)?;
    let surface = match build(&req.params()) {
        Ok(s) => s,
        Err(e) => {
            let diagnostic = diagnostic(req, &e);
            write_json(&req.path("diagnostic.json"), &diagnostic)?;
            return Err(CliError::Build { message: e.to_string(), diagnostic });
        }
    };
    let pole = default_pole(req.seed);
    let mut report = verify_surface(&surface)?;
    report.pole = Some(*pole.coords());

    let mut files = Vec::new();
    let mut formats = req.formats.clone();
    formats.sort();
    formats.dedup();
    for f in formats {
        let path = req.path(f.suffix());
        let mut w = BufWriter::new(File::create(&path)?);
        match f {
            Format::Ply4 => export::write_ply4(&mut w, &surface.mesh, req.encoding)?,
            Format::Ply3Stereo => {
                export::write_ply3_stereo(&mut w, &surface.mesh, &pole, Tolerances::DEFAULT.geo, req.encoding)?
            }
            Format::Csv4 => export::write_csv4(&mut w, &surface.mesh)?,
        }
        w.flush()?;
        files.push(path);
    }
    let mut records = vec![&surface.hexagon.record];
    if let Some(f) = &surface.free {
        records.push(&f.record);
    }
    let conv = req.path("convergence.json");
    write_json(&conv, &records)?;
    files.push(conv);
    let rep = req.path("report.json");
    write_json(&rep, &report)?;
    files.push(rep);
    Ok(BuildOutcome { surface, report, files })
}

/// Checks a mesh file; `params` adds the checks tied to `(m, ℓ)`.
pub fn run_verify(path: &Path, params: Option<(usize, usize)>) -> Result<MeshReport, CliError> {
    if let Some((m, ell)) = params {
        build_configuration(m, ell).map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let mesh = export::read_mesh(path)?;
    Ok(verify_mesh(&mesh, params, s3min::assembly::EPS_WELD)?)
}

/// Summarizes the reports in `dir` and compares the areas of odd and even
/// surfaces built with the same `(m, ℓ, n)`.
pub fn run_report(dir: &Path) -> Result<Value, CliError> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)?
        .map(|e| e.map(|e| e.path()))
        .collect::<Result<_, _>>()?;
    paths.retain(|p| p.to_string_lossy().ends_with(".report.json"));
    paths.sort();
    if paths.is_empty() {
        return Err(CliError::Usage(format!("no *.report.json files in {}", dir.display())));
    }
    let mut rows = Vec::new();
    let mut groups: BTreeMap<(usize, usize, usize), BTreeMap<String, &SurfaceReport>> = BTreeMap::new();
    let reports: Vec<(PathBuf, SurfaceReport)> = paths
        .into_iter()
        .map(|p| {
            let r = fs::read_to_string(&p)?;
            let rep = serde_json::from_str(&r).map_err(|source| CliError::Json { path: p.clone(), source })?;
            Ok((p, rep))
        })
        .collect::<Result<_, CliError>>()?;
    let mut passed = true;
    for (p, r) in &reports {
        passed &= r.passed();
        rows.push(json!({
            "file": p.file_name().map(|f| f.to_string_lossy().into_owned()),
            "variant": r.params.variant,
            "m": r.params.m,
            "ell": r.params.ell,
            "refine": r.params.refine,
            "genus": r.genus,
            "area": r.area,
            "passed": r.passed(),
        }));
        groups.entry((r.params.m, r.params.ell, r.params.refine)).or_default().insert(r.params.variant.to_string(), r);
    }
    let mut comparisons = Vec::new();
    for ((m, ell, refine), g) in &groups {
        let (Some(odd), Some(even)) = (g.get("odd"), g.get("even")) else { continue };
        let input = |r: &SurfaceReport| AreaInput { area: r.area, refine: r.params.refine, tolerance: r.area_tolerance };
        let c = area_checks(*m, &input(odd), Some(&input(even)))?;
        passed &= c.even_below_odd == Some(true);
        comparisons.push(json!({
            "m": m, "ell": ell, "refine": refine,
            "odd_area": odd.area, "even_area": even.area,
            "margin": c.even_margin, "even_below_odd": c.even_below_odd,
        }));
    }
    Ok(json!({ "reports": rows, "comparisons": comparisons, "passed": passed }))
}

pub fn config_dump(m: usize, ell: usize) -> Result<Value, CliError> {
    build_configuration(m, ell).map(|c| c.dump()).map_err(|e| CliError::Usage(e.to_string()))
}
