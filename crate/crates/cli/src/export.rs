//! Mesh file formats: PLY with four coordinates, PLY of the stereographic
//! image in R³, and a two-section CSV.

use std::fmt;
use std::io::{self, BufRead, BufReader, Read, Write};
use std::path::Path;
use std::str::FromStr;

use s3min::assembly::ClosedSurfaceMesh;
use s3min::s3geom::{vec4, S3Point, Vec4};
use s3min::verify::point_triangle_distance;
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Format {
    Ply4,
    Ply3Stereo,
    Csv4,
}

impl Format {
    pub const ALL: [Format; 3] = [Format::Ply4, Format::Ply3Stereo, Format::Csv4];

    /// File name suffix, including the extension.
    pub fn suffix(self) -> &'static str {
        match self {
            Format::Ply4 => "ply",
            Format::Ply3Stereo => "stereo.ply",
            Format::Csv4 => "csv",
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Ply4 => "ply4",
            Format::Ply3Stereo => "ply3-stereo",
            Format::Csv4 => "csv4",
        })
    }
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Format::ALL
            .into_iter()
            .find(|f| f.to_string() == s)
            .ok_or_else(|| format!("unknown format {s:?} (expected ply4, ply3-stereo or csv4)"))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Encoding {
    #[default]
    Binary,
    Ascii,
}

#[derive(Debug, Error)]
pub enum ExportError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("pole lies within {0:e} of the surface; choose another pole or seed")]
    PoleTooClose(f64),
    #[error("malformed mesh file: {0}")]
    Parse(String),
}

fn parse_err(msg: impl Into<String>) -> ExportError {
    ExportError::Parse(msg.into())
}

/// Rotation taking `pole` to `e₄` through the plane they span.
fn align_to_e4(pole: &S3Point, x: &Vec4) -> Vec4 {
    let a = pole.coords();
    let c = a[3];
    if c < -1.0 + 1e-12 {
        // half-turn in the x₁x₄-plane
        return [-x[0], x[1], x[2], -x[3]];
    }
    let b = vec4::basis(3);
    let ab = vec4::add(a, &b);
    let y = vec4::axpy(x, -vec4::dot(&ab, x) / (1.0 + c), &ab);
    vec4::axpy(&y, 2.0 * vec4::dot(a, x), &b)
}

/// Stereographic projection from `pole` onto the R³ tangent to its
/// antipode, in coordinates where the pole is `e₄`.
pub fn stereographic(pole: &S3Point, x: &Vec4) -> [f64; 3] {
    let y = align_to_e4(pole, x);
    let s = 1.0 / (1.0 - y[3]);
    [y[0] * s, y[1] * s, y[2] * s]
}

/// Chord distance from `pole` to the nearest point of the mesh.
pub fn pole_clearance(mesh: &ClosedSurfaceMesh, pole: &S3Point) -> f64 {
    mesh.triangles
        .iter()
        .map(|t| point_triangle_distance(pole.coords(), &t.map(|v| *mesh.vertices[v].coords())))
        .fold(f64::INFINITY, f64::min)
}

fn ply_header(out: &mut impl Write, enc: Encoding, kind: &str, names: &[&str], nv: usize, nf: usize) -> io::Result<()> {
    writeln!(out, "ply")?;
    match enc {
        Encoding::Binary => writeln!(out, "format binary_little_endian 1.0")?,
        Encoding::Ascii => writeln!(out, "format ascii 1.0")?,
    }
    writeln!(out, "comment s3min {kind}")?;
    writeln!(out, "element vertex {nv}")?;
    for n in names {
        writeln!(out, "property double {n}")?;
    }
    writeln!(out, "element face {nf}")?;
    writeln!(out, "property list uchar int vertex_indices")?;
    writeln!(out, "end_header")
}

fn ply_body<const N: usize>(out: &mut impl Write, enc: Encoding, verts: &[[f64; N]], faces: &[[usize; 3]]) -> io::Result<()> {
    match enc {
        Encoding::Binary => {
            for v in verts {
                for x in v {
                    out.write_all(&x.to_le_bytes())?;
                }
            }
            for f in faces {
                out.write_all(&[3u8])?;
                for &i in f {
                    out.write_all(&(i as i32).to_le_bytes())?;
                }
            }
        }
        Encoding::Ascii => {
            for v in verts {
                let row: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                writeln!(out, "{}", row.join(" "))?;
            }
            for f in faces {
                writeln!(out, "3 {} {} {}", f[0], f[1], f[2])?;
            }
        }
    }
    Ok(())
}

pub fn write_ply4(out: &mut impl Write, mesh: &ClosedSurfaceMesh, enc: Encoding) -> io::Result<()> {
    let verts: Vec<Vec4> = mesh.vertices.iter().map(|p| *p.coords()).collect();
    ply_header(out, enc, "ply4", &["x1", "x2", "x3", "x4"], verts.len(), mesh.triangles.len())?;
    ply_body(out, enc, &verts, &mesh.triangles)
}

/// Writes the stereographic image of the mesh; fails if the pole is within
/// `eps` of the surface.
pub fn write_ply3_stereo(
    out: &mut impl Write,
    mesh: &ClosedSurfaceMesh,
    pole: &S3Point,
    eps: f64,
    enc: Encoding,
) -> Result<(), ExportError> {
    let clearance = pole_clearance(mesh, pole);
    if !(clearance > eps) {
        return Err(ExportError::PoleTooClose(clearance));
    }
    let verts: Vec<[f64; 3]> = mesh.vertices.iter().map(|p| stereographic(pole, p.coords())).collect();
    ply_header(out, enc, "ply3-stereo", &["x", "y", "z"], verts.len(), mesh.triangles.len())?;
    ply_body(out, enc, &verts, &mesh.triangles)?;
    Ok(())
}

pub fn write_csv4(out: impl Write, mesh: &ClosedSurfaceMesh) -> Result<(), ExportError> {
    let mut w = csv::WriterBuilder::new().flexible(true).from_writer(out);
    w.write_record(["x1", "x2", "x3", "x4"])?;
    for p in &mesh.vertices {
        w.write_record(p.coords().map(|x| x.to_string()))?;
    }
    w.write_record(["v1", "v2", "v3"])?;
    for t in &mesh.triangles {
        w.write_record(t.map(|v| v.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

fn mesh_from_parts(coords: Vec<Vec4>, triangles: Vec<[usize; 3]>) -> Result<ClosedSurfaceMesh, ExportError> {
    let n = coords.len();
    if let Some(t) = triangles.iter().find(|t| t.iter().any(|&v| v >= n)) {
        return Err(parse_err(format!("face {t:?} indexes past {n} vertices")));
    }
    let vertices = coords
        .into_iter()
        .map(|c| S3Point::normalize(c).ok_or_else(|| parse_err("zero vertex")))
        .collect::<Result<Vec<_>, _>>()?;
    let provenance = (0..n).map(|v| (0, v)).collect();
    Ok(ClosedSurfaceMesh { vertices, triangles, provenance, identified: 0 })
}

pub fn read_csv4(input: impl Read) -> Result<ClosedSurfaceMesh, ExportError> {
    let mut r = csv::ReaderBuilder::new().has_headers(false).flexible(true).from_reader(input);
    let mut records = r.records();
    match records.next() {
        Some(Ok(h)) if h.iter().eq(["x1", "x2", "x3", "x4"]) => {}
        _ => return Err(parse_err("missing x1,x2,x3,x4 header")),
    }
    let num = |s: &str| s.trim().parse::<f64>().map_err(|e| parse_err(format!("{s:?}: {e}")));
    let idx = |s: &str| s.trim().parse::<usize>().map_err(|e| parse_err(format!("{s:?}: {e}")));
    let mut coords = Vec::new();
    let mut triangles = Vec::new();
    let mut faces = false;
    for rec in records {
        let rec = rec?;
        if !faces && rec.iter().eq(["v1", "v2", "v3"]) {
            faces = true;
        } else if faces && rec.len() == 3 {
            triangles.push([idx(&rec[0])?, idx(&rec[1])?, idx(&rec[2])?]);
        } else if !faces && rec.len() == 4 {
            coords.push([num(&rec[0])?, num(&rec[1])?, num(&rec[2])?, num(&rec[3])?]);
        } else {
            return Err(parse_err(format!("unexpected row {:?}", rec.iter().collect::<Vec<_>>())));
        }
    }
    mesh_from_parts(coords, triangles)
}

/// Reads a PLY file as written by [`write_ply4`], in either encoding.
pub fn read_ply4(input: impl Read) -> Result<ClosedSurfaceMesh, ExportError> {
    let mut r = BufReader::new(input);
    let mut enc = None;
    let (mut nv, mut nf) = (None, None);
    let mut props = Vec::new();
    let mut line = String::new();
    loop {
        line.clear();
        if r.read_line(&mut line)? == 0 {
            return Err(parse_err("unterminated header"));
        }
        let words: Vec<&str> = line.split_whitespace().collect();
        match words.as_slice() {
            ["end_header"] => break,
            ["format", "binary_little_endian", _] => enc = Some(Encoding::Binary),
            ["format", "ascii", _] => enc = Some(Encoding::Ascii),
            ["element", "vertex", n] => nv = n.parse::<usize>().ok(),
            ["element", "face", n] => nf = n.parse::<usize>().ok(),
            ["property", "double", name] if nf.is_none() => props.push(name.to_string()),
            _ => {}
        }
    }
    if props != ["x1", "x2", "x3", "x4"] {
        return Err(parse_err(format!("expected double properties x1..x4, found {props:?}")));
    }
    let (enc, nv, nf) = match (enc, nv, nf) {
        (Some(e), Some(v), Some(f)) => (e, v, f),
        _ => return Err(parse_err("incomplete header")),
    };
    let mut coords = Vec::with_capacity(nv);
    let mut triangles = Vec::with_capacity(nf);
    match enc {
        Encoding::Binary => {
            let mut b8 = [0u8; 8];
            let mut b4 = [0u8; 4];
            for _ in 0..nv {
                let mut c = [0.0; 4];
                for x in &mut c {
                    r.read_exact(&mut b8)?;
                    *x = f64::from_le_bytes(b8);
                }
                coords.push(c);
            }
            for _ in 0..nf {
                let mut n = [0u8; 1];
                r.read_exact(&mut n)?;
                if n[0] != 3 {
                    return Err(parse_err("non-triangular face"));
                }
                let mut t = [0usize; 3];
                for v in &mut t {
                    r.read_exact(&mut b4)?;
                    *v = usize::try_from(i32::from_le_bytes(b4)).map_err(|_| parse_err("negative index"))?;
                }
                triangles.push(t);
            }
        }
        Encoding::Ascii => {
            let mut rest = String::new();
            r.read_to_string(&mut rest)?;
            let mut lines = rest.lines();
            let mut next = || lines.next().ok_or_else(|| parse_err("truncated body"));
            for _ in 0..nv {
                let xs: Vec<f64> = next()?.split_whitespace().map(str::parse).collect::<Result<_, _>>().map_err(|e| parse_err(format!("{e}")))?;
                coords.push(xs.try_into().map_err(|_| parse_err("vertex needs 4 coordinates"))?);
            }
            for _ in 0..nf {
                let xs: Vec<usize> = next()?.split_whitespace().map(str::parse).collect::<Result<_, _>>().map_err(|e| parse_err(format!("{e}")))?;
                match xs.as_slice() {
                    [3, a, b, c] => triangles.push([*a, *b, *c]),
                    _ => return Err(parse_err("non-triangular face")),
                }
            }
        }
    }
    mesh_from_parts(coords, triangles)
}

/// Reads a mesh by extension: `.csv` as csv4, anything else as ply4.
pub fn read_mesh(path: &Path) -> Result<ClosedSurfaceMesh, ExportError> {
    let file = std::fs::File::open(path)?;
    match path.extension().and_then(|e| e.to_str()) {
        Some("csv") => read_csv4(file),
        _ => read_ply4(file),
    }
}
