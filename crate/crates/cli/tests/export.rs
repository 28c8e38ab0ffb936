use std::f64::consts::PI;
use std::io::Cursor;

use s3min::assembly::ClosedSurfaceMesh;
use s3min::pipeline::{build_odd, BuildParams, Variant};
use s3min::s3geom::{vec4, GreatCircle, S3Point};
use s3min_cli::export::*;
use s3min_cli::run::default_pole;

fn surface() -> ClosedSurfaceMesh {
    build_odd(&BuildParams::new(Variant::Odd, 2, 1, 1)).unwrap().mesh
}

fn header(bytes: &[u8]) -> String {
    let end = bytes.windows(10).position(|w| w == b"end_header").unwrap();
    String::from_utf8(bytes[..end].to_vec()).unwrap()
}

#[test]
fn csv_round_trip() {
    let mesh = surface();
    let mut buf = Vec::new();
    write_csv4(&mut buf, &mesh).unwrap();
    assert!(buf.starts_with(b"x1,x2,x3,x4\n"));
    let back = read_csv4(Cursor::new(buf)).unwrap();
    assert_eq!(back.triangles, mesh.triangles);
    for (a, b) in back.vertices.iter().zip(&mesh.vertices) {
        assert!(a.chord(b) < 1e-12);
    }
}

#[test]
fn ply4_round_trip_both_encodings() {
    let mesh = surface();
    for enc in [Encoding::Binary, Encoding::Ascii] {
        let mut buf = Vec::new();
        write_ply4(&mut buf, &mesh, enc).unwrap();
        let h = header(&buf);
        assert!(h.contains(&format!("element vertex {}\n", mesh.vertices.len())));
        assert!(h.contains(&format!("element face {}\n", mesh.triangles.len())));
        assert!(h.contains("property double x4"));
        let back = read_ply4(Cursor::new(buf)).unwrap();
        assert_eq!(back.triangles, mesh.triangles);
        for (a, b) in back.vertices.iter().zip(&mesh.vertices) {
            assert!(a.chord(b) < 1e-12);
        }
    }
}

#[test]
fn malformed_files_are_rejected() {
    assert!(matches!(read_csv4(Cursor::new("a,b\n1,2\n")), Err(ExportError::Parse(_))));
    assert!(matches!(read_csv4(Cursor::new("x1,x2,x3,x4\n1,0,0,0\nv1,v2,v3\n0,0,5\n")), Err(ExportError::Parse(_))));
    assert!(matches!(read_ply4(Cursor::new("ply\nformat ascii 1.0\n")), Err(ExportError::Parse(_))));
    let mut buf = Vec::new();
    write_ply4(&mut buf, &surface(), Encoding::Binary).unwrap();
    buf.truncate(buf.len() - 5);
    assert!(read_ply4(Cursor::new(buf)).is_err());
}

#[test]
fn equator_of_pole_maps_to_unit_circle() {
    for seed in [0, 7, 123] {
        let pole = default_pole(seed);
        // a great circle orthogonal to the pole
        let u = vec4::normalize(&vec4::axpy(&[1.0, 0.3, 0.0, 0.0], -vec4::dot(&[1.0, 0.3, 0.0, 0.0], pole.coords()), pole.coords())).unwrap();
        let w0 = [0.0, -0.2, 1.0, 0.1];
        let w1 = vec4::axpy(&w0, -vec4::dot(&w0, pole.coords()), pole.coords());
        let v = vec4::normalize(&vec4::axpy(&w1, -vec4::dot(&w1, &u), &u)).unwrap();
        let c = GreatCircle::new(u, v, 1e-12).unwrap();
        let pts: Vec<[f64; 3]> = (0..64).map(|i| stereographic(&pole, c.point_at(2.0 * PI * i as f64 / 64.0).coords())).collect();
        let n = cross(&sub(&pts[16], &pts[0]), &sub(&pts[32], &pts[0]));
        for p in &pts {
            assert!((norm(p) - 1.0).abs() < 1e-9);
            assert!(dot(&n, &sub(p, &pts[0])).abs() < 1e-9 * norm(&n));
        }
    }
    // the antipode of the pole goes to the origin
    let pole = default_pole(3);
    assert!(norm(&stereographic(&pole, pole.antipode().coords())) < 1e-12);
    // and the standard pole reduces to the textbook formula
    let e4 = S3Point::axis(4);
    let x = S3Point::normalize([0.3, -0.4, 0.5, 0.2]).unwrap();
    let y = stereographic(&e4, x.coords());
    let s = 1.0 / (1.0 - x.coords()[3]);
    for i in 0..3 {
        assert!((y[i] - x.coords()[i] * s).abs() < 1e-15);
    }
}

#[test]
fn pole_on_surface_is_rejected() {
    let mesh = surface();
    let on = mesh.vertices[0];
    let mut buf = Vec::new();
    assert!(matches!(write_ply3_stereo(&mut buf, &mesh, &on, 1e-9, Encoding::Binary), Err(ExportError::PoleTooClose(_))));
    let pole = default_pole(0);
    assert!(pole_clearance(&mesh, &pole) > 1e-6);
    write_ply3_stereo(&mut buf, &mesh, &pole, 1e-9, Encoding::Ascii).unwrap();
    let h = header(&buf);
    assert!(h.contains(&format!("element vertex {}\n", mesh.vertices.len())));
    assert!(h.contains("property double z"));
}

#[test]
fn format_names() {
    for f in Format::ALL {
        assert_eq!(f.to_string().parse::<Format>().unwrap(), f);
    }
    assert!("obj".parse::<Format>().is_err());
}

fn sub(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm(a: &[f64; 3]) -> f64 {
    dot(a, a).sqrt()
}

fn cross(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}
