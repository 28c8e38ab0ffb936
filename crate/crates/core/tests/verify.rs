use std::f64::consts::PI;

use proptest::prelude::*;
use s3min::assembly::{ClosedSurfaceMesh, EPS_WELD};
use s3min::pipeline::{build_even, build_odd, BuildParams, Variant};
use s3min::plateau::{coupled_curvature_residual, init_disk_mesh, TriMesh};
use s3min::s3geom::{plane_rotation, screw_motion, CliffordTorus, Isometry};
use s3min::tessellation::{build_configuration, fundamental_polygon_odd, Membership, PentaLabel};
use s3min::verify::*;

type V4 = [f64; 4];

fn sampled_distance(a: &[V4; 3], b: &[V4; 3], n: usize) -> f64 {
    let pts = |t: &[V4; 3]| {
        let mut out = Vec::new();
        for i in 0..=n {
            for j in 0..=n - i {
                let (u, v) = (i as f64 / n as f64, j as f64 / n as f64);
                out.push(std::array::from_fn::<f64, 4, _>(|c| t[0][c] + u * (t[1][c] - t[0][c]) + v * (t[2][c] - t[0][c])));
            }
        }
        out
    };
    let (pa, pb) = (pts(a), pts(b));
    let mut best = f64::INFINITY;
    for p in &pa {
        for q in &pb {
            best = best.min((0..4).map(|c| (p[c] - q[c]).powi(2)).sum::<f64>().sqrt());
        }
    }
    best
}

fn v4() -> impl Strategy<Value = V4> {
    prop::array::uniform4(-1.0..1.0f64)
}

fn tri() -> impl Strategy<Value = [V4; 3]> {
    prop::array::uniform3(v4())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn triangle_distance_matches_sampling(a in tri(), b in tri()) {
        let d = triangle_distance(&a, &b);
        let s = sampled_distance(&a, &b, 40);
        let diam = a.iter().chain(&b).flat_map(|p| a.iter().chain(&b).map(move |q| (0..4).map(|c| (p[c] - q[c]).powi(2)).sum::<f64>().sqrt())).fold(0.0, f64::max);
        prop_assert!(d <= s + 1e-12);
        prop_assert!(d >= s - diam / 20.0);
        prop_assert!((d - triangle_distance(&b, &a)).abs() < 1e-12);
    }

    #[test]
    fn closest_point_is_no_farther_than_corners(p in v4(), t in tri()) {
        let d = point_triangle_distance(&p, &t);
        for c in &t {
            prop_assert!(d <= (0..4).map(|i| (p[i] - c[i]).powi(2)).sum::<f64>().sqrt() + 1e-12);
        }
    }
}

#[test]
fn transverse_triangles_touch_at_interior_point() {
    // a triangle in the x₁x₂-plane and one in the x₃x₄-plane, both around the origin
    let a = [[-1.0, -1.0, 0.0, 0.0], [1.0, -0.5, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0]];
    let b = [[0.0, 0.0, -1.0, -1.0], [0.0, 0.0, 1.0, -0.5], [0.0, 0.0, 0.0, 1.0]];
    assert!(triangle_distance(&a, &b) < 1e-15);
    let shifted = b.map(|mut p| {
        p[0] += 0.25;
        p
    });
    assert!(triangle_distance(&a, &shifted) < 1e-15);
    let off = b.map(|mut p| {
        p[0] += 5.0;
        p
    });
    assert!((triangle_distance(&a, &off) - 16.25f64.sqrt()).abs() < 1e-12);
}

#[test]
fn segment_distance_cases() {
    let o = [0.0; 4];
    let e1 = [1.0, 0.0, 0.0, 0.0];
    let up = [0.5, 1.0, 0.0, 0.0];
    let up2 = [0.5, 1.0, 1.0, 0.0];
    assert!((segment_distance(&o, &e1, &up, &up2) - 1.0).abs() < 1e-15);
    // parallel segments
    let a = [0.0, 0.0, 0.0, 2.0];
    let b = [1.0, 0.0, 0.0, 2.0];
    assert!((segment_distance(&o, &e1, &a, &b) - 2.0).abs() < 1e-15);
    assert_eq!(segment_distance(&o, &o, &o, &o), 0.0);
}

fn to_closed(meshes: &[&TriMesh]) -> ClosedSurfaceMesh {
    let mut vertices = Vec::new();
    let mut triangles = Vec::new();
    let mut provenance = Vec::new();
    for (c, m) in meshes.iter().enumerate() {
        let off = vertices.len();
        vertices.extend_from_slice(&m.vertices);
        provenance.extend((0..m.vertices.len()).map(|v| (c, v)));
        triangles.extend(m.triangles.iter().map(|t| t.map(|v| v + off)));
    }
    ClosedSurfaceMesh { vertices, triangles, provenance, identified: 0 }
}

#[test]
fn hashed_separation_matches_brute_force() {
    let s = build_odd(&BuildParams::new(Variant::Odd, 2, 1, 1)).unwrap();
    let hashed = min_separation(&s.mesh).unwrap();
    let brute = min_separation_brute(&s.mesh);
    assert!(hashed.min > EPS_WELD);
    assert!((hashed.min - brute.min(hashed.radius)).abs() < 1e-12, "{} vs {brute}", hashed.min);
}

#[test]
fn intersecting_tori_are_detected() {
    let cfg = build_configuration(2, 1).unwrap();
    let t1 = TriMesh::torus_grid(cfg.torus(1), 4);
    let t2 = TriMesh::torus_grid(cfg.torus(2), 4);
    let both = to_closed(&[&t1, &t2]);
    let sep = min_separation(&both).unwrap();
    assert!(sep.min < 1e-12, "{}", sep.min);
    let (i, j) = sep.pair.unwrap();
    assert!(i < t1.triangles.len() && j >= t1.triangles.len());

    let single = min_separation(&to_closed(&[&t1])).unwrap();
    assert!(single.min > EPS_WELD);
}

#[test]
fn single_disk_is_separated() {
    let cfg = build_configuration(2, 1).unwrap();
    let h = init_disk_mesh(&fundamental_polygon_odd(&cfg), 3).unwrap();
    assert!(min_separation(&to_closed(&[&h])).unwrap().min > 0.0);
}

#[test]
fn empty_mesh_is_an_error() {
    let empty = ClosedSurfaceMesh { vertices: vec![], triangles: vec![], provenance: vec![], identified: 0 };
    assert_eq!(min_separation(&empty).unwrap_err(), VerifyError::Empty);
    assert_eq!(map_residual(&empty, |x| *x).unwrap_err(), VerifyError::Empty);
}

#[test]
fn symmetry_residuals_on_odd_surface() {
    let s = build_odd(&BuildParams::new(Variant::Odd, 2, 1, 2)).unwrap();
    assert_eq!(symmetry_residual(&s.mesh, &Isometry::identity()).unwrap(), 0.0);
    let screw = screw_motion(1, 2, 3, 4, PI / 2.0).unwrap();
    assert!(symmetry_residual(&s.mesh, &screw).unwrap() < 10.0 * EPS_WELD);
    for (label, g) in expected_symmetries(&s) {
        assert!(symmetry_residual(&s.mesh, &g).unwrap() < 10.0 * EPS_WELD, "{label}");
    }
    let r = reflection_residual(&s.mesh, &[0.0, 0.0, 0.0, 1.0]).unwrap();
    assert!(r > 1e4 * EPS_WELD, "{r}");
    // a rotation that is not a symmetry
    let g = plane_rotation(1, 3, 0.3).unwrap();
    assert!(symmetry_residual(&s.mesh, &g).unwrap() > 1e4 * EPS_WELD);
}

#[test]
fn residual_is_equivariant() {
    let s = build_odd(&BuildParams::new(Variant::Odd, 2, 1, 2)).unwrap();
    let h = plane_rotation(2, 4, 0.7).unwrap() * plane_rotation(1, 3, -0.2).unwrap();
    let moved = ClosedSurfaceMesh { vertices: s.mesh.vertices.iter().map(|p| h.apply(p)).collect(), ..s.mesh.clone() };
    for g in [screw_motion(1, 2, 3, 4, PI / 2.0).unwrap(), plane_rotation(1, 3, 0.3).unwrap()] {
        let conj = h * g * h.inverse();
        let a = symmetry_residual(&s.mesh, &g).unwrap();
        let b = symmetry_residual(&moved, &conj).unwrap();
        assert!((a - b).abs() < 1e-9, "{a} vs {b}");
    }
}

#[test]
fn area_check_inputs() {
    let odd = AreaInput { area: 34.2, refine: 3, tolerance: 1e-10 };
    let even = AreaInput { area: 34.1, refine: 3, tolerance: 1e-10 };
    let c = area_checks(2, &odd, Some(&even)).unwrap();
    assert!(c.below_bound);
    assert!((c.bound - 4.0 * PI * PI).abs() < 1e-12);
    assert_eq!(c.even_below_odd, Some(true));
    let tie = AreaInput { area: 34.2 - 1e-11, ..even };
    assert_eq!(area_checks(2, &odd, Some(&tie)).unwrap().even_below_odd, Some(false));
    assert_eq!(area_checks(2, &AreaInput { area: 0.0, ..odd }, None).unwrap_err(), VerifyError::Empty);
    assert_eq!(
        area_checks(2, &odd, Some(&AreaInput { refine: 4, ..even })).unwrap_err(),
        VerifyError::RefinementMismatch(3, 4)
    );
    assert!(!area_checks(2, &AreaInput { area: 40.0, ..odd }, None).unwrap().below_bound);
}

#[test]
fn containment_of_hexagon() {
    let cfg = build_configuration(2, 1).unwrap();
    let hex = fundamental_polygon_odd(&cfg);
    let h = init_disk_mesh(&hex, 3).unwrap();
    let first = PentaLabel::u(1, 1);
    assert!(containment_check(&h, &cfg, first));
    let rotated = h.transformed(&plane_rotation(3, 4, PI / 2.0).unwrap());
    assert!(!containment_check(&rotated, &cfg, first));
    for c in hex.vertices() {
        assert_eq!(cfg.region_membership(first, c).unwrap(), Membership::Boundary);
    }
}

#[test]
fn separation_survives_refinement() {
    let mut last = None;
    for n in [3, 4, 5] {
        let s = build_odd(&BuildParams::new(Variant::Odd, 2, 1, n)).unwrap();
        let sep = min_separation(&s.mesh).unwrap();
        assert!(sep.min > EPS_WELD, "n = {n}: {}", sep.min);
        if let Some(prev) = last {
            // separation tracks the mesh scale
            assert!(sep.min > 0.25 * prev, "n = {n}: {} after {prev}", sep.min);
        }
        last = Some(sep.min);
    }
}

#[test]
fn curvature_residual_decreases_under_refinement() {
    let r: Vec<f64> = [3, 4]
        .iter()
        .map(|&n| coupled_curvature_residual(&build_even(&BuildParams::new(Variant::Even, 2, 2, n)).unwrap().piece().mesh))
        .collect();
    assert!(r[1] < 0.5 * r[0], "{r:?}");
}

#[test]
fn report_is_consistent() {
    let s = build_odd(&BuildParams::new(Variant::Odd, 2, 1, 2)).unwrap();
    let r = verify_surface(&s).unwrap();
    assert!(r.passed());
    assert_eq!(r.embedded, r.min_separation > r.separation_threshold);
    assert_eq!(r.symmetric, r.symmetry_residuals.values().all(|x| *x < r.symmetry_threshold));
    assert_eq!((r.genus, r.euler, r.copies), (9, -16, 32));
    assert_eq!(r.area_bound_pass, r.area < r.area_bound);
    assert!(r.no_reflection_symmetry);
    assert!(r.reflection_candidates_only);
    assert!(r.reflection_residuals.contains_key("x4=0"));
    let back: SurfaceReport = serde_json::from_value(r.to_json()).unwrap();
    assert_eq!(back, r);
}

#[test]
fn torus_grid_residuals() {
    let t = CliffordTorus::standard();
    let m = to_closed(&[&TriMesh::torus_grid(&t, 4)]);
    // the torus grid is invariant under the quarter-turn screw
    let g = screw_motion(1, 2, 3, 4, PI / 2.0).unwrap();
    assert!(symmetry_residual(&m, &g).unwrap() < 1e-12);
    assert!(symmetry_residual(&m, &plane_rotation(1, 3, 0.3).unwrap()).unwrap() > 1e-3);
}
