use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use s3min::assembly::{
    angle_defect_total, euler_genus, generate_group, orbit_fundamental, place_copies, weld, AssemblyError,
    ClosedSurfaceMesh, Extension, MeshCopy, EPS_WELD,
};
use s3min::pipeline::{build_even, build_odd, expected_genus, BuildParams, Variant};
use s3min::plateau::{init_disk_mesh, mesh_area, minimize_area, SolveOptions, TriMesh};
use s3min::s3geom::{screw_motion, CliffordTorus, GreatCircle, Isometry, S3Point};
use s3min::tessellation::{build_configuration, fundamental_polygon_odd, Region};

fn hexagon_generators(m: usize, ell: usize) -> Vec<Isometry> {
    let cfg = build_configuration(m, ell).unwrap();
    let c = fundamental_polygon_odd(&cfg).vertices().to_vec();
    (0..6).map(|e| Isometry::half_turn(&GreatCircle::through(&c[e], &c[(e + 1) % 6]).unwrap())).collect()
}

fn random_point(rng: &mut ChaCha8Rng) -> S3Point {
    S3Point::normalize(std::array::from_fn(|_| rng.gen_range(-1.0..1.0))).unwrap()
}

#[test]
fn phi_generates_cyclic_group_of_order_4m() {
    for (m, ell) in [(2, 2), (3, 2)] {
        let cfg = build_configuration(m, ell).unwrap();
        let g = generate_group(&[cfg.phi], 1000).unwrap();
        assert_eq!(g.order(), 4 * m);
    }
}

#[test]
fn screw_generates_cyclic_group_of_order_k() {
    for k in [4, 6, 8, 12] {
        let s = screw_motion(1, 2, 3, 4, 2.0 * PI / k as f64).unwrap();
        assert_eq!(generate_group(&[s], 1000).unwrap().order(), k);
    }
}

#[test]
fn hexagon_group_closure_fixture() {
    // regression fixture: |G°| = 4mk, so the stabilizer of the hexagon is trivial
    for ((m, ell), order) in [((2, 1), 32), ((3, 1), 72), ((2, 2), 64)] {
        let g = generate_group(&hexagon_generators(m, ell), 10_000).unwrap();
        assert_eq!(g.order(), order);
        let k = 2 * m * ell;
        assert!(g.contains(&screw_motion(1, 2, 3, 4, 2.0 * PI / k as f64).unwrap()));
    }
}

#[test]
fn group_elements_are_isometries() {
    let g = generate_group(&hexagon_generators(2, 1), 10_000).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for e in &g.elements {
        let (p, q) = (random_point(&mut rng), random_point(&mut rng));
        assert!((e.apply(&p).distance(&e.apply(&q)) - p.distance(&q)).abs() < 1e-9);
        assert!(e.orthogonality_error() < 1e-9);
    }
    assert!(g.contains(&Isometry::identity()));
}

#[test]
fn group_cap_is_reported() {
    let irrational = Isometry::plane_rotation(1, 2, 1.0).unwrap();
    assert_eq!(generate_group(&[irrational], 50).unwrap_err(), AssemblyError::GroupCap(50));
}

#[test]
fn torus_grid_topology() {
    let m = TriMesh::torus_grid(&CliffordTorus::standard(), 3);
    let closed = weld(&[MeshCopy::from_mesh(&m)], EPS_WELD).unwrap();
    let t = euler_genus(&closed).unwrap();
    assert_eq!((t.euler, t.genus, t.orientable, t.components), (0, 1, true, 1));
}

#[test]
fn projective_plane_is_rejected() {
    let vertices = (1..=4).chain(1..=2).map(S3Point::axis).collect();
    // six-vertex projective plane
    let triangles = vec![
        [0, 1, 2], [0, 2, 3], [0, 3, 4], [0, 4, 5], [0, 5, 1],
        [1, 2, 4], [2, 3, 5], [3, 4, 1], [4, 5, 2], [5, 1, 3],
    ];
    let mesh = ClosedSurfaceMesh { vertices, triangles, provenance: vec![(0, 0); 6], identified: 0 };
    assert_eq!(euler_genus(&mesh).unwrap_err(), AssemblyError::NonOrientable);
}

#[test]
fn open_copy_fails_to_weld() {
    let cfg = build_configuration(2, 1).unwrap();
    let h = init_disk_mesh(&fundamental_polygon_odd(&cfg), 1).unwrap();
    assert!(matches!(weld(&[MeshCopy::from_mesh(&h)], EPS_WELD), Err(AssemblyError::Unmatched { .. })));
    let empty = MeshCopy { vertices: vec![], triangles: vec![], boundary: vec![] };
    assert_eq!(weld(&[empty], EPS_WELD).unwrap_err(), AssemblyError::Empty);
}

#[test]
fn odd_surface_genus_nine() {
    let s = build_odd(&BuildParams::new(Variant::Odd, 2, 1, 2)).unwrap();
    assert_eq!(s.copies.len(), 32);
    assert_eq!(s.topology.euler, -16);
    assert_eq!(s.topology.genus, 9);
    assert!(s.topology.orientable && s.topology.consistently_oriented);
    assert_eq!(s.topology.components, 1);

    // bookkeeping identity and weld idempotence
    let piece_v = s.hexagon.mesh.num_vertices();
    assert_eq!(s.mesh.vertices.len(), 32 * piece_v - s.mesh.identified);
    let again = weld(&[s.mesh.as_copy()], EPS_WELD).unwrap();
    assert_eq!(again.vertices, s.mesh.vertices);
    assert_eq!(again.triangles, s.mesh.triangles);

    // copies occupy every other pentahedron, half of them in each hemisphere
    let piece = &s.hexagon.mesh;
    let interior: Vec<usize> = (0..piece.num_vertices()).filter(|&v| !piece.boundary_edges().iter().any(|e| e.0 == v || e.1 == v)).collect();
    let mut regions = Vec::new();
    for c in &s.copies {
        let mut labels: Vec<_> = interior.iter().flat_map(|&v| s.cfg.locate(&c.transform.apply(&piece.vertices[v]))).collect();
        labels.sort();
        labels.dedup();
        assert_eq!(labels.len(), 1, "copy {} spans {labels:?}", c.id);
        regions.push(labels[0]);
    }
    // constant parity of i + j in each hemisphere, even in D₁
    for region in [Region::U, Region::V] {
        let mut parity: Vec<usize> = regions.iter().filter(|l| l.region == region).map(|l| (l.i + l.j) % 2).collect();
        parity.dedup();
        assert_eq!(parity.len(), 1);
        if region == Region::U {
            assert_eq!(parity[0], 0);
        }
    }
    regions.sort();
    regions.dedup();
    assert_eq!(regions.len(), 32);
    assert_eq!(regions.iter().filter(|l| l.region == Region::U).count(), 16);

    // all copies congruent
    let a0 = mesh_area(piece);
    for c in &s.copies {
        assert!((mesh_area(&piece.transformed(&c.transform)) - a0).abs() < 1e-12);
    }
}

#[test]
fn odd_surface_genus_twenty_five() {
    let s = build_odd(&BuildParams::new(Variant::Odd, 3, 1, 2)).unwrap();
    assert_eq!(s.copies.len(), 4 * 3 * 6);
    assert_eq!(s.topology.genus, 25);
    assert_eq!(expected_genus(3, 1), 25);
}

#[test]
fn odd_and_even_genus_agree() {
    let odd = build_odd(&BuildParams::new(Variant::Odd, 2, 2, 2)).unwrap();
    let even = build_even(&BuildParams::new(Variant::Even, 2, 2, 2)).unwrap();
    assert_eq!(odd.topology.genus, 17);
    assert_eq!(even.topology.genus, 17);
    assert_eq!(even.copies.len(), 64);
    assert!(even.topology.consistently_oriented);
}

#[test]
fn orbit_copy_count_independent_of_start() {
    let cfg = build_configuration(2, 1).unwrap();
    let (h, _) = minimize_area(&init_disk_mesh(&fundamental_polygon_odd(&cfg), 1).unwrap(), &SolveOptions::default()).unwrap();
    let ext: Vec<Extension> = hexagon_generators(2, 1).into_iter().map(|map| Extension { map, flips: true }).collect();
    let a = orbit_fundamental(&h, &[0, 1, 2, 3, 4, 5], &ext, 1000).unwrap();
    let rev: Vec<Extension> = ext.iter().rev().copied().collect();
    let b = orbit_fundamental(&h, &[0, 1, 2, 3, 4, 5], &rev, 1000).unwrap();
    assert_eq!(a.len(), 32);
    assert_eq!(b.len(), 32);
    let closed = weld(&place_copies(&h, &a), EPS_WELD).unwrap();
    assert_eq!(euler_genus(&closed).unwrap().genus, 9);
}

#[test]
fn angle_defect_matches_euler_characteristic() {
    let s = build_odd(&BuildParams::new(Variant::Odd, 2, 1, 3)).unwrap();
    let total = angle_defect_total(&s.mesh);
    let target = 2.0 * PI * s.topology.euler as f64;
    assert!((total - target).abs() < 0.01 * target.abs(), "{total} vs {target}");
}
