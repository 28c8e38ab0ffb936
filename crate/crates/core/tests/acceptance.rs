use std::f64::consts::{FRAC_PI_4, PI};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use s3min::assembly::{angle_defect_total, generate_group, weld, EPS_WELD};
use s3min::pipeline::{build, build_even, build_odd, expected_genus, BuildParams, Variant};
use s3min::plateau::{
    area_gradient, coupled_curvature_residual, init_disk_mesh, init_disk_mesh_centered, mesh_area, minimize_area,
    SolveOptions,
};
use s3min::s3geom::{screw_motion, CliffordTorus, GreatCircle, Isometry, S3Point};
use s3min::tessellation::{build_configuration, lattice_edges, same_point_set, GeodesicPolygon};
use s3min::verify::{area_checks, min_separation, solver_area_tolerance, symmetry_residual, verify_surface, AreaInput};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn axes(ix: &[usize]) -> GeodesicPolygon {
    GeodesicPolygon::new(ix.iter().map(|&i| if i > 4 { S3Point::axis(i - 4).antipode() } else { S3Point::axis(i) }).collect())
        .unwrap()
}

fn clifford_patch() -> Outcome {
    let t = Instant::now();
    let (out, rec) = minimize_area(&init_disk_mesh(&axes(&[1, 2, 3, 4]), 4).unwrap(), &SolveOptions::default()).unwrap();
    let secs = t.elapsed().as_secs_f64();
    let screw = screw_motion(1, 3, 4, 2, FRAC_PI_4).unwrap();
    let c = GreatCircle::coordinate(1, 2).unwrap();
    let torus = CliffordTorus::around(&GreatCircle::from_frame(screw.apply_vec(c.u()), screw.apply_vec(c.v())));
    let dev = out.vertices.iter().map(|p| torus.distance(p)).fold(0.0, f64::max);
    let a = mesh_area(&out);
    let target = PI * PI / 4.0;
    check(rec.converged, "solver did not converge")?;
    check(dev < 5e-3, format!("deviation {dev:.2e}"))?;
    check((a - target).abs() < 0.005 * target, format!("area {a}"))?;
    check(secs < 60.0, format!("{secs:.1}s"))?;
    Ok(format!("area {a:.5} (target {target:.5}), deviation {dev:.2e}, {secs:.1}s"))
}

fn hemisphere() -> Outcome {
    let mesh = init_disk_mesh_centered(&axes(&[1, 2, 5, 6]), S3Point::axis(3), 4).unwrap();
    let (out, rec) = minimize_area(&mesh, &SolveOptions::default()).unwrap();
    let a = mesh_area(&out);
    check(rec.converged, "solver did not converge")?;
    check((a - 2.0 * PI).abs() < 0.005 * 2.0 * PI, format!("area {a}"))?;
    Ok(format!("area {a:.5} (target {:.5})", 2.0 * PI))
}

fn odd_2_1() -> Outcome {
    let t = Instant::now();
    let s = build_odd(&BuildParams::new(Variant::Odd, 2, 1, 4)).unwrap();
    let sep = min_separation(&s.mesh).unwrap();
    let screw = screw_motion(1, 2, 3, 4, 2.0 * PI / 4.0).unwrap();
    let res = symmetry_residual(&s.mesh, &screw).unwrap();
    let area = s.area();
    let secs = t.elapsed().as_secs_f64();
    let topo = &s.topology;
    check(topo.orientable && topo.components == 1, "not an orientable connected surface")?;
    check(topo.euler == -16 && topo.genus == 9 && expected_genus(2, 1) == 9, format!("χ {} genus {}", topo.euler, topo.genus))?;
    check(s.copies.len() == 32, format!("{} copies", s.copies.len()))?;
    check(sep.min > 0.0, format!("separation {}", sep.min))?;
    check(res < 10.0 * EPS_WELD, format!("screw residual {res:e}"))?;
    check(area < 4.0 * PI * PI, format!("area {area}"))?;
    check(secs < 600.0, format!("{secs:.1}s"))?;
    Ok(format!(
        "χ = -16, genus 9, 32 copies, separation {:.3e}, screw residual {res:.1e}, area {area:.4} < {:.4}, {secs:.1}s",
        sep.min,
        4.0 * PI * PI
    ))
}

fn odd_3_1() -> Outcome {
    let s = build_odd(&BuildParams::new(Variant::Odd, 3, 1, 2)).unwrap();
    check(s.topology.genus == 25 && expected_genus(3, 1) == 25, format!("genus {}", s.topology.genus))?;
    Ok(format!("genus 25, {} copies", s.copies.len()))
}

fn even_2_2() -> Outcome {
    let n = 3;
    let odd = build_odd(&BuildParams::new(Variant::Odd, 2, 2, n)).unwrap();
    let even = build_even(&BuildParams::new(Variant::Even, 2, 2, n)).unwrap();
    check(even.topology.genus == 17 && expected_genus(2, 2) == 17, format!("genus {}", even.topology.genus))?;
    let input = |s: &s3min::pipeline::Surface| AreaInput {
        area: s.area(),
        refine: n,
        tolerance: solver_area_tolerance(&s.piece().record, s.copies.len()),
    };
    let c = area_checks(2, &input(&odd), Some(&input(&even))).unwrap();
    let margin = c.even_margin.unwrap();
    check(c.even_below_odd == Some(true), format!("area margin {margin:e} not resolved"))?;
    let fine = build_even(&BuildParams::new(Variant::Even, 2, 2, n + 1)).unwrap();
    let (r0, r1) = (coupled_curvature_residual(&even.piece().mesh), coupled_curvature_residual(&fine.piece().mesh));
    check(r1 <= 0.5 * r0, format!("curvature residual {r0:.2e} -> {r1:.2e}"))?;
    Ok(format!(
        "genus 17, area {:.6} < {:.6} (margin {margin:.2e}), curvature residual {r0:.2e} -> {r1:.2e}",
        even.area(),
        odd.area()
    ))
}

fn lattice() -> Outcome {
    let mut worst = 0.0f64;
    for (m, ell) in [(2, 1), (2, 2), (3, 1)] {
        let cfg = build_configuration(m, ell).unwrap();
        let h = lattice_edges(&cfg).hausdorff(64);
        worst = worst.max(h);
        check(h < 1e-9, format!("({m},{ell}) Hausdorff {h:e}"))?;
        check(cfg.grid().len() == 4 * m * cfg.k, format!("({m},{ell}) {} grid points", cfg.grid().len()))?;
        check(same_point_set(cfg.grid(), cfg.grid_q(), 1e-9), format!("({m},{ell}) grids differ"))?;
    }
    Ok(format!("Hausdorff ≤ {worst:.1e}, grids coincide with 4mk points"))
}

fn group_orders() -> Outcome {
    for (m, ell) in [(2, 2), (3, 2)] {
        let cfg = build_configuration(m, ell).unwrap();
        let n = generate_group(&[cfg.phi], 1000).unwrap().order();
        check(n == 4 * m, format!("({m},{ell}): |<φ>| = {n}"))?;
    }
    Ok("|<φ>| = 8, 12".into())
}

fn inequalities() -> Outcome {
    let (ab, bd) = build_configuration(2, 2).unwrap().eq2_distances();
    check(ab <= bd + 1e-12, format!("ℓ=2: {ab} > {bd}"))?;
    let (ab1, bd1) = build_configuration(2, 1).unwrap().eq2_distances();
    check(ab1 > bd1, format!("ℓ=1: {ab1} ≤ {bd1}"))?;
    Ok(format!("ℓ=2: {ab:.6} ≤ {bd:.6}; ℓ=1: {ab1:.6} > {bd1:.6}"))
}

fn gauss_bonnet() -> Outcome {
    let s = build_odd(&BuildParams::new(Variant::Odd, 2, 1, 4)).unwrap();
    let total = angle_defect_total(&s.mesh);
    let target = -32.0 * PI;
    check((total - target).abs() < 0.01 * target.abs(), format!("{total} vs {target}"))?;
    Ok(format!("angle defect {total:.6}, 2πχ = {target:.6}"))
}

fn random_isometry(rng: &mut ChaCha8Rng) -> Isometry {
    (0..6).fold(Isometry::identity(), |g, _| {
        let i = rng.gen_range(1..=4);
        let j = (i + rng.gen_range(0..3)) % 4 + 1;
        g * Isometry::plane_rotation(i, j, rng.gen_range(-PI..PI)).unwrap()
    })
}

fn properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for _ in 0..200 {
        let (a, b) = (random_isometry(&mut rng), random_isometry(&mut rng));
        let p = S3Point::normalize(std::array::from_fn(|_| rng.gen_range(-1.0..1.0))).unwrap();
        let q = S3Point::normalize(std::array::from_fn(|_| rng.gen_range(-1.0..1.0))).unwrap();
        check((a * b).apply(&p).chord(&a.apply(&b.apply(&p))) < 1e-12, "composition")?;
        check((a * a.inverse()).apply(&p).chord(&p) < 1e-12, "inverse")?;
        check((a.apply(&p).distance(&a.apply(&q)) - p.distance(&q)).abs() < 1e-12, "distance")?;
        check(a.orthogonality_error() < 1e-12 && (a.determinant() - 1.0).abs() < 1e-12, "orthogonality")?;
    }
    for _ in 0..5 {
        let pts: Vec<[f64; 4]> = (0..6).map(|_| std::array::from_fn(|_| rng.gen_range(-1.0..1.0))).collect();
        let tris = vec![[0, 1, 2], [0, 2, 3], [3, 4, 5], [1, 4, 2]];
        let (_, g) = area_gradient(&pts, &tris);
        for v in 0..6 {
            for c in 0..4 {
                let (mut pp, mut pm) = (pts.clone(), pts.clone());
                pp[v][c] += 1e-6;
                pm[v][c] -= 1e-6;
                let fd = (area_gradient(&pp, &tris).0 - area_gradient(&pm, &tris).0) / 2e-6;
                check((fd - g[v][c]).abs() <= 1e-6 * g[v][c].abs().max(1.0), "gradient vs finite differences")?;
            }
        }
    }
    let params = BuildParams::new(Variant::Odd, 2, 1, 2);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let (s1, r1) = pool.install(|| {
        let s = build(&params).unwrap();
        let r = verify_surface(&s).unwrap();
        (s, r)
    });
    let again = weld(&[s1.mesh.as_copy()], EPS_WELD).unwrap();
    check(again.vertices == s1.mesh.vertices && again.triangles == s1.mesh.triangles, "weld not idempotent")?;
    let (s2, r2) = pool.install(|| {
        let s = build(&params).unwrap();
        let r = verify_surface(&s).unwrap();
        (s, r)
    });
    let bits = |s: &s3min::pipeline::Surface| s.mesh.vertices.iter().flat_map(|p| p.coords().map(f64::to_bits)).collect::<Vec<_>>();
    check(bits(&s1) == bits(&s2) && s1.mesh.triangles == s2.mesh.triangles, "meshes differ between reruns")?;
    check(serde_json::to_string(&r1).unwrap() == serde_json::to_string(&r2).unwrap(), "reports differ between reruns")?;
    Ok("isometry algebra, gradient, weld idempotence, deterministic reruns".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("solver oracle (Clifford patch)", clifford_patch),
        ("hemisphere oracle", hemisphere),
        ("odd surface m=2 l=1", odd_2_1),
        ("odd surface m=3 l=1", odd_3_1),
        ("even surface m=2 l=2", even_2_2),
        ("lattice identity", lattice),
        ("group orders", group_orders),
        ("configuration inequalities", inequalities),
        ("Gauss-Bonnet crosscheck", gauss_bonnet),
        ("property suites", properties),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            Err(e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
