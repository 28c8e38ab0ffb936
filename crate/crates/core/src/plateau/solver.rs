use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::mesh::{edge_key, triangle_area, triangle_quality, EdgeKind, TriMesh, VertexTag};
use super::PlateauError;
use crate::s3geom::{vec4, Isometry, S3Point, Vec4};

/// Solver parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    pub max_iters: usize,
    /// Bound on the ∞-norm of the projected area gradient per unit dual area.
    pub grad_tol: f64,
    pub armijo_c: f64,
    pub backtrack: f64,
    pub max_backtracks: usize,
    /// Largest vertex displacement per step, as a fraction of the shortest
    /// edge.
    pub step_cap: f64,
    /// Spring weights for the continuation stages; a final stage always
    /// runs with weight 0.
    pub regularization: Vec<f64>,
    pub stage_iters: usize,
    pub memory: usize,
    pub quality_floor: f64,
    /// Let arc vertices slide along their arc; otherwise they stay put.
    pub slide_arcs: bool,
    /// In the final stage, relax the mesh tangentially whenever the minimum
    /// triangle quality falls below this fraction of its value at the start
    /// of the stage.
    pub relax_below: f64,
    pub relax_sweeps: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            max_iters: 20_000,
            grad_tol: 1e-6,
            armijo_c: 1e-4,
            backtrack: 0.5,
            max_backtracks: 40,
            step_cap: 0.3,
            regularization: vec![],
            stage_iters: 150,
            memory: 8,
            quality_floor: 1e-3,
            slide_arcs: false,
            relax_below: 0.5,
            relax_sweeps: 50,
        }
    }
}

impl SolveOptions {
    pub fn validate(&self) -> Result<(), PlateauError> {
        let ok = self.grad_tol > 0.0
            && self.armijo_c > 0.0
            && self.armijo_c < 1.0
            && self.backtrack > 0.0
            && self.backtrack < 1.0
            && self.step_cap > 0.0
            && self.memory > 0
            && self.quality_floor >= 0.0
            && (0.0..1.0).contains(&self.relax_below)
            && self.regularization.iter().all(|w| *w >= 0.0);
        if ok {
            Ok(())
        } else {
            Err(PlateauError::InvalidInput(format!("bad solver options {self:?}")))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterRecord {
    pub iter: usize,
    pub weight: f64,
    pub area: f64,
    pub objective: f64,
    pub grad_norm: f64,
    pub min_quality: f64,
    /// The step into this iterate was a tangential relaxation, not a
    /// line-search step.
    pub relaxed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRecord {
    pub converged: bool,
    pub iterations: usize,
    pub final_area: f64,
    pub final_grad_norm: f64,
    pub history: Vec<IterRecord>,
}

impl ConvergenceRecord {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("record serializes")
    }
}

type Field = Vec<Vec4>;

fn fdot(a: &Field, b: &Field) -> f64 {
    a.iter().zip(b).map(|(x, y)| vec4::dot(x, y)).sum()
}

fn faxpy(a: &Field, s: f64, b: &Field) -> Field {
    a.iter().zip(b).map(|(x, y)| vec4::axpy(x, s, y)).collect()
}

/// Chordal area and its gradient with respect to all vertex positions.
pub fn area_gradient(x: &[Vec4], triangles: &[[usize; 3]]) -> (f64, Field) {
    let mut g = vec![[0.0; 4]; x.len()];
    let mut area = 0.0;
    for t in triangles {
        let (a, b, c) = (&x[t[0]], &x[t[1]], &x[t[2]]);
        let u = vec4::sub(b, a);
        let v = vec4::sub(c, a);
        let uu = vec4::dot(&u, &u);
        let vv = vec4::dot(&v, &v);
        let uv = vec4::dot(&u, &v);
        let two_a = (uu * vv - uv * uv).max(0.0).sqrt();
        area += 0.5 * two_a;
        if two_a <= 1e-300 {
            continue;
        }
        let inv = 1.0 / (2.0 * two_a);
        let gb = vec4::scale(&vec4::axpy(&vec4::scale(&u, vv), -uv, &v), inv);
        let gc = vec4::scale(&vec4::axpy(&vec4::scale(&v, uu), -uv, &u), inv);
        g[t[1]] = vec4::add(&g[t[1]], &gb);
        g[t[2]] = vec4::add(&g[t[2]], &gc);
        g[t[0]] = vec4::sub(&vec4::sub(&g[t[0]], &gb), &gc);
    }
    (area, g)
}

struct Problem<'a> {
    mesh: &'a TriMesh,
    edges: Vec<(usize, usize)>,
    /// Coupled vertices grouped by source.
    coupled: Vec<(usize, usize, usize)>,
    /// Neighbours along the free arc, for torus vertices.
    arc_nbrs: Vec<Option<(usize, usize)>>,
    slide_arcs: bool,
}

impl<'a> Problem<'a> {
    fn new(mesh: &'a TriMesh, slide_arcs: bool) -> Self {
        let mut edges: Vec<_> = mesh
            .triangles
            .iter()
            .flat_map(|t| (0..3).map(move |e| edge_key(t[e], t[(e + 1) % 3])))
            .collect();
        edges.sort_unstable();
        edges.dedup();
        let coupled = mesh
            .tags
            .iter()
            .enumerate()
            .filter_map(|(v, t)| match *t {
                VertexTag::Coupled { source, iso } => Some((v, source, iso)),
                _ => None,
            })
            .collect();
        let mut nb: Vec<Vec<usize>> = vec![Vec::new(); mesh.vertices.len()];
        for (&(a, b), kind) in &mesh.edge_kinds {
            if matches!(kind, EdgeKind::Torus(_)) {
                nb[a].push(b);
                nb[b].push(a);
            }
        }
        let arc_nbrs = nb.iter().map(|v| if v.len() == 2 { Some((v[0], v[1])) } else { None }).collect();
        Problem { mesh, edges, coupled, arc_nbrs, slide_arcs }
    }

    /// Projects a direction field onto the admissible motions at `x`.
    ///
    /// In `full` mode interior vertices move anywhere in T_xS³, arc vertices
    /// slide along their arc and free-arc vertices anywhere on their torus.
    /// Otherwise motions tangential to the surface are removed: interior
    /// vertices move along the surface normal, free-arc vertices along the
    /// conormal of the arc within the torus, and arc vertices stay put.
    /// Fixed and coupled vertices never move on their own.
    fn project_mode(&self, x: &[Vec4], d: &Field, full: bool) -> Field {
        let m = self.mesh;
        let normals = if full { Vec::new() } else { self.normals(x) };
        (0..x.len())
            .map(|v| {
                let g = &d[v];
                let line = |e: Option<Vec4>| e.map(|e| vec4::scale(&e, vec4::dot(g, &e))).unwrap_or([0.0; 4]);
                match m.tags[v] {
                    VertexTag::Fixed | VertexTag::Coupled { .. } => [0.0; 4],
                    VertexTag::Interior if full => vec4::axpy(g, -vec4::dot(g, &x[v]), &x[v]),
                    VertexTag::Interior => line(vec4::normalize(&vec4::reject(&normals[v], &[x[v]]))),
                    VertexTag::OnArc(a) if self.slide_arcs => {
                        let c = m.arcs[a].circle();
                        line(Some(c.tangent_at(c.angle_of(&x[v]))))
                    }
                    VertexTag::OnArc(_) => [0.0; 4],
                    VertexTag::OnTorus(t) => {
                        let [t1, t2] = m.tori[t].tangent_frame(&S3Point::from_unit(x[v]));
                        if full {
                            vec4::axpy(&vec4::scale(&t1, vec4::dot(g, &t1)), vec4::dot(g, &t2), &t2)
                        } else {
                            let conormal = self.arc_nbrs[v].and_then(|(a, b)| {
                                let tau = vec4::sub(&x[b], &x[a]);
                                let (c1, c2) = (vec4::dot(&tau, &t1), vec4::dot(&tau, &t2));
                                vec4::normalize(&vec4::axpy(&vec4::scale(&t1, -c2), c1, &t2))
                            });
                            line(conormal)
                        }
                    }
                }
            })
            .collect()
    }

    /// Motions that [`Self::project_mode`] removes outside `full` mode.
    fn project_tangential(&self, x: &[Vec4], d: &Field) -> Field {
        let full = self.project_mode(x, d, true);
        let normal = self.project_mode(x, d, false);
        let mut t: Field = full.iter().zip(&normal).map(|(a, b)| vec4::sub(a, b)).collect();
        for (v, tag) in self.mesh.tags.iter().enumerate() {
            if let VertexTag::OnTorus(_) = tag {
                let along = self.arc_nbrs[v].and_then(|(a, b)| vec4::normalize(&vec4::reject(&vec4::sub(&x[b], &x[a]), &[x[v]])));
                t[v] = along.map(|e| vec4::scale(&e, vec4::dot(&t[v], &e))).unwrap_or([0.0; 4]);
            }
        }
        t
    }

    /// Laplacian smoothing restricted to tangential motions; the surface
    /// shape changes only to second order.
    fn relax(&self, x: &Field, sweeps: usize) -> Field {
        let mut deg = vec![0.0f64; x.len()];
        for &(a, b) in &self.edges {
            deg[a] += 1.0;
            deg[b] += 1.0;
        }
        for &(v, s, _) in &self.coupled {
            deg[s] += deg[v];
        }
        let mut x = x.clone();
        for _ in 0..sweeps {
            let (_, _, _, raw) = self.eval(&x, 1.0);
            let (_, _, ga, _) = self.eval(&x, 0.0);
            let spring: Field = raw.iter().zip(&ga).map(|(a, b)| vec4::sub(a, b)).collect();
            let mut g = spring;
            for &(v, s, iso) in &self.coupled {
                let back = self.mesh.isometries[iso].apply_transpose(&g[v]);
                g[s] = vec4::add(&g[s], &back);
            }
            let d: Field = self
                .project_tangential(&x, &g)
                .iter()
                .zip(&deg)
                .map(|(gv, dv)| if *dv > 0.0 { vec4::scale(gv, -0.25 / dv) } else { [0.0; 4] })
                .collect();
            x = self.retract(&x, &d, 1.0);
        }
        x
    }

    /// Area-weighted vertex normals (unnormalized), consistent with the
    /// triangle orientation.
    fn normals(&self, x: &[Vec4]) -> Field {
        let mut normals = vec![[0.0; 4]; x.len()];
        for t in &self.mesh.triangles {
            for c in 0..3 {
                let (v, b, d) = (t[c], t[(c + 1) % 3], t[(c + 2) % 3]);
                let n = vec4::cross3_raw(&x[v], &vec4::sub(&x[b], &x[v]), &vec4::sub(&x[d], &x[v]));
                normals[v] = vec4::add(&normals[v], &n);
            }
        }
        normals
    }

    /// Area, objective, raw area gradient, raw objective gradient.
    fn eval(&self, x: &[Vec4], w: f64) -> (f64, f64, Field, Field) {
        let (area, ga) = area_gradient(x, &self.mesh.triangles);
        if w == 0.0 {
            return (area, area, ga.clone(), ga);
        }
        let mut g = ga.clone();
        let mut reg = 0.0;
        for &(a, b) in &self.edges {
            let d = vec4::sub(&x[a], &x[b]);
            reg += vec4::norm_sq(&d);
            g[a] = vec4::axpy(&g[a], 2.0 * w, &d);
            g[b] = vec4::axpy(&g[b], -2.0 * w, &d);
        }
        (area, area + w * reg, ga, g)
    }

    /// Riemannian gradient: coupled contributions pulled back onto their
    /// sources, then projected.
    fn gradient(&self, x: &[Vec4], raw: &Field, full: bool) -> Field {
        let mut g = raw.clone();
        for &(v, s, iso) in &self.coupled {
            let back = self.mesh.isometries[iso].apply_transpose(&raw[v]);
            g[s] = vec4::add(&g[s], &back);
        }
        self.project_mode(x, &g, full)
    }

    fn retract(&self, x: &[Vec4], d: &Field, t: f64) -> Field {
        let m = self.mesh;
        let mut y: Field = x
            .iter()
            .zip(d)
            .enumerate()
            .map(|(v, (p, dv))| {
                let q = vec4::axpy(p, t, dv);
                match m.tags[v] {
                    VertexTag::Fixed | VertexTag::Coupled { .. } => *p,
                    VertexTag::Interior => vec4::normalize(&q).unwrap_or(*p),
                    VertexTag::OnArc(a) => match S3Point::normalize(q) {
                        Some(s) => *m.arcs[a].project_clamped(&s, 1e-9).coords(),
                        None => *p,
                    },
                    VertexTag::OnTorus(tt) => S3Point::normalize(q)
                        .and_then(|s| m.tori[tt].project(&s))
                        .map(|s| *s.coords())
                        .unwrap_or(*p),
                }
            })
            .collect();
        for &(v, s, iso) in &self.coupled {
            y[v] = m.isometries[iso].apply_vec(&y[s]);
        }
        y
    }

    fn dual_weights(&self, x: &[Vec4]) -> Vec<f64> {
        let mut s = vec![0.0; x.len()];
        for t in &self.mesh.triangles {
            let ar = triangle_area(&x[t[0]], &x[t[1]], &x[t[2]]) / 3.0;
            for &v in t {
                s[v] += ar;
            }
        }
        for &(v, src, _) in &self.coupled {
            s[src] += s[v];
        }
        s
    }

    fn residual(&self, x: &[Vec4], g: &Field) -> f64 {
        let w = self.dual_weights(x);
        g.iter()
            .zip(&w)
            .map(|(gv, wv)| if *wv > 0.0 { vec4::norm(gv) / wv } else { 0.0 })
            .fold(0.0, f64::max)
    }

    fn min_quality(&self, x: &[Vec4]) -> (usize, f64) {
        let mut best = (0, f64::INFINITY);
        for (i, t) in self.mesh.triangles.iter().enumerate() {
            let q = triangle_quality(&x[t[0]], &x[t[1]], &x[t[2]]);
            if q < best.1 {
                best = (i, q);
            }
        }
        best
    }

    fn min_edge(&self, x: &[Vec4]) -> f64 {
        self.edges.iter().map(|&(a, b)| vec4::dist(&x[a], &x[b])).fold(f64::INFINITY, f64::min)
    }
}

/// Projected L-BFGS on the product of the vertex constraint sets.
fn solve(mesh: &TriMesh, opts: &SolveOptions) -> Result<(TriMesh, ConvergenceRecord), PlateauError> {
    opts.validate()?;
    let prob = Problem::new(mesh, opts.slide_arcs);
    let mut x: Field = mesh.vertices.iter().map(|p| *p.coords()).collect();
    let mut history = Vec::new();
    let mut iter = 0usize;
    let mut converged = false;
    let mut last_grad = f64::INFINITY;

    let mut stages: Vec<f64> = opts.regularization.iter().copied().filter(|w| *w > 0.0).collect();
    stages.push(0.0);

    for (si, &w) in stages.iter().enumerate() {
        let final_stage = si + 1 == stages.len();
        let budget = if final_stage { opts.max_iters.saturating_sub(iter) } else { opts.stage_iters };
        let mut mem: VecDeque<(Field, Field, f64)> = VecDeque::new();
        let (mut area, mut f, _, raw) = prob.eval(&x, w);
        let full = w > 0.0;
        let mut g = prob.gradient(&x, &raw, full);
        let mut stage_iter = 0;
        if !full && opts.relax_sweeps > 0 {
            x = prob.relax(&x, opts.relax_sweeps);
            let (a, fv, _, r) = prob.eval(&x, w);
            area = a;
            f = fv;
            g = prob.gradient(&x, &r, full);
        }
        let q_start = prob.min_quality(&x).1;
        let mut relaxed = false;
        loop {
            let (_, _, raw_area, _) = prob.eval(&x, 0.0);
            let ga = prob.gradient(&x, &raw_area, full);
            last_grad = prob.residual(&x, &ga);
            let (_, q) = prob.min_quality(&x);
            history.push(IterRecord { iter, weight: w, area, objective: f, grad_norm: last_grad, min_quality: q, relaxed });
            relaxed = false;
            if final_stage && last_grad < opts.grad_tol {
                converged = true;
                break;
            }
            if !final_stage && prob.residual(&x, &g) < opts.grad_tol {
                break;
            }
            if stage_iter >= budget {
                break;
            }

            // two-loop recursion
            let mut d = g.clone();
            let mut alphas = Vec::with_capacity(mem.len());
            for (s, y, rho) in mem.iter().rev() {
                let a = rho * fdot(s, &d);
                d = faxpy(&d, -a, y);
                alphas.push(a);
            }
            if let Some((s, y, _)) = mem.back() {
                let gamma = fdot(s, y) / fdot(y, y);
                d = d.iter().map(|v| vec4::scale(v, gamma)).collect();
            }
            for ((s, y, rho), a) in mem.iter().zip(alphas.into_iter().rev()) {
                let b = rho * fdot(y, &d);
                d = faxpy(&d, a - b, s);
            }
            let mut d: Field = prob.project_mode(&x, &d, full).iter().map(|v| vec4::scale(v, -1.0)).collect();
            let gn = fdot(&g, &g).sqrt();
            if fdot(&d, &g) >= -1e-12 * gn * fdot(&d, &d).sqrt() || mem.is_empty() && gn == 0.0 {
                mem.clear();
                d = g.iter().map(|v| vec4::scale(v, -1.0)).collect();
            }
            if mem.is_empty() {
                // steepest descent: scale to the step cap directly
                let dmax = d.iter().map(vec4::norm).fold(0.0, f64::max);
                if dmax > 0.0 {
                    let s = opts.step_cap * prob.min_edge(&x) / dmax;
                    d = d.iter().map(|v| vec4::scale(v, s)).collect();
                }
            }
            let dmax = d.iter().map(vec4::norm).fold(0.0, f64::max);
            let cap = opts.step_cap * prob.min_edge(&x);
            if dmax > cap {
                let s = cap / dmax;
                d = d.iter().map(|v| vec4::scale(v, s)).collect();
            }

            let slope = fdot(&g, &d);
            let mut t = 1.0;
            let mut accepted = None;
            for _ in 0..=opts.max_backtracks {
                let xn = prob.retract(&x, &d, t);
                let (an, fnew, _, rawn) = prob.eval(&xn, w);
                let roundoff = (t * slope).abs() < 1e-13 * f.abs().max(1.0);
                if fnew <= f + opts.armijo_c * t * slope || (roundoff && fnew <= f + 1e-14 * f.abs()) {
                    accepted = Some((xn, an, fnew, rawn));
                    break;
                }
                t *= opts.backtrack;
            }
            let Some((xn, an, fnew, rawn)) = accepted else {
                if mem.is_empty() {
                    break;
                }
                mem.clear();
                continue;
            };
            let (tri, q) = prob.min_quality(&xn);
            if q < opts.quality_floor {
                return Err(PlateauError::Collapse { triangle: tri, quality: q });
            }
            if !full && q < opts.relax_below * q_start {
                x = prob.relax(&xn, opts.relax_sweeps);
                let (an, fnew, _, rawn) = prob.eval(&x, w);
                area = an;
                f = fnew;
                g = prob.gradient(&x, &rawn, full);
                mem.clear();
                relaxed = true;
                iter += 1;
                stage_iter += 1;
                continue;
            }
            let gn = prob.gradient(&xn, &rawn, full);
            let s: Field = prob.project_mode(&xn, &xn.iter().zip(&x).map(|(a, b)| vec4::sub(a, b)).collect(), full);
            let y: Field = prob.project_mode(&xn, &gn.iter().zip(&g).map(|(a, b)| vec4::sub(a, b)).collect(), full);
            let sy = fdot(&s, &y);
            if sy > 1e-16 * fdot(&s, &s).sqrt() * fdot(&y, &y).sqrt() && sy > 0.0 {
                mem.push_back((s, y, 1.0 / sy));
                if mem.len() > opts.memory {
                    mem.pop_front();
                }
            }
            x = xn;
            area = an;
            f = fnew;
            g = gn;
            iter += 1;
            stage_iter += 1;
        }
    }

    let mut out = mesh.clone();
    out.vertices = x.into_iter().map(S3Point::from_unit).collect();
    let rec = ConvergenceRecord {
        converged,
        iterations: iter,
        final_area: history.last().map(|h| h.area).unwrap_or(0.0),
        final_grad_norm: last_grad,
        history,
    };
    Ok((out, rec))
}

/// Minimizes chordal area with fixed and sliding-arc boundary.
pub fn minimize_area(mesh: &TriMesh, opts: &SolveOptions) -> Result<(TriMesh, ConvergenceRecord), PlateauError> {
    solve(mesh, opts)
}

/// Minimizes area with a free arc on a torus coupled to its image under
/// `phi`. The mesh's coupled vertices must refer to isometry 0, which is
/// replaced by `phi`.
pub fn minimize_area_free(
    mesh: &TriMesh,
    phi: &Isometry,
    opts: &SolveOptions,
) -> Result<(TriMesh, ConvergenceRecord), PlateauError> {
    let has_free = mesh.tags.iter().any(|t| matches!(t, VertexTag::OnTorus(_)));
    let has_coupled = mesh.tags.iter().any(|t| matches!(t, VertexTag::Coupled { .. }));
    if !has_free || !has_coupled {
        return Err(PlateauError::InvalidInput("free-boundary mesh needs torus and coupled vertices".into()));
    }
    let mut m = mesh.clone();
    if m.isometries.is_empty() {
        m.isometries.push(*phi);
    } else {
        m.isometries[0] = *phi;
    }
    solve(&m, opts)
}

/// Max over free-arc vertices `p` of `|τ(p) + τ(φ(p))|`, with `τ` the
/// discrete turning angle `π − Σ(incident angles)`.
pub fn coupled_curvature_residual(mesh: &TriMesh) -> f64 {
    let sums = mesh.angle_sums();
    let tau = |v: usize| std::f64::consts::PI - sums[v];
    mesh.tags
        .iter()
        .enumerate()
        .filter_map(|(v, t)| match *t {
            VertexTag::Coupled { source, .. } if matches!(mesh.tags[source], VertexTag::OnTorus(_)) => {
                Some((tau(source) + tau(v)).abs())
            }
            _ => None,
        })
        .fold(0.0, f64::max)
}
