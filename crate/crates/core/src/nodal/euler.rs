use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::domains::{neighbours, UnionFind};
use super::march::Augmented;
use crate::error::{invalid, Error, Result};
use crate::field::GridField;
use crate::geom::{dot3, exp_point, random_point, sphere_from_ambient, sphere_to_ambient, ChartPoint, Frame, GeodesicSegment, SurfaceKind};
use crate::spectra::EigenFn;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ReflectionParity {
    Even,
    Odd,
}

/// Counts of the nodal set ∪ γ viewed as an embedded graph.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct NodalGraph {
    pub v: i64,
    pub e: i64,
    pub f: i64,
    pub m: i64,
    pub genus: i64,
}

impl NodalGraph {
    pub fn euler_lhs(&self) -> i64 {
        self.v - self.e + self.f - self.m
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SingularPoint {
    pub point: ChartPoint,
    pub degree: u32,
    pub on_gamma: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct EulerReport {
    pub graph: NodalGraph,
    pub parity: ReflectionParity,
    /// transversal crossings of the nodal set with γ (even case)
    pub crossings: usize,
    pub singular: Vec<SingularPoint>,
    /// vertices added to closed loops that carry no other vertex
    pub loop_vertices: usize,
    /// 1 − 2g − v + e + m, the face count implied by Euler's inequality
    pub euler_face_bound: i64,
    /// nodal-domain lower bound from the graph: the face bound (odd), half of it (even)
    pub domain_bound: i64,
    /// odd: #(singular points on γ) + 2 − 2g; even: ½·#(crossings) + 1 − g
    pub claim_bound: f64,
}

/// Reflection of the surface fixing γ pointwise.
#[derive(Debug, Clone, Copy)]
enum Reflection {
    Plane([f64; 3]),
    Line { base: [f64; 2], dir: [f64; 2] },
}

impl Reflection {
    fn of(gamma: &GeodesicSegment) -> Result<Self> {
        match gamma.frame {
            Frame::Sphere { .. } => Ok(Reflection::Plane(gamma.normal())),
            Frame::Torus { dir } => {
                let ok = |a: f64, b: f64| (dir[0] - a).abs() < 1e-12 && (dir[1] - b).abs() < 1e-12;
                let s = std::f64::consts::FRAC_1_SQRT_2;
                let lattice = [(1.0, 0.0), (0.0, 1.0), (s, s), (s, -s)];
                if lattice.iter().any(|&(a, b)| ok(a, b) || ok(-a, -b)) {
                    Ok(Reflection::Line { base: gamma.base, dir })
                } else {
                    Err(invalid(format!(
                        "no isometric reflection of the torus fixes direction {dir:?}; use (1,0), (0,1) or (1,±1)"
                    )))
                }
            }
        }
    }

    fn apply(&self, p: ChartPoint) -> ChartPoint {
        match *self {
            Reflection::Plane(n) => {
                let x = sphere_to_ambient(p);
                let d = 2.0 * dot3(x, n);
                sphere_from_ambient([x[0] - d * n[0], x[1] - d * n[1], x[2] - d * n[2]])
            }
            Reflection::Line { base, dir } => {
                let r = [p[0] - base[0], p[1] - base[1]];
                let t = r[0] * dir[0] + r[1] * dir[1];
                let q = [2.0 * t * dir[0] - r[0], 2.0 * t * dir[1] - r[1]];
                [(base[0] + q[0]).rem_euclid(1.0), (base[1] + q[1]).rem_euclid(1.0)]
            }
        }
    }
}

fn detect_parity(f: &EigenFn, refl: Reflection, name: &str) -> Result<ReflectionParity> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut even = 0.0f64;
    let mut odd = 0.0f64;
    let mut sup = 0.0f64;
    for _ in 0..400 {
        let p = random_point(f.surface, &mut rng);
        let a = f.value(p);
        let b = f.value(refl.apply(p));
        sup = sup.max(a.abs());
        even = even.max((a - b).abs());
        odd = odd.max((a + b).abs());
    }
    let tol = 1e-8 * sup.max(1e-300);
    if even <= tol {
        Ok(ReflectionParity::Even)
    } else if odd <= tol {
        Ok(ReflectionParity::Odd)
    } else {
        Err(Error::Symmetry(format!(
            "{} is neither even nor odd under the reflection fixing {name} (even defect {even:.3e}, odd defect {odd:.3e})",
            f.label()
        )))
    }
}

fn ring_degree(f: &EigenFn, p: ChartPoint, r: f64) -> u32 {
    let k = 720;
    let vals: Vec<f64> = (0..k)
        .map(|i| {
            let a = (i as f64 + 0.5) * std::f64::consts::TAU / k as f64;
            f.value(exp_point(f.surface, p, r, a).expect("closed surface"))
        })
        .collect();
    (0..k).filter(|&i| (vals[i] > 0.0) != (vals[(i + 1) % k] > 0.0)).count() as u32
}

/// Newton on the chart gradient; returns the converged point.
pub(crate) fn refine_critical(f: &EigenFn, mut p: ChartPoint, step_cap: f64) -> ChartPoint {
    let d = 1e-6;
    for _ in 0..40 {
        let g = f.gradient_wrapped(p);
        let ga = f.gradient_wrapped([p[0] + d, p[1]]);
        let gb = f.gradient_wrapped([p[0] - d, p[1]]);
        let gc = f.gradient_wrapped([p[0], p[1] + d]);
        let gd = f.gradient_wrapped([p[0], p[1] - d]);
        let j = [
            [(ga[0] - gb[0]) / (2.0 * d), (gc[0] - gd[0]) / (2.0 * d)],
            [(ga[1] - gb[1]) / (2.0 * d), (gc[1] - gd[1]) / (2.0 * d)],
        ];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det.abs() < 1e-300 {
            break;
        }
        let mut s = [
            (j[1][1] * g[0] - j[0][1] * g[1]) / det,
            (-j[1][0] * g[0] + j[0][0] * g[1]) / det,
        ];
        let n = s[0].hypot(s[1]);
        if n > step_cap {
            s = [s[0] * step_cap / n, s[1] * step_cap / n];
        }
        p = [p[0] - s[0], p[1] - s[1]];
        if n < 1e-14 {
            break;
        }
    }
    p
}

fn gradient_norm(f: &EigenFn, p: ChartPoint) -> f64 {
    let g = f.gradient_wrapped(p);
    g[0].hypot(g[1])
}

/// Singular points of the nodal set: zeros of φ where ∇φ also vanishes.
pub fn singular_points(f: &EigenFn, field: &GridField) -> Vec<(ChartPoint, u32)> {
    let lambda = f.lambda().max(1.0);
    let sup = field.sup();
    let g = &field.grid;
    let h = g.spacing();
    let lh = lambda * h;
    let c_val = (2.0 * lh * lh).max(1e-6) * sup;
    let c_grad = (2.0 * lh).max(1e-4) * lambda * sup;
    let ring = 0.5 / lambda;
    let pole_gap = 2.0 / lambda;
    let mut found: Vec<ChartPoint> = Vec::new();
    let accept = |p: ChartPoint| f.value_wrapped(p).abs() < 1e-6 * sup && gradient_norm(f, p) < 1e-4 * lambda * sup;
    for i in 0..g.n_rows() {
        let y = g.rows[i];
        if g.surface == SurfaceKind::Sphere && (y < pole_gap || y > PI - pole_gap) {
            continue;
        }
        for j in 0..g.n_cols() {
            if field.at(i, j).abs() >= c_val {
                continue;
            }
            let p = g.node(i, j);
            if gradient_norm(f, p) >= c_grad {
                continue;
            }
            let q = crate::spectra::wrap_chart(f.surface, refine_critical(f, p, 2.0 * h));
            let near_pole = g.surface == SurfaceKind::Sphere && (q[0] < pole_gap || q[0] > PI - pole_gap);
            if near_pole || !accept(q) {
                continue;
            }
            let dup = found.iter().any(|&o| crate::geom::distance(f.surface, o, q).unwrap_or(1.0) < ring.max(2.0 * h));
            if !dup {
                found.push(q);
            }
        }
    }
    if f.surface == SurfaceKind::Sphere {
        for pole in [[0.0, 0.0], [PI, 0.0]] {
            if f.value(pole).abs() < 1e-6 * sup && gradient_norm(f, pole) < 1e-4 * lambda * sup {
                found.push(pole);
            }
        }
    }
    found
        .into_iter()
        .map(|p| (p, ring_degree(f, p, ring)))
        .filter(|&(_, d)| d >= 4)
        .collect()
}

/// Signed side of γ: the sphere normal coordinate, or on the torus the
/// normal coordinate scaled so that lifts of γ sit at the integers.
fn side(gamma: &GeodesicSegment, p: ChartPoint) -> f64 {
    match gamma.frame {
        Frame::Sphere { .. } => dot3(gamma.normal(), sphere_to_ambient(p)),
        Frame::Torus { dir } => {
            let l = gamma.length;
            let (a, b) = (dir[0] * l, dir[1] * l);
            -b * (p[0] - gamma.base[0]) + a * (p[1] - gamma.base[1])
        }
    }
}

fn crosses_gamma(gamma: &GeodesicSegment, p: ChartPoint, q: ChartPoint) -> bool {
    match gamma.frame {
        Frame::Sphere { .. } => (side(gamma, p) > 0.0) != (side(gamma, q) > 0.0),
        Frame::Torus { .. } => {
            let q = super::march::unwrap_near(SurfaceKind::Torus, p, q);
            side(gamma, p).floor() != side(gamma, q).floor()
        }
    }
}

fn near_gamma(gamma: &GeodesicSegment, p: ChartPoint, tol: f64) -> bool {
    match gamma.frame {
        Frame::Sphere { .. } => side(gamma, p).abs() < tol,
        Frame::Torus { .. } => {
            let s = side(gamma, p);
            (s - s.round()).abs() / gamma.length < tol
        }
    }
}

/// Builds the graph N_φ ∪ γ for φ even or odd under the reflection fixing γ and
/// returns its counts together with the implied nodal-domain lower bounds.
pub fn euler_graph(f: &EigenFn, gamma: &GeodesicSegment, resolution: usize) -> Result<EulerReport> {
    if f.surface == SurfaceKind::Disc || f.surface != gamma.surface {
        return Err(Error::Unsupported {
            surface: f.surface,
            op: "the Euler-graph construction",
        });
    }
    if !gamma.closed {
        return Err(invalid("γ must be a closed geodesic"));
    }
    let refl = Reflection::of(gamma)?;
    let parity = detect_parity(f, refl, "γ")?;
    let field = GridField::sample(f, resolution)?;
    let g = &field.grid;
    let h = g.spacing();
    let lambda = f.lambda().max(1.0);
    let genus = f.surface.genus() as i64;

    let sing = singular_points(f, &field);
    let singular: Vec<SingularPoint> = sing
        .iter()
        .map(|&(p, d)| {
            let on = near_gamma(gamma, p, 2.0 * h);
            // on γ in the even case the two arcs of γ join the nodal arcs
            let degree = if on && parity == ReflectionParity::Even { d + 2 } else { d };
            SingularPoint { point: p, degree, on_gamma: on }
        })
        .collect();

    // transversal crossings of N with γ, away from singular points
    let ring = 0.5 / lambda;
    let mut crossing_points = Vec::new();
    if parity == ReflectionParity::Even {
        let k = ((16.0 * lambda * gamma.length) as usize).max(4096);
        let ts: Vec<f64> = (0..k).map(|i| gamma.length * i as f64 / k as f64).collect();
        let vals: Vec<f64> = ts.iter().map(|&t| f.value(gamma.point_unchecked(t))).collect();
        for i in 0..k {
            if (vals[i] > 0.0) != (vals[(i + 1) % k] > 0.0) {
                let t = ts[i] + 0.5 * gamma.length / k as f64;
                let p = gamma.point_unchecked(t);
                let near_singular = singular
                    .iter()
                    .any(|s| crate::geom::distance(f.surface, s.point, p).unwrap_or(1.0) < 2.0 * ring);
                if !near_singular {
                    crossing_points.push(p);
                }
            }
        }
    }

    // faces: same-sign neighbours not separated by γ
    let (nr, nc) = (g.n_rows(), g.n_cols());
    let mut uf = UnionFind::new(nr * nc);
    for i in 0..nr {
        for j in 0..nc {
            let a = field.at(i, j) > 0.0;
            let p = g.node(i, j);
            for (pi, pj) in neighbours(g.surface, nr, nc, i, j) {
                if (field.at(pi, pj) > 0.0) == a && !crosses_gamma(gamma, p, g.node(pi, pj)) {
                    uf.union((i * nc + j) as u32, (pi * nc + pj) as u32);
                }
            }
        }
    }
    let faces = uf.labels().1 as i64;

    // components of N ∪ γ over marked cells with 8-connectivity
    let aug = Augmented::new(&field);
    let cr = aug.cell_rows();
    let anc = aug.n_cols();
    let ncell = cr * anc;
    let pole_nodes = [ncell, ncell + 1];
    let mut marked = vec![false; ncell];
    for i in 0..cr {
        let i1 = (i + 1) % aug.n_rows();
        for j in 0..anc {
            let j1 = (j + 1) % anc;
            let s = [aug.v(i, j), aug.v(i, j1), aug.v(i1, j), aug.v(i1, j1)];
            let pos = s.iter().filter(|v| **v > 0.0).count();
            if pos != 0 && pos != 4 {
                marked[i * anc + j] = true;
            }
        }
    }
    let cell_of = |p: ChartPoint| -> usize {
        let rows = &aug.rows;
        let y = p[0];
        let i = if aug.wrap_rows {
            let shifted = (y - rows[0]).rem_euclid(1.0);
            ((shifted * rows.len() as f64).floor() as usize).min(rows.len() - 1)
        } else {
            rows.partition_point(|r| *r <= y).saturating_sub(1).min(cr - 1)
        };
        let cp = aug.col_period();
        let x = (p[1] - aug.cols[0]).rem_euclid(cp);
        let j = ((x / cp * anc as f64).floor() as usize).min(anc - 1);
        i * anc + j
    };
    let steps = ((gamma.length / (0.25 * h)).ceil() as usize).max(64);
    for s in 0..steps {
        let p = gamma.point_unchecked(gamma.length * s as f64 / steps as f64);
        marked[cell_of(p)] = true;
    }
    let mut cu = UnionFind::new(ncell + 2);
    for i in 0..cr {
        for j in 0..anc {
            if !marked[i * anc + j] {
                continue;
            }
            for di in -1i64..=1 {
                for dj in -1i64..=1 {
                    let mut ii = i as i64 + di;
                    if aug.wrap_rows {
                        ii = ii.rem_euclid(cr as i64);
                    } else if ii < 0 || ii >= cr as i64 {
                        continue;
                    }
                    let jj = (j as i64 + dj).rem_euclid(anc as i64) as usize;
                    let k = ii as usize * anc + jj;
                    if marked[k] {
                        cu.union((i * anc + j) as u32, k as u32);
                    }
                }
            }
        }
    }
    // singular poles join every marked cell touching them
    let mut pole_used = [false; 2];
    for sp in &singular {
        if f.surface != SurfaceKind::Sphere {
            continue;
        }
        let which = if sp.point[0] < 1e-9 {
            0
        } else if sp.point[0] > PI - 1e-9 {
            1
        } else {
            continue;
        };
        let row = if which == 0 { 0 } else { cr - 1 };
        if (which == 0 && !aug.has_north) || (which == 1 && !aug.has_south) {
            continue;
        }
        pole_used[which] = true;
        for j in 0..anc {
            if marked[row * anc + j] {
                cu.union(pole_nodes[which] as u32, (row * anc + j) as u32);
            }
        }
    }
    let vertex_component = |cu: &mut UnionFind, p: ChartPoint| -> u32 {
        if f.surface == SurfaceKind::Sphere && p[0] < 1e-9 && pole_used[0] {
            return cu.find(pole_nodes[0] as u32);
        }
        if f.surface == SurfaceKind::Sphere && p[0] > PI - 1e-9 && pole_used[1] {
            return cu.find(pole_nodes[1] as u32);
        }
        cu.find(cell_of(p) as u32)
    };
    let mut roots: Vec<u32> = (0..ncell).filter(|&k| marked[k]).map(|k| cu.find(k as u32)).collect();
    roots.sort_unstable();
    roots.dedup();
    let m = roots.len() as i64;
    let mut with_vertex: Vec<u32> = singular
        .iter()
        .map(|s| s.point)
        .chain(crossing_points.iter().copied())
        .map(|p| vertex_component(&mut cu, p))
        .collect();
    with_vertex.sort_unstable();
    with_vertex.dedup();
    let loop_vertices = roots.iter().filter(|r| with_vertex.binary_search(r).is_err()).count();

    let deg_sum: i64 = singular.iter().map(|s| s.degree as i64).sum::<i64>()
        + 4 * crossing_points.len() as i64
        + 2 * loop_vertices as i64;
    let v = (singular.len() + crossing_points.len() + loop_vertices) as i64;
    let e = deg_sum / 2;
    let graph = NodalGraph { v, e, f: faces, m, genus };
    if graph.euler_lhs() < 1 - 2 * genus {
        return Err(Error::Numerical(format!(
            "Euler inequality violated: v − e + f − m = {} < {}",
            graph.euler_lhs(),
            1 - 2 * genus
        )));
    }
    let euler_face_bound = 1 - 2 * genus - v + e + m;
    let domain_bound = match parity {
        ReflectionParity::Odd => euler_face_bound,
        ReflectionParity::Even => (euler_face_bound + 1) / 2,
    };
    let claim_bound = match parity {
        ReflectionParity::Odd => {
            singular.iter().filter(|s| s.on_gamma).count() as f64 + 2.0 - 2.0 * genus as f64
        }
        ReflectionParity::Even => 0.5 * crossing_points.len() as f64 + 1.0 - genus as f64,
    };
    Ok(EulerReport {
        graph,
        parity,
        crossings: crossing_points.len(),
        singular,
        loop_vertices,
        euler_face_bound,
        domain_bound,
        claim_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::{ModeIndex, Parity};

    fn single(n: u32, m: i32) -> EigenFn {
        EigenFn::single(ModeIndex::sphere(n, m).unwrap())
    }

    #[test]
    fn zonal_three_on_equator() {
        let r = euler_graph(&single(3, 0), &GeodesicSegment::equator(), 128).unwrap();
        assert_eq!(r.parity, ReflectionParity::Odd);
        assert_eq!(r.graph.f, 4);
        assert_eq!(r.euler_face_bound, 4);
        assert_eq!(r.claim_bound, 2.0);
    }

    #[test]
    fn highest_weight_sine_on_meridian() {
        let n = 6;
        let r = euler_graph(&single(n, -(n as i32)), &GeodesicSegment::meridian(0.0).unwrap(), 128).unwrap();
        assert_eq!(r.parity, ReflectionParity::Odd);
        assert_eq!(r.singular.len(), 2);
        assert!(r.singular.iter().all(|s| s.degree == 2 * n));
        let g = r.graph;
        assert_eq!((g.v, g.e, g.f, g.m), (2, 2 * n as i64, 2 * n as i64, 1));
    }

    #[test]
    fn highest_weight_cosine_on_equator() {
        let n = 5;
        let r = euler_graph(&single(n, n as i32), &GeodesicSegment::equator(), 128).unwrap();
        assert_eq!(r.parity, ReflectionParity::Even);
        let g = r.graph;
        let ni = n as i64;
        assert_eq!((g.v, g.e, g.f, g.m), (2 * ni + 2, 6 * ni, 4 * ni, 1));
        assert_eq!(r.claim_bound, (n + 1) as f64);
    }

    #[test]
    fn asymmetric_rejected() {
        let f = EigenFn::combination(vec![
            (ModeIndex::sphere(2, 0).unwrap(), 0.6),
            (ModeIndex::sphere(2, 1).unwrap(), 0.8),
        ])
        .unwrap();
        assert!(matches!(euler_graph(&f, &GeodesicSegment::equator(), 64), Err(Error::Symmetry(_))));
    }

    #[test]
    fn torus_product_mode() {
        // cos 2πx₁·cos 2πx₂ = ½(cos 2π(x₁+x₂) + cos 2π(x₁−x₂)); even across x₂ = 0
        let f = EigenFn::combination(vec![
            (ModeIndex::torus([1, 1], Parity::Cos).unwrap(), 0.5f64.sqrt()),
            (ModeIndex::torus([1, -1], Parity::Cos).unwrap(), 0.5f64.sqrt()),
        ])
        .unwrap();
        let gamma = GeodesicSegment::torus_closed([0.0, 0.0], 1, 0).unwrap();
        let r = euler_graph(&f, &gamma, 128).unwrap();
        assert_eq!(r.parity, ReflectionParity::Even);
        let g = r.graph;
        assert_eq!((g.v, g.e, g.f, g.m), (6, 12, 6, 1));
        assert_eq!(r.crossings, 2);
    }
}
