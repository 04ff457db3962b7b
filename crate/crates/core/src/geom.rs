//! Model surfaces, charts, geodesics and their complexifications.
//!
//! Chart points are `[f64; 2]`: `(x₁, x₂)` on the torus, `(φ, θ)` on the sphere
//! (colatitude, longitude), `(r, θ)` on the disc.

use std::f64::consts::{PI, TAU};
use std::fmt;

use num_complex::Complex64 as C;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

pub type ChartPoint = [f64; 2];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SurfaceKind {
    Torus,
    Sphere,
    Disc,
}

impl SurfaceKind {
    pub fn genus(self) -> u32 {
        match self {
            SurfaceKind::Torus => 1,
            SurfaceKind::Sphere | SurfaceKind::Disc => 0,
        }
    }

    pub fn area(self) -> f64 {
        match self {
            SurfaceKind::Torus => 1.0,
            SurfaceKind::Sphere => 4.0 * PI,
            SurfaceKind::Disc => PI,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SurfaceKind::Torus => "torus",
            SurfaceKind::Sphere => "sphere",
            SurfaceKind::Disc => "disc",
        }
    }
}

impl fmt::Display for SurfaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for SurfaceKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "torus" => Ok(SurfaceKind::Torus),
            "sphere" => Ok(SurfaceKind::Sphere),
            "disc" | "disk" => Ok(SurfaceKind::Disc),
            other => Err(invalid(format!("unknown surface `{other}`"))),
        }
    }
}

/// Validates a chart point and brings it to canonical form
/// (torus coordinates reduced into [0,1)).
pub fn canonical(surface: SurfaceKind, p: ChartPoint) -> Result<ChartPoint> {
    if !(p[0].is_finite() && p[1].is_finite()) {
        return Err(Error::OutOfChart(format!("{p:?} is not finite")));
    }
    match surface {
        SurfaceKind::Torus => Ok([p[0].rem_euclid(1.0), p[1].rem_euclid(1.0)]),
        SurfaceKind::Sphere => {
            if !(0.0..=PI).contains(&p[0]) || !(0.0..=TAU).contains(&p[1]) {
                return Err(Error::OutOfChart(format!(
                    "sphere chart needs φ∈[0,π], θ∈[0,2π]; got {p:?}"
                )));
            }
            Ok(p)
        }
        SurfaceKind::Disc => {
            if !(0.0..=1.0).contains(&p[0]) || !(0.0..=TAU).contains(&p[1]) {
                return Err(Error::OutOfChart(format!(
                    "disc chart needs r∈[0,1], θ∈[0,2π]; got {p:?}"
                )));
            }
            Ok(p)
        }
    }
}

pub fn sphere_to_ambient(p: ChartPoint) -> [f64; 3] {
    let (s, c) = p[0].sin_cos();
    [s * p[1].cos(), s * p[1].sin(), c]
}

pub fn sphere_from_ambient(v: [f64; 3]) -> ChartPoint {
    let rho = (v[0] * v[0] + v[1] * v[1]).sqrt();
    let phi = rho.atan2(v[2]);
    let theta = if rho == 0.0 { 0.0 } else { v[1].atan2(v[0]).rem_euclid(TAU) };
    // rem_euclid can round up to exactly 2π
    [phi, if theta >= TAU { 0.0 } else { theta }]
}

fn wrap_half(d: f64) -> f64 {
    d - d.round()
}

pub fn distance(surface: SurfaceKind, p: ChartPoint, q: ChartPoint) -> Result<f64> {
    let p = canonical(surface, p)?;
    let q = canonical(surface, q)?;
    Ok(match surface {
        SurfaceKind::Torus => wrap_half(p[0] - q[0]).hypot(wrap_half(p[1] - q[1])),
        SurfaceKind::Sphere => {
            let (u, v) = (sphere_to_ambient(p), sphere_to_ambient(q));
            angle_between(u, v)
        }
        SurfaceKind::Disc => {
            let (a, b) = (polar_to_plane(p), polar_to_plane(q));
            (a[0] - b[0]).hypot(a[1] - b[1])
        }
    })
}

/// Point at geodesic distance `r` from `p`, leaving in the direction at angle `a`
/// from the first chart axis (sphere: from ∂_φ, or from e₁ at a pole). `None` when
/// the point would leave the disc.
pub fn exp_point(surface: SurfaceKind, p: ChartPoint, r: f64, a: f64) -> Option<ChartPoint> {
    let (sa, ca) = a.sin_cos();
    match surface {
        SurfaceKind::Torus => Some([(p[0] + r * ca).rem_euclid(1.0), (p[1] + r * sa).rem_euclid(1.0)]),
        SurfaceKind::Sphere => {
            let x = sphere_to_ambient(p);
            let (e1, e2) = if p[0] < 1e-12 || p[0] > PI - 1e-12 {
                ([1.0, 0.0, 0.0], [0.0, 1.0, 0.0])
            } else {
                let (sp, cp) = p[0].sin_cos();
                let (st, ct) = p[1].sin_cos();
                ([cp * ct, cp * st, -sp], [-st, ct, 0.0])
            };
            let (s, c) = r.sin_cos();
            let q: [f64; 3] = std::array::from_fn(|i| c * x[i] + s * (ca * e1[i] + sa * e2[i]));
            Some(sphere_from_ambient(q))
        }
        SurfaceKind::Disc => {
            // radial and angular unit directions at p; the centre uses the plane axes
            let (st, ct) = p[1].sin_cos();
            let base = polar_to_plane(p);
            let q = [base[0] + r * (ca * ct - sa * st), base[1] + r * (ca * st + sa * ct)];
            let rr = q[0].hypot(q[1]);
            (rr <= 1.0).then(|| [rr, q[1].atan2(q[0]).rem_euclid(TAU)])
        }
    }
}

/// Uniform random point with respect to the surface measure.
pub fn random_point<R: rand::Rng + ?Sized>(surface: SurfaceKind, rng: &mut R) -> ChartPoint {
    match surface {
        SurfaceKind::Torus => [rng.gen(), rng.gen()],
        SurfaceKind::Sphere => [rng.gen_range(-1.0f64..1.0).acos(), rng.gen_range(0.0..TAU)],
        SurfaceKind::Disc => [rng.gen::<f64>().sqrt(), rng.gen_range(0.0..TAU)],
    }
}

fn polar_to_plane(p: ChartPoint) -> [f64; 2] {
    [p[0] * p[1].cos(), p[0] * p[1].sin()]
}

pub(crate) fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn cross3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub(crate) fn norm3(a: [f64; 3]) -> f64 {
    dot3(a, a).sqrt()
}

pub(crate) fn angle_between(u: [f64; 3], v: [f64; 3]) -> f64 {
    norm3(cross3(u, v)).atan2(dot3(u, v))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Frame {
    /// Unit direction in the chart plane.
    Torus { dir: [f64; 2] },
    /// Orthonormal (point, unit tangent) pair in ℝ³.
    Sphere { p: [f64; 3], v: [f64; 3] },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeodesicSegment {
    pub surface: SurfaceKind,
    pub base: ChartPoint,
    pub frame: Frame,
    pub length: f64,
    pub closed: bool,
}

impl GeodesicSegment {
    /// Straight segment on the torus; `dir` is normalised. Closed when
    /// `length·dir` is an integer vector.
    pub fn torus(base: ChartPoint, dir: [f64; 2], length: f64) -> Result<Self> {
        let n = dir[0].hypot(dir[1]);
        if !(n > 0.0 && n.is_finite()) {
            return Err(invalid("geodesic direction must be non-zero"));
        }
        if !(length > 0.0 && length.is_finite()) {
            return Err(invalid("geodesic length must be positive"));
        }
        let dir = [dir[0] / n, dir[1] / n];
        let end = [length * dir[0], length * dir[1]];
        let closed = wrap_half(end[0]).abs() < 1e-10 && wrap_half(end[1]).abs() < 1e-10;
        Ok(GeodesicSegment {
            surface: SurfaceKind::Torus,
            base: canonical(SurfaceKind::Torus, base)?,
            frame: Frame::Torus { dir },
            length,
            closed,
        })
    }

    /// The shortest closed geodesic of rational direction (p, q), length √(p²+q²).
    pub fn torus_closed(base: ChartPoint, p: i64, q: i64) -> Result<Self> {
        if p == 0 && q == 0 {
            return Err(invalid("closed torus geodesic needs (p,q) ≠ (0,0)"));
        }
        let g = gcd(p.unsigned_abs(), q.unsigned_abs()) as i64;
        let (p, q) = (p / g, q / g);
        let len = (p as f64).hypot(q as f64);
        let mut seg = Self::torus(base, [p as f64, q as f64], len)?;
        seg.closed = true;
        Ok(seg)
    }

    /// Great-circle arc from chart point `base` along the ambient tangent `tangent`.
    pub fn sphere(base: ChartPoint, tangent: [f64; 3], length: f64) -> Result<Self> {
        let base = canonical(SurfaceKind::Sphere, base)?;
        if !(length > 0.0 && length.is_finite()) {
            return Err(invalid("geodesic length must be positive"));
        }
        let p = sphere_to_ambient(base);
        let t = dot3(p, tangent);
        let v = [tangent[0] - t * p[0], tangent[1] - t * p[1], tangent[2] - t * p[2]];
        let n = norm3(v);
        if !(n > 1e-12) {
            return Err(invalid("sphere geodesic tangent must not be parallel to the base point"));
        }
        let v = [v[0] / n, v[1] / n, v[2] / n];
        Ok(GeodesicSegment {
            surface: SurfaceKind::Sphere,
            base,
            frame: Frame::Sphere { p, v },
            length,
            closed: (length - TAU).abs() < 1e-12,
        })
    }

    /// Full great circle through `p` with ambient tangent `v`.
    pub fn great_circle(base: ChartPoint, tangent: [f64; 3]) -> Result<Self> {
        Self::sphere(base, tangent, TAU)
    }

    /// Equator traversed eastwards from θ = 0.
    pub fn equator() -> Self {
        Self::great_circle([PI / 2.0, 0.0], [0.0, 1.0, 0.0]).expect("valid frame")
    }

    /// Great circle θ ∈ {θ₀, θ₀+π} through both poles, starting on the equator and heading north.
    pub fn meridian(theta0: f64) -> Result<Self> {
        Self::great_circle([PI / 2.0, theta0.rem_euclid(TAU)], [0.0, 0.0, 1.0])
    }

    pub fn point(&self, t: f64) -> Result<ChartPoint> {
        if !(t >= -1e-12 && t <= self.length + 1e-12) {
            return Err(invalid(format!("t = {t} outside [0, {}]", self.length)));
        }
        Ok(self.point_unchecked(t))
    }

    /// Chart point at any real arc parameter (closed curves wrap).
    pub fn point_unchecked(&self, t: f64) -> ChartPoint {
        match self.frame {
            Frame::Torus { dir } => [
                (self.base[0] + t * dir[0]).rem_euclid(1.0),
                (self.base[1] + t * dir[1]).rem_euclid(1.0),
            ],
            Frame::Sphere { .. } => sphere_from_ambient(self.ambient(t)),
        }
    }

    /// Ambient position on the sphere (or chart position on the torus, unreduced).
    pub fn ambient(&self, t: f64) -> [f64; 3] {
        match self.frame {
            Frame::Torus { dir } => [self.base[0] + t * dir[0], self.base[1] + t * dir[1], 0.0],
            Frame::Sphere { p, v } => {
                let (s, c) = t.sin_cos();
                [c * p[0] + s * v[0], c * p[1] + s * v[1], c * p[2] + s * v[2]]
            }
        }
    }

    /// Unit normal: the ambient normal p×v of the plane of a great circle,
    /// or the left normal of a torus direction.
    pub fn normal(&self) -> [f64; 3] {
        match self.frame {
            Frame::Torus { dir } => [-dir[1], dir[0], 0.0],
            Frame::Sphere { p, v } => cross3(p, v),
        }
    }

    pub fn complexified(&self, s: StripPoint) -> Result<CxChart> {
        let w = C::new(s.t, s.tau);
        match self.frame {
            Frame::Torus { dir } => Ok(CxChart::Torus([
                C::new(self.base[0], 0.0) + w * dir[0],
                C::new(self.base[1], 0.0) + w * dir[1],
            ])),
            Frame::Sphere { p, v } => {
                let (c, s) = (w.cos(), w.sin());
                Ok(CxChart::Sphere([
                    c * p[0] + s * v[0],
                    c * p[1] + s * v[1],
                    c * p[2] + s * v[2],
                ]))
            }
        }
    }

    /// d/dw of the complexified parametrisation.
    pub fn complexified_velocity(&self, w: C) -> CxChart {
        match self.frame {
            Frame::Torus { dir } => CxChart::Torus([C::new(dir[0], 0.0), C::new(dir[1], 0.0)]),
            Frame::Sphere { p, v } => {
                let (c, s) = (w.cos(), w.sin());
                CxChart::Sphere([
                    -s * p[0] + c * v[0],
                    -s * p[1] + c * v[1],
                    -s * p[2] + c * v[2],
                ])
            }
        }
    }
}

pub fn complexified_geodesic_point(seg: &GeodesicSegment, s: StripPoint) -> Result<CxChart> {
    if seg.surface == SurfaceKind::Disc {
        return Err(Error::Unsupported {
            surface: SurfaceKind::Disc,
            op: "complexified geodesics",
        });
    }
    seg.complexified(s)
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// A point t + iτ of the strip.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StripPoint {
    pub t: f64,
    pub tau: f64,
}

impl StripPoint {
    pub fn new(t: f64, tau: f64, eps: f64) -> Result<Self> {
        if tau.abs() > eps {
            return Err(invalid(format!("|τ| = {} exceeds the strip half-width {eps}", tau.abs())));
        }
        Ok(StripPoint { t, tau })
    }
}

/// Default half-width of the complex strip and tube radius.
pub const DEFAULT_STRIP: f64 = 0.4;

/// Complexified chart values: ζ ∈ ℂ² on the torus, z ∈ ℂ³ on the complex quadric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CxChart {
    Torus([C; 2]),
    Sphere([C; 3]),
}

impl CxChart {
    pub fn real(surface: SurfaceKind, p: ChartPoint) -> Result<Self> {
        let p = canonical(surface, p)?;
        match surface {
            SurfaceKind::Torus => Ok(CxChart::Torus([C::new(p[0], 0.0), C::new(p[1], 0.0)])),
            SurfaceKind::Sphere => {
                let a = sphere_to_ambient(p);
                Ok(CxChart::Sphere([C::new(a[0], 0.0), C::new(a[1], 0.0), C::new(a[2], 0.0)]))
            }
            SurfaceKind::Disc => Err(Error::Unsupported {
                surface: SurfaceKind::Disc,
                op: "complexification",
            }),
        }
    }

    pub fn surface(&self) -> SurfaceKind {
        match self {
            CxChart::Torus(_) => SurfaceKind::Torus,
            CxChart::Sphere(_) => SurfaceKind::Sphere,
        }
    }
}

/// Uniform Gauss–Legendre/trapezoid product grid. Row coordinate is x₁, φ or r;
/// column coordinate is x₂ or θ. Node weights are area elements and sum to the area.
#[derive(Debug, Clone)]
pub struct Grid {
    pub surface: SurfaceKind,
    pub resolution: usize,
    pub rows: Vec<f64>,
    pub cols: Vec<f64>,
    pub row_weights: Vec<f64>,
    pub col_weights: Vec<f64>,
}

pub fn quadrature_grid(surface: SurfaceKind, resolution: usize) -> Result<Grid> {
    if resolution < 8 {
        return Err(invalid(format!("grid resolution {resolution} is below 8")));
    }
    let n = resolution;
    let periodic = |count: usize, period: f64| -> (Vec<f64>, Vec<f64>) {
        let h = period / count as f64;
        ((0..count).map(|i| (i as f64 + 0.5) * h).collect(), vec![h; count])
    };
    let (rows, row_weights, cols, col_weights) = match surface {
        SurfaceKind::Torus => {
            let (r, rw) = periodic(n, 1.0);
            let (c, cw) = periodic(n, 1.0);
            (r, rw, c, cw)
        }
        SurfaceKind::Sphere => {
            // GL in u = cos φ; rows ordered by increasing φ
            let (u, w) = crate::quad::gauss_legendre(n);
            let rows: Vec<f64> = u.iter().rev().map(|u| u.acos()).collect();
            let rw: Vec<f64> = w.iter().rev().copied().collect();
            let (c, cw) = periodic(2 * n, TAU);
            (rows, rw, c, cw)
        }
        SurfaceKind::Disc => {
            let (r, w) = crate::quad::gauss_legendre_on(n, 0.0, 1.0);
            let rw: Vec<f64> = r.iter().zip(&w).map(|(r, w)| r * w).collect();
            let (c, cw) = periodic(2 * n, TAU);
            (r, rw, c, cw)
        }
    };
    Ok(Grid {
        surface,
        resolution,
        rows,
        cols,
        row_weights,
        col_weights,
    })
}

impl Grid {
    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.cols.len()
    }

    pub fn len(&self) -> usize {
        self.n_rows() * self.n_cols()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn node(&self, i: usize, j: usize) -> ChartPoint {
        [self.rows[i], self.cols[j]]
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.row_weights[i] * self.col_weights[j]
    }

    /// Period of the column coordinate.
    pub fn col_period(&self) -> f64 {
        match self.surface {
            SurfaceKind::Torus => 1.0,
            _ => TAU,
        }
    }

    /// Typical spacing, used as the length scale h.
    pub fn spacing(&self) -> f64 {
        match self.surface {
            SurfaceKind::Torus => 1.0 / self.resolution as f64,
            SurfaceKind::Sphere => PI / self.resolution as f64,
            SurfaceKind::Disc => 1.0 / self.resolution as f64,
        }
    }

    /// Total weight; equals the surface area up to rounding.
    pub fn total_weight(&self) -> f64 {
        crate::quad::pairwise_sum(&self.row_weights) * crate::quad::pairwise_sum(&self.col_weights)
    }
}

/// Riemannian length of a short chart displacement `d` at chart point `mid`.
pub fn metric_length(surface: SurfaceKind, mid: ChartPoint, d: [f64; 2]) -> f64 {
    match surface {
        SurfaceKind::Torus => d[0].hypot(d[1]),
        SurfaceKind::Sphere => d[0].hypot(mid[0].sin() * d[1]),
        SurfaceKind::Disc => d[0].hypot(mid[0] * d[1]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distances() {
        let d = distance(SurfaceKind::Sphere, [0.0, 0.0], [PI, 0.0]).unwrap();
        assert!((d - PI).abs() < 1e-15);
        let d = distance(SurfaceKind::Torus, [0.0, 0.0], [0.5, 0.5]).unwrap();
        assert!((d - 0.5f64.sqrt()).abs() < 1e-15);
        let d = distance(SurfaceKind::Sphere, [PI / 2.0, 0.0], [PI / 2.0, 1.0]).unwrap();
        assert!((d - 1.0).abs() < 1e-15);
        assert!(distance(SurfaceKind::Sphere, [4.0, 0.0], [0.0, 0.0]).is_err());
        assert!(distance(SurfaceKind::Disc, [1.5, 0.0], [0.0, 0.0]).is_err());
    }

    #[test]
    fn geodesic_examples() {
        let s = GeodesicSegment::torus([0.0, 0.0], [1.0, 0.0], 1.0).unwrap();
        assert_eq!(s.point(0.25).unwrap(), [0.25, 0.0]);
        assert!(s.point(1.5).is_err());
        let c = GeodesicSegment::torus([0.0, 0.0], [0.6, 0.8], 5.0).unwrap();
        assert!(c.closed);
        let p = c.point(5.0).unwrap();
        assert!(distance(SurfaceKind::Torus, p, [0.0, 0.0]).unwrap() < 1e-10);
        let eq = GeodesicSegment::equator();
        let q = eq.point(PI).unwrap();
        assert!((q[0] - PI / 2.0).abs() < 1e-12 && (q[1] - PI).abs() < 1e-12);
    }

    #[test]
    fn complexified_examples() {
        let s = GeodesicSegment::torus([0.0, 0.0], [1.0, 0.0], 1.0).unwrap();
        let CxChart::Torus(z) = s.complexified(StripPoint { t: 0.5, tau: 0.1 }).unwrap() else {
            panic!()
        };
        assert!((z[0] - C::new(0.5, 0.1)).norm() < 1e-15 && z[1].norm() < 1e-15);
        let eq = GeodesicSegment::equator();
        let CxChart::Sphere(z) = eq.complexified(StripPoint { t: 1.0, tau: 0.2 }).unwrap() else {
            panic!()
        };
        assert!((z[0] - C::new(0.5511, -0.1694)).norm() < 2e-4);
        let quad: C = z.iter().map(|z| z * z).sum();
        assert!((quad - 1.0).norm() < 1e-14);
    }

    #[test]
    fn grid_areas() {
        for (s, n) in [(SurfaceKind::Torus, 64), (SurfaceKind::Sphere, 37), (SurfaceKind::Disc, 64)] {
            let g = quadrature_grid(s, n).unwrap();
            assert!((g.total_weight() - s.area()).abs() < 1e-10 * s.area());
        }
        let g = quadrature_grid(SurfaceKind::Torus, 64).unwrap();
        assert_eq!(g.len(), 4096);
        assert!((g.weight(3, 5) - 1.0 / 4096.0).abs() < 1e-18);
        assert!(quadrature_grid(SurfaceKind::Torus, 7).is_err());
    }
}
