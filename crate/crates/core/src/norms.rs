//! L^p norms, Sogge exponents, family sweeps, and the nodal integral identities
//! ∫|φ|(Δ+λ²)f = 2∫_N |∇φ| f and λ²∫_{φ≥c} φ = ∫_{φ=c} |∇φ|.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::field::GridField;
use crate::fit::{power_fit, LinearFit};
use crate::geom::{metric_length, sphere_to_ambient, ChartPoint, SurfaceKind};
use crate::nodal::{count_domains, extract_nodal, refine_critical, NodalCurveSet};
use crate::spectra::{wrap_chart, Bc, EigenFn, ModeIndex, Parity};

/// Golden-section maximum of `g` on [a, b].
fn golden_max(g: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut gc, mut gd) = (g(c), g(d));
    for _ in 0..60 {
        if gc > gd {
            b = d;
            d = c;
            gd = gc;
            c = b - r * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + r * (b - a);
            gd = g(d);
        }
    }
    if gc > gd {
        (c, gc)
    } else {
        (d, gd)
    }
}

/// Grid maximum of |φ| refined by coordinate-wise golden-section search around the
/// best few nodes.
pub fn sup_norm(f: &EigenFn, field: &GridField) -> f64 {
    let g = &field.grid;
    let nc = g.n_cols();
    let mut idx: Vec<usize> = (0..field.values.len()).collect();
    let top = 6.min(idx.len());
    idx.select_nth_unstable_by(top - 1, |a, b| field.values[*b].abs().total_cmp(&field.values[*a].abs()));
    let mut best = field.poles.iter().flatten().fold(0.0f64, |a, v| a.max(v.abs()));
    let abs_at = |p: ChartPoint| f.value_wrapped(p).abs();
    for &k in &idx[..top] {
        let (i, j) = (k / nc, k % nc);
        let mut p = g.node(i, j);
        let hr = if i + 1 < g.n_rows() { g.rows[i + 1] - g.rows[i] } else { g.rows[i] - g.rows[i - 1] };
        let hc = g.col_period() / nc as f64;
        let mut val = abs_at(p);
        for _ in 0..3 {
            let (x, v) = golden_max(|x| abs_at([x, p[1]]), p[0] - hr, p[0] + hr);
            if v > val {
                p[0] = x;
                val = v;
            }
            let (y, v) = golden_max(|y| abs_at([p[0], y]), p[1] - hc, p[1] + hc);
            if v > val {
                p[1] = y;
                val = v;
            }
        }
        best = best.max(val);
    }
    best
}

/// ‖φ‖_p by quadrature; `p = f64::INFINITY` gives the polished sup.
pub fn lp_norm(f: &EigenFn, p: f64, resolution: usize) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(invalid(format!("L^p norms need p ≥ 1, got {p}")));
    }
    let field = GridField::sample(f, resolution)?;
    Ok(lp_norm_field(f, &field, p))
}

pub(crate) fn lp_norm_field(f: &EigenFn, field: &GridField, p: f64) -> f64 {
    if p.is_infinite() {
        sup_norm(f, field)
    } else if p == 1.0 {
        field.integrate(f64::abs)
    } else if p == 2.0 {
        field.integrate(|v| v * v).sqrt()
    } else {
        field.integrate(|v| v.abs().powf(p)).powf(1.0 / p)
    }
}

/// Universal growth exponent δ(p) of ‖φ_λ‖_p in dimension n, for p ≥ 2.
pub fn sogge_delta(p: f64, n: u32) -> Result<f64> {
    if p.is_nan() || p < 2.0 || n < 2 {
        return Err(invalid("δ(p) is defined for p ≥ 2 and n ≥ 2"));
    }
    let n = n as f64;
    let pc = 2.0 * (n + 1.0) / (n - 1.0);
    let inv = if p.is_infinite() { 0.0 } else { 1.0 / p };
    Ok(if p >= pc {
        n * (0.5 - inv) - 0.5
    } else {
        0.5 * (n - 1.0) * (0.5 - inv)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Family {
    /// Y^N_0
    Zonal,
    /// Y^N_N, the real part of (x₁+ix₂)^N; Gaussian beams along the equator are the same family
    HighestWeight,
    /// sin 2π⟨M·k₀, x⟩ on the torus
    TorusRay([i32; 2]),
    /// Dirichlet J₀(j₀,ₙ r) on the disc
    DiscRadial,
}

impl Family {
    pub fn member(self, index: u32) -> Result<EigenFn> {
        let mode = match self {
            Family::Zonal => ModeIndex::sphere(index, 0)?,
            Family::HighestWeight => ModeIndex::sphere(index, index as i32)?,
            Family::TorusRay(k0) => {
                if index == 0 {
                    return Err(invalid("torus ray members start at M = 1"));
                }
                let m = index as i32;
                let k = [m * k0[0], m * k0[1]];
                // sin has a sign but the same norms under k → −k
                let k = if crate::spectra::in_half_lattice(k) { k } else { [-k[0], -k[1]] };
                ModeIndex::torus(k, Parity::Sin)?
            }
            Family::DiscRadial => ModeIndex::disc(Bc::Dirichlet, 0, index, Parity::Cos)?,
        };
        Ok(EigenFn::single(mode))
    }

    pub fn surface(self) -> SurfaceKind {
        match self {
            Family::Zonal | Family::HighestWeight => SurfaceKind::Sphere,
            Family::TorusRay(_) => SurfaceKind::Torus,
            Family::DiscRadial => SurfaceKind::Disc,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Zonal => write!(f, "zonal"),
            Family::HighestWeight => write!(f, "highest-weight"),
            Family::TorusRay(k) => write!(f, "torus-ray({},{})", k[0], k[1]),
            Family::DiscRadial => write!(f, "disc-radial"),
        }
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        match s.as_str() {
            "zonal" => Ok(Family::Zonal),
            "highest-weight" | "highest_weight" | "gaussian-beam" | "gaussian_beam" => Ok(Family::HighestWeight),
            "disc-radial" | "disc_radial" => Ok(Family::DiscRadial),
            _ => {
                let inner = s
                    .strip_prefix("torus-ray(")
                    .and_then(|r| r.strip_suffix(')'))
                    .ok_or_else(|| Error::Config(format!("unknown family '{s}'")))?;
                let parts: Vec<&str> = inner.split(',').collect();
                let parse = |t: &str| t.trim().parse::<i32>().map_err(|_| Error::Config(format!("bad ray direction '{inner}'")));
                if parts.len() != 2 {
                    return Err(Error::Config(format!("bad ray direction '{inner}'")));
                }
                Ok(Family::TorusRay([parse(parts[0])?, parse(parts[1])?]))
            }
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRecord {
    pub index: u32,
    pub lambda: f64,
    /// one entry per requested exponent, in request order
    pub norms: Vec<f64>,
    pub sup: f64,
    pub l1: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FamilySweep {
    pub family: Family,
    pub resolution: usize,
    pub exponents: Vec<f64>,
    pub records: Vec<SweepRecord>,
}

impl FamilySweep {
    pub fn run(family: Family, indices: &[u32], exponents: &[f64], resolution: usize) -> Result<Self> {
        if let Some(p) = exponents.iter().find(|p| p.is_nan() || **p < 1.0) {
            return Err(invalid(format!("L^p norms need p ≥ 1, got {p}")));
        }
        let mut records = Vec::with_capacity(indices.len());
        for &index in indices {
            let f = family.member(index)?;
            let field = GridField::sample(&f, resolution)?;
            let sup = sup_norm(&f, &field);
            let l1 = lp_norm_field(&f, &field, 1.0);
            let norms = exponents
                .iter()
                .map(|&p| {
                    if p.is_infinite() {
                        sup
                    } else if p == 1.0 {
                        l1
                    } else {
                        lp_norm_field(&f, &field, p)
                    }
                })
                .collect();
            records.push(SweepRecord {
                index,
                lambda: f.lambda(),
                norms,
                sup,
                l1,
            });
        }
        records.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));
        Ok(FamilySweep {
            family,
            resolution,
            exponents: exponents.to_vec(),
            records,
        })
    }

    /// Norm column for exponent p (sup and L¹ are always present).
    pub fn column(&self, p: f64) -> Result<Vec<f64>> {
        if let Some(k) = self.exponents.iter().position(|q| *q == p) {
            return Ok(self.records.iter().map(|r| r.norms[k]).collect());
        }
        if p.is_infinite() {
            Ok(self.records.iter().map(|r| r.sup).collect())
        } else if p == 1.0 {
            Ok(self.records.iter().map(|r| r.l1).collect())
        } else {
            Err(invalid(format!("the sweep has no L^{p} column")))
        }
    }

    pub fn lambdas(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.lambda).collect()
    }
}

/// Slope of log‖φ‖_p against log λ over the sweep.
pub fn scaling_fit(sweep: &FamilySweep, p: f64) -> Result<LinearFit> {
    let lam = sweep.lambdas();
    if lam.len() < 8 {
        return Err(invalid(format!("a scaling fit needs ≥ 8 indices, got {}", lam.len())));
    }
    let (lo, hi) = (lam[0], lam[lam.len() - 1]);
    if lo <= 0.0 || hi / lo < 8.0 {
        return Err(invalid(format!("the sweep spans a factor {:.2} in λ; at least 8 is needed", hi / lo.max(1e-300))));
    }
    power_fit(&lam, &sweep.column(p)?)
}

/// Smooth test function for the nodal identities, with its Laplace–Beltrami Δ = div grad.
#[derive(Clone)]
pub enum TestFunction {
    One,
    /// cos 2πx₁ with x₁ the first chart coordinate on the torus and the first
    /// ambient coordinate on the sphere
    Cos2PiX1,
    /// arbitrary function of the chart point; Δ by fourth-order differences
    Custom(Arc<dyn Fn(ChartPoint) -> f64 + Send + Sync>),
}

impl fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TestFunction::One => "One",
            TestFunction::Cos2PiX1 => "Cos2PiX1",
            TestFunction::Custom(_) => "Custom",
        })
    }
}

fn fd4_second(g: &dyn Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (-g(x + 2.0 * h) + 16.0 * g(x + h) - 30.0 * g(x) + 16.0 * g(x - h) - g(x - 2.0 * h)) / (12.0 * h * h)
}

fn fd4_first(g: &dyn Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    (-g(x + 2.0 * h) + 8.0 * g(x + h) - 8.0 * g(x - h) + g(x - 2.0 * h)) / (12.0 * h)
}

impl TestFunction {
    pub fn value(&self, surface: SurfaceKind, p: ChartPoint) -> f64 {
        match self {
            TestFunction::One => 1.0,
            TestFunction::Cos2PiX1 => (TAU * x1(surface, p)).cos(),
            TestFunction::Custom(g) => g(p),
        }
    }

    pub fn laplacian(&self, surface: SurfaceKind, p: ChartPoint) -> f64 {
        match self {
            TestFunction::One => 0.0,
            TestFunction::Cos2PiX1 => {
                let x = x1(surface, p);
                let (s, c) = (TAU * x).sin_cos();
                match surface {
                    SurfaceKind::Sphere => {
                        // Δ g(x₁) = (1 − x₁²) g'' − 2x₁ g' on the unit sphere
                        (1.0 - x * x) * (-TAU * TAU * c) - 2.0 * x * (-TAU * s)
                    }
                    _ => -TAU * TAU * c,
                }
            }
            TestFunction::Custom(g) => chart_laplacian(surface, &|q| g(q), p),
        }
    }
}

fn x1(surface: SurfaceKind, p: ChartPoint) -> f64 {
    match surface {
        SurfaceKind::Sphere => sphere_to_ambient(p)[0],
        SurfaceKind::Disc => p[0] * p[1].cos(),
        SurfaceKind::Torus => p[0],
    }
}

/// Laplace–Beltrami operator in chart coordinates by fourth-order differences.
pub fn chart_laplacian(surface: SurfaceKind, g: &dyn Fn(ChartPoint) -> f64, p: ChartPoint) -> f64 {
    let (y, x) = (p[0], p[1]);
    match surface {
        SurfaceKind::Torus => {
            let h = 1e-3;
            fd4_second(&|a| g([a, x]), y, h) + fd4_second(&|b| g([y, b]), x, h)
        }
        SurfaceKind::Sphere => {
            let h = 1e-3f64.min(0.25 * y.min(PI - y));
            let s = y.sin();
            fd4_second(&|a| g([a, x]), y, h)
                + y.cos() / s * fd4_first(&|a| g([a, x]), y, h)
                + fd4_second(&|b| g([y, b]), x, 1e-3) / (s * s)
        }
        SurfaceKind::Disc => {
            let h = 1e-3f64.min(0.25 * y);
            fd4_second(&|a| g([a, x]), y, h)
                + fd4_first(&|a| g([a, x]), y, h) / y
                + fd4_second(&|b| g([y, b]), x, 1e-3) / (y * y)
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct IdentityReport {
    pub lhs: f64,
    pub rhs: f64,
    /// |lhs − rhs| / scale
    pub residual: f64,
    /// size of the terms: max(|lhs|, |rhs|), or for the f-weighted identity
    /// ∫|φ|(|Δf| + λ²|f|), which stays positive when both sides cancel to zero
    pub scale: f64,
}

impl IdentityReport {
    fn new(lhs: f64, rhs: f64) -> Self {
        Self::with_scale(lhs, rhs, lhs.abs().max(rhs.abs()))
    }

    fn with_scale(lhs: f64, rhs: f64, scale: f64) -> Self {
        let residual = if scale == 0.0 { 0.0 } else { (lhs - rhs).abs() / scale };
        IdentityReport { lhs, rhs, residual, scale }
    }
}

fn gradient_norm(f: &EigenFn, p: ChartPoint) -> f64 {
    let g = f.gradient_wrapped(p);
    g[0].hypot(g[1])
}

/// Σ over polyline segments of ds · w(midpoint), midpoint rule.
fn curve_integral(curves: &NodalCurveSet, w: impl Fn(ChartPoint) -> f64) -> f64 {
    let terms: Vec<f64> = curves
        .segments()
        .map(|(a, b)| {
            let mid = [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])];
            let ds = metric_length(curves.surface, mid, [b[0] - a[0], b[1] - a[1]]);
            ds * w(wrap_chart(curves.surface, mid))
        })
        .collect();
    crate::quad::pairwise_sum(&terms)
}

/// ∫|φ|(Δ+λ²)f dV against 2∫_N |∇φ| f dS.
pub fn dong_identity(f: &EigenFn, test: &TestFunction, curves: &NodalCurveSet) -> Result<IdentityReport> {
    if f.surface == SurfaceKind::Disc {
        return Err(Error::Unsupported {
            surface: f.surface,
            op: "the nodal identity (the disc boundary adds a term)",
        });
    }
    if curves.source != f.label() || curves.surface != f.surface {
        return Err(invalid(format!(
            "curves were extracted from '{}', not '{}'",
            curves.source,
            f.label()
        )));
    }
    let field = GridField::sample(f, curves.resolution)?;
    let l2 = f.lambda_sq;
    let s = f.surface;
    let lhs = field.integrate_with(|p, v| v.abs() * (test.laplacian(s, p) + l2 * test.value(s, p)));
    let scale = field.integrate_with(|p, v| v.abs() * (test.laplacian(s, p).abs() + l2 * test.value(s, p).abs()));
    let rhs = 2.0 * curve_integral(curves, |p| gradient_norm(f, p) * test.value(s, p));
    Ok(IdentityReport::with_scale(lhs, rhs, scale))
}

/// λ²∫_{φ≥c} φ dV against ∫_{φ=c} |∇φ| dS. The superlevel integral is split as
/// ∫(φ−c)₊ + c·|{φ ≥ c}| so the discontinuous part uses corrected domain areas.
pub fn level_set_identity(f: &EigenFn, c: f64, resolution: usize) -> Result<IdentityReport> {
    if f.surface == SurfaceKind::Disc {
        return Err(Error::Unsupported {
            surface: f.surface,
            op: "the level-set identity",
        });
    }
    let field = GridField::sample(f, resolution)?;
    let max = field.values.iter().chain(field.poles.iter().flatten()).fold(f64::NEG_INFINITY, |a, v| a.max(*v));
    if c >= max {
        return Ok(IdentityReport::new(0.0, 0.0));
    }
    let shifted = field.shifted(c);
    let curves = extract_nodal(&shifted)?;
    let lambda = f.lambda();
    let sup = field.sup();
    // regular-value check on the extracted level set
    let mut worst = (f64::INFINITY, [0.0, 0.0]);
    for (a, b) in curves.segments() {
        let mid = wrap_chart(f.surface, [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])]);
        let g = gradient_norm(f, mid);
        if g < worst.0 {
            worst = (g, mid);
        }
    }
    if worst.0 < 0.02 * lambda * sup {
        let h = field.grid.spacing();
        let q = wrap_chart(f.surface, refine_critical(f, worst.1, 4.0 * h));
        return Err(Error::NearCritical {
            level: c,
            critical: f.value(q),
        });
    }
    let dec = count_domains(&shifted)?;
    let area: f64 = dec.areas.iter().zip(&dec.signs).filter(|(_, s)| **s > 0).map(|(a, _)| a).sum();
    let lhs = f.lambda_sq * (field.integrate(|v| (v - c).max(0.0)) + c * area);
    let rhs = curve_integral(&curves, |p| gradient_norm(f, p));
    Ok(IdentityReport::new(lhs, rhs))
}

#[derive(Debug, Clone, Serialize)]
pub struct L1Lower {
    /// ‖φ‖₁·λ^{(n−1)/4} per record, n = 2
    pub constants: Vec<f64>,
    pub min: f64,
    pub max: f64,
    /// fitted exponent of the constant itself
    pub drift: f64,
}

pub fn l1_lower_check(sweep: &FamilySweep) -> Result<L1Lower> {
    let lam = sweep.lambdas();
    let constants: Vec<f64> = sweep.records.iter().map(|r| r.l1 * r.lambda.powf(0.25)).collect();
    let min = constants.iter().copied().fold(f64::INFINITY, f64::min);
    let max = constants.iter().copied().fold(0.0, f64::max);
    let drift = power_fit(&lam, &constants)?.slope;
    Ok(L1Lower { constants, min, max, drift })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct HolderCheck {
    pub theta: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// ‖φ‖_q ≤ ‖φ‖_p^{1−θ}‖φ‖_r^θ with 1/q = (1−θ)/p + θ/r, for p < q < r.
pub fn holder_check(f: &EigenFn, p: f64, q: f64, r: f64, resolution: usize) -> Result<HolderCheck> {
    if !(1.0 <= p && p < q && q < r) {
        return Err(invalid("Hölder interpolation needs 1 ≤ p < q < r"));
    }
    let field = GridField::sample(f, resolution)?;
    let inv = |x: f64| if x.is_infinite() { 0.0 } else { 1.0 / x };
    let theta = (inv(p) - inv(q)) / (inv(p) - inv(r));
    let (np, nq, nr) = (lp_norm_field(f, &field, p), lp_norm_field(f, &field, q), lp_norm_field(f, &field, r));
    let rhs = np.powf(1.0 - theta) * nr.powf(theta);
    Ok(HolderCheck {
        theta,
        lhs: nq,
        rhs,
        holds: nq <= rhs * (1.0 + 1e-8),
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SoggeEnvelope {
    pub p: f64,
    pub norm: f64,
    pub bound: f64,
}

/// ‖φ‖_p against the loose envelope 10·λ^{δ(p)} for p ∈ {4, 6, 8, ∞}.
pub fn sogge_envelope(f: &EigenFn, resolution: usize) -> Result<Vec<SoggeEnvelope>> {
    let field = GridField::sample(f, resolution)?;
    let lambda = f.lambda().max(1.0);
    [4.0, 6.0, 8.0, f64::INFINITY]
        .into_iter()
        .map(|p| {
            Ok(SoggeEnvelope {
                p,
                norm: lp_norm_field(f, &field, p),
                bound: 10.0 * lambda.powf(sogge_delta(p, 2)?),
            })
        })
        .collect()
}

/// Nodal length divided by λ‖φ‖₁².
pub fn hezari_sogge_ratio(curves: &NodalCurveSet, l1: f64) -> f64 {
    curves.total_length / (curves.lambda * l1 * l1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single(m: ModeIndex) -> EigenFn {
        EigenFn::single(m)
    }

    #[test]
    fn constant_mode_norms() {
        let f = single(ModeIndex::sphere(0, 0).unwrap());
        let a = 4.0 * PI;
        for p in [1.0, 2.0, 3.5, f64::INFINITY] {
            let want = a.powf(if p.is_infinite() { 0.0 } else { 1.0 / p }) / a.sqrt();
            assert!((lp_norm(&f, p, 64).unwrap() - want).abs() < 1e-10);
        }
        assert!(lp_norm(&f, 0.5, 64).is_err());
    }

    #[test]
    fn torus_l1() {
        let f = single(ModeIndex::torus([2, 1], Parity::Sin).unwrap());
        let want = 2f64.sqrt() * 2.0 / PI;
        assert!((lp_norm(&f, 1.0, 256).unwrap() - want).abs() < 1e-4);
    }

    #[test]
    fn zonal_sup_exact() {
        for n in [5u32, 16, 40] {
            let f = single(ModeIndex::sphere(n, 0).unwrap());
            let want = ((2 * n + 1) as f64 / (4.0 * PI)).sqrt();
            assert!((lp_norm(&f, f64::INFINITY, 128).unwrap() - want).abs() < 1e-12);
        }
    }

    #[test]
    fn polished_sup_beats_grid() {
        let f = single(ModeIndex::torus([3, 5], Parity::Cos).unwrap());
        let s = lp_norm(&f, f64::INFINITY, 32).unwrap();
        assert!((s - 2f64.sqrt()).abs() < 1e-9, "{s}");
    }

    #[test]
    fn sogge_delta_values() {
        assert!((sogge_delta(6.0, 2).unwrap() - 1.0 / 6.0).abs() < 1e-15);
        assert!((sogge_delta(f64::INFINITY, 2).unwrap() - 0.5).abs() < 1e-15);
        for n in 2..6 {
            assert_eq!(sogge_delta(2.0, n).unwrap(), 0.0);
            let pc = 2.0 * (n as f64 + 1.0) / (n as f64 - 1.0);
            let (a, b) = (sogge_delta(pc - 1e-9, n).unwrap(), sogge_delta(pc, n).unwrap());
            assert!((a - b).abs() < 1e-8);
        }
        assert!(sogge_delta(1.5, 2).is_err());
    }

    #[test]
    fn highest_weight_l2_ratio() {
        // quadrature of |x₁+ix₂|^{2k} = sin^{2k} φ against Γ(k+1)/Γ(k+3/2)
        let g = crate::geom::quadrature_grid(SurfaceKind::Sphere, 128).unwrap();
        let norm = |k: i32| -> f64 {
            (0..g.n_rows()).map(|i| g.row_weights[i] * g.rows[i].sin().powi(2 * k)).sum::<f64>()
                * g.col_weights.iter().sum::<f64>()
        };
        for k in [1, 5, 12, 30] {
            let ratio = norm(k + 1) / norm(k);
            let want = (k as f64 + 1.0) / (k as f64 + 1.5);
            assert!((ratio - want).abs() < 1e-6, "{k}: {ratio}");
        }
    }

    #[test]
    fn dong_torus_closed_form() {
        for (a, b) in [(1i32, 0i32), (2, 1), (3, 4)] {
            let f = single(ModeIndex::torus([a, b], Parity::Sin).unwrap());
            let curves = extract_nodal(&GridField::sample(&f, 512).unwrap()).unwrap();
            let r = dong_identity(&f, &TestFunction::One, &curves).unwrap();
            // |∇φ| = 2π√2|k| on N, length 2|k|, normalization √2
            let want = 8.0 * PI * (a * a + b * b) as f64 * 2f64.sqrt();
            assert!((r.rhs / want - 1.0).abs() < 0.005, "{a},{b}: {} vs {want}", r.rhs);
            assert!(r.residual < 0.005);
        }
    }

    #[test]
    fn dong_sphere_y10() {
        let f = single(ModeIndex::sphere(1, 0).unwrap());
        let curves = extract_nodal(&GridField::sample(&f, 512).unwrap()).unwrap();
        let r = dong_identity(&f, &TestFunction::One, &curves).unwrap();
        // 2 · 2π · √(3/4π)
        let want = 2.0 * (3.0 * PI).sqrt();
        assert!((r.lhs / want - 1.0).abs() < 0.005 && r.residual < 0.005, "{r:?}");
    }

    #[test]
    fn dong_with_trig_and_custom_test_functions() {
        let f = single(ModeIndex::torus([2, 3], Parity::Cos).unwrap());
        let curves = extract_nodal(&GridField::sample(&f, 512).unwrap()).unwrap();
        let r = dong_identity(&f, &TestFunction::Cos2PiX1, &curves).unwrap();
        // translation invariance makes both sides vanish for every torus mode
        assert!(r.lhs.abs() < 1e-9 * r.scale && r.residual < 0.01, "{r:?}");
        let pairing = TestFunction::Custom(Arc::new(|p: ChartPoint| (2.0 * TAU * (2.0 * p[0] + 3.0 * p[1])).cos()));
        let q = dong_identity(&f, &pairing, &curves).unwrap();
        assert!(q.lhs.abs() > 0.1 * q.scale && q.residual < 0.01, "{q:?}");
        let custom = TestFunction::Custom(Arc::new(|p: ChartPoint| (TAU * p[0]).cos()));
        let c = dong_identity(&f, &custom, &curves).unwrap();
        assert!((c.lhs - r.lhs).abs() < 1e-6 * r.lhs.abs().max(1.0));
        let z = single(ModeIndex::sphere(6, 0).unwrap());
        let curves = extract_nodal(&GridField::sample(&z, 512).unwrap()).unwrap();
        let r = dong_identity(&z, &TestFunction::Cos2PiX1, &curves).unwrap();
        assert!(r.residual < 0.01, "{r:?}");
        let other = single(ModeIndex::sphere(6, 1).unwrap());
        assert!(dong_identity(&other, &TestFunction::One, &curves).is_err());
    }

    #[test]
    fn level_set_sine() {
        let f = single(ModeIndex::torus([1, 0], Parity::Sin).unwrap());
        let r = level_set_identity(&f, 0.5 * 2f64.sqrt(), 512).unwrap();
        let want = 2.0 * PI * 6f64.sqrt();
        assert!((r.lhs / want - 1.0).abs() < 0.005 && (r.rhs / want - 1.0).abs() < 0.005, "{r:?}");
        let top = level_set_identity(&f, 2.0, 64).unwrap();
        assert_eq!((top.lhs, top.rhs), (0.0, 0.0));
        assert!(matches!(level_set_identity(&f, 1.414, 256), Err(Error::NearCritical { .. })));
    }

    #[test]
    fn holder_and_envelope() {
        let f = single(ModeIndex::sphere(9, 4).unwrap());
        let h = holder_check(&f, 1.0, 3.0, 8.0, 128).unwrap();
        assert!(h.holds);
        assert!(sogge_envelope(&f, 128).unwrap().iter().all(|e| e.norm <= e.bound));
    }

    #[test]
    fn family_parsing() {
        assert_eq!("torus-ray(1,-2)".parse::<Family>().unwrap(), Family::TorusRay([1, -2]));
        assert_eq!("gaussian-beam".parse::<Family>().unwrap(), Family::HighestWeight);
        assert!("nope".parse::<Family>().is_err());
    }
}
