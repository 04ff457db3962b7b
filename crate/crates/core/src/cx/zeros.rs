use std::f64::consts::{PI, TAU};

use num_complex::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::CxEigenFn;
use crate::error::{invalid, Error, Result};
use crate::geom::{CxChart, Frame, GeodesicSegment, StripPoint, SurfaceKind};
use crate::quad::adaptive_gl;
use crate::spectra::{ModeIndex, Parity};

const MAX_NUDGES: u32 = 5;
const MAX_DEPTH: u32 = 40;
const RESIDUAL_MAX: f64 = 0.1;
const BOUNDARY_GAP: f64 = 1e-4;

/// Rectangle [t₀,t₁]×[τ₀,τ₁] in the strip |τ| ≤ ε.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StripRect {
    pub t0: f64,
    pub t1: f64,
    pub tau0: f64,
    pub tau1: f64,
}

impl StripRect {
    pub fn new(t0: f64, t1: f64, tau0: f64, tau1: f64, eps: f64) -> Result<Self> {
        if !(t1 > t0 && tau1 > tau0) || ![t0, t1, tau0, tau1].iter().all(|x| x.is_finite()) {
            return Err(invalid("strip rectangle needs t₀ < t₁ and τ₀ < τ₁"));
        }
        if tau0 < -eps || tau1 > eps {
            return Err(invalid(format!("τ-range [{tau0}, {tau1}] leaves the strip |τ| ≤ {eps}")));
        }
        Ok(StripRect { t0, t1, tau0, tau1 })
    }

    pub fn diameter(&self) -> f64 {
        (self.t1 - self.t0).hypot(self.tau1 - self.tau0)
    }

    fn center(&self) -> C {
        C::new(0.5 * (self.t0 + self.t1), 0.5 * (self.tau0 + self.tau1))
    }

    fn contains(&self, w: C, slack: f64) -> bool {
        w.re >= self.t0 - slack && w.re <= self.t1 + slack && w.im >= self.tau0 - slack && w.im <= self.tau1 + slack
    }

    /// Counter-clockwise sides as (start, end).
    fn sides(&self) -> [(C, C); 4] {
        let a = C::new(self.t0, self.tau0);
        let b = C::new(self.t1, self.tau0);
        let c = C::new(self.t1, self.tau1);
        let d = C::new(self.t0, self.tau1);
        [(a, b), (b, c), (c, d), (d, a)]
    }

    fn shifted(&self, s: f64, eps: f64) -> Self {
        let ds = if self.tau0 - s >= -eps {
            -s
        } else if self.tau1 + s <= eps {
            s
        } else {
            0.0
        };
        StripRect { t0: self.t0 - s, t1: self.t1 - s, tau0: self.tau0 + ds, tau1: self.tau1 + ds }
    }
}

/// g(w) = φ^C(γ^C(w)) together with g′(w) = ∇φ^C · (γ^C)′(w).
pub struct StripFn<'a> {
    f: &'a CxEigenFn,
    seg: &'a GeodesicSegment,
}

impl<'a> StripFn<'a> {
    pub fn new(f: &'a CxEigenFn, seg: &'a GeodesicSegment) -> Result<Self> {
        if seg.surface == SurfaceKind::Disc {
            return Err(Error::Unsupported { surface: SurfaceKind::Disc, op: "complexified geodesics" });
        }
        if seg.surface != f.surface {
            return Err(invalid("geodesic and eigenfunction live on different surfaces"));
        }
        Ok(StripFn { f, seg })
    }

    pub fn lambda(&self) -> f64 {
        self.f.lambda
    }

    pub fn eval(&self, w: C) -> (C, C) {
        let z = self.seg.complexified(StripPoint { t: w.re, tau: w.im }).expect("torus or sphere frame");
        let (v, grad) = self.f.value_grad(&z).expect("surfaces checked at construction");
        let vel = self.seg.complexified_velocity(w);
        let d = match vel {
            CxChart::Torus(u) => grad[0] * u[0] + grad[1] * u[1],
            CxChart::Sphere(u) => grad[0] * u[0] + grad[1] * u[1] + grad[2] * u[2],
        };
        (v, d)
    }

    fn value(&self, w: C) -> C {
        self.eval(w).0
    }

    /// Panel count for a side of length `len`, about one panel per wavelength/2π.
    fn panels(&self, len: f64) -> usize {
        (len * self.lambda().max(1.0)).ceil() as usize + 1
    }
}

/// (1/2πi)∮ (w − c)^j g′/g dw over the boundary of `rect`.
fn contour_moment(g: &StripFn, rect: &StripRect, c: C, j: u32) -> Option<C> {
    let mut total = C::new(0.0, 0.0);
    for (a, b) in rect.sides() {
        let n = g.panels((b - a).norm());
        let integrand = |s: f64| {
            let w = a + (b - a) * s;
            let (v, d) = g.eval(w);
            (w - c).powu(j) * d / v * (b - a)
        };
        for k in 0..n {
            let (s0, s1) = (k as f64 / n as f64, (k + 1) as f64 / n as f64);
            let (v, _) = adaptive_gl(&integrand, s0, s1, 1e-9, 30).ok()?;
            total += v;
        }
    }
    let v = total / C::new(0.0, TAU);
    (v.re.is_finite() && v.im.is_finite()).then_some(v)
}

/// False when a zero of g lies within `gap` of the polyline a → b.
fn segment_clear(g: &StripFn, a: C, b: C, gap: f64) -> bool {
    let len = (b - a).norm();
    let n = ((4.0 * len * g.lambda().max(1.0)).ceil() as usize).max(32);
    let h = len / n as f64;
    let dir = (b - a) / len;
    for i in 0..=n {
        let w = a + (b - a) * (i as f64 / n as f64);
        let (v, d) = g.eval(w);
        // |g| spans e^{±λτ} across the strip, so the test is local: a Newton step
        // from each sample that lands near the side marks a boundary zero
        if !(v.norm() > 0.0 && v.norm().is_finite()) {
            return false;
        }
        let step = v / d;
        if !(step.norm() < 2.0 * h) {
            continue;
        }
        let mut z = w - step;
        for _ in 0..4 {
            let (v, d) = g.eval(z);
            let s = v / d;
            if !(s.re.is_finite() && s.im.is_finite()) {
                break;
            }
            z -= s;
        }
        let rel = (z - a) / dir;
        if rel.im.abs() < gap && rel.re > -gap && rel.re < len + gap {
            return false;
        }
    }
    true
}

fn boundary_clear(g: &StripFn, rect: &StripRect, gap: f64) -> bool {
    rect.sides().iter().all(|&(a, b)| segment_clear(g, a, b, gap))
}

/// Argument-principle count without nudging; `None` when the boundary is not clear
/// or the integral is not close to an integer.
fn count_in(g: &StripFn, rect: &StripRect, gap: f64) -> Option<(u32, f64, f64)> {
    if !boundary_clear(g, rect, gap) {
        return None;
    }
    let v = contour_moment(g, rect, rect.center(), 0)?;
    let n = v.re.round();
    let residual = (v.re - n).abs().max(v.im.abs());
    (residual <= RESIDUAL_MAX && n >= 0.0).then_some((n as u32, v.re, residual))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroCount {
    pub count: u32,
    pub raw: f64,
    pub residual: f64,
    /// The rectangle actually integrated over, after any nudges.
    pub rect: StripRect,
    pub nudges: u32,
}

/// Number of zeros of g in `rect` by the argument principle. The boundary is shifted
/// by 10⁻³·diameter (up to five times) when a zero lies on it.
pub fn count_zeros_rect(f: &CxEigenFn, seg: &GeodesicSegment, rect: StripRect, eps: f64) -> Result<ZeroCount> {
    let g = StripFn::new(f, seg)?;
    count_with(&g, rect, eps)
}

fn count_with(g: &StripFn, rect: StripRect, eps: f64) -> Result<ZeroCount> {
    StripRect::new(rect.t0, rect.t1, rect.tau0, rect.tau1, eps)?;
    let diam = rect.diameter();
    for nudge in 0..=MAX_NUDGES {
        let r = rect.shifted(1e-3 * diam * nudge as f64, eps);
        if let Some((count, raw, residual)) = count_in(g, &r, BOUNDARY_GAP * diam) {
            return Ok(ZeroCount { count, raw, residual, rect: r, nudges: nudge });
        }
    }
    Err(Error::Numerical(format!("zeros on the boundary of {rect:?} after {MAX_NUDGES} nudges")))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroSet {
    pub points: Vec<(StripPoint, u32)>,
    pub total: u32,
    /// Count from the enclosing rectangle.
    pub count: u32,
    pub rect: StripRect,
    /// Subdivision hit the depth limit or could not separate zeros.
    pub partial: bool,
}

impl ZeroSet {
    pub fn max_abs_tau(&self) -> f64 {
        self.points.iter().map(|(p, _)| p.tau.abs()).fold(0.0, f64::max)
    }
}

/// Zeros in `rect` by recursive bisection on argument-principle counts, located by
/// contour moments and polished by Newton's method; multiple zeros are recognised
/// by a vanishing moment variance.
pub fn zero_locations(f: &CxEigenFn, seg: &GeodesicSegment, rect: StripRect, eps: f64) -> Result<ZeroSet> {
    let g = StripFn::new(f, seg)?;
    let top = count_with(&g, rect, eps)?;
    let gap0 = BOUNDARY_GAP * top.rect.diameter();
    let mut points = Vec::new();
    let mut partial = false;
    let mut stack = vec![(top.rect, top.count, 0u32)];
    while let Some((cell, n, depth)) = stack.pop() {
        if n == 0 {
            continue;
        }
        if depth > MAX_DEPTH {
            partial = true;
            points.push((cell.center(), n));
            continue;
        }
        let diam = cell.diameter();
        let c = cell.center();
        if let Some(z) = isolate(&g, &cell, c, n) {
            points.push((z, n));
            continue;
        }
        match split(&g, &cell, n, gap0.min(BOUNDARY_GAP * diam)) {
            Some(((a, na), (b, nb))) => {
                stack.push((a, na, depth + 1));
                stack.push((b, nb, depth + 1));
            }
            None => {
                partial = true;
                points.push((c, n));
            }
        }
    }
    points.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));
    let total = points.iter().map(|p| p.1).sum();
    Ok(ZeroSet {
        points: points.into_iter().map(|(w, m)| (StripPoint { t: w.re, tau: w.im }, m)).collect(),
        total,
        count: top.count,
        rect: top.rect,
        partial: partial || total != top.count,
    })
}

/// The single (possibly multiple) zero of a cell holding `n` zeros, if they coincide.
fn isolate(g: &StripFn, cell: &StripRect, c: C, n: u32) -> Option<C> {
    let diam = cell.diameter();
    let m1 = contour_moment(g, cell, c, 1)?;
    let mean = c + m1 / n as f64;
    if n > 1 {
        let m2 = contour_moment(g, cell, c, 2)?;
        let var = m2 / n as f64 - (m1 / n as f64).powi(2);
        if var.norm() > (1e-5 * diam).powi(2) {
            return None;
        }
    }
    let z = polish(g, mean, n as f64);
    if cell.contains(z, 1e-9 * diam) {
        Some(z)
    } else if cell.contains(mean, 0.0) {
        Some(mean)
    } else {
        None
    }
}

/// Newton (modified by the multiplicity) while |g| decreases.
fn polish(g: &StripFn, mut z: C, mult: f64) -> C {
    let (mut v, mut d) = g.eval(z);
    for _ in 0..40 {
        let step = v / d * mult;
        if !(step.re.is_finite() && step.im.is_finite()) {
            break;
        }
        let trial = z - step;
        let (tv, td) = g.eval(trial);
        if !(tv.norm() < v.norm()) {
            break;
        }
        z = trial;
        v = tv;
        d = td;
        if step.norm() < 1e-15 * (1.0 + z.norm()) {
            break;
        }
    }
    z
}

type Half = (StripRect, u32);

fn split(g: &StripFn, cell: &StripRect, n: u32, gap: f64) -> Option<(Half, Half)> {
    const FRACTIONS: [f64; 9] = [0.5, 0.46, 0.54, 0.42, 0.58, 0.37, 0.63, 0.31, 0.69];
    let along_t = cell.t1 - cell.t0 >= cell.tau1 - cell.tau0;
    for frac in FRACTIONS {
        let (a, b) = if along_t {
            let m = cell.t0 + frac * (cell.t1 - cell.t0);
            (StripRect { t1: m, ..*cell }, StripRect { t0: m, ..*cell })
        } else {
            let m = cell.tau0 + frac * (cell.tau1 - cell.tau0);
            (StripRect { tau1: m, ..*cell }, StripRect { tau0: m, ..*cell })
        };
        let (p, q) = if along_t {
            (C::new(a.t1, cell.tau0), C::new(a.t1, cell.tau1))
        } else {
            (C::new(cell.t0, a.tau1), C::new(cell.t1, a.tau1))
        };
        if !segment_clear(g, p, q, gap) {
            continue;
        }
        let (Some(na), Some(nb)) = (cell_count(g, &a), cell_count(g, &b)) else {
            continue;
        };
        if na + nb == n {
            return Some(((a, na), (b, nb)));
        }
    }
    None
}

fn cell_count(g: &StripFn, r: &StripRect) -> Option<u32> {
    let v = contour_moment(g, r, r.center(), 0)?;
    let n = v.re.round();
    ((v.re - n).abs().max(v.im.abs()) <= RESIDUAL_MAX && n >= 0.0).then_some(n as u32)
}

/// Closed-form number of zeros of a single torus mode along a torus geodesic inside
/// `rect`: trig(2π(⟨k,x₀⟩ + w⟨k,ξ₀⟩)) vanishes only on the real axis, at spacing
/// 1/(2|⟨k,ξ₀⟩|). `None` for the constant mode or a degenerate pairing.
pub fn torus_zero_count(mode: ModeIndex, seg: &GeodesicSegment, rect: &StripRect) -> Option<u64> {
    let (ModeIndex::Torus { k, parity }, Frame::Torus { dir }) = (mode, seg.frame) else {
        return None;
    };
    let (k1, k2) = (k[0] as f64, k[1] as f64);
    let a = k1 * seg.base[0] + k2 * seg.base[1];
    let b = k1 * dir[0] + k2 * dir[1];
    if b.abs() < 1e-12 {
        return None;
    }
    if !(rect.tau0 < 0.0 && rect.tau1 > 0.0) {
        return Some(0);
    }
    let off = match parity {
        Parity::Sin => 0.0,
        Parity::Cos => 0.25,
    };
    let (s0, s1) = {
        let (x, y) = (a + b * rect.t0 - off, a + b * rect.t1 - off);
        (x.min(y), x.max(y))
    };
    // #{n : s0 < n/2 < s1}
    Some(((2.0 * s1).ceil() - (2.0 * s0).floor() - 1.0).max(0.0) as u64)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoincareLelong {
    /// Σ over the grid of the five-point Laplacian of (1/4π) log|g|², times the cell area.
    pub laplacian_mass: f64,
    pub count: u32,
    pub relative_error: f64,
    pub grid: [usize; 2],
}

/// Zero count recovered as the mass of the discrete Laplacian of log|g|², the
/// distributional identity (1/4π)Δ log|g|² = Σ δ_zeros.
pub fn poincare_lelong_count(
    f: &CxEigenFn,
    seg: &GeodesicSegment,
    rect: StripRect,
    eps: f64,
) -> Result<PoincareLelong> {
    let g = StripFn::new(f, seg)?;
    let count = count_with(&g, rect, eps)?;
    let r = count.rect;
    let h = 0.1 / g.lambda().max(1.0);
    let mut nt = (((r.t1 - r.t0) / h).ceil() as usize).max(16);
    let mut ntau = (((r.tau1 - r.tau0) / h).ceil() as usize).max(16);
    // odd node counts keep the centre lines off the grid
    nt += 1 - nt % 2;
    ntau += 1 - ntau % 2;
    let (ht, hs) = ((r.t1 - r.t0) / nt as f64, (r.tau1 - r.tau0) / ntau as f64);
    let u: Vec<Vec<f64>> = (0..=ntau)
        .into_par_iter()
        .map(|j| {
            (0..=nt)
                .map(|i| {
                    let w = C::new(r.t0 + i as f64 * ht, r.tau0 + j as f64 * hs);
                    g.value(w).norm_sqr().ln() / (4.0 * PI)
                })
                .collect()
        })
        .collect();
    let mut mass = 0.0;
    for j in 1..ntau {
        for i in 1..nt {
            let lap = (u[j][i + 1] - 2.0 * u[j][i] + u[j][i - 1]) / (ht * ht)
                + (u[j + 1][i] - 2.0 * u[j][i] + u[j - 1][i]) / (hs * hs);
            mass += lap * ht * hs;
        }
    }
    if !mass.is_finite() {
        return Err(Error::Numerical("log|g|² is singular on the Laplacian grid".into()));
    }
    let c = count.count as f64;
    let relative_error = if c > 0.0 { (mass - c).abs() / c } else { mass.abs() };
    Ok(PoincareLelong { laplacian_mass: mass, count: count.count, relative_error, grid: [nt, ntau] })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CauchyRiemann {
    pub samples: usize,
    pub max_relative_error: f64,
}

/// Analytic g′ against sixth-order centred differences along both t and τ
/// (holomorphy forces d/dt = −i d/dτ = g′).
pub fn cauchy_riemann_check(
    f: &CxEigenFn,
    seg: &GeodesicSegment,
    eps: f64,
    samples: usize,
    seed: u64,
) -> Result<CauchyRiemann> {
    let g = StripFn::new(f, seg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = 0.02 / g.lambda().max(1.0);
    let stencil = [(1.0, 45.0), (2.0, -9.0), (3.0, 1.0)];
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let w = C::new(rng.gen_range(0.0..seg.length), rng.gen_range(-0.9 * eps..0.9 * eps));
        let (v, d) = g.eval(w);
        let fd = |e: C| {
            stencil.iter().map(|&(k, c)| (g.value(w + e * (k * h)) - g.value(w - e * (k * h))) * c).sum::<C>()
                / (60.0 * h)
                / e
        };
        let scale = d.norm().max(g.lambda().max(1.0) * v.norm());
        let err = (fd(C::new(1.0, 0.0)) - d).norm().max((fd(C::new(0.0, 1.0)) - d).norm()) / scale;
        worst = worst.max(err);
    }
    Ok(CauchyRiemann { samples, max_relative_error: worst })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntersectionDensity {
    pub k: [i32; 2],
    pub lambda: f64,
    pub zeros: u32,
    /// Fraction of zeros with |τ| ≤ δ.
    pub near_real_mass: f64,
    pub max_abs_tau: f64,
    /// (1/λ)·(zeros per unit t).
    pub density: f64,
    /// |⟨k₀/|k₀|, ξ₀⟩|/π.
    pub predicted: f64,
    /// 1/π, the equidistributed (ergodic-case) density.
    pub ergodic: f64,
    pub relative_error: f64,
}

/// Complex zeros of the ray member k = M·k₀ along a torus geodesic, normalised by λ.
#[allow(clippy::too_many_arguments)]
pub fn intersection_density(
    k0: [i32; 2],
    multiple: i32,
    parity: Parity,
    seg: &GeodesicSegment,
    t_len: f64,
    eps: f64,
    delta: f64,
) -> Result<IntersectionDensity> {
    let Frame::Torus { dir } = seg.frame else {
        return Err(Error::Unsupported { surface: seg.surface, op: "ray intersection densities" });
    };
    let k = [k0[0] * multiple, k0[1] * multiple];
    let f = CxEigenFn::single(ModeIndex::torus(k, parity)?)?;
    let rect = StripRect::new(0.0, t_len, -eps, eps, eps)?;
    let set = zero_locations(&f, seg, rect, eps)?;
    if set.partial {
        return Err(Error::Numerical("zero subdivision did not resolve every zero".into()));
    }
    let near: u32 = set.points.iter().filter(|(p, _)| p.tau.abs() <= delta).map(|p| p.1).sum();
    let lambda = f.lambda;
    let density = set.total as f64 / (lambda * t_len);
    let kn = (k0[0] as f64).hypot(k0[1] as f64);
    let predicted = ((k0[0] as f64 * dir[0] + k0[1] as f64 * dir[1]) / kn).abs() / PI;
    let relative_error = if predicted > 0.0 { (density - predicted).abs() / predicted } else { density };
    Ok(IntersectionDensity {
        k,
        lambda,
        zeros: set.total,
        near_real_mass: if set.total > 0 { near as f64 / set.total as f64 } else { 1.0 },
        max_abs_tau: set.max_abs_tau(),
        density,
        predicted,
        ergodic: 1.0 / PI,
        relative_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn torus_mode(k: [i32; 2], p: Parity) -> CxEigenFn {
        CxEigenFn::single(ModeIndex::torus(k, p).unwrap()).unwrap()
    }

    #[test]
    fn four_real_zeros_at_quarter_spacing() {
        let f = torus_mode([2, 0], Parity::Sin);
        let seg = GeodesicSegment::torus([0.0, 0.3], [1.0, 0.0], 1.0).unwrap();
        let rect = StripRect::new(0.0, 1.0, -0.1, 0.1, 0.4).unwrap();
        let c = count_zeros_rect(&f, &seg, rect, 0.4).unwrap();
        assert_eq!(c.count, 4);
        assert!(c.nudges >= 1, "zeros at t = 0 and t = 1 sit on the boundary");
        let set = zero_locations(&f, &seg, rect, 0.4).unwrap();
        assert!(!set.partial);
        assert_eq!(set.total, 4);
        for (i, (p, m)) in set.points.iter().enumerate() {
            assert_eq!(*m, 1);
            assert!(p.tau.abs() < 1e-10);
            assert!((p.t - 0.25 * i as f64).abs() < 1e-10, "{p:?}");
        }
    }

    #[test]
    fn cos_zero_pattern() {
        let f = torus_mode([1, 2], Parity::Cos);
        let seg = GeodesicSegment::torus([0.13, 0.71], [0.6, 0.8], 3.0).unwrap();
        let rect = StripRect::new(0.2, 2.9, -0.2, 0.3, 0.4).unwrap();
        let set = zero_locations(&f, &seg, rect, 0.4).unwrap();
        let b = TAU * (0.6 + 1.6);
        let a = TAU * (0.13 + 2.0 * 0.71);
        for (p, _) in &set.points {
            let n = ((p.t * b + a - PI / 2.0) / PI).round();
            assert!((p.t - (PI / 2.0 + PI * n - a) / b).abs() < 1e-10);
            assert!(p.tau.abs() < 1e-10);
        }
        let want = torus_zero_count(ModeIndex::torus([1, 2], Parity::Cos).unwrap(), &seg, &rect).unwrap();
        assert_eq!(set.total as u64, want);
    }

    #[test]
    fn highest_weight_equator_has_no_zeros() {
        let f = CxEigenFn::highest_weight(12).unwrap();
        let seg = GeodesicSegment::equator();
        let rect = StripRect::new(0.3, 5.0, -0.35, 0.2, 0.4).unwrap();
        assert_eq!(count_zeros_rect(&f, &seg, rect, 0.4).unwrap().count, 0);
    }

    #[test]
    fn meridian_pole_crossing_has_multiplicity_n() {
        let n = 6;
        let f = CxEigenFn::single(ModeIndex::sphere(n, n as i32).unwrap()).unwrap();
        let seg = GeodesicSegment::meridian(0.0).unwrap();
        let rect = StripRect::new(PI / 2.0 - 0.2, PI / 2.0 + 0.3, -0.1, 0.15, 0.4).unwrap();
        assert_eq!(count_zeros_rect(&f, &seg, rect, 0.4).unwrap().count, n);
        let set = zero_locations(&f, &seg, rect, 0.4).unwrap();
        assert!(!set.partial);
        assert_eq!(set.points.len(), 1);
        let (p, m) = set.points[0];
        assert_eq!(m, n);
        assert!((p.t - PI / 2.0).abs() < 1e-6 && p.tau.abs() < 1e-6, "{p:?}");
    }

    #[test]
    fn empty_rect_gives_empty_set() {
        let f = torus_mode([3, 1], Parity::Sin);
        let seg = GeodesicSegment::torus([0.0, 0.0], [0.0, 1.0], 1.0).unwrap();
        // zeros of sin(2π t) at t ∈ ½ℤ; [0.1, 0.4] holds none
        let rect = StripRect::new(0.1, 0.4, -0.3, 0.3, 0.4).unwrap();
        let set = zero_locations(&f, &seg, rect, 0.4).unwrap();
        assert!(set.points.is_empty() && set.total == 0 && set.count == 0);
    }

    #[test]
    fn poincare_lelong_mass_matches_count() {
        let f = torus_mode([2, 1], Parity::Sin);
        let seg = GeodesicSegment::torus([0.05, 0.2], [1.0, 0.0], 1.0).unwrap();
        let rect = StripRect::new(0.03, 0.97, -0.15, 0.1, 0.4).unwrap();
        let pl = poincare_lelong_count(&f, &seg, rect, 0.4).unwrap();
        assert_eq!(pl.count, 4);
        assert!(pl.relative_error < 0.02, "{pl:?}");
    }

    #[test]
    fn cauchy_riemann_holds() {
        let f = torus_mode([3, -2], Parity::Cos);
        let seg = GeodesicSegment::torus([0.2, 0.1], [0.3, 0.9], 2.0).unwrap();
        let cr = cauchy_riemann_check(&f, &seg, 0.4, 100, 1).unwrap();
        assert!(cr.max_relative_error < 1e-8, "{cr:?}");
        let f = CxEigenFn::single(ModeIndex::sphere(9, -4).unwrap()).unwrap();
        let seg = GeodesicSegment::great_circle([1.0, 0.5], [0.2, -0.3, 0.9]).unwrap();
        let cr = cauchy_riemann_check(&f, &seg, 0.4, 100, 2).unwrap();
        assert!(cr.max_relative_error < 1e-8, "{cr:?}");
    }

    #[test]
    fn ray_density() {
        let seg = GeodesicSegment::torus([0.1, 0.2], [1.0, 0.0], 1.0).unwrap();
        let d = intersection_density([1, 0], 16, Parity::Sin, &seg, 1.0, 0.4, 1e-8).unwrap();
        assert_eq!(d.zeros, 32);
        assert!((d.density - 1.0 / PI).abs() < 1e-12);
        assert_eq!(d.near_real_mass, 1.0);
        let seg = GeodesicSegment::torus([0.1, 0.2], [0.0, 1.0], 1.0).unwrap();
        let d = intersection_density([1, 0], 16, Parity::Sin, &seg, 1.0, 0.4, 1e-8).unwrap();
        assert_eq!(d.zeros, 0);
        assert_eq!(d.predicted, 0.0);
    }
}
