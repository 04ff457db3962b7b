use std::f64::consts::{PI, SQRT_2, TAU};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geom::{canonical, ChartPoint, SurfaceKind};
use crate::special::{bessel_j_with_deriv, bessel_zeros, qbar, validate_interlacing};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Cos,
    Sin,
}

impl Parity {
    pub fn name(self) -> &'static str {
        match self {
            Parity::Cos => "cos",
            Parity::Sin => "sin",
        }
    }
}

impl std::str::FromStr for Parity {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cos" => Ok(Parity::Cos),
            "sin" => Ok(Parity::Sin),
            _ => Err(invalid(format!("unknown parity `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Bc {
    Dirichlet,
    Neumann,
}

impl Bc {
    pub fn name(self) -> &'static str {
        match self {
            Bc::Dirichlet => "dirichlet",
            Bc::Neumann => "neumann",
        }
    }
}

impl std::str::FromStr for Bc {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dirichlet" => Ok(Bc::Dirichlet),
            "neumann" => Ok(Bc::Neumann),
            other => Err(invalid(format!("unknown boundary condition `{other}`"))),
        }
    }
}

/// Label of one exact eigenfunction of the real orthonormal bases:
///
/// * torus: 1, √2 cos 2π⟨k,x⟩, √2 sin 2π⟨k,x⟩ with k in the half-lattice
///   {k₁ > 0} ∪ {k₁ = 0, k₂ > 0};
/// * sphere: Y^N_m ∝ P^m_N(cos φ)·{cos mθ (m > 0), 1 (m = 0), sin |m|θ (m < 0)};
/// * disc: J_m(j r)·{cos, sin}(mθ) with j the n-th zero of J_m (Dirichlet) or J_m' (Neumann),
///   the Neumann m = 0 list starting with the constant (j = 0).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ModeIndex {
    TorusConstant,
    Torus { k: [i32; 2], parity: Parity },
    Sphere { n: u32, m: i32 },
    Disc { bc: Bc, m: u32, n: u32, parity: Parity, zero: f64 },
}

pub fn in_half_lattice(k: [i32; 2]) -> bool {
    k[0] > 0 || (k[0] == 0 && k[1] > 0)
}

impl ModeIndex {
    pub fn torus(k: [i32; 2], parity: Parity) -> Result<Self> {
        if k == [0, 0] {
            return Ok(ModeIndex::TorusConstant);
        }
        if !in_half_lattice(k) {
            return Err(invalid(format!(
                "torus wavevector {k:?} is outside the half-lattice; use {:?}",
                [-k[0], -k[1]]
            )));
        }
        Ok(ModeIndex::Torus { k, parity })
    }

    pub fn sphere(n: u32, m: i32) -> Result<Self> {
        if m.unsigned_abs() > n {
            return Err(invalid(format!("sphere order m = {m} exceeds degree N = {n}")));
        }
        Ok(ModeIndex::Sphere { n, m })
    }

    pub fn disc(bc: Bc, m: u32, n: u32, parity: Parity) -> Result<Self> {
        if n == 0 {
            return Err(invalid("disc radial index starts at 1"));
        }
        if m == 0 && parity == Parity::Sin {
            return Err(invalid("disc mode with m = 0 has no sine partner"));
        }
        let zero = disc_zero(bc, m, n);
        Ok(ModeIndex::Disc { bc, m, n, parity, zero })
    }

    pub fn surface(&self) -> SurfaceKind {
        match self {
            ModeIndex::TorusConstant | ModeIndex::Torus { .. } => SurfaceKind::Torus,
            ModeIndex::Sphere { .. } => SurfaceKind::Sphere,
            ModeIndex::Disc { .. } => SurfaceKind::Disc,
        }
    }

    /// Eigenvalue λ² of Δ = −div grad.
    pub fn lambda_sq(&self) -> f64 {
        match *self {
            ModeIndex::TorusConstant => 0.0,
            ModeIndex::Torus { k, .. } => 4.0 * PI * PI * ((k[0] as f64).powi(2) + (k[1] as f64).powi(2)),
            ModeIndex::Sphere { n, .. } => n as f64 * (n as f64 + 1.0),
            ModeIndex::Disc { zero, .. } => zero * zero,
        }
    }

    /// Frequency λ.
    pub fn lambda(&self) -> f64 {
        match *self {
            ModeIndex::Torus { k, .. } => TAU * (k[0] as f64).hypot(k[1] as f64),
            ModeIndex::Disc { zero, .. } => zero,
            _ => self.lambda_sq().sqrt(),
        }
    }

    /// Value at a canonical chart point.
    pub fn value(&self, p: ChartPoint) -> f64 {
        match *self {
            ModeIndex::TorusConstant => 1.0,
            ModeIndex::Torus { k, parity } => {
                let a = TAU * (k[0] as f64 * p[0] + k[1] as f64 * p[1]);
                SQRT_2 * trig(parity, a)
            }
            ModeIndex::Sphere { n, m } => {
                let (s, c) = p[0].sin_cos();
                let ma = m.unsigned_abs();
                let (q, _) = qbar(n, ma, c);
                let radial = q * s.powi(ma as i32);
                match m.signum() {
                    0 => radial,
                    1 => SQRT_2 * radial * (ma as f64 * p[1]).cos(),
                    _ => SQRT_2 * radial * (ma as f64 * p[1]).sin(),
                }
            }
            ModeIndex::Disc { bc, m, parity, zero, .. } => {
                let c = disc_norm(bc, m, zero);
                let (j, _) = bessel_j_with_deriv(m, zero * p[0]);
                c * j * trig(parity, m as f64 * p[1])
            }
        }
    }

    /// Gradient in the orthonormal chart frame: (∂₁, ∂₂) on the torus,
    /// (∂_φ, ∂_θ / sin φ) on the sphere, (∂_r, ∂_θ / r) on the disc. At the poles
    /// and the disc centre the second component is the limit along the chart.
    pub fn gradient(&self, p: ChartPoint) -> [f64; 2] {
        match *self {
            ModeIndex::TorusConstant => [0.0, 0.0],
            ModeIndex::Torus { k, parity } => {
                let a = TAU * (k[0] as f64 * p[0] + k[1] as f64 * p[1]);
                let d = SQRT_2 * TAU * dtrig(parity, a);
                [d * k[0] as f64, d * k[1] as f64]
            }
            ModeIndex::Sphere { n, m } => {
                let (s, c) = p[0].sin_cos();
                let ma = m.unsigned_abs();
                let (q, dq) = qbar(n, ma, c);
                let sm = s.powi(ma as i32);
                let sm1 = if ma == 0 { 0.0 } else { s.powi(ma as i32 - 1) };
                let dphi = -s * dq * sm + ma as f64 * c * sm1 * q;
                let mt = ma as f64 * p[1];
                match m.signum() {
                    0 => [dphi, 0.0],
                    1 => [SQRT_2 * dphi * mt.cos(), -SQRT_2 * ma as f64 * q * sm1 * mt.sin()],
                    _ => [SQRT_2 * dphi * mt.sin(), SQRT_2 * ma as f64 * q * sm1 * mt.cos()],
                }
            }
            ModeIndex::Disc { bc, m, parity, zero, .. } => {
                let c = disc_norm(bc, m, zero);
                let x = zero * p[0];
                let (j, dj) = bessel_j_with_deriv(m, x);
                let mt = m as f64 * p[1];
                let j_over_r = if p[0] > 1e-12 {
                    j / p[0]
                } else if m == 1 {
                    0.5 * zero
                } else {
                    0.0
                };
                [
                    c * zero * dj * trig(parity, mt),
                    c * j_over_r * m as f64 * dtrig(parity, mt),
                ]
            }
        }
    }

    /// Adds `coeff·value` along one grid row (row coordinate `x`, columns `cols`).
    pub(crate) fn accumulate_row(&self, coeff: f64, x: f64, cols: &[f64], out: &mut [f64]) {
        match *self {
            ModeIndex::TorusConstant => out.iter_mut().for_each(|o| *o += coeff),
            ModeIndex::Torus { k, parity } => {
                let a0 = TAU * k[0] as f64 * x;
                let b = TAU * k[1] as f64;
                for (o, &y) in out.iter_mut().zip(cols) {
                    *o += coeff * SQRT_2 * trig(parity, a0 + b * y);
                }
            }
            ModeIndex::Sphere { n, m } => {
                let (s, c) = x.sin_cos();
                let ma = m.unsigned_abs();
                let radial = qbar(n, ma, c).0 * s.powi(ma as i32);
                match m.signum() {
                    0 => out.iter_mut().for_each(|o| *o += coeff * radial),
                    1 => {
                        for (o, &t) in out.iter_mut().zip(cols) {
                            *o += coeff * SQRT_2 * radial * (ma as f64 * t).cos();
                        }
                    }
                    _ => {
                        for (o, &t) in out.iter_mut().zip(cols) {
                            *o += coeff * SQRT_2 * radial * (ma as f64 * t).sin();
                        }
                    }
                }
            }
            ModeIndex::Disc { bc, m, parity, zero, .. } => {
                let r = disc_norm(bc, m, zero) * bessel_j_with_deriv(m, zero * x).0;
                for (o, &t) in out.iter_mut().zip(cols) {
                    *o += coeff * r * trig(parity, m as f64 * t);
                }
            }
        }
    }

    /// Short text label, e.g. `torus k=(3,4) sin`, `sphere N=8 m=-8`.
    pub fn label(&self) -> String {
        match *self {
            ModeIndex::TorusConstant => "torus constant".into(),
            ModeIndex::Torus { k, parity } => format!("torus k=({},{}) {}", k[0], k[1], parity.name()),
            ModeIndex::Sphere { n, m } => format!("sphere N={n} m={m}"),
            ModeIndex::Disc { bc, m, n, parity, .. } => {
                format!("disc {} m={m} n={n} {}", bc.name(), parity.name())
            }
        }
    }
}

impl fmt::Display for ModeIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

fn trig(p: Parity, a: f64) -> f64 {
    match p {
        Parity::Cos => a.cos(),
        Parity::Sin => a.sin(),
    }
}

fn dtrig(p: Parity, a: f64) -> f64 {
    match p {
        Parity::Cos => -a.sin(),
        Parity::Sin => a.cos(),
    }
}

fn disc_zero(bc: Bc, m: u32, n: u32) -> f64 {
    let (deriv, idx) = match bc {
        Bc::Dirichlet => (false, n as usize - 1),
        Bc::Neumann if m == 0 => {
            if n == 1 {
                return 0.0;
            }
            (true, n as usize - 2)
        }
        Bc::Neumann => (true, n as usize - 1),
    };
    let mut xmax = (m as f64 + 4.0 * n as f64 + 8.0) * 1.5;
    loop {
        let z = bessel_zeros(m, deriv, xmax);
        if z.len() > idx {
            return z[idx];
        }
        xmax *= 2.0;
    }
}

/// Normalising constant of J_m(j r)·trig(mθ) on the unit disc.
fn disc_norm(bc: Bc, m: u32, zero: f64) -> f64 {
    if zero == 0.0 {
        return 1.0 / PI.sqrt();
    }
    let angular = if m == 0 { TAU } else { PI };
    let (jm, djm) = bessel_j_with_deriv(m, zero);
    let radial = match bc {
        Bc::Dirichlet => 0.5 * djm * djm,
        Bc::Neumann => 0.5 * (1.0 - (m as f64 / zero).powi(2)) * jm * jm,
    };
    1.0 / (angular * radial).sqrt()
}

/// One eigenfunction: a real combination of basis modes sharing one eigenvalue.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenFn {
    pub surface: SurfaceKind,
    pub terms: Vec<(ModeIndex, f64)>,
    pub lambda_sq: f64,
    pub normalized: bool,
}

impl EigenFn {
    pub fn single(mode: ModeIndex) -> Self {
        EigenFn {
            surface: mode.surface(),
            lambda_sq: mode.lambda_sq(),
            terms: vec![(mode, 1.0)],
            normalized: true,
        }
    }

    pub fn combination(terms: Vec<(ModeIndex, f64)>) -> Result<Self> {
        let Some(&(first, _)) = terms.first() else {
            return Err(invalid("an eigenfunction needs at least one mode"));
        };
        let surface = first.surface();
        let l2 = first.lambda_sq();
        for (mode, c) in &terms {
            if mode.surface() != surface {
                return Err(invalid("modes from different surfaces"));
            }
            if (mode.lambda_sq() - l2).abs() > 1e-9 * l2.max(1.0) {
                return Err(Error::MixedEigenvalue(l2, mode.lambda_sq()));
            }
            if !c.is_finite() {
                return Err(invalid("coefficients must be finite"));
            }
        }
        if terms.iter().all(|(_, c)| *c == 0.0) {
            return Err(invalid("all coefficients are zero"));
        }
        // distinct basis elements are orthonormal
        let mut distinct = true;
        for (i, (a, _)) in terms.iter().enumerate() {
            if terms[..i].iter().any(|(b, _)| b == a) {
                distinct = false;
            }
        }
        let ss: f64 = terms.iter().map(|(_, c)| c * c).sum();
        Ok(EigenFn {
            surface,
            terms,
            lambda_sq: l2,
            normalized: distinct && (ss - 1.0).abs() < 1e-12,
        })
    }

    pub fn lambda(&self) -> f64 {
        match self.terms.as_slice() {
            [(m, _)] => m.lambda(),
            _ => self.lambda_sq.sqrt(),
        }
    }

    pub fn scaled(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.terms.iter_mut().for_each(|t| t.1 *= c);
        out.normalized = self.normalized && (c.abs() - 1.0).abs() < 1e-15;
        out
    }

    pub fn eval(&self, p: ChartPoint) -> Result<f64> {
        let p = canonical(self.surface, p)?;
        Ok(self.value(p))
    }

    pub fn grad(&self, p: ChartPoint) -> Result<[f64; 2]> {
        let p = canonical(self.surface, p)?;
        Ok(self.gradient(p))
    }

    /// Unchecked evaluation at a chart point already in canonical form.
    pub fn value(&self, p: ChartPoint) -> f64 {
        self.terms.iter().map(|(m, c)| c * m.value(p)).sum()
    }

    pub fn gradient(&self, p: ChartPoint) -> [f64; 2] {
        let mut g = [0.0; 2];
        for (m, c) in &self.terms {
            let d = m.gradient(p);
            g[0] += c * d[0];
            g[1] += c * d[1];
        }
        g
    }

    /// Value at any chart point, wrapping periodic coordinates and clamping the others.
    pub fn value_wrapped(&self, p: ChartPoint) -> f64 {
        self.value(wrap_chart(self.surface, p))
    }

    pub fn gradient_wrapped(&self, p: ChartPoint) -> [f64; 2] {
        self.gradient(wrap_chart(self.surface, p))
    }

    pub(crate) fn accumulate_row(&self, x: f64, cols: &[f64], out: &mut [f64]) {
        for (m, c) in &self.terms {
            m.accumulate_row(*c, x, cols, out);
        }
    }

    pub fn label(&self) -> String {
        match self.terms.as_slice() {
            [(m, c)] if *c == 1.0 => m.label(),
            _ => self
                .terms
                .iter()
                .map(|(m, c)| format!("{c}·[{m}]"))
                .collect::<Vec<_>>()
                .join(" + "),
        }
    }
}

pub(crate) fn wrap_chart(surface: SurfaceKind, p: ChartPoint) -> ChartPoint {
    match surface {
        SurfaceKind::Torus => [p[0].rem_euclid(1.0), p[1].rem_euclid(1.0)],
        SurfaceKind::Sphere => [p[0].clamp(0.0, PI), p[1].rem_euclid(TAU)],
        SurfaceKind::Disc => [p[0].clamp(0.0, 1.0), p[1].rem_euclid(TAU)],
    }
}

/// All modes with λ ≤ `lambda_max`, sorted by eigenvalue (disc: Dirichlet).
pub fn enumerate_modes(surface: SurfaceKind, lambda_max: f64) -> Result<Vec<ModeIndex>> {
    match surface {
        SurfaceKind::Disc => enumerate_disc_modes(Bc::Dirichlet, lambda_max),
        _ => {
            check_lambda_max(lambda_max)?;
            Ok(match surface {
                SurfaceKind::Torus => torus_modes(lambda_max),
                _ => sphere_modes(lambda_max),
            })
        }
    }
}

fn check_lambda_max(l: f64) -> Result<()> {
    if !(l >= 0.0 && l.is_finite()) {
        return Err(invalid(format!("lambda_max must be finite and ≥ 0, got {l}")));
    }
    Ok(())
}

/// Inclusive comparison used for every "λ ≤ λ_max" cut.
pub(crate) fn within(lambda: f64, lambda_max: f64) -> bool {
    lambda <= lambda_max * (1.0 + 1e-12) + 1e-12
}

fn torus_modes(lambda_max: f64) -> Vec<ModeIndex> {
    let r = lambda_max / TAU;
    let kmax = r.floor() as i32 + 1;
    let mut out = vec![ModeIndex::TorusConstant];
    for k1 in 0..=kmax {
        for k2 in -kmax..=kmax {
            let k = [k1, k2];
            if !in_half_lattice(k) {
                continue;
            }
            let mode = ModeIndex::Torus { k, parity: Parity::Cos };
            if within(mode.lambda(), lambda_max) {
                out.push(mode);
                out.push(ModeIndex::Torus { k, parity: Parity::Sin });
            }
        }
    }
    out.sort_by(|a, b| {
        let key = |m: &ModeIndex| match m {
            ModeIndex::Torus { k, parity } => (k[0] * k[0] + k[1] * k[1], k[0], k[1], *parity),
            _ => (0, 0, 0, Parity::Cos),
        };
        key(a).cmp(&key(b))
    });
    out
}

fn sphere_modes(lambda_max: f64) -> Vec<ModeIndex> {
    let mut out = Vec::new();
    let mut n = 0u32;
    while within((n as f64 * (n as f64 + 1.0)).sqrt(), lambda_max) {
        for m in -(n as i32)..=(n as i32) {
            out.push(ModeIndex::Sphere { n, m });
        }
        n += 1;
    }
    out
}

/// Disc modes with λ ≤ `lambda_max`, by bracketed zero search, sorted by λ.
pub fn enumerate_disc_modes(bc: Bc, lambda_max: f64) -> Result<Vec<ModeIndex>> {
    check_lambda_max(lambda_max)?;
    let limit = lambda_max * (1.0 + 1e-12) + 1e-12;
    // J_m and J_m' have no zeros below m (m ≥ 1), so orders stop at λ_max + 1
    let mmax = lambda_max.floor() as u32 + 1;
    let mut dir = Vec::new();
    let mut neu = Vec::new();
    for m in 0..=mmax + 1 {
        dir.push(bessel_zeros(m, false, limit + 4.0));
        neu.push(bessel_zeros(m, true, limit + 4.0));
    }
    validate_interlacing(&dir, &neu)?;
    let mut out = Vec::new();
    for m in 0..=mmax {
        let zeros: Vec<f64> = match bc {
            Bc::Dirichlet => dir[m as usize].clone(),
            Bc::Neumann if m == 0 => std::iter::once(0.0).chain(neu[0].iter().copied()).collect(),
            Bc::Neumann => neu[m as usize].clone(),
        };
        for (i, &z) in zeros.iter().enumerate() {
            if z > limit {
                break;
            }
            let n = i as u32 + 1;
            out.push(ModeIndex::Disc { bc, m, n, parity: Parity::Cos, zero: z });
            if m > 0 {
                out.push(ModeIndex::Disc { bc, m, n, parity: Parity::Sin, zero: z });
            }
        }
    }
    out.sort_by(|a, b| a.lambda().total_cmp(&b.lambda()));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumerate_examples() {
        let s = enumerate_modes(SurfaceKind::Sphere, 2.0).unwrap();
        assert_eq!(s.len(), 4);
        let t = enumerate_modes(SurfaceKind::Torus, TAU).unwrap();
        assert_eq!(t.len(), 5);
        let d = enumerate_disc_modes(Bc::Dirichlet, 3.0).unwrap();
        assert_eq!(d.len(), 1);
        assert!((d[0].lambda() - 2.404825558).abs() < 1e-9);
        assert_eq!(enumerate_modes(SurfaceKind::Sphere, 0.0).unwrap().len(), 1);
    }

    #[test]
    fn value_examples() {
        let y00 = ModeIndex::sphere(0, 0).unwrap();
        assert!((y00.value([1.0, 2.0]) - 0.282_094_791_8).abs() < 1e-10);
        let y20 = ModeIndex::sphere(2, 0).unwrap();
        let want = (5.0 / (4.0 * PI)).sqrt() * -0.5;
        assert!((y20.value([PI / 2.0, 0.3]) - want).abs() < 1e-14);
        let s = ModeIndex::torus([1, 0], Parity::Sin).unwrap();
        assert!((s.value([0.25, 0.0]) - SQRT_2).abs() < 1e-15);
        assert!(ModeIndex::torus([-1, 0], Parity::Sin).is_err());
    }

    #[test]
    fn mixed_eigenvalues_rejected() {
        let a = ModeIndex::sphere(2, 0).unwrap();
        let b = ModeIndex::sphere(3, 0).unwrap();
        assert!(matches!(
            EigenFn::combination(vec![(a, 1.0), (b, 1.0)]),
            Err(Error::MixedEigenvalue(..))
        ));
        let c = ModeIndex::sphere(2, 1).unwrap();
        let f = EigenFn::combination(vec![(a, 0.6), (c, 0.8)]).unwrap();
        assert!(f.normalized);
    }

    #[test]
    fn neumann_constant_mode() {
        let m = ModeIndex::disc(Bc::Neumann, 0, 1, Parity::Cos).unwrap();
        assert_eq!(m.lambda(), 0.0);
        assert!((m.value([0.3, 1.0]) - 1.0 / PI.sqrt()).abs() < 1e-15);
    }
}
