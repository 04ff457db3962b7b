//! Holomorphic continuation of eigenfunctions into the Grauert tube, growth
//! rates, and zeros of continuations along complexified geodesics.

mod zeros;

use std::f64::consts::{PI, SQRT_2, TAU};

use num_complex::Complex64 as C;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geom::{sphere_to_ambient, ChartPoint, CxChart, SurfaceKind};
use crate::special::qbar;
use crate::spectra::{EigenFn, ModeIndex, Parity};

pub use zeros::{
    cauchy_riemann_check, count_zeros_rect, intersection_density, poincare_lelong_count, torus_zero_count,
    zero_locations, CauchyRiemann, IntersectionDensity, PoincareLelong, StripFn, StripRect, ZeroCount, ZeroSet,
};

pub type CxPoint = CxChart;

const QUADRIC_TOL: f64 = 1e-10;
const ROUND_TRIP_TOL: f64 = 1e-8;

/// A complex combination of basis modes sharing one eigenvalue. Real eigenfunctions
/// convert losslessly; complex weights let the highest-weight harmonic
/// ∝ (x₁ + i x₂)^N be represented.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CxEigenFn {
    pub surface: SurfaceKind,
    pub terms: Vec<(ModeIndex, C)>,
    pub lambda: f64,
}

impl From<&EigenFn> for CxEigenFn {
    fn from(f: &EigenFn) -> Self {
        CxEigenFn {
            surface: f.surface,
            terms: f.terms.iter().map(|&(m, c)| (m, C::new(c, 0.0))).collect(),
            lambda: f.lambda(),
        }
    }
}

impl CxEigenFn {
    pub fn new(terms: Vec<(ModeIndex, C)>) -> Result<Self> {
        let real = EigenFn::combination(terms.iter().map(|&(m, _)| (m, 1.0)).collect())?;
        if real.surface == SurfaceKind::Disc {
            return Err(Error::Unsupported { surface: SurfaceKind::Disc, op: "holomorphic continuation" });
        }
        if terms.iter().any(|(_, c)| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(invalid("coefficients must be finite"));
        }
        Ok(CxEigenFn { surface: real.surface, lambda: real.lambda_sq.sqrt(), terms })
    }

    pub fn single(mode: ModeIndex) -> Result<Self> {
        Self::new(vec![(mode, C::new(1.0, 0.0))])
    }

    /// (Y^N_N + i Y^N_{−N})/√2 = Q̄^N_N·(x₁ + i x₂)^N, unit L² norm.
    pub fn highest_weight(n: u32) -> Result<Self> {
        if n == 0 {
            return Self::single(ModeIndex::sphere(0, 0)?);
        }
        let w = 1.0 / SQRT_2;
        Self::new(vec![
            (ModeIndex::sphere(n, n as i32)?, C::new(w, 0.0)),
            (ModeIndex::sphere(n, -(n as i32))?, C::new(0.0, w)),
        ])
    }

    /// Holomorphic value and ambient gradient ∂F/∂z (torus: only the first two
    /// entries are used). Skips the tube check.
    pub fn value_grad(&self, z: &CxChart) -> Result<(C, [C; 3])> {
        if z.surface() != self.surface {
            return Err(invalid(format!("{} point for a {} eigenfunction", z.surface(), self.surface)));
        }
        let mut v = C::new(0.0, 0.0);
        let mut g = [C::new(0.0, 0.0); 3];
        for &(mode, c) in &self.terms {
            let (mv, mg) = mode_cx(mode, z)?;
            v += c * mv;
            for i in 0..3 {
                g[i] += c * mg[i];
            }
        }
        Ok((v, g))
    }
}

fn trig_cx(parity: Parity, a: C) -> (C, C) {
    match parity {
        Parity::Cos => (a.cos(), -a.sin()),
        Parity::Sin => (a.sin(), a.cos()),
    }
}

fn mode_cx(mode: ModeIndex, z: &CxChart) -> Result<(C, [C; 3])> {
    let zero = C::new(0.0, 0.0);
    match (mode, z) {
        (ModeIndex::TorusConstant, CxChart::Torus(_)) => Ok((C::new(1.0, 0.0), [zero; 3])),
        (ModeIndex::Torus { k, parity }, CxChart::Torus(zeta)) => {
            let (k1, k2) = (k[0] as f64, k[1] as f64);
            let a = (zeta[0] * k1 + zeta[1] * k2) * TAU;
            let (v, d) = trig_cx(parity, a);
            Ok((v * SQRT_2, [d * (SQRT_2 * TAU * k1), d * (SQRT_2 * TAU * k2), zero]))
        }
        (ModeIndex::Sphere { n, m }, CxChart::Sphere(z)) => {
            let ma = m.unsigned_abs();
            let (q, dq) = qbar(n, ma, z[2]);
            if m == 0 {
                return Ok((q, [zero, zero, dq]));
            }
            // sin^m φ·{cos, sin}(mθ) = {Re, Im} (x₁ + i x₂)^m, continued through u and v
            let i = C::new(0.0, 1.0);
            let u = z[0] + i * z[1];
            let v = z[0] - i * z[1];
            let (um1, vm1) = (u.powu(ma - 1), v.powu(ma - 1));
            let (um, vm) = (um1 * u, vm1 * v);
            let mf = ma as f64;
            let (h, h1, h2) = if m > 0 {
                ((um + vm) * 0.5, (um1 + vm1) * (0.5 * mf), (um1 - vm1) * i * (0.5 * mf))
            } else {
                let inv = C::new(0.0, -0.5); // 1/(2i)
                ((um - vm) * inv, (um1 - vm1) * inv * mf, (um1 + vm1) * (0.5 * mf))
            };
            Ok((q * h * SQRT_2, [q * h1 * SQRT_2, q * h2 * SQRT_2, dq * h * SQRT_2]))
        }
        (mode, _) => Err(invalid(format!("mode {mode} does not live on the {} tube", z.surface()))),
    }
}

/// Holomorphic continuation of `f` at `z`; points with √ρ(z) > eps are rejected.
pub fn eval_cx(f: &CxEigenFn, z: &CxPoint, eps: f64) -> Result<C> {
    let rho = grauert_rho(z)?;
    if rho > eps * (1.0 + 1e-12) {
        return Err(Error::OutsideTube { rho, eps });
    }
    Ok(f.value_grad(z)?.0)
}

/// The tube function √ρ: |Im ζ| on the torus, ½ cosh⁻¹ Σ|z_i|² on the complex quadric,
/// the latter validated by reconstructing z = E(x, ξ) = cosh|ξ|·x + i sinh|ξ|·ξ/|ξ|.
pub fn grauert_rho(z: &CxPoint) -> Result<f64> {
    match z {
        CxChart::Torus(zeta) => Ok(zeta[0].im.hypot(zeta[1].im)),
        CxChart::Sphere(z) => {
            let q: C = z.iter().map(|c| c * c).sum();
            let w: f64 = z.iter().map(|c| c.norm_sqr()).sum();
            if (q - 1.0).norm() > QUADRIC_TOL * w.max(1.0) {
                return Err(Error::OutOfChart(format!("quadric residual {:e}", (q - 1.0).norm())));
            }
            // |Im z| = sinh √ρ and |Re z| = cosh √ρ; the acosh form loses half the
            // digits near the real domain, so it serves as the cross-check there
            let im = z.iter().map(|c| c.im * c.im).sum::<f64>().sqrt();
            let r_im = im.asinh();
            let r = 0.5 * w.max(1.0).acosh();
            let ch = r_im.cosh();
            let x: [f64; 3] = std::array::from_fn(|i| z[i].re / ch);
            let nx = x.iter().map(|a| a * a).sum::<f64>().sqrt();
            let mut err = (nx - 1.0).abs();
            if im > 0.0 {
                let dot: f64 = (0..3).map(|i| x[i] * z[i].im / im).sum();
                err = err.max(dot.abs());
            }
            if r_im > 1e-4 {
                err = err.max((r - r_im).abs());
            }
            if err > ROUND_TRIP_TOL {
                return Err(Error::Numerical(format!("tube round trip failed by {err:e}")));
            }
            let r = if r_im > 1e-4 { r } else { r_im };
            Ok(r)
        }
    }
}

/// E(x, ξ) = exp_x(iξ). On the sphere ξ is given in the orthonormal frame
/// (∂_φ, ∂_θ/sin φ), or (e₁, e₂) at the poles.
pub fn tube_point(surface: SurfaceKind, x: ChartPoint, xi: [f64; 2]) -> Result<CxPoint> {
    match surface {
        SurfaceKind::Torus => Ok(CxChart::Torus([C::new(x[0], xi[0]), C::new(x[1], xi[1])])),
        SurfaceKind::Sphere => {
            let p = sphere_to_ambient(x);
            let (e1, e2) = if x[0] < 1e-12 || x[0] > PI - 1e-12 {
                ([1.0, 0.0, 0.0], [0.0, 1.0, 0.0])
            } else {
                let (sp, cp) = x[0].sin_cos();
                let (st, ct) = x[1].sin_cos();
                ([cp * ct, cp * st, -sp], [-st, ct, 0.0])
            };
            let r = xi[0].hypot(xi[1]);
            let (ch, sh) = (r.cosh(), r.sinh());
            let dir: [f64; 3] = if r > 0.0 {
                std::array::from_fn(|i| (xi[0] * e1[i] + xi[1] * e2[i]) / r)
            } else {
                [0.0; 3]
            };
            Ok(CxChart::Sphere(std::array::from_fn(|i| C::new(ch * p[i], sh * dir[i]))))
        }
        SurfaceKind::Disc => Err(Error::Unsupported { surface: SurfaceKind::Disc, op: "complexification" }),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthSample {
    pub lambda: f64,
    pub u: f64,
    pub rho: f64,
    /// u − 2√ρ.
    pub deviation: f64,
    /// The constant C with u = 2√ρ + C·log λ / λ.
    pub envelope: f64,
}

/// u = (1/λ) log|φ^C(z)|² compared with 2√ρ(z).
pub fn growth_rate(f: &CxEigenFn, z: &CxPoint) -> Result<GrowthSample> {
    let lambda = f.lambda;
    if !(lambda > 1.0) {
        return Err(invalid("growth rates need λ > 1"));
    }
    let rho = grauert_rho(z)?;
    let v = f.value_grad(z)?.0;
    let u = v.norm_sqr().ln() / lambda;
    let deviation = u - 2.0 * rho;
    Ok(GrowthSample { lambda, u, rho, deviation, envelope: deviation * lambda / lambda.ln() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::GeodesicSegment;
    use crate::geom::StripPoint;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn complex_sine_identity() {
        let f = CxEigenFn::single(ModeIndex::torus([1, 0], Parity::Sin).unwrap()).unwrap();
        for &(x, xi) in &[(0.1, 0.05), (0.37, -0.2), (0.8, 0.33)] {
            let z = tube_point(SurfaceKind::Torus, [x, 0.4], [xi, 0.0]).unwrap();
            let v = eval_cx(&f, &z, 0.4).unwrap() / SQRT_2;
            let want = (TAU * x).sin().powi(2) + (TAU * xi).sinh().powi(2);
            assert!((v.norm_sqr() - want).abs() < 1e-12 * want.max(1.0));
        }
    }

    #[test]
    fn real_restriction_matches_eval() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let modes = [
            ModeIndex::sphere(7, 3).unwrap(),
            ModeIndex::sphere(7, -5).unwrap(),
            ModeIndex::sphere(12, 0).unwrap(),
            ModeIndex::torus([2, -3], Parity::Cos).unwrap(),
        ];
        for mode in modes {
            let f = EigenFn::single(mode);
            let cf = CxEigenFn::from(&f);
            for _ in 0..50 {
                let p = crate::geom::random_point(f.surface, &mut rng);
                let z = CxChart::real(f.surface, p).unwrap();
                let v = eval_cx(&cf, &z, 0.4).unwrap();
                assert!((v.re - f.value(p)).abs() < 1e-10 && v.im.abs() < 1e-12, "{mode}");
            }
        }
    }

    #[test]
    fn highest_weight_has_modulus_exp_tau_on_equator() {
        let n = 9;
        let f = CxEigenFn::highest_weight(n).unwrap();
        let c = crate::special::qbar_diag(n);
        let seg = GeodesicSegment::equator();
        for &(t, tau) in &[(0.3, 0.1), (2.0, -0.35), (5.0, 0.0)] {
            let z = seg.complexified(StripPoint::new(t, tau, 0.4).unwrap()).unwrap();
            let v = eval_cx(&f, &z, 0.4).unwrap();
            assert!((v.norm() - c * (-(n as f64) * tau).exp()).abs() < 1e-10 * v.norm());
        }
    }

    #[test]
    fn rho_examples() {
        assert_eq!(grauert_rho(&CxChart::real(SurfaceKind::Sphere, [1.0, 2.0]).unwrap()).unwrap(), 0.0);
        let z = tube_point(SurfaceKind::Torus, [0.2, 0.7], [0.1, 0.0]).unwrap();
        assert!((grauert_rho(&z).unwrap() - 0.1).abs() < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..100 {
            let x = crate::geom::random_point(SurfaceKind::Sphere, &mut rng);
            let a: f64 = rng.gen_range(0.0..TAU);
            let z = tube_point(SurfaceKind::Sphere, x, [0.25 * a.cos(), 0.25 * a.sin()]).unwrap();
            assert!((grauert_rho(&z).unwrap() - 0.25).abs() < 1e-8);
        }
        let f = CxEigenFn::single(ModeIndex::sphere(3, 1).unwrap()).unwrap();
        let z = tube_point(SurfaceKind::Sphere, [1.0, 1.0], [0.5, 0.0]).unwrap();
        assert!(matches!(eval_cx(&f, &z, 0.4), Err(Error::OutsideTube { .. })));
    }

    #[test]
    fn off_quadric_points_are_rejected() {
        let z = CxChart::Sphere([C::new(1.0, 0.1), C::new(0.0, 0.0), C::new(0.0, 0.0)]);
        assert!(grauert_rho(&z).is_err());
    }

    #[test]
    fn torus_growth_along_the_ray() {
        let f = CxEigenFn::single(ModeIndex::torus([64, 0], Parity::Cos).unwrap()).unwrap();
        let z = tube_point(SurfaceKind::Torus, [0.31, 0.5], [0.1, 0.0]).unwrap();
        let g = growth_rate(&f, &z).unwrap();
        assert!((g.u - 0.2).abs() < 1e-2, "{}", g.u);
        let f = CxEigenFn::single(ModeIndex::torus([45, 45], Parity::Sin).unwrap()).unwrap();
        let g = growth_rate(&f, &z).unwrap();
        assert!((g.u - 0.2 / SQRT_2).abs() < 1e-2, "{}", g.u);
    }
}
