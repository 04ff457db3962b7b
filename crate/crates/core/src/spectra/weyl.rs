use std::f64::consts::{PI, TAU};

use serde::Serialize;

use super::modes::{enumerate_disc_modes, enumerate_modes, within, Bc};
use crate::error::{invalid, Result};
use crate::fit::{geometric, power_fit, LinearFit};
use crate::geom::SurfaceKind;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct WeylCount {
    pub lambda: f64,
    pub count: u64,
    pub main: f64,
    pub remainder: f64,
}

/// Main term λ²·Area/4π of the two-dimensional Weyl law.
pub fn weyl_main(surface: SurfaceKind, lambda: f64) -> f64 {
    lambda * lambda * surface.area() / (4.0 * PI)
}

/// N(λ) = #{j : λ_j ≤ λ} with multiplicity (disc: Dirichlet).
pub fn weyl_count(surface: SurfaceKind, lambda: f64) -> Result<WeylCount> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(invalid(format!("Weyl count needs λ > 0, got {lambda}")));
    }
    let count = match surface {
        SurfaceKind::Torus => torus_lattice_count(lambda),
        SurfaceKind::Sphere => {
            let mut k = 0u64;
            while within((((k + 1) * (k + 2)) as f64).sqrt(), lambda) {
                k += 1;
            }
            (k + 1) * (k + 1)
        }
        SurfaceKind::Disc => enumerate_disc_modes(Bc::Dirichlet, lambda)?.len() as u64,
    };
    let main = weyl_main(surface, lambda);
    Ok(WeylCount {
        lambda,
        count,
        main,
        remainder: count as f64 - main,
    })
}

/// #{k ∈ ℤ² : 2π|k| ≤ λ}.
fn torus_lattice_count(lambda: f64) -> u64 {
    let r = lambda / TAU;
    let kmax = r.floor() as i64 + 1;
    let mut total = 0u64;
    for k1 in -kmax..=kmax {
        let rest = r * r - (k1 * k1) as f64;
        if rest < -1e-9 {
            continue;
        }
        let mut k2 = rest.max(0.0).sqrt().floor() as i64 + 1;
        while k2 >= 0 && !within(TAU * ((k1 * k1 + k2 * k2) as f64).sqrt(), lambda) {
            k2 -= 1;
        }
        if k2 >= 0 {
            total += (2 * k2 + 1) as u64;
        }
    }
    total
}

/// Distinct eigenvalues up to `lambda_max` with multiplicities.
pub fn clusters(surface: SurfaceKind, lambda_max: f64) -> Result<Vec<(f64, u64)>> {
    let modes = enumerate_modes(surface, lambda_max)?;
    let mut out: Vec<(f64, u64)> = Vec::new();
    for m in modes {
        let l = m.lambda();
        match out.last_mut() {
            Some((v, c)) if (l - *v).abs() <= 1e-9 * v.max(1.0) => *c += 1,
            _ => out.push((l, 1)),
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct RemainderFit {
    pub fit: LinearFit,
    /// (λ, sup of |R| over [λ_min, λ]) at the sample points.
    pub envelope: Vec<(f64, f64)>,
}

/// Exponent of the running supremum of |R(λ)| over `samples` geometric points of [λ_min, λ_max].
/// The supremum is taken over both one-sided limits at every eigenvalue in range.
pub fn remainder_exponent(
    surface: SurfaceKind,
    lambda_min: f64,
    lambda_max: f64,
    samples: usize,
) -> Result<RemainderFit> {
    if !(lambda_min > 0.0 && lambda_max > lambda_min) || samples < 8 {
        return Err(invalid("remainder fit needs 0 < λ_min < λ_max and ≥ 8 samples"));
    }
    let cl = clusters(surface, lambda_max)?;
    let mut events = Vec::with_capacity(cl.len());
    let mut before = 0u64;
    for (l, mult) in cl {
        let main = weyl_main(surface, l);
        let after = before + mult;
        events.push((l, (before as f64 - main).abs().max((after as f64 - main).abs())));
        before = after;
    }
    let xs = geometric(lambda_min, lambda_max, samples);
    let mut envelope = Vec::with_capacity(samples);
    let mut sup = 0.0f64;
    let mut cursor = 0;
    for &x in &xs {
        while cursor < events.len() && events[cursor].0 <= x {
            if events[cursor].0 >= lambda_min {
                sup = sup.max(events[cursor].1);
            }
            cursor += 1;
        }
        let here = weyl_count(surface, x)?.remainder.abs();
        sup = sup.max(here);
        envelope.push((x, sup));
    }
    let (x, y): (Vec<f64>, Vec<f64>) = envelope.iter().copied().unzip();
    Ok(RemainderFit {
        fit: power_fit(&x, &y)?,
        envelope,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn torus_at_two_pi() {
        let w = weyl_count(SurfaceKind::Torus, TAU).unwrap();
        assert_eq!(w.count, 5);
        assert!((w.main - PI).abs() < 1e-12);
        assert!((w.remainder - 1.858).abs() < 1e-3);
    }

    #[test]
    fn sphere_cumulative() {
        for k in [0u64, 1, 5, 20] {
            let l = ((k * (k + 1)) as f64).sqrt() + 1e-9;
            assert_eq!(weyl_count(SurfaceKind::Sphere, l.max(1e-9)).unwrap().count, (k + 1) * (k + 1));
        }
    }

    #[test]
    fn lattice_count_matches_enumeration() {
        for l in [1.0, 7.0, 20.0, 33.3, 62.9] {
            let n = enumerate_modes(SurfaceKind::Torus, l).unwrap().len() as u64;
            assert_eq!(weyl_count(SurfaceKind::Torus, l).unwrap().count, n);
        }
    }
}
