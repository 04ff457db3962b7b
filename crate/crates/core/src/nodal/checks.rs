use std::f64::consts::{PI, TAU};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::domains::DomainDecomposition;
use crate::error::{invalid, Error, Result};
use crate::fit::{least_squares, power_fit};
use crate::geom::{exp_point, random_point, ChartPoint, SurfaceKind};
use crate::special::{spherical_cap_area, J0_FIRST_ZERO};
use crate::spectra::{Bc, EigenFn, ModeIndex};

#[derive(Debug, Clone, Serialize)]
pub struct SmallBallReport {
    pub a: f64,
    pub radius: f64,
    pub trials: usize,
    pub pass: bool,
    /// min over trials of A − λ·r*, r* the smallest radius at which a sign change appears
    pub worst_margin: f64,
    /// smallest A for which every trial finds a sign change
    pub calibrated_a: f64,
    /// centres whose ball of radius A/λ holds no sign change
    pub empty_centers: Vec<ChartPoint>,
}

/// Distance from `c` to the nearest sign change, resolved to `dr`, searched up to `r_max`.
fn sign_change_radius(f: &EigenFn, c: ChartPoint, dr: f64, r_max: f64) -> f64 {
    let s0 = f.value(c) > 0.0;
    let mut r = dr;
    while r <= r_max + 1e-15 {
        let k = ((TAU * r / dr).ceil() as usize).max(16);
        for i in 0..k {
            let a = TAU * i as f64 / k as f64;
            if let Some(p) = exp_point(f.surface, c, r, a) {
                if (f.value(p) > 0.0) != s0 {
                    return r;
                }
            }
        }
        r += dr;
    }
    f64::INFINITY
}

/// Samples `trials` random centres and looks for a sign change in the ball of
/// radius A/λ around each. The calibrated constant is the largest λ·r* seen.
pub fn small_ball_check(f: &EigenFn, a: f64, trials: usize, seed: u64) -> Result<SmallBallReport> {
    let lambda = f.lambda();
    if lambda <= 0.0 {
        return Err(invalid("the small-ball check needs λ > 0"));
    }
    if a <= 0.0 || trials == 0 {
        return Err(invalid("the small-ball check needs A > 0 and at least one trial"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let radius = a / lambda;
    // search beyond A/λ so the calibrated value is meaningful when A is too small
    let r_max = radius.max(4.0 * PI / lambda);
    let dr = radius.min(PI / lambda) / 64.0;
    let mut worst = f64::INFINITY;
    let mut cal = 0.0f64;
    let mut empty = Vec::new();
    for _ in 0..trials {
        let c = random_point(f.surface, &mut rng);
        let r = sign_change_radius(f, c, dr, r_max);
        cal = cal.max(lambda * r);
        worst = worst.min(a - lambda * r);
        if r > radius {
            empty.push(c);
        }
    }
    Ok(SmallBallReport {
        a,
        radius,
        trials,
        pass: empty.is_empty(),
        worst_margin: worst,
        calibrated_a: cal,
        empty_centers: empty,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct FaberKrahnReport {
    /// minimal admissible domain area for eigenvalue λ²
    pub bound: f64,
    /// area/bound − 1 for each domain
    pub margins: Vec<f64>,
    pub min_margin: f64,
}

/// Least area of a domain with first Dirichlet eigenvalue λ²: the geodesic disc with
/// that eigenvalue. Flat for the torus and disc; a spherical cap on S².
pub fn faber_krahn_bound(surface: SurfaceKind, lambda: f64) -> f64 {
    match surface {
        SurfaceKind::Sphere => spherical_cap_area(lambda * lambda),
        _ => PI * J0_FIRST_ZERO * J0_FIRST_ZERO / (lambda * lambda),
    }
}

pub fn faber_krahn_check(dec: &DomainDecomposition, lambda: f64) -> Result<FaberKrahnReport> {
    if lambda <= 0.0 {
        return Err(invalid("Faber–Krahn needs λ > 0"));
    }
    let bound = faber_krahn_bound(dec.surface, lambda);
    let margins: Vec<f64> = dec.areas.iter().map(|a| a / bound - 1.0).collect();
    let min_margin = margins.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(FaberKrahnReport { bound, margins, min_margin })
}

#[derive(Debug, Clone, Serialize)]
pub struct LeadingFit {
    pub order: u32,
    /// fitted slope of log(circle RMS) against log r
    pub detected_order: f64,
    /// coefficients of u^{k−i} v^i, i = 0..=k, in normal coordinates (u, v)
    pub coefficients: Vec<f64>,
    /// ‖ΔP‖ / (k²‖P‖) in L² of the unit circle; 0 for a harmonic leading term
    pub harmonic_residual: f64,
}

fn circle_rms(f: &EigenFn, z: ChartPoint, r: f64) -> f64 {
    let k = 128;
    let s: f64 = (0..k)
        .map(|i| {
            let p = exp_point(f.surface, z, r, TAU * i as f64 / k as f64).unwrap_or(z);
            f.value(p).powi(2)
        })
        .sum();
    (s / k as f64).sqrt()
}

/// Coefficients of the monomials u^{d−i} v^i over d in `degrees`.
fn monomials(u: f64, v: f64, degrees: std::ops::RangeInclusive<u32>, out: &mut Vec<f64>) {
    for d in degrees {
        for i in 0..=d {
            out.push(u.powi((d - i) as i32) * v.powi(i as i32));
        }
    }
}

/// Mean of P² over the unit circle for P = Σ c_i u^{k−i} v^i.
fn circle_norm_sq(c: &[f64], k: u32) -> f64 {
    let n = 256;
    (0..n)
        .map(|j| {
            let a = TAU * j as f64 / n as f64;
            let (v, u) = a.sin_cos();
            let p: f64 = (0..=k).map(|i| c[i as usize] * u.powi((k - i) as i32) * v.powi(i as i32)).sum();
            p * p
        })
        .sum::<f64>()
        / n as f64
}

/// Laplacian of a homogeneous degree-k polynomial, as degree k−2 coefficients.
fn laplacian_coeffs(c: &[f64], k: u32) -> Vec<f64> {
    if k < 2 {
        return vec![0.0];
    }
    let mut out = vec![0.0; (k - 1) as usize];
    for i in 0..=k {
        let (a, b) = ((k - i) as f64, i as f64);
        let ci = c[i as usize];
        // ∂²_u u^a v^b = a(a−1) u^{a−2} v^b → index i
        if k - i >= 2 {
            out[i as usize] += ci * a * (a - 1.0);
        }
        // ∂²_v u^a v^b = b(b−1) u^a v^{b−2} → index i−2
        if i >= 2 {
            out[(i - 2) as usize] += ci * b * (b - 1.0);
        }
    }
    out
}

/// Vanishing order of `f` at `zero` and the harmonic homogeneous polynomial that
/// leads its Taylor expansion in normal coordinates.
pub fn leading_polynomial_fit(f: &EigenFn, zero: ChartPoint, k: u32) -> Result<LeadingFit> {
    let lambda = f.lambda().max(1.0);
    let radius = 0.05 / lambda;
    let rs: Vec<f64> = (0..4).map(|j| radius * 0.5f64.powi(j)).collect();
    let ms: Vec<f64> = rs.iter().map(|&r| circle_rms(f, zero, r)).collect();
    if ms.iter().any(|m| *m <= 1e-300) {
        return Err(Error::Numerical("order detection failed: the function vanishes on a test circle".into()));
    }
    let detected = power_fit(&rs, &ms)?.slope;
    if k == 0 || (detected - k as f64).abs() > 0.25 {
        return Err(Error::Numerical(format!(
            "order detection failed: circle averages decay like r^{detected:.3}, expected r^{k}"
        )));
    }
    // fit degrees k..=k+4 in coordinates scaled to the unit disc
    let top = k + 4;
    let cols: usize = (k..=top).map(|d| d as usize + 1).sum();
    let mut a = Vec::new();
    let mut b = Vec::new();
    for ring in 1..=10 {
        let rho = ring as f64 / 10.0;
        let n_ang = 8 * (top as usize + 1);
        for j in 0..n_ang {
            let ang = TAU * (j as f64 + 0.5 * (ring % 2) as f64) / n_ang as f64;
            let (v, u) = ang.sin_cos();
            let p = exp_point(f.surface, zero, rho * radius, ang)
                .ok_or_else(|| invalid("the fitting disc leaves the domain; choose an interior zero"))?;
            monomials(rho * u, rho * v, k..=top, &mut a);
            b.push(f.value(p));
        }
    }
    let sol = least_squares(&a, cols, &b)?;
    // undo the radius scaling for the reported leading coefficients
    let lead: Vec<f64> = sol[..=k as usize].iter().map(|c| c / radius.powi(k as i32)).collect();
    let unit: Vec<f64> = sol[..=k as usize].to_vec();
    let lap = laplacian_coeffs(&unit, k);
    let p_norm = circle_norm_sq(&unit, k).sqrt();
    let l_norm = if k >= 2 { circle_norm_sq(&lap, k - 2).sqrt() } else { 0.0 };
    let harmonic_residual = if p_norm > 0.0 { l_norm / ((k * k) as f64 * p_norm) } else { f64::INFINITY };
    Ok(LeadingFit {
        order: k,
        detected_order: detected,
        coefficients: lead,
        harmonic_residual,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundaryCount {
    pub mode: String,
    pub lambda: f64,
    pub m: u32,
    pub zeros: usize,
    pub predicted: usize,
    pub ratio: f64,
}

/// Sign changes of a disc mode along the boundary circle.
pub fn boundary_zero_count(mode: ModeIndex) -> Result<BoundaryCount> {
    let ModeIndex::Disc { m, bc, .. } = mode else {
        return Err(Error::Unsupported {
            surface: mode.surface(),
            op: "boundary zero counting",
        });
    };
    if bc != Bc::Neumann {
        return Err(invalid("Dirichlet modes vanish identically on the boundary; use --bc neumann"));
    }
    let k = 64 * (m as usize + 1);
    let vals: Vec<f64> = (0..k)
        .map(|i| mode.value([1.0, TAU * (i as f64 + 0.25) / k as f64]))
        .collect();
    let zeros = (0..k).filter(|&i| (vals[i] > 0.0) != (vals[(i + 1) % k] > 0.0)).count();
    let lambda = mode.lambda();
    Ok(BoundaryCount {
        mode: mode.label(),
        lambda,
        m,
        zeros,
        predicted: 2 * m as usize,
        ratio: if zeros == 0 { 0.0 } else { zeros as f64 / lambda },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::GridField;
    use crate::nodal::count_domains;
    use crate::spectra::{enumerate_disc_modes, Parity};

    #[test]
    fn small_ball_torus_band() {
        let f = EigenFn::single(ModeIndex::torus([2, 1], Parity::Sin).unwrap());
        let r = small_ball_check(&f, PI, 200, 7).unwrap();
        assert!(r.pass);
        // the farthest point from the zero lines is half a band away: λ·r* ≤ π/2 + resolution
        assert!(r.calibrated_a <= PI / 2.0 + 0.1, "{}", r.calibrated_a);
        let low = small_ball_check(&f, 0.5 * r.calibrated_a, 200, 7).unwrap();
        assert!(!low.pass && !low.empty_centers.is_empty());
    }

    #[test]
    fn small_ball_zonal() {
        let f = EigenFn::single(ModeIndex::sphere(20, 0).unwrap());
        let r = small_ball_check(&f, PI, 100, 3).unwrap();
        assert!(r.pass, "{:?}", r.calibrated_a);
    }

    #[test]
    fn faber_krahn_examples() {
        let d = ModeIndex::disc(Bc::Dirichlet, 0, 1, Parity::Cos).unwrap();
        let dec = count_domains(&GridField::sample(&EigenFn::single(d), 256).unwrap()).unwrap();
        let r = faber_krahn_check(&dec, d.lambda()).unwrap();
        assert!(r.min_margin.abs() < 0.01);
        let t = ModeIndex::torus([1, 0], Parity::Sin).unwrap();
        let dec = count_domains(&GridField::sample(&EigenFn::single(t), 256).unwrap()).unwrap();
        let r = faber_krahn_check(&dec, t.lambda()).unwrap();
        assert!((r.bound - 0.4601).abs() < 2e-4);
        assert!(r.min_margin > 0.08);
    }

    #[test]
    fn sphere_bound_is_cap() {
        // Y¹₀: the hemisphere is the extremal cap for eigenvalue 2
        assert!((faber_krahn_bound(SurfaceKind::Sphere, 2f64.sqrt()) - TAU).abs() < 1e-8);
    }

    #[test]
    fn highest_weight_pole_order() {
        for n in [3u32, 6, 8] {
            let f = EigenFn::single(ModeIndex::sphere(n, n as i32).unwrap());
            let fit = leading_polynomial_fit(&f, [0.0, 0.0], n).unwrap();
            assert!((fit.detected_order - n as f64).abs() < 0.05);
            assert!(fit.harmonic_residual < 1e-6, "{n}: {}", fit.harmonic_residual);
            // ∝ Re (u + iv)^N: the u^N and u^{N−2}v² coefficients are in ratio −C(N,2)
            let c = &fit.coefficients;
            assert!((c[2] / c[0] + (n * (n - 1) / 2) as f64).abs() < 1e-4);
        }
    }

    #[test]
    fn regular_zeros_have_order_one() {
        let f = EigenFn::single(ModeIndex::torus([1, 0], Parity::Sin).unwrap());
        let fit = leading_polynomial_fit(&f, [0.5, 0.3], 1).unwrap();
        assert_eq!(fit.harmonic_residual, 0.0);
        let z = EigenFn::single(ModeIndex::sphere(2, 0).unwrap());
        let fit = leading_polynomial_fit(&z, [(1.0f64 / 3.0).sqrt().acos(), 1.0], 1).unwrap();
        assert!((fit.detected_order - 1.0).abs() < 0.05);
        assert!(leading_polynomial_fit(&z, [(1.0f64 / 3.0).sqrt().acos(), 1.0], 2).is_err());
    }

    #[test]
    fn neumann_boundary_zeros() {
        for mode in enumerate_disc_modes(Bc::Neumann, 30.0).unwrap() {
            let c = boundary_zero_count(mode).unwrap();
            assert_eq!(c.zeros, c.predicted, "{}", c.mode);
            assert!(c.ratio <= 2.0, "{} {}", c.mode, c.ratio);
        }
    }
}
