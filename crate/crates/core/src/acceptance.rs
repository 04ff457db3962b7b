//! The acceptance suite: one runner per criterion, each returning the measured
//! quantity, its target and tolerance, and a pass flag. Oracles used here are
//! closed forms computed independently of the pipelines under test.

use std::f64::consts::{PI, TAU};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::cx::{
    count_zeros_rect, growth_rate, intersection_density, torus_zero_count, tube_point, zero_locations, CxEigenFn,
    StripRect,
};
use crate::error::{Error, Result};
use crate::field::GridField;
use crate::fit::{geometric, power_fit};
use crate::geom::{random_point, GeodesicSegment, SurfaceKind, DEFAULT_STRIP};
use crate::nodal::{boundary_zero_count, count_domains, extract_nodal, faber_krahn_check};
use crate::norms::{dong_identity, scaling_fit, Family, FamilySweep, TestFunction};
use crate::restrict::{kuznecov_sum, period_smallness_fraction, period_table, qer_mode_profile};
use crate::spectra::{
    enumerate_disc_modes, filter_gradient_sup, poisson_kernel_closed, poisson_kernel_sum, remainder_exponent,
    weyl_count, Bc, EigenFn, ModeIndex, Parity, SpectralFilter,
};

#[derive(Debug, Clone, Serialize)]
pub struct CriterionResult {
    pub id: u32,
    pub name: &'static str,
    pub measured: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub detail: String,
    pub seconds: f64,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "{} criterion {:>2} {:<32} measured {:<12.6} expected {:<10.6} tol {:<8.3e} {:.1}s  {}",
            if self.pass { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.measured,
            self.expected,
            self.tolerance,
            self.seconds,
            self.detail
        )
    }
}

pub const CRITERIA: [(u32, &str); 14] = [
    (1, "torus nodal length"),
    (2, "nodal gradient identity"),
    (3, "Weyl law"),
    (4, "Sogge exponents"),
    (5, "Courant and Pleijel on the disc"),
    (6, "Faber-Krahn"),
    (7, "Poisson kernel on S2"),
    (8, "reproducing-kernel gradient"),
    (9, "Kuznecov sums"),
    (10, "density-one period smallness"),
    (11, "complex growth"),
    (12, "complex zeros"),
    (13, "boundary zero counting"),
    (14, "mode-weight arcsine law"),
];

struct Outcome {
    measured: f64,
    expected: f64,
    tolerance: f64,
    pass: bool,
    detail: String,
}

pub fn run_criterion(id: u32) -> Result<CriterionResult> {
    let name = CRITERIA
        .iter()
        .find(|c| c.0 == id)
        .map(|c| c.1)
        .ok_or_else(|| Error::Config(format!("no acceptance criterion {id}; valid ids are 1..=14")))?;
    let start = Instant::now();
    let out = match id {
        1 => torus_nodal_length(),
        2 => nodal_identity(),
        3 => weyl(),
        4 => sogge(),
        5 => courant_pleijel(),
        6 => faber_krahn(),
        7 => poisson(),
        8 => kernel_gradient(),
        9 => kuznecov(),
        10 => smallness(),
        11 => complex_growth(),
        12 => complex_zeros(),
        13 => boundary_zeros(),
        _ => arcsine(),
    };
    let seconds = start.elapsed().as_secs_f64();
    let out = out.unwrap_or_else(|e| Outcome {
        measured: f64::NAN,
        expected: f64::NAN,
        tolerance: f64::NAN,
        pass: false,
        detail: format!("error: {e}"),
    });
    Ok(CriterionResult {
        id,
        name,
        measured: out.measured,
        expected: out.expected,
        tolerance: out.tolerance,
        pass: out.pass,
        detail: out.detail,
        seconds,
    })
}

pub fn run_all() -> Vec<CriterionResult> {
    CRITERIA.iter().map(|c| run_criterion(c.0).expect("listed id")).collect()
}

fn torus_nodal_length() -> Result<Outcome> {
    let start = Instant::now();
    let devs: Vec<f64> = (1..=8)
        .into_par_iter()
        .map(|m| {
            let f = EigenFn::single(ModeIndex::torus([3 * m, 4 * m], Parity::Sin)?);
            let c = extract_nodal(&GridField::sample(&f, 512)?)?;
            Ok((c.total_length / f.lambda() * PI - 1.0).abs())
        })
        .collect::<Result<_>>()?;
    let worst = devs.iter().copied().fold(0.0, f64::max);
    let secs = start.elapsed().as_secs_f64();
    Ok(Outcome {
        measured: worst,
        expected: 0.0,
        tolerance: 0.01,
        pass: worst <= 0.01 && secs < 30.0,
        detail: "max |H1·π/λ − 1| over M = 1..8 at grid 512 (time limit 30s)".into(),
    })
}

fn nodal_identity() -> Result<Outcome> {
    let torus = [(1, 0), (1, 1), (2, 1), (3, 2), (1, 4), (4, 3), (5, 2), (2, 6), (6, 5), (7, 3)];
    let mut fns: Vec<EigenFn> = torus
        .iter()
        .enumerate()
        .map(|(i, &(a, b))| {
            let p = if i % 2 == 0 { Parity::Sin } else { Parity::Cos };
            Ok(EigenFn::single(ModeIndex::torus([a, b], p)?))
        })
        .collect::<Result<_>>()?;
    for n in [2, 3, 6, 9, 14] {
        fns.push(EigenFn::single(ModeIndex::sphere(n, 0)?));
    }
    let residuals: Vec<f64> = fns
        .par_iter()
        .map(|f| {
            let c = extract_nodal(&GridField::sample(f, 512)?)?;
            let a = dong_identity(f, &TestFunction::One, &c)?.residual;
            let b = dong_identity(f, &TestFunction::Cos2PiX1, &c)?.residual;
            Ok(a.max(b))
        })
        .collect::<Result<_>>()?;
    let worst = residuals.iter().copied().fold(0.0, f64::max);
    Ok(Outcome {
        measured: worst,
        expected: 0.0,
        tolerance: 0.01,
        pass: worst <= 0.01,
        detail: "max relative residual, f = 1 and cos 2πx₁, 10 torus + 5 zonal modes, grid 512".into(),
    })
}

fn weyl() -> Result<Outcome> {
    let fit = remainder_exponent(SurfaceKind::Torus, 10.0, 400.0, 40)?;
    let mut exact = true;
    for k in 0..=100u64 {
        let l = ((k * (k + 1)) as f64).sqrt();
        let c = weyl_count(SurfaceKind::Sphere, l.max(1e-9))?.count;
        exact &= c == (k + 1) * (k + 1);
    }
    let slope = fit.fit.slope;
    Ok(Outcome {
        measured: slope,
        expected: 1.1,
        tolerance: 0.0,
        pass: slope <= 1.1 && exact,
        detail: format!(
            "torus remainder exponent on [10, 400] (≤ 1.1); sphere N(√(K(K+1))) = (K+1)² for K ≤ 100: {}",
            if exact { "exact" } else { "MISMATCH" }
        ),
    })
}

fn sogge() -> Result<Outcome> {
    let idx: Vec<u32> = geometric(16.0, 256.0, 9).iter().map(|x| x.round() as u32).collect();
    let res = 768;
    let zonal = FamilySweep::run(Family::Zonal, &idx, &[f64::INFINITY], res)?;
    let hw = FamilySweep::run(Family::HighestWeight, &idx, &[6.0, 1.0], res)?;
    let s_inf = scaling_fit(&zonal, f64::INFINITY)?.slope;
    let s6 = scaling_fit(&hw, 6.0)?.slope;
    let s1 = scaling_fit(&hw, 1.0)?.slope;
    let devs = [(s_inf - 0.5).abs(), (s6 - 1.0 / 6.0).abs(), (s1 + 0.25).abs()];
    let worst = devs.iter().copied().fold(0.0, f64::max);
    Ok(Outcome {
        measured: worst,
        expected: 0.0,
        tolerance: 0.02,
        pass: worst <= 0.02,
        detail: format!("slopes: zonal L∞ {s_inf:.4} (0.50), highest-weight L6 {s6:.4} (0.167), L1 {s1:.4} (−0.25)"),
    })
}

fn disc_domain_counts(count: usize, res: usize) -> Result<Vec<usize>> {
    let mut lmax = 10.0;
    let modes = loop {
        let m = enumerate_disc_modes(Bc::Dirichlet, lmax)?;
        if m.len() >= count {
            break m;
        }
        lmax *= 1.5;
    };
    modes[..count]
        .par_iter()
        .map(|&m| Ok(count_domains(&GridField::sample(&EigenFn::single(m), res)?)?.domain_count))
        .collect()
}

fn courant_pleijel() -> Result<Outcome> {
    let counts = disc_domain_counts(200, 192)?;
    let courant = counts.iter().take(50).enumerate().all(|(i, &c)| c <= i + 1);
    let (ratio, at) = (20..=200)
        .map(|k| (counts[k - 1] as f64 / k as f64, k))
        .fold((0.0, 0), |a, b| if b.0 > a.0 { b } else { a });
    Ok(Outcome {
        measured: ratio,
        expected: 0.70,
        tolerance: 0.0,
        pass: courant && ratio <= 0.70,
        detail: format!(
            "Courant n_k ≤ k for k ≤ 50: {}; max n_k/k over 20..200 at k = {at} (Pleijel 4/j₁² ≈ 0.6917)",
            if courant { "holds" } else { "VIOLATED" }
        ),
    })
}

fn faber_krahn() -> Result<Outcome> {
    let mut suite: Vec<(EigenFn, usize)> = Vec::new();
    for m in 1..=4 {
        suite.push((EigenFn::single(ModeIndex::torus([3 * m, 4 * m], Parity::Sin)?), 512));
    }
    for (a, b) in [(1, 0), (2, 1), (3, 2), (4, 3), (6, 5)] {
        suite.push((EigenFn::single(ModeIndex::torus([a, b], Parity::Cos)?), 512));
    }
    for n in [2, 3, 6, 9, 14] {
        suite.push((EigenFn::single(ModeIndex::sphere(n, 0)?), 512));
    }
    for n in [4, 8, 16] {
        suite.push((EigenFn::single(ModeIndex::sphere(n, n as i32)?), 512));
    }
    for m in enumerate_disc_modes(Bc::Dirichlet, 20.0)?.into_iter().take(50) {
        suite.push((EigenFn::single(m), 256));
    }
    let margins: Vec<f64> = suite
        .par_iter()
        .map(|(f, res)| {
            let dec = count_domains(&GridField::sample(f, *res)?)?;
            Ok(faber_krahn_check(&dec, f.lambda())?.min_margin)
        })
        .collect::<Result<_>>()?;
    let worst = margins.iter().copied().fold(f64::INFINITY, f64::min);
    let ground = ModeIndex::disc(Bc::Dirichlet, 0, 1, Parity::Cos)?;
    let dec = count_domains(&GridField::sample(&EigenFn::single(ground), 256)?)?;
    let eq = faber_krahn_check(&dec, ground.lambda())?.min_margin;
    Ok(Outcome {
        measured: worst,
        expected: -0.02,
        tolerance: 0.0,
        pass: worst >= -0.02 && eq.abs() <= 0.01,
        detail: format!(
            "min area/bound − 1 over {} modes (≥ −2%); disc (0,1) area/bound − 1 = {eq:.2e} (|·| ≤ 1%)",
            suite.len()
        ),
    })
}

fn poisson() -> Result<Outcome> {
    let ts: Vec<f64> = (0..=25).map(|i| 0.5 + 0.1 * i as f64).collect();
    let rs: Vec<f64> = (0..50).map(|i| PI * i as f64 / 49.0).collect();
    let mut worst = 0.0f64;
    for &t in &ts {
        for &r in &rs {
            let d = (poisson_kernel_closed(t, r)? - poisson_kernel_sum(t, r, 200)?).abs();
            worst = worst.max(d);
        }
    }
    Ok(Outcome {
        measured: worst,
        expected: 0.0,
        tolerance: 1e-10,
        pass: worst <= 1e-10,
        detail: "sup |closed form − Σ_{N≤200}| over t ∈ [0.5, 3] × 50 radii".into(),
    })
}

fn kernel_gradient() -> Result<Outcome> {
    let filter = SpectralFilter::new(2.0)?;
    let extra = filter.tail_extent(1e-12);
    let lams = geometric(20.0, 200.0, 10);
    let sups: Vec<f64> = lams
        .par_iter()
        .map(|&l| filter_gradient_sup(&filter, l, l + extra))
        .collect::<Result<_>>()?;
    let slope = power_fit(&lams, &sups)?.slope;
    Ok(Outcome {
        measured: slope,
        expected: 1.5,
        tolerance: 0.1,
        pass: (slope - 1.5).abs() <= 0.1,
        detail: "fitted exponent of sup|∇ₓK_λ| on S², λ ∈ [20, 200]".into(),
    })
}

/// P_N(0) from the product formula (−1)^k (2k−1)!!/(2k)!!, independent of the recurrence.
fn legendre_zero_closed(n: u32) -> f64 {
    if n % 2 == 1 {
        return 0.0;
    }
    let k = n / 2;
    let mut v = 1.0;
    for j in 1..=k {
        v *= (2 * j - 1) as f64 / (2 * j) as f64;
    }
    if k % 2 == 1 {
        -v
    } else {
        v
    }
}

fn kuznecov() -> Result<Outcome> {
    let nmax = 64usize;
    let top = ((200 * 201) as f64).sqrt();
    let table = period_table(&GeodesicSegment::equator(), &|_| 1.0, top, false)?;
    let sums = kuznecov_sum(&table, top, 0.0, Some((20.0, 200.0)))?;
    let mut oracle = Vec::new();
    let mut s = 0.0;
    let mut worst = 0.0f64;
    for (n, c) in sums.partial.iter().enumerate() {
        let p = legendre_zero_closed(n as u32);
        // (2π)²·(2N+1)/4π·P_N(0)² from the single zonal period
        s += PI * (2 * n + 1) as f64 * p * p;
        oracle.push((c.0, s));
        if n <= nmax {
            worst = worst.max((c.1 - s).abs());
        }
    }
    let (x, y): (Vec<f64>, Vec<f64>) = oracle.iter().filter(|(l, _)| (20.0..=200.0).contains(l)).copied().unzip();
    let oracle_slope = power_fit(&x, &y)?.slope;
    let slope = sums.fit.as_ref().map_or(f64::NAN, |f| f.slope);
    let pass = worst <= 1e-8 && (slope - oracle_slope).abs() <= 0.05;
    Ok(Outcome {
        measured: worst,
        expected: 0.0,
        tolerance: 1e-8,
        pass,
        detail: format!(
            "partial sums vs Legendre oracle (N ≤ {nmax}); growth exponent on λ ∈ [20, 200] {slope:.4} vs oracle \
             {oracle_slope:.4} (±0.05); the printed √λ rate would be 0.5 — reported, not asserted"
        ),
    })
}

fn smallness() -> Result<Outcome> {
    let (lo, hi) = (((50 * 51) as f64).sqrt(), ((200 * 201) as f64).sqrt());
    let table = period_table(&GeodesicSegment::equator(), &|_| 1.0, hi, false)?;
    let f = period_smallness_fraction(&table, lo, hi);
    Ok(Outcome {
        measured: f.fraction,
        expected: 0.05,
        tolerance: 0.0,
        pass: f.fraction <= 0.05,
        detail: format!("{} of {} basis elements with N ∈ [50, 200] have a large equator period", f.large, f.total),
    })
}

fn complex_growth() -> Result<Outcome> {
    let f = CxEigenFn::single(ModeIndex::torus([64, 0], Parity::Cos)?)?;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut torus_dev = 0.0f64;
    for _ in 0..20 {
        let x = random_point(SurfaceKind::Torus, &mut rng);
        let z = tube_point(SurfaceKind::Torus, x, [0.1, 0.0])?;
        torus_dev = torus_dev.max((growth_rate(&f, &z)?.u - 0.2).abs());
    }
    let pts: Vec<_> = (0..100)
        .map(|_| {
            let x = random_point(SurfaceKind::Sphere, &mut rng);
            let r = rng.gen_range(0.0..DEFAULT_STRIP);
            let a = rng.gen_range(0.0..TAU);
            tube_point(SurfaceKind::Sphere, x, [r * a.cos(), r * a.sin()])
        })
        .collect::<Result<_>>()?;
    let worst_c = (1..=128u32)
        .into_par_iter()
        .map(|n| {
            let mut worst = f64::NEG_INFINITY;
            for m in -(n as i32)..=(n as i32) {
                let f = CxEigenFn::single(ModeIndex::sphere(n, m)?)?;
                for z in &pts {
                    worst = worst.max(growth_rate(&f, z)?.envelope);
                }
            }
            Ok(worst)
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(Outcome {
        measured: torus_dev,
        expected: 0.0,
        tolerance: 1e-2,
        pass: torus_dev <= 1e-2 && worst_c <= 8.0,
        detail: format!(
            "torus k = (64,0), ξ = (0.1,0): max |u − 0.2|; sphere N ≤ 128 × 100 tube points: \
             smallest envelope constant C = {worst_c:.3} (bound 8)"
        ),
    })
}

fn complex_zeros() -> Result<Outcome> {
    let eps = DEFAULT_STRIP;
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut cases = Vec::new();
    while cases.len() < 50 {
        let k = [rng.gen_range(0..5), rng.gen_range(-4..5)];
        let Ok(mode) = ModeIndex::torus(k, if rng.gen::<bool>() { Parity::Sin } else { Parity::Cos }) else {
            continue;
        };
        if mode == ModeIndex::TorusConstant {
            continue;
        }
        let a: f64 = rng.gen_range(0.0..TAU);
        let seg = GeodesicSegment::torus(random_point(SurfaceKind::Torus, &mut rng), [a.cos(), a.sin()], 3.0)?;
        let t0 = rng.gen_range(0.0..1.0);
        let t1 = t0 + rng.gen_range(0.3..2.0);
        let rect = StripRect::new(t0, t1, -rng.gen_range(0.05..eps), rng.gen_range(0.05..eps), eps)?;
        cases.push((mode, seg, rect));
    }
    let results: Vec<(bool, f64)> = cases
        .par_iter()
        .map(|(mode, seg, rect)| {
            let f = CxEigenFn::single(*mode)?;
            let c = count_zeros_rect(&f, seg, *rect, eps)?;
            let want = torus_zero_count(*mode, seg, &c.rect).unwrap_or(0);
            let set = zero_locations(&f, seg, *rect, eps)?;
            Ok((c.count as u64 == want && set.total == c.count && !set.partial, set.max_abs_tau()))
        })
        .collect::<Result<_>>()?;
    let matched = results.iter().filter(|r| r.0).count();
    let max_tau = results.iter().map(|r| r.1).fold(0.0, f64::max);
    let rays = [([1, 0], [1.0, 0.0]), ([1, 1], [1.0, 0.0]), ([2, 1], [0.6, 0.8]), ([1, 0], [0.0, 1.0])];
    let dens: Vec<f64> = rays
        .par_iter()
        .map(|&(k0, dir)| {
            let seg = GeodesicSegment::torus([0.137, 0.291], dir, 4.0)?;
            let d = intersection_density(k0, 24, Parity::Sin, &seg, 4.0, eps, 1e-8)?;
            Ok(if d.predicted > 0.0 { d.relative_error } else { d.density })
        })
        .collect::<Result<_>>()?;
    let dens_err = dens.iter().copied().fold(0.0, f64::max);
    Ok(Outcome {
        measured: matched as f64,
        expected: 50.0,
        tolerance: 0.0,
        pass: matched == 50 && max_tau <= 1e-8 && dens_err <= 0.02,
        detail: format!(
            "closed-form counts matched on {matched}/50 cases; max |τ| = {max_tau:.1e} (≤ 1e-8); \
             worst t-density error {dens_err:.4} (≤ 2%)"
        ),
    })
}

fn boundary_zeros() -> Result<Outcome> {
    let modes = enumerate_disc_modes(Bc::Neumann, 60.0)?;
    let mut bad = 0;
    let mut worst = 0.0f64;
    for &m in &modes {
        let c = boundary_zero_count(m)?;
        if c.zeros != c.predicted || (c.zeros as f64) > 2.0 * c.lambda {
            bad += 1;
        }
        worst = worst.max(c.ratio);
    }
    Ok(Outcome {
        measured: worst,
        expected: 2.0,
        tolerance: 0.0,
        pass: bad == 0 && worst <= 2.0,
        detail: format!("{} Neumann modes with λ ≤ 60; {bad} with n(λ) ≠ 2m or n(λ) > 2λ; max n(λ)/λ shown", modes.len()),
    })
}

fn arcsine() -> Result<Outcome> {
    let p = qer_mode_profile(256)?;
    Ok(Outcome {
        measured: p.cdf_distance,
        expected: 0.0,
        tolerance: 0.05,
        pass: p.cdf_distance <= 0.05,
        detail: "sup distance between the N = 256 equator mode-weight CDF and the arcsine law".into(),
    })
}
