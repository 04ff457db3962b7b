use std::f64::consts::PI;

use proptest::prelude::*;

use nodal_lab::geom::GeodesicSegment;
use nodal_lab::norms::{holder_check, lp_norm};
use nodal_lab::restrict::{kuznecov_sum, orbital_fourier, period_table, qer_mode_profile, restrict_eigenfn, sign_changes};
use nodal_lab::spectra::{poisson_kernel_closed, poisson_kernel_sum, EigenFn, ModeIndex, Parity};

fn sphere_mode(n: u32, m: f64) -> ModeIndex {
    ModeIndex::sphere(n, (m * n as f64).round() as i32).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn holder_interpolation_holds(n in 1u32..20, m in -1.0f64..1.0, p in 1.0f64..3.0, dq in 0.1f64..2.0, dr in 0.1f64..4.0) {
        let f = EigenFn::single(sphere_mode(n, m));
        let c = holder_check(&f, p, p + dq, p + dq + dr, 128).unwrap();
        prop_assert!(c.holds, "{:?}", c);
    }

    #[test]
    fn l2_norm_is_one(n in 0u32..24, m in -1.0f64..1.0) {
        let f = EigenFn::single(sphere_mode(n, m));
        prop_assert!((lp_norm(&f, 2.0, 128).unwrap() - 1.0).abs() <= 1e-10);
    }

    // on a great circle a degree-N harmonic restricts to a trigonometric polynomial of degree ≤ N
    #[test]
    fn restriction_has_bounded_spectrum(n in 1u32..40, m in -1.0f64..1.0, theta0 in 0.0f64..std::f64::consts::TAU) {
        let f = EigenFn::single(sphere_mode(n, m));
        let r = restrict_eigenfn(&f, &GeodesicSegment::meridian(theta0).unwrap()).unwrap();
        let spec = orbital_fourier(&r).unwrap();
        let mean_sq = r.samples.iter().map(|v| v * v).sum::<f64>() / r.count() as f64;
        prop_assert!((spec.energy() - mean_sq).abs() <= 1e-12 * mean_sq.max(1e-300) + 1e-15);
        for (k, c) in spec.frequencies.iter().zip(&spec.coefficients) {
            if k.unsigned_abs() > n as u64 {
                prop_assert!(c.norm() <= 1e-11, "frequency {} carries {}", k, c.norm());
            }
        }
        if let Ok(s) = sign_changes(&r) {
            prop_assert!(s <= 2 * n as usize);
        }
    }

    #[test]
    fn poisson_kernel_closed_form_matches_the_series(t in 0.5f64..3.0, r in 0.0f64..PI) {
        let a = poisson_kernel_closed(t, r).unwrap();
        let b = poisson_kernel_sum(t, r, 200).unwrap();
        prop_assert!(a > 0.0);
        prop_assert!((a - b).abs() <= 1e-10);
    }
}

#[test]
fn torus_period_sums_match_the_projection_kernel() {
    for (p, q) in [(1, 0), (1, 1), (2, 1)] {
        let seg = GeodesicSegment::torus_closed([0.1, 0.3], p, q).unwrap();
        let table = period_table(&seg, &|t: f64| 1.0 + 0.5 * (2.0 * PI * t / seg.length).cos(), 40.0, false).unwrap();
        let sums = kuznecov_sum(&table, 40.0, 40.0, None).unwrap();
        for c in &sums.clusters {
            let k = c.kernel_sum.unwrap();
            assert!((k - c.basis_sum).abs() <= 1e-9 * c.basis_sum.abs().max(1.0), "({p},{q}) λ={}", c.lambda);
        }
        let last = sums.partial.last().unwrap().1;
        assert!(sums.partial.windows(2).all(|w| w[1].1 >= w[0].1 - 1e-12) && last > 0.0);
    }
}

#[test]
fn zonal_equator_periods_follow_legendre_at_zero() {
    // period of Y^N_0 over the equator: 2π·√((2N+1)/4π)·P_N(0)
    let lmax = (40.0f64 * 41.0).sqrt();
    let table = period_table(&GeodesicSegment::equator(), &|_| 1.0, lmax, false).unwrap();
    for (mode, per) in table.modes.iter().zip(&table.periods) {
        let ModeIndex::Sphere { n, m } = *mode else { unreachable!() };
        if m != 0 {
            assert!(per.abs() <= 1e-12, "{mode}");
            continue;
        }
        let mut p0 = if n % 2 == 0 { 1.0 } else { 0.0 };
        for j in 1..=n / 2 {
            p0 *= -((2 * j - 1) as f64) / (2 * j) as f64;
        }
        let want = 2.0 * PI * ((2 * n + 1) as f64 / (4.0 * PI)).sqrt() * p0;
        assert!((per - want).abs() <= 1e-12, "N = {n}: {per} vs {want}");
    }
}

#[test]
fn mode_weights_form_a_distribution() {
    for n in [8, 20, 64] {
        let p = qer_mode_profile(n).unwrap();
        assert!((p.weights.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        assert!((p.arcsine.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
        assert!((p.value_sum - (2 * n + 1) as f64 / (4.0 * PI)).abs() <= 1e-10);
        assert!(p.weights.iter().all(|w| *w >= 0.0));
    }
    assert!(qer_mode_profile(64).unwrap().cdf_distance > qer_mode_profile(256).unwrap().cdf_distance);
}

#[test]
fn torus_restriction_is_a_single_frequency() {
    let f = EigenFn::single(ModeIndex::torus([2, 3], Parity::Cos).unwrap());
    let seg = GeodesicSegment::torus_closed([0.0, 0.0], 1, 0).unwrap();
    let spec = orbital_fourier(&restrict_eigenfn(&f, &seg).unwrap()).unwrap();
    // √2 cos 2π(2t) along x₂ = 0: coefficients 1/√2 at ±2
    for (k, c) in spec.frequencies.iter().zip(&spec.coefficients) {
        let want = if k.abs() == 2 { std::f64::consts::FRAC_1_SQRT_2 } else { 0.0 };
        assert!((c.norm() - want).abs() <= 1e-12, "k = {k}");
    }
}
