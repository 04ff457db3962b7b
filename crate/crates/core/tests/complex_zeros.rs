use std::f64::consts::{PI, TAU};

use num_complex::Complex64 as C;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use nodal_lab::cx::{
    count_zeros_rect, eval_cx, growth_rate, torus_zero_count, tube_point, zero_locations, CxEigenFn, StripRect,
};
use nodal_lab::geom::{random_point, CxChart, GeodesicSegment, SurfaceKind, DEFAULT_STRIP};
use nodal_lab::spectra::{EigenFn, ModeIndex, Parity};

const EPS: f64 = DEFAULT_STRIP;

fn torus_mode(k1: i32, k2: i32, sin: bool) -> Option<ModeIndex> {
    let m = ModeIndex::torus([k1, k2], if sin { Parity::Sin } else { Parity::Cos }).ok()?;
    (m != ModeIndex::TorusConstant).then_some(m)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn torus_count_matches_closed_form(
        k1 in 0i32..5, k2 in -4i32..5, sin in any::<bool>(),
        base in (0.0f64..1.0, 0.0f64..1.0), angle in 0.0f64..TAU,
        t0 in 0.0f64..1.0, len in 0.2f64..1.5, lo in 0.02f64..0.39, hi in 0.02f64..0.39,
    ) {
        let Some(mode) = torus_mode(k1, k2, sin) else { return Ok(()) };
        let seg = GeodesicSegment::torus([base.0, base.1], [angle.cos(), angle.sin()], 3.0).unwrap();
        let rect = StripRect::new(t0, t0 + len, -lo, hi, EPS).unwrap();
        let f = CxEigenFn::single(mode).unwrap();
        let c = count_zeros_rect(&f, &seg, rect, EPS).unwrap();
        prop_assert!(c.residual <= 0.1);
        prop_assert_eq!(Some(c.count as u64), torus_zero_count(mode, &seg, &c.rect));
    }

    #[test]
    fn count_is_stable_under_small_boundary_moves(
        k1 in 1i32..4, k2 in -3i32..4, t0 in 0.0f64..1.0, len in 0.3f64..1.2,
        d0 in -1e-3f64..1e-3, d1 in -1e-3f64..1e-3, dtau in -1e-2f64..1e-2,
    ) {
        let mode = ModeIndex::torus([k1, k2], Parity::Cos).unwrap();
        let seg = GeodesicSegment::torus([0.21, 0.43], [0.8, 0.6], 3.0).unwrap();
        let f = CxEigenFn::single(mode).unwrap();
        let a = StripRect::new(t0, t0 + len, -0.2, 0.2, EPS).unwrap();
        let b = StripRect::new(t0 + d0, t0 + len + d1, -0.2 + dtau, 0.2 - dtau, EPS).unwrap();
        let ca = count_zeros_rect(&f, &seg, a, EPS).unwrap();
        let cb = count_zeros_rect(&f, &seg, b, EPS).unwrap();
        // only real zeros exist, so the count changes exactly when a zero crosses t0 or t1
        let same = torus_zero_count(mode, &seg, &ca.rect) == torus_zero_count(mode, &seg, &cb.rect);
        if same {
            prop_assert_eq!(ca.count, cb.count);
        }
    }

    #[test]
    fn real_restriction_agrees_with_the_real_mode(
        n in 1u32..12, m_frac in -1.0f64..1.0, phi in 0.05f64..3.09, theta in 0.0f64..TAU,
    ) {
        let m = (m_frac * n as f64).round() as i32;
        let mode = ModeIndex::sphere(n, m).unwrap();
        let real = EigenFn::single(mode).value([phi, theta]);
        let z = CxChart::real(SurfaceKind::Sphere, [phi, theta]).unwrap();
        let v = eval_cx(&CxEigenFn::single(mode).unwrap(), &z, EPS).unwrap();
        prop_assert!((v.re - real).abs() <= 1e-10 * (1.0 + real.abs()));
        prop_assert!(v.im.abs() <= 1e-10);
    }

    #[test]
    fn torus_growth_matches_the_complex_cosine(
        k1 in 1i32..10, k2 in -9i32..10, x in (0.0f64..1.0, 0.0f64..1.0), xi in (-0.25f64..0.25, -0.25f64..0.25),
    ) {
        let mode = ModeIndex::torus([k1, k2], Parity::Cos).unwrap();
        let f = CxEigenFn::single(mode).unwrap();
        let g = growth_rate(&f, &tube_point(SurfaceKind::Torus, [x.0, x.1], [xi.0, xi.1]).unwrap()).unwrap();
        // |√2 cos(a + ib)|² = 2(cos²a + sinh²b)
        let a = TAU * (k1 as f64 * x.0 + k2 as f64 * x.1);
        let b = TAU * (k1 as f64 * xi.0 + k2 as f64 * xi.1);
        let want = (2.0 * (a.cos().powi(2) + b.sinh().powi(2))).ln() / f.lambda;
        prop_assert!((g.u - want).abs() <= 1e-9 * (1.0 + want.abs()), "{} vs {}", g.u, want);
        prop_assert!((g.rho - xi.0.hypot(xi.1)).abs() <= 1e-15);
    }
}

#[test]
fn multiplicities_sum_to_the_count_on_random_cases() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut done = 0;
    while done < 100 {
        let (f, seg) = if rng.gen_bool(0.5) {
            let Some(mode) = torus_mode(rng.gen_range(0..5), rng.gen_range(-4..5), rng.gen()) else { continue };
            let a: f64 = rng.gen_range(0.0..TAU);
            let seg = GeodesicSegment::torus(random_point(SurfaceKind::Torus, &mut rng), [a.cos(), a.sin()], 2.0).unwrap();
            (CxEigenFn::single(mode).unwrap(), seg)
        } else {
            let n = rng.gen_range(1..9u32);
            let m = rng.gen_range(-(n as i32)..=n as i32);
            let base = random_point(SurfaceKind::Sphere, &mut rng);
            let a: f64 = rng.gen_range(0.0..TAU);
            let p = nodal_lab::geom::sphere_to_ambient(base);
            // any unit tangent at p: rotate a fixed orthonormal pair of the tangent plane
            let e = if p[2].abs() < 0.9 { [0.0, 0.0, 1.0] } else { [1.0, 0.0, 0.0] };
            let d = e[0] * p[0] + e[1] * p[1] + e[2] * p[2];
            let mut u = [e[0] - d * p[0], e[1] - d * p[1], e[2] - d * p[2]];
            let nu = (u[0] * u[0] + u[1] * u[1] + u[2] * u[2]).sqrt();
            u.iter_mut().for_each(|c| *c /= nu);
            let v = [p[1] * u[2] - p[2] * u[1], p[2] * u[0] - p[0] * u[2], p[0] * u[1] - p[1] * u[0]];
            let t: [f64; 3] = std::array::from_fn(|i| a.cos() * u[i] + a.sin() * v[i]);
            let seg = GeodesicSegment::great_circle(base, t).unwrap();
            (CxEigenFn::single(ModeIndex::sphere(n, m).unwrap()).unwrap(), seg)
        };
        let t0 = rng.gen_range(0.0..1.0);
        let t1 = t0 + rng.gen_range(0.3..1.5f64).min(seg.length - t0);
        let rect = StripRect::new(t0, t1, -rng.gen_range(0.05..0.35), rng.gen_range(0.05..0.35), EPS).unwrap();
        let set = zero_locations(&f, &seg, rect, EPS).unwrap();
        assert!(!set.partial, "case {done}: subdivision incomplete");
        let sum: u32 = set.points.iter().map(|p| p.1).sum();
        assert_eq!(sum, set.total);
        assert_eq!(set.total, set.count, "case {done}");
        done += 1;
    }
}

#[test]
fn torus_zeros_lie_on_the_real_line() {
    let mode = ModeIndex::torus([2, 3], Parity::Sin).unwrap();
    let seg = GeodesicSegment::torus([0.1, 0.7], [0.6, 0.8], 2.0).unwrap();
    let set = zero_locations(&CxEigenFn::single(mode).unwrap(), &seg, StripRect::new(0.0, 2.0, -0.3, 0.3, EPS).unwrap(), EPS).unwrap();
    assert!(set.total > 0);
    assert!(set.max_abs_tau() <= 1e-8);
    let g = |t: f64| (TAU * (2.0 * (0.1 + 0.6 * t) + 3.0 * (0.7 + 0.8 * t))).sin();
    for (p, mult) in &set.points {
        assert_eq!(*mult, 1);
        assert!(g(p.t).abs() < 1e-9);
    }
}

#[test]
fn highest_weight_continuation_is_a_power_of_the_ambient_coordinate() {
    // Q̄^N_N·(z₁ + i z₂)^N with Q̄^N_N = √((2N+1)!/(4π))/(2^N N!)
    let n = 7u32;
    let f = CxEigenFn::highest_weight(n).unwrap();
    let mut fact = 1.0f64;
    for j in (n + 1)..=(2 * n + 1) {
        fact *= j as f64;
    }
    for j in 1..=n {
        fact /= j as f64;
    }
    let q = (fact / (4.0 * PI)).sqrt() / 2f64.powi(n as i32);
    let z = tube_point(SurfaceKind::Sphere, [1.1, 0.4], [0.1, -0.2]).unwrap();
    let CxChart::Sphere(a) = z else { unreachable!() };
    let want = (a[0] + C::i() * a[1]).powu(n) * q;
    let got = eval_cx(&f, &z, EPS).unwrap();
    assert!((got - want).norm() <= 1e-10 * want.norm(), "{got} vs {want}");
}
