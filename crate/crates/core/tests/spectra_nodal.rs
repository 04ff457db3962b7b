use std::f64::consts::{PI, TAU};

use proptest::prelude::*;

use nodal_lab::field::GridField;
use nodal_lab::geom::{quadrature_grid, SurfaceKind};
use nodal_lab::nodal::{count_domains, extract_nodal};
use nodal_lab::spectra::{enumerate_disc_modes, enumerate_modes, weyl_count, Bc, EigenFn, ModeIndex, Parity};

fn gcd(a: i32, b: i32) -> i32 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    // sin 2π⟨k,x⟩ vanishes on the lines ⟨k,x⟩ ∈ ½ℤ: 2·gcd(k) closed curves of length |k|/gcd each
    #[test]
    fn torus_sine_nodal_set_is_two_gcd_circles(k1 in 1i32..7, k2 in -6i32..7) {
        let f = EigenFn::single(ModeIndex::torus([k1, k2], Parity::Sin).unwrap());
        let field = GridField::sample(&f, 256).unwrap();
        let curves = extract_nodal(&field).unwrap();
        let g = gcd(k1, k2);
        prop_assert_eq!(curves.component_count as i32, 2 * g);
        let want = 2.0 * (k1 as f64).hypot(k2 as f64);
        prop_assert!((curves.total_length - want).abs() <= 1e-3 * want);
        prop_assert_eq!(count_domains(&field).unwrap().domain_count as i32, 2 * g);
    }

    #[test]
    fn disc_dirichlet_domains_form_a_checkerboard(m in 0u32..5, n in 1u32..4) {
        let f = EigenFn::single(ModeIndex::disc(Bc::Dirichlet, m, n, Parity::Cos).unwrap());
        let dec = count_domains(&GridField::sample(&f, 256).unwrap()).unwrap();
        let want = if m == 0 { n } else { 2 * m * n };
        prop_assert_eq!(dec.domain_count as u32, want);
        let area: f64 = dec.areas.iter().sum();
        prop_assert!((area - PI).abs() <= 1e-6);
    }

    // zonal Y^N_0 has N latitude circles, N+1 caps and bands
    #[test]
    fn zonal_domains(n in 1u32..16) {
        let f = EigenFn::single(ModeIndex::sphere(n, 0).unwrap());
        let field = GridField::sample(&f, 256).unwrap();
        prop_assert_eq!(count_domains(&field).unwrap().domain_count as u32, n + 1);
        prop_assert_eq!(extract_nodal(&field).unwrap().component_count as u32, n);
    }

    #[test]
    fn grid_quadrature_is_orthonormal(
        a in (0u32..9, -8i32..9), b in (0u32..9, -8i32..9),
    ) {
        let ma = ModeIndex::sphere(a.0, a.1.clamp(-(a.0 as i32), a.0 as i32)).unwrap();
        let mb = ModeIndex::sphere(b.0, b.1.clamp(-(b.0 as i32), b.0 as i32)).unwrap();
        let fa = GridField::sample(&EigenFn::single(ma), 64).unwrap();
        let grid = quadrature_grid(SurfaceKind::Sphere, 64).unwrap();
        let fb = EigenFn::single(mb);
        let mut s = 0.0;
        for i in 0..grid.n_rows() {
            for j in 0..grid.n_cols() {
                s += grid.weight(i, j) * fa.at(i, j) * fb.value(grid.node(i, j));
            }
        }
        let want = if ma == mb { 1.0 } else { 0.0 };
        prop_assert!((s - want).abs() <= 1e-10, "{} · {} = {}", ma, mb, s);
    }

    #[test]
    fn torus_modes_solve_the_eigen_equation(k1 in 0i32..6, k2 in -5i32..6, x in (0.0f64..1.0, 0.0f64..1.0), cos in any::<bool>()) {
        let Ok(mode) = ModeIndex::torus([k1, k2], if cos { Parity::Cos } else { Parity::Sin }) else { return Ok(()) };
        let f = EigenFn::single(mode);
        let h = 1e-3;
        let v = |p: [f64; 2]| f.value_wrapped(p);
        let lap = (v([x.0 + h, x.1]) + v([x.0 - h, x.1]) + v([x.0, x.1 + h]) + v([x.0, x.1 - h]) - 4.0 * v([x.0, x.1])) / (h * h);
        let l2 = f.lambda_sq;
        prop_assert!((lap + l2 * v([x.0, x.1])).abs() <= 1e-4 * l2 * (l2 / (TAU * TAU)).max(1.0));
    }
}

#[test]
fn weyl_counts_equal_enumeration_sizes() {
    for (s, lam) in [(SurfaceKind::Torus, 37.3), (SurfaceKind::Torus, 62.9), (SurfaceKind::Sphere, 20.5), (SurfaceKind::Disc, 24.0)] {
        let listed = enumerate_modes(s, lam).unwrap().len() as u64;
        assert_eq!(weyl_count(s, lam).unwrap().count, listed, "{s} at {lam}");
    }
    // (K+1)² spherical harmonics of degree ≤ K
    assert_eq!(enumerate_modes(SurfaceKind::Sphere, (30.0f64 * 31.0).sqrt()).unwrap().len(), 31 * 31);
}

#[test]
fn neumann_and_dirichlet_frequencies_interlace() {
    let d = enumerate_disc_modes(Bc::Dirichlet, 30.0).unwrap();
    let n = enumerate_disc_modes(Bc::Neumann, 30.0).unwrap();
    for m in 0..6u32 {
        let pick = |v: &[ModeIndex]| -> Vec<f64> {
            v.iter()
                .filter_map(|x| match *x {
                    ModeIndex::Disc { m: mm, parity: Parity::Cos, zero, .. } if mm == m && zero > 0.0 => Some(zero),
                    _ => None,
                })
                .collect()
        };
        let (jd, jn) = (pick(&d), pick(&n));
        // j'_{m,k} < j_{m,k} < j'_{m,k+1}, except that J₀' = −J₁ puts j_{0,k} < j'_{0,k}
        let (jd, jn) = if m == 0 { (jn, jd) } else { (jd, jn) };
        for (k, z) in jd.iter().enumerate() {
            assert!(jn[k] < *z, "m={m} k={k}");
            if let Some(next) = jn.get(k + 1) {
                assert!(z < next, "m={m} k={k}");
            }
        }
    }
}
