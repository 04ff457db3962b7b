//! Legendre, associated Legendre and Bessel functions, and their zeros.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};

use crate::error::{Error, Result};

/// Legendre polynomial and its derivative, by the three-term recurrence.
pub fn legendre(n: u32, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let (mut p0, mut p1) = (1.0, x);
    for k in 1..n {
        let k = k as f64;
        let p2 = ((2.0 * k + 1.0) * x * p1 - k * p0) / (k + 1.0);
        p0 = p1;
        p1 = p2;
    }
    let nf = n as f64;
    let dp = if (1.0 - x * x).abs() < 1e-14 {
        // endpoint limit: P_n'(±1) = (±1)^{n-1} n(n+1)/2
        let s = if x > 0.0 || n % 2 == 1 { 1.0 } else { -1.0 };
        s * nf * (nf + 1.0) / 2.0
    } else {
        nf * (x * p1 - p0) / (x * x - 1.0)
    };
    (p1, dp)
}

/// Values P_0(x), ..., P_nmax(x).
pub fn legendre_all(nmax: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(nmax + 1);
    out.push(1.0);
    if nmax == 0 {
        return out;
    }
    out.push(x);
    for k in 1..nmax {
        let kf = k as f64;
        let p = ((2.0 * kf + 1.0) * x * out[k] - kf * out[k - 1]) / (kf + 1.0);
        out.push(p);
    }
    out
}

/// Coefficient of the leading term Q̄^m_m, where the unit-normalised spherical
/// harmonic factor is P̄^m_N(cos φ) = Q̄^m_N(cos φ)·sin^m φ and
/// ∫_{S²} |P̄^m_N(cos φ)|² dA = 1 for m = 0 (and 1/2 of the √2-scaled real form otherwise).
pub fn qbar_diag(m: u32) -> f64 {
    let mut c = (2.0 * m as f64 + 1.0) / (4.0 * PI);
    for k in 1..=m {
        let k = k as f64;
        c *= (2.0 * k - 1.0) / (2.0 * k);
    }
    c.sqrt()
}

fn qbar_coeffs(n: u32, m: u32) -> (f64, f64) {
    let (nf, mf) = (n as f64, m as f64);
    let a = ((4.0 * nf * nf - 1.0) / (nf * nf - mf * mf)).sqrt();
    let b = (((nf - 1.0).powi(2) - mf * mf) / (4.0 * (nf - 1.0).powi(2) - 1.0)).sqrt();
    (a, b)
}

/// Ring-like scalar the recurrences run over: `f64` on the real sphere,
/// `Complex64` on its complexification.
pub trait Scalar:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Mul<f64, Output = Self>
{
    fn from_real(x: f64) -> Self;
}

impl Scalar for f64 {
    fn from_real(x: f64) -> Self {
        x
    }
}

impl Scalar for num_complex::Complex64 {
    fn from_real(x: f64) -> Self {
        num_complex::Complex64::new(x, 0.0)
    }
}

/// Q̄^m_N(u) and dQ̄^m_N/du for N = m..=nmax, indexed by N - m.
pub fn qbar_column<T: Scalar>(m: u32, nmax: u32, u: T) -> (Vec<T>, Vec<T>) {
    assert!(nmax >= m);
    let len = (nmax - m + 1) as usize;
    let mut q = Vec::with_capacity(len);
    let mut dq = Vec::with_capacity(len);
    q.push(T::from_real(qbar_diag(m)));
    dq.push(T::from_real(0.0));
    for n in (m + 1)..=nmax {
        let (a, b) = qbar_coeffs(n, m);
        let i = (n - m) as usize;
        let (q1, d1) = (q[i - 1], dq[i - 1]);
        let (q2, d2) = if i >= 2 {
            (q[i - 2], dq[i - 2])
        } else {
            (T::from_real(0.0), T::from_real(0.0))
        };
        q.push((u * q1 - q2 * b) * a);
        dq.push((q1 + u * d1 - d2 * b) * a);
    }
    (q, dq)
}

/// Q̄^m_N(u) and its u-derivative.
pub fn qbar<T: Scalar>(n: u32, m: u32, u: T) -> (T, T) {
    let (q, dq) = qbar_column(m, n, u);
    (*q.last().unwrap(), *dq.last().unwrap())
}

/// Bessel function J_m(x) for x ≥ 0.
pub fn bessel_j(m: u32, x: f64) -> f64 {
    bessel_j_triple(m, x).1
}

/// J_m(x) and J_m'(x).
pub fn bessel_j_with_deriv(m: u32, x: f64) -> (f64, f64) {
    let (jm1, j, jp1) = bessel_j_triple(m, x);
    let d = if m == 0 { -jp1 } else { 0.5 * (jm1 - jp1) };
    (j, d)
}

/// (J_{m-1}, J_m, J_{m+1}); J_{-1} = -J_1 is returned for m = 0.
fn bessel_j_triple(m: u32, x: f64) -> (f64, f64, f64) {
    assert!(x >= 0.0 && x.is_finite(), "bessel argument must be finite and non-negative");
    if x <= 12.0 {
        let jp1 = bessel_series(m + 1, x);
        let j = bessel_series(m, x);
        let jm1 = if m == 0 { -jp1 } else { bessel_series(m - 1, x) };
        (jm1, j, jp1)
    } else {
        bessel_miller(m, x)
    }
}

fn bessel_series(m: u32, x: f64) -> f64 {
    let h = 0.5 * x;
    let mut term = 1.0;
    for i in 1..=m {
        term *= h / i as f64;
    }
    if term == 0.0 {
        return 0.0;
    }
    let h2 = h * h;
    let mut sum = term;
    let mut k = 0.0;
    loop {
        k += 1.0;
        term *= -h2 / (k * (k + m as f64));
        sum += term;
        if term.abs() < 1e-17 * sum.abs().max(1e-300) && k > h {
            break;
        }
        if k > 500.0 {
            break;
        }
    }
    sum
}

/// Downward recurrence from far above max(m, x), normalised by J_0 + 2ΣJ_{2k} = 1.
fn bessel_miller(m: u32, x: f64) -> (f64, f64, f64) {
    let top = (m as f64).max(x);
    let mut start = (top + 30.0 + 4.0 * top.sqrt()).ceil() as u32;
    if start % 2 == 1 {
        start += 1;
    }
    let mut jp = 0.0_f64;
    let mut j = 1e-300_f64;
    let mut norm = 0.0;
    let (mut rm1, mut r0, mut rp1) = (0.0, 0.0, 0.0);
    let mut k = start;
    while k > 0 {
        let jm = (2.0 * k as f64 / x) * j - jp;
        jp = j;
        j = jm;
        k -= 1;
        // j now holds J_k (unnormalised), jp holds J_{k+1}
        if k == m + 1 {
            rp1 = j;
        }
        if k == m {
            r0 = j;
        }
        if m > 0 && k == m - 1 {
            rm1 = j;
        }
        if k % 2 == 0 && k > 0 {
            norm += 2.0 * j;
        }
        if j.abs() > 1e250 {
            j *= 1e-250;
            jp *= 1e-250;
            norm *= 1e-250;
            rm1 *= 1e-250;
            r0 *= 1e-250;
            rp1 *= 1e-250;
        }
    }
    norm += j;
    if m == 0 {
        rm1 = -rp1;
    }
    (rm1 / norm, r0 / norm, rp1 / norm)
}

/// Positive zeros of J_m (or of J_m' when `derivative`) below `x_max`, ascending.
/// For the Neumann case with m = 0 the trivial zero x = 0 is not included.
pub fn bessel_zeros(m: u32, derivative: bool, x_max: f64) -> Vec<f64> {
    let f = |x: f64| {
        let (j, d) = bessel_j_with_deriv(m, x);
        if derivative {
            d
        } else {
            j
        }
    };
    // no zeros of J_m or J_m' (m ≥ 1) lie below m; J_0' has none below 3.8
    let mut a = ((m as f64) - 1.0).max(0.0) + 1e-6;
    let step = 0.1;
    let mut fa = f(a);
    let mut out = Vec::new();
    while a < x_max {
        let b = (a + step).min(x_max);
        let fb = f(b);
        if fa == 0.0 {
            out.push(a);
        } else if fa * fb < 0.0 {
            out.push(refine_root(&f, a, b, fa));
        }
        a = b;
        fa = fb;
        if b >= x_max {
            break;
        }
    }
    out
}

fn refine_root(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, mut fa: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        let fm = f(mid);
        if fm == 0.0 || (b - a) < 1e-15 * mid.abs().max(1.0) {
            return mid;
        }
        if fa * fm < 0.0 {
            b = mid;
        } else {
            a = mid;
            fa = fm;
        }
    }
    0.5 * (a + b)
}

/// Checks the interlacing j_{m,n} < j_{m+1,n} < j_{m,n+1} and, for the derivative
/// zeros, m ≤ j'_{m,1} < j_{m,1} < j'_{m,2} < ... over the supplied tables.
pub fn validate_interlacing(dirichlet: &[Vec<f64>], neumann: &[Vec<f64>]) -> Result<()> {
    for m in 0..dirichlet.len().saturating_sub(1) {
        let (a, b) = (&dirichlet[m], &dirichlet[m + 1]);
        for n in 0..b.len() {
            let ok = n < a.len() && a[n] < b[n] && (n + 1 >= a.len() || b[n] < a[n + 1]);
            if !ok {
                return Err(Error::Numerical(format!(
                    "Bessel zero interlacing violated at m={m}, n={}",
                    n + 1
                )));
            }
        }
    }
    for (m, np) in neumann.iter().enumerate() {
        if m == 0 {
            continue;
        }
        let Some(d) = dirichlet.get(m) else { continue };
        for (n, &z) in np.iter().enumerate() {
            let lower = if n == 0 { m as f64 } else { d[n - 1] };
            let ok = z >= lower && (n >= d.len() || z < d[n]);
            if !ok {
                return Err(Error::Numerical(format!(
                    "derivative-zero interlacing violated at m={m}, n={}",
                    n + 1
                )));
            }
        }
    }
    Ok(())
}

/// Legendre function P_ν(cos α) of real degree, from the hypergeometric series
/// ₂F₁(−ν, ν+1; 1; sin²(α/2)). Intended for α below the first zero region.
pub fn legendre_nu_cos(nu: f64, alpha: f64) -> f64 {
    let z = (0.5 * alpha).sin().powi(2);
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 0..5000 {
        let kf = k as f64;
        term *= (kf - nu) * (kf + nu + 1.0) / ((kf + 1.0) * (kf + 1.0)) * z;
        sum += term;
        if term.abs() < 1e-16 * sum.abs().max(1e-300) && kf > nu * z.sqrt() {
            break;
        }
    }
    sum
}

/// Area of the spherical cap on the unit sphere whose first Dirichlet eigenvalue equals `lambda_sq`.
pub fn spherical_cap_area(lambda_sq: f64) -> f64 {
    let nu = -0.5 + (lambda_sq + 0.25).sqrt();
    let f = |a: f64| legendre_nu_cos(nu, a);
    let step = (0.2 / (nu + 0.5)).min(0.02);
    let mut a = step;
    let mut fa = f(0.0);
    while a < PI {
        let fb = f(a);
        if fa * fb <= 0.0 {
            let alpha = refine_root(&f, a - step, a, fa);
            return 2.0 * PI * (1.0 - alpha.cos());
        }
        fa = fb;
        a += step;
    }
    4.0 * PI
}

/// First positive zero of J_0.
pub const J0_FIRST_ZERO: f64 = 2.404_825_557_695_773;

/// First positive zero of J_1.
pub const J1_FIRST_ZERO: f64 = 3.831_705_970_207_512;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bessel_reference_values() {
        // scipy.special.jv
        let cases = [
            (0, 1.0, 0.765_197_686_557_966_5),
            (1, 2.5, 0.497_094_102_464_274_3),
            (3, 10.0, 0.058_379_379_305_186_67),
            (0, 20.0, 0.167_024_664_340_583),
            (5, 30.0, -0.143_240_295_512_077_06),
            (40, 50.0, -0.138_176_281_201_161_52),
        ];
        for (m, x, v) in cases {
            let got = bessel_j(m, x);
            assert!((got - v).abs() < 1e-12, "J_{m}({x}) = {got}, want {v}");
        }
    }

    #[test]
    fn series_and_miller_agree_at_switch() {
        for m in 0..30 {
            let s = bessel_series(m, 12.0);
            let r = bessel_miller(m, 12.0).1;
            assert!((s - r).abs() < 1e-12, "m={m}: {s} vs {r}");
        }
    }

    #[test]
    fn first_zeros() {
        let z = bessel_zeros(0, false, 10.0);
        assert!((z[0] - J0_FIRST_ZERO).abs() < 1e-12);
        assert!((z[1] - 5.520_078_110_286_311).abs() < 1e-12);
        let z1 = bessel_zeros(1, false, 5.0);
        assert!((z1[0] - J1_FIRST_ZERO).abs() < 1e-12);
        let d1 = bessel_zeros(1, true, 4.0);
        assert!((d1[0] - 1.841_183_781_340_659).abs() < 1e-12);
        let d0 = bessel_zeros(0, true, 5.0);
        assert!((d0[0] - J1_FIRST_ZERO).abs() < 1e-12);
    }

    #[test]
    fn interlacing_holds() {
        let d: Vec<_> = (0..20).map(|m| bessel_zeros(m, false, 60.0)).collect();
        let n: Vec<_> = (0..20).map(|m| bessel_zeros(m, true, 60.0)).collect();
        validate_interlacing(&d, &n).unwrap();
    }

    #[test]
    fn legendre_known_values() {
        assert_eq!(legendre(2, 0.0).0, -0.5);
        let (p, dp) = legendre(3, 0.3);
        assert!((p - 0.5 * (5.0 * 0.027 - 3.0 * 0.3)).abs() < 1e-15);
        assert!((dp - 0.5 * (15.0 * 0.09 - 3.0)).abs() < 1e-14);
        assert_eq!(legendre(4, 1.0).1, 10.0);
    }

    #[test]
    fn qbar_zonal_matches_legendre() {
        for n in 0..20 {
            let u = 0.37;
            let want = ((2 * n + 1) as f64 / (4.0 * PI)).sqrt() * legendre(n, u).0;
            assert!((qbar(n, 0, u).0 - want).abs() < 1e-13);
        }
    }

    #[test]
    fn nu_legendre_reduces_to_polynomial() {
        for n in 1..6 {
            let a = 0.7;
            assert!((legendre_nu_cos(n as f64, a) - legendre(n, a.cos()).0).abs() < 1e-12);
        }
    }

    #[test]
    fn cap_area_hemisphere() {
        // P_1(cos α) vanishes at α = π/2, one hemisphere
        assert!((spherical_cap_area(2.0) - 2.0 * PI).abs() < 1e-9);
    }
}
