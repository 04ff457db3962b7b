//! Gauss–Legendre rules, adaptive panels and order-stable summation.

use num_complex::Complex64;
use std::f64::consts::PI;

/// Gauss–Legendre nodes (ascending) and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let half = n.div_ceil(2);
    for i in 0..half {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = crate::special::legendre(n as u32, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = crate::special::legendre(n as u32, z);
        if d != 0.0 {
            dp = d;
        }
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

/// Gauss–Legendre rule mapped to [a, b].
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
    (
        x.iter().map(|&t| c + h * t).collect(),
        w.iter().map(|&v| h * v).collect(),
    )
}

/// Sum whose rounding does not depend on how work was split across threads.
pub fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 16 {
        return v.iter().sum();
    }
    let mid = v.len() / 2;
    pairwise_sum(&v[..mid]) + pairwise_sum(&v[mid..])
}

/// Adaptive Gauss–Legendre integration of a complex integrand over [a, b].
/// Returns (integral, error estimate). Fails if the recursion budget runs out.
pub fn adaptive_gl<F: Fn(f64) -> Complex64>(
    f: &F,
    a: f64,
    b: f64,
    tol: f64,
    max_depth: u32,
) -> Result<(Complex64, f64), f64> {
    let rule = gauss_legendre(16);
    let whole = panel(f, &rule, a, b);
    adaptive_rec(f, &rule, a, b, whole, tol, max_depth)
}

fn panel<F: Fn(f64) -> Complex64>(f: &F, rule: &(Vec<f64>, Vec<f64>), a: f64, b: f64) -> Complex64 {
    let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
    rule.0
        .iter()
        .zip(&rule.1)
        .map(|(&x, &w)| f(c + h * x) * (w * h))
        .sum()
}

fn adaptive_rec<F: Fn(f64) -> Complex64>(
    f: &F,
    rule: &(Vec<f64>, Vec<f64>),
    a: f64,
    b: f64,
    whole: Complex64,
    tol: f64,
    depth: u32,
) -> Result<(Complex64, f64), f64> {
    let m = 0.5 * (a + b);
    let left = panel(f, rule, a, m);
    let right = panel(f, rule, m, b);
    let err = (left + right - whole).norm();
    if !err.is_finite() {
        return Err(a);
    }
    if err <= tol {
        return Ok((left + right, err));
    }
    if depth == 0 {
        return Err(m);
    }
    let (l, el) = adaptive_rec(f, rule, a, m, left, 0.5 * tol, depth - 1)?;
    let (r, er) = adaptive_rec(f, rule, m, b, right, 0.5 * tol, depth - 1)?;
    Ok((l + r, el + er))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre(10);
        for deg in 0..20 {
            let got: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg)).sum();
            let want = if deg % 2 == 0 { 2.0 / (deg as f64 + 1.0) } else { 0.0 };
            assert!((got - want).abs() < 1e-14, "degree {deg}");
        }
    }

    #[test]
    fn large_rule_weights_sum() {
        let (_, w) = gauss_legendre(1024);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn adaptive_handles_peaks() {
        let f = |x: f64| Complex64::new(1.0 / (1e-4 + x * x), 0.0);
        let (v, _) = adaptive_gl(&f, -1.0, 1.0, 1e-10, 40).unwrap();
        let want = 2.0 / 1e-2 * (1.0f64 / 1e-2).atan();
        assert!((v.re - want).abs() < 1e-8 * want);
    }
}
