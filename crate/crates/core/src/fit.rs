//! Least-squares lines, used for all exponent fits, and a small dense solver.

use serde::Serialize;

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, Serialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
    pub points: usize,
}

pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<LinearFit> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(invalid("a line fit needs at least two paired points"));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(invalid("non-finite value in fit data"));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(invalid("fit abscissae are all equal"));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - intercept - slope * a).powi(2))
        .sum();
    let slope_stderr = if x.len() > 2 {
        (rss / (n - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Ok(LinearFit {
        slope,
        intercept,
        slope_stderr,
        points: x.len(),
    })
}

/// Slope of log y against log x.
pub fn power_fit(x: &[f64], y: &[f64]) -> Result<LinearFit> {
    if x.iter().chain(y).any(|v| *v <= 0.0) {
        return Err(invalid("power-law fit needs positive data"));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    linear_fit(&lx, &ly)
}

/// `count` geometrically spaced values from a to b inclusive.
pub fn geometric(a: f64, b: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![a];
    }
    let r = (b / a).ln() / (count - 1) as f64;
    (0..count).map(|i| a * (r * i as f64).exp()).collect()
}

/// Minimizes ‖A x − b‖₂ by Householder QR. `a` is row-major with `cols` columns.
pub fn least_squares(a: &[f64], cols: usize, b: &[f64]) -> Result<Vec<f64>> {
    let rows = b.len();
    if a.len() != rows * cols || rows < cols {
        return Err(invalid("least-squares system is under-determined or misshapen"));
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    for k in 0..cols {
        let norm = (k..rows).map(|i| a[i * cols + k].powi(2)).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(invalid("least-squares matrix is rank deficient"));
        }
        let alpha = if a[k * cols + k] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = (k..rows).map(|i| a[i * cols + k]).collect();
        v[0] -= alpha;
        let vv: f64 = v.iter().map(|x| x * x).sum();
        for j in k..cols {
            let d: f64 = (k..rows).map(|i| v[i - k] * a[i * cols + j]).sum::<f64>() * 2.0 / vv;
            for i in k..rows {
                a[i * cols + j] -= d * v[i - k];
            }
        }
        let d: f64 = (k..rows).map(|i| v[i - k] * b[i]).sum::<f64>() * 2.0 / vv;
        for i in k..rows {
            b[i] -= d * v[i - k];
        }
    }
    let mut x = vec![0.0; cols];
    for k in (0..cols).rev() {
        let s: f64 = (k + 1..cols).map(|j| a[k * cols + j] * x[j]).sum();
        let d = a[k * cols + k];
        if d.abs() < 1e-13 * a[0].abs() {
            return Err(invalid("least-squares matrix is numerically rank deficient"));
        }
        x[k] = (b[k] - s) / d;
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y: Vec<f64> = x.iter().map(|v| 3.0 * v - 1.0).collect();
        let f = linear_fit(&x, &y).unwrap();
        assert!((f.slope - 3.0).abs() < 1e-14 && (f.intercept + 1.0).abs() < 1e-14);
        assert!(f.slope_stderr < 1e-12);
    }

    #[test]
    fn power_law() {
        let x = geometric(1.0, 100.0, 9);
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v.powf(1.5)).collect();
        assert!((power_fit(&x, &y).unwrap().slope - 1.5).abs() < 1e-12);
    }

    #[test]
    fn least_squares_recovers_plane() {
        // z = 1 + 2x − 3y sampled on a grid, plus a zero-mean perturbation
        let mut a = Vec::new();
        let mut b = Vec::new();
        for i in 0..5 {
            for j in 0..4 {
                let (x, y) = (i as f64, j as f64);
                a.extend([1.0, x, y]);
                b.push(1.0 + 2.0 * x - 3.0 * y);
            }
        }
        let sol = least_squares(&a, 3, &b).unwrap();
        assert!((sol[0] - 1.0).abs() < 1e-12 && (sol[1] - 2.0).abs() < 1e-12 && (sol[2] + 3.0).abs() < 1e-12);
    }
}
