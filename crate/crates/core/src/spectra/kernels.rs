use std::f64::consts::{PI, SQRT_2, TAU};

use rayon::prelude::*;
use serde::Serialize;

use super::modes::{EigenFn, ModeIndex};
use crate::error::{invalid, Error, Result};
use crate::geom::{angle_between, canonical, quadrature_grid, sphere_to_ambient, ChartPoint, SurfaceKind};
use crate::quad::{gauss_legendre_on, pairwise_sum};
use crate::special::{legendre, legendre_all};

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ProjectionKernel {
    /// ((2N+1)/4π)·P_N(cos r)
    pub addition: f64,
    /// Σ_m Y^N_m(x) Y^N_m(y)
    pub direct: f64,
}

pub fn projection_kernel_sphere(n: u32, x: ChartPoint, y: ChartPoint) -> Result<ProjectionKernel> {
    let x = canonical(SurfaceKind::Sphere, x)?;
    let y = canonical(SurfaceKind::Sphere, y)?;
    let cos_r = angle_between(sphere_to_ambient(x), sphere_to_ambient(y)).cos();
    let addition = (2 * n + 1) as f64 / (4.0 * PI) * legendre(n, cos_r).0;
    let direct = (-(n as i32)..=n as i32)
        .map(|m| {
            let mode = ModeIndex::Sphere { n, m };
            mode.value(x) * mode.value(y)
        })
        .sum();
    Ok(ProjectionKernel { addition, direct })
}

/// C in C·sinh t·(cosh t − cos r)^{−3/2}. As t → ∞ at r = 0 the kernel is
/// C·√2·e^{−t/2}, and the spectral sum is dominated by e^{−t/2}/4π.
pub fn poisson_constant() -> f64 {
    1.0 / (4.0 * PI * SQRT_2)
}

pub fn poisson_kernel_closed(t: f64, r: f64) -> Result<f64> {
    check_poisson(t, r)?;
    Ok(poisson_constant() * t.sinh() * (t.cosh() - r.cos()).powf(-1.5))
}

/// Σ_{N ≤ nmax} e^{−(N+½)t}·((2N+1)/4π)·P_N(cos r).
pub fn poisson_kernel_sum(t: f64, r: f64, nmax: usize) -> Result<f64> {
    check_poisson(t, r)?;
    let p = legendre_all(nmax, r.cos());
    let terms: Vec<f64> = p
        .iter()
        .enumerate()
        .map(|(n, pn)| (-(n as f64 + 0.5) * t).exp() * (2 * n + 1) as f64 / (4.0 * PI) * pn)
        .collect();
    Ok(pairwise_sum(&terms))
}

fn check_poisson(t: f64, r: f64) -> Result<()> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(invalid(format!("Poisson kernel needs t > 0, got {t}")));
    }
    if !(0.0..=PI).contains(&r) {
        return Err(invalid(format!("distance {r} outside [0, π]")));
    }
    Ok(())
}

/// Smooth even ρ̂ supported in ε/2 ≤ |t| ≤ ε, normalised to ρ(0) = ∫ρ̂ = 1, with
/// ρ(s) = ∫ ρ̂(t) e^{its} dt computed by Gauss–Legendre quadrature.
#[derive(Debug, Clone)]
pub struct SpectralFilter {
    pub epsilon: f64,
    nodes: Vec<f64>,
    /// quadrature weight × ρ̂(node), positive-t half only
    masses: Vec<f64>,
    /// ∫ of the unnormalised even bump
    total: f64,
}

fn bump(u: f64) -> f64 {
    if u.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - u * u)).exp()
    }
}

impl SpectralFilter {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < PI) {
            return Err(invalid(format!("filter support ε = {epsilon} must lie in (0, π)")));
        }
        let (a, b) = (0.5 * epsilon, epsilon);
        let (nodes, w) = gauss_legendre_on(400, a, b);
        let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
        let raw: Vec<f64> = nodes.iter().zip(&w).map(|(t, w)| w * bump((t - c) / h)).collect();
        let total = 2.0 * pairwise_sum(&raw);
        let masses = raw.iter().map(|m| m / total).collect();
        Ok(SpectralFilter { epsilon, nodes, masses, total })
    }

    /// ρ̂(t) under the normalisation ∫ρ̂ = 1.
    pub fn rho_hat(&self, t: f64) -> f64 {
        let (a, b) = (0.5 * self.epsilon, self.epsilon);
        let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
        bump((t.abs() - c) / h) / self.total
    }

    pub fn rho(&self, s: f64) -> f64 {
        2.0 * self
            .nodes
            .iter()
            .zip(&self.masses)
            .map(|(t, m)| m * (s * t).cos())
            .sum::<f64>()
    }

    /// Largest s at which the quadrature for ρ is still accurate: beyond it the
    /// 400 Gauss nodes alias the oscillation cos(st).
    pub fn resolved_band(&self) -> f64 {
        2.5 * self.nodes.len() as f64 / (0.5 * self.epsilon)
    }

    /// Smallest s ≥ 10/ε beyond which |ρ| stays below `tol`, scanned over the
    /// resolved band (the answer saturates at its edge).
    pub fn tail_extent(&self, tol: f64) -> f64 {
        let step = 0.25;
        let smax = self.resolved_band();
        let n = (smax / step) as usize;
        let mut last_big = 0.0;
        for i in 0..=n {
            let s = i as f64 * step;
            if self.rho(s).abs() > tol {
                last_big = s;
            }
        }
        (last_big + step).max(10.0 / self.epsilon)
    }
}

fn check_cutoff(filter: &SpectralFilter, lambda: f64, cutoff: f64) -> Result<()> {
    let need = lambda + 10.0 / filter.epsilon;
    if cutoff < need {
        return Err(Error::Truncation(format!(
            "spectral cutoff {cutoff} is below λ + 10/ε = {need}"
        )));
    }
    Ok(())
}

/// Degrees N with √(N(N+1)) ≤ cutoff and their filter weights ρ(λ − λ_N)(2N+1)/4π.
fn sphere_filter_weights(filter: &SpectralFilter, lambda: f64, cutoff: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut n = 0usize;
    while ((n * (n + 1)) as f64).sqrt() <= cutoff {
        let ln = ((n * (n + 1)) as f64).sqrt();
        out.push(filter.rho(lambda - ln) * (2 * n + 1) as f64 / (4.0 * PI));
        n += 1;
    }
    out
}

/// K_λ(x, y) = Σ_j ρ(λ − λ_j) φ_j(x) φ_j(y) over the spectrum up to `cutoff`.
pub fn filter_kernel(
    filter: &SpectralFilter,
    surface: SurfaceKind,
    lambda: f64,
    x: ChartPoint,
    y: ChartPoint,
    cutoff: f64,
) -> Result<f64> {
    check_cutoff(filter, lambda, cutoff)?;
    let x = canonical(surface, x)?;
    let y = canonical(surface, y)?;
    match surface {
        SurfaceKind::Sphere => {
            let w = sphere_filter_weights(filter, lambda, cutoff);
            let c = angle_between(sphere_to_ambient(x), sphere_to_ambient(y)).cos();
            let p = legendre_all(w.len() - 1, c);
            Ok(pairwise_sum(&w.iter().zip(&p).map(|(a, b)| a * b).collect::<Vec<_>>()))
        }
        SurfaceKind::Torus => {
            let r = cutoff / TAU;
            let kmax = r.floor() as i32 + 1;
            let d = [x[0] - y[0], x[1] - y[1]];
            let mut terms = Vec::new();
            for k1 in -kmax..=kmax {
                for k2 in -kmax..=kmax {
                    let lk = TAU * (k1 as f64).hypot(k2 as f64);
                    if lk <= cutoff {
                        terms.push(filter.rho(lambda - lk) * (TAU * (k1 as f64 * d[0] + k2 as f64 * d[1])).cos());
                    }
                }
            }
            Ok(pairwise_sum(&terms))
        }
        SurfaceKind::Disc => Err(Error::Unsupported {
            surface,
            op: "the filtered kernel",
        }),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Reproduction {
    pub points: Vec<ChartPoint>,
    pub filtered: Vec<f64>,
    pub original: Vec<f64>,
    /// RMS of filtered − original over the sample points, relative to sup|φ|.
    pub rms_error: f64,
    pub max_error: f64,
    /// Σ over eigenvalues outside the cluster of |ρ(λ − λ_j)|, with multiplicity.
    pub tail_bound: f64,
}

/// Applies ρ(λ − √Δ) to a sphere eigenfunction at sample points, by quadrature of the
/// kernel against φ on a grid fine enough to integrate the product exactly.
pub fn filter_reproduce(
    filter: &SpectralFilter,
    f: &EigenFn,
    cutoff: f64,
    points: &[ChartPoint],
) -> Result<Reproduction> {
    if f.surface != SurfaceKind::Sphere {
        return Err(Error::Unsupported {
            surface: f.surface,
            op: "eigenfunction reproduction",
        });
    }
    let lambda = f.lambda();
    check_cutoff(filter, lambda, cutoff)?;
    let w = sphere_filter_weights(filter, lambda, cutoff);
    let nc = w.len() - 1;
    let nf = ((-1.0 + (1.0 + 4.0 * f.lambda_sq).sqrt()) / 2.0).round() as usize;
    let res = ((nc + nf) / 2 + 2).max(16);
    let grid = quadrature_grid(SurfaceKind::Sphere, res)?;
    let mut phi = vec![0.0; grid.len()];
    for (i, row) in phi.chunks_mut(grid.n_cols()).enumerate() {
        f.accumulate_row(grid.rows[i], &grid.cols, row);
    }
    let amb: Vec<[f64; 3]> = (0..grid.len())
        .map(|k| sphere_to_ambient(grid.node(k / grid.n_cols(), k % grid.n_cols())))
        .collect();
    let filtered: Vec<f64> = points
        .par_iter()
        .map(|&x| {
            let xa = sphere_to_ambient(canonical(SurfaceKind::Sphere, x).unwrap_or(x));
            let terms: Vec<f64> = (0..grid.len())
                .map(|k| {
                    let c = crate::geom::dot3(xa, amb[k]).clamp(-1.0, 1.0);
                    let kern = legendre_series(&w, c);
                    kern * phi[k] * grid.weight(k / grid.n_cols(), k % grid.n_cols())
                })
                .collect();
            pairwise_sum(&terms)
        })
        .collect();
    let original: Vec<f64> = points.iter().map(|&p| f.eval(p)).collect::<Result<_>>()?;
    let scale = phi.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1e-300);
    let errs: Vec<f64> = filtered.iter().zip(&original).map(|(a, b)| (a - b) / scale).collect();
    let rms_error = (errs.iter().map(|e| e * e).sum::<f64>() / errs.len().max(1) as f64).sqrt();
    let max_error = errs.iter().fold(0.0f64, |a, e| a.max(e.abs()));
    let tail_bound = (0..=nc)
        .filter(|&n| n != nf)
        .map(|n| filter.rho(lambda - ((n * (n + 1)) as f64).sqrt()).abs() * (2 * n + 1) as f64)
        .sum();
    Ok(Reproduction {
        points: points.to_vec(),
        filtered,
        original,
        rms_error,
        max_error,
        tail_bound,
    })
}

/// Σ_N w_N P_N(c) by the three-term recurrence.
fn legendre_series(w: &[f64], c: f64) -> f64 {
    let mut total = w[0];
    if w.len() == 1 {
        return total;
    }
    let (mut p0, mut p1) = (1.0, c);
    total += w[1] * c;
    for n in 1..w.len() - 1 {
        let nf = n as f64;
        let p2 = ((2.0 * nf + 1.0) * c * p1 - nf * p0) / (nf + 1.0);
        total += w[n + 1] * p2;
        p0 = p1;
        p1 = p2;
    }
    total
}

/// sup over x, y of |∇ₓK_λ(x, y)| on the sphere. By rotation invariance this is
/// sup_r |Σ_N w_N P_N'(cos r)|·sin r, maximised on a fine r-grid and refined.
pub fn filter_gradient_sup(filter: &SpectralFilter, lambda: f64, cutoff: f64) -> Result<f64> {
    check_cutoff(filter, lambda, cutoff)?;
    let w = sphere_filter_weights(filter, lambda, cutoff);
    let g = |r: f64| -> f64 {
        let c = r.cos();
        let s = r.sin();
        let mut total = 0.0;
        let (mut p0, mut p1) = (1.0, c);
        let (mut d0, mut d1) = (0.0, 1.0);
        if w.len() > 1 {
            total += w[1] * d1;
        }
        for n in 1..w.len().saturating_sub(1) {
            let nf = n as f64;
            let p2 = ((2.0 * nf + 1.0) * c * p1 - nf * p0) / (nf + 1.0);
            let d2 = d0 + (2.0 * nf + 1.0) * p1;
            total += w[n + 1] * d2;
            p0 = p1;
            p1 = p2;
            d0 = d1;
            d1 = d2;
        }
        (total * s).abs()
    };
    let samples = 4000;
    let h = PI / samples as f64;
    let vals: Vec<f64> = (0..=samples).into_par_iter().map(|i| g(i as f64 * h)).collect();
    let (imax, _) = vals
        .iter()
        .enumerate()
        .fold((0, f64::MIN), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
    let (mut a, mut b) = ((imax as f64 - 1.0).max(0.0) * h, ((imax + 1) as f64 * h).min(PI));
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..60 {
        let x1 = b - phi * (b - a);
        let x2 = a + phi * (b - a);
        if g(x1) > g(x2) {
            b = x2;
        } else {
            a = x1;
        }
    }
    Ok(vals[imax].max(g(0.5 * (a + b))))
}

/// Filtered kernel on the sphere diagonal, K_λ(x, x) = Σ_N ρ(λ − λ_N)(2N+1)/4π.
pub fn filter_diagonal_sphere(filter: &SpectralFilter, lambda: f64, cutoff: f64) -> Result<f64> {
    check_cutoff(filter, lambda, cutoff)?;
    Ok(pairwise_sum(&sphere_filter_weights(filter, lambda, cutoff)))
}

/// Spectral-window projector on the sphere diagonal, Π_{[λ, λ+1)}(x, x).
pub fn window_projector_diagonal_sphere(lambda: f64) -> f64 {
    let mut total = 0.0;
    let mut n = 0usize;
    loop {
        let ln = ((n * (n + 1)) as f64).sqrt();
        if ln >= lambda + 1.0 {
            break;
        }
        if ln >= lambda {
            total += (2 * n + 1) as f64 / (4.0 * PI);
        }
        n += 1;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn filter_normalisation_independent_rule() {
        // composite Simpson on a fine grid as the independent quadrature
        let f = SpectralFilter::new(2.0).unwrap();
        let n = 20000;
        let (a, b) = (1.0, 2.0);
        let h = (b - a) / n as f64;
        let mut s = f.rho_hat(a) + f.rho_hat(b);
        for i in 1..n {
            s += f.rho_hat(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        let integral = 2.0 * s * h / 3.0;
        assert!((integral - 1.0).abs() < 1e-10, "{integral}");
        assert!((f.rho(0.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn poisson_limits() {
        let t = 30.0;
        let want = (-t / 2.0f64).exp() / (4.0 * PI);
        let got = poisson_kernel_closed(t, 0.0).unwrap();
        assert!((got / want - 1.0).abs() < 1e-10);
        assert!(poisson_kernel_closed(0.0, 1.0).is_err());
    }

    #[test]
    fn truncation_rejected() {
        let f = SpectralFilter::new(2.0).unwrap();
        assert!(matches!(
            filter_kernel(&f, SurfaceKind::Sphere, 10.0, [0.1, 0.0], [0.2, 0.0], 12.0),
            Err(Error::Truncation(_))
        ));
    }
}
