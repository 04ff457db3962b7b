//! Restrictions of eigenfunctions to closed geodesics: orbital Fourier
//! coefficients, period (Kuznecov) sums, sign changes along γ, and the equator
//! mode-weight profile compared with the arcsine law.

use std::f64::consts::{PI, SQRT_2, TAU};

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::fit::{power_fit, LinearFit};
use crate::geom::{dot3, random_point, Frame, GeodesicSegment, SurfaceKind};
use crate::quad::pairwise_sum;
use crate::special::{legendre_all, qbar_column};
use crate::spectra::{enumerate_modes, within, EigenFn, ModeIndex};

#[derive(Debug, Clone, Serialize)]
pub struct RestrictedFn {
    pub geodesic: GeodesicSegment,
    pub samples: Vec<f64>,
    pub lambda: f64,
    /// max |φ| over a fixed random sample of the surface, for relative thresholds
    pub scale: f64,
}

impl RestrictedFn {
    pub fn count(&self) -> usize {
        self.samples.len()
    }

    /// λL/2π, the highest orbital frequency an eigenfunction restriction can carry.
    pub fn bandwidth(&self) -> f64 {
        self.lambda * self.geodesic.length / TAU
    }
}

fn function_scale(f: &EigenFn) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    (0..2000)
        .map(|_| f.value(random_point(f.surface, &mut rng)).abs())
        .fold(0.0, f64::max)
}

/// Power-of-two sample count with at least 8 samples per unit of bandwidth.
pub fn restriction_count(lambda: f64, length: f64) -> usize {
    ((8.0 * lambda * length / TAU).ceil() as usize).max(64).next_power_of_two()
}

/// Samples φ∘γ at equispaced arc points: t_i = iL/n on closed curves, both
/// endpoints included on open ones.
pub fn restrict_eigenfn(f: &EigenFn, seg: &GeodesicSegment) -> Result<RestrictedFn> {
    let count = restriction_count(f.lambda(), seg.length);
    restrict_with_count(f, seg, count)
}

pub fn restrict_with_count(f: &EigenFn, seg: &GeodesicSegment, count: usize) -> Result<RestrictedFn> {
    if !matches!(f.surface, SurfaceKind::Torus | SurfaceKind::Sphere) || f.surface != seg.surface {
        return Err(Error::Unsupported {
            surface: f.surface,
            op: "restriction to geodesics",
        });
    }
    if count < 2 {
        return Err(invalid("a restriction needs at least two samples"));
    }
    let denom = if seg.closed { count } else { count - 1 } as f64;
    let samples = (0..count)
        .map(|i| f.value(seg.point_unchecked(seg.length * i as f64 / denom)))
        .collect();
    Ok(RestrictedFn {
        geodesic: *seg,
        samples,
        lambda: f.lambda(),
        scale: function_scale(f),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct OrbitalSpectrum {
    /// frequencies −n/2 .. n/2−1
    pub frequencies: Vec<i64>,
    pub coefficients: Vec<Complex64>,
}

impl OrbitalSpectrum {
    pub fn coefficient(&self, n: i64) -> Option<Complex64> {
        self.frequencies.iter().position(|k| *k == n).map(|i| self.coefficients[i])
    }

    pub fn energy(&self) -> f64 {
        pairwise_sum(&self.coefficients.iter().map(|c| c.norm_sqr()).collect::<Vec<_>>())
    }
}

/// ν(n) = (1/L)∫ φ(γ(t)) e^{−2πint/L} dt by the periodic trapezoid rule (an FFT).
pub fn orbital_fourier(r: &RestrictedFn) -> Result<OrbitalSpectrum> {
    if !r.geodesic.closed {
        return Err(invalid("Fourier analysis needs a closed geodesic"));
    }
    let n = r.count();
    if (n as f64) < 4.0 * r.bandwidth() {
        return Err(invalid(format!(
            "{n} samples alias a restriction of bandwidth {:.1}; at least {} are needed",
            r.bandwidth(),
            (4.0 * r.bandwidth()).ceil()
        )));
    }
    let mut buf: Vec<Complex64> = r.samples.iter().map(|v| Complex64::new(*v, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let half = (n / 2) as i64;
    let mut frequencies = Vec::with_capacity(n);
    let mut coefficients = Vec::with_capacity(n);
    for k in -half..(n as i64 - half) {
        frequencies.push(k);
        coefficients.push(buf[k.rem_euclid(n as i64) as usize] / n as f64);
    }
    Ok(OrbitalSpectrum { frequencies, coefficients })
}

/// Cyclic (closed γ) or linear sign changes of the sampled restriction.
pub fn sign_changes(r: &RestrictedFn) -> Result<usize> {
    let max = r.samples.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if max <= 1e-12 * r.scale {
        return Err(Error::Numerical(format!(
            "the restriction vanishes (max {max:.2e} against sup {:.2e}); φ is odd across γ",
            r.scale
        )));
    }
    let s = &r.samples;
    let n = s.len();
    let steps = if r.geodesic.closed { n } else { n - 1 };
    // samples that are zero to rounding take the sign of the previous sample
    let tol = 1e-12 * r.scale;
    let mut signs: Vec<bool> = Vec::with_capacity(n);
    let first = s.iter().find(|v| v.abs() > tol).map(|v| *v > 0.0).unwrap_or(true);
    let mut last = first;
    for v in s {
        if v.abs() > tol {
            last = *v > 0.0;
        }
        signs.push(last);
    }
    let count = (0..steps).filter(|&i| signs[i] != signs[(i + 1) % n]).count();
    if r.geodesic.closed && count % 2 == 1 {
        return Err(Error::Numerical(format!("odd number of sign changes ({count}) on a closed curve")));
    }
    Ok(count)
}

/// Periods ∫_γ f φ_j ds of an orthonormal basis, one row per mode.
#[derive(Debug, Clone, Serialize)]
pub struct PeriodTable {
    pub surface: SurfaceKind,
    pub lambda_max: f64,
    /// λ_j^{−1/2}∫ f ∂_νφ_j instead of ∫ f φ_j
    pub normal: bool,
    pub modes: Vec<ModeIndex>,
    pub periods: Vec<f64>,
    /// autocorrelation of the weights f(t_i)·Δt over index offsets, for the kernel cross-check
    autocorrelation: Vec<f64>,
    samples: usize,
    length: f64,
    frame: Frame,
}

/// Periods of every basis element with λ ≤ `lambda_max` against the test function
/// `test(t)` on the closed geodesic. Normal derivatives are available on the sphere.
pub fn period_table(
    seg: &GeodesicSegment,
    test: &(dyn Fn(f64) -> f64 + Sync),
    lambda_max: f64,
    normal: bool,
) -> Result<PeriodTable> {
    if !seg.closed {
        return Err(invalid("period sums need a closed geodesic"));
    }
    if normal && seg.surface != SurfaceKind::Sphere {
        return Err(Error::Unsupported {
            surface: seg.surface,
            op: "normal-derivative periods",
        });
    }
    let count = restriction_count(lambda_max.max(1.0), seg.length);
    let dt = seg.length / count as f64;
    let ts: Vec<f64> = (0..count).map(|i| seg.length * i as f64 / count as f64).collect();
    let w: Vec<f64> = ts.iter().map(|t| test(*t) * dt).collect();
    let (modes, periods) = match seg.surface {
        SurfaceKind::Sphere => sphere_periods(seg, &ts, &w, lambda_max, normal),
        SurfaceKind::Torus => {
            let modes = enumerate_modes(SurfaceKind::Torus, lambda_max)?;
            let pts: Vec<_> = ts.iter().map(|t| seg.point_unchecked(*t)).collect();
            let periods = modes
                .par_iter()
                .map(|m| pairwise_sum(&pts.iter().zip(&w).map(|(p, wi)| wi * m.value(*p)).collect::<Vec<_>>()))
                .collect();
            (modes, periods)
        }
        SurfaceKind::Disc => unreachable!("disc geodesics are rejected at construction"),
    };
    let autocorrelation = (0..count)
        .map(|d| pairwise_sum(&(0..count).map(|i| w[i] * w[(i + d) % count]).collect::<Vec<_>>()))
        .collect();
    Ok(PeriodTable {
        surface: seg.surface,
        lambda_max,
        normal,
        modes,
        periods,
        autocorrelation,
        samples: count,
        length: seg.length,
        frame: seg.frame,
    })
}

fn sphere_periods(
    seg: &GeodesicSegment,
    ts: &[f64],
    w: &[f64],
    lambda_max: f64,
    normal: bool,
) -> (Vec<ModeIndex>, Vec<f64>) {
    let mut nmax = 0u32;
    while within((((nmax + 1) * (nmax + 2)) as f64).sqrt(), lambda_max) {
        nmax += 1;
    }
    let width = (nmax + 1) as usize;
    let idx = |n: u32, m: i32| (n * n) as usize + (m + n as i32) as usize;
    let nvec = width * width;
    let normal_vec = seg.normal();
    // fixed chunking so the reduction order does not depend on the thread count
    let chunk = 32;
    let partials: Vec<Vec<f64>> = ts
        .par_chunks(chunk)
        .enumerate()
        .map(|(c, tchunk)| {
            let mut acc = vec![0.0; nvec];
            for (k, &t) in tchunk.iter().enumerate() {
                let wi = w[c * chunk + k];
                let p = seg.point_unchecked(t);
                let (s, u) = p[0].sin_cos();
                let (st, ct) = p[1].sin_cos();
                // n·e_φ and n·e_θ for the normal derivative
                let e_phi = [u * ct, u * st, -s];
                let e_theta = [-st, ct, 0.0];
                let (nphi, ntheta) = (dot3(normal_vec, e_phi), dot3(normal_vec, e_theta));
                for m in 0..=nmax {
                    let (q, dq) = qbar_column(m, nmax, u);
                    let sm = s.powi(m as i32);
                    let sm1 = if m == 0 { 0.0 } else { s.powi(m as i32 - 1) };
                    let (smt, cmt) = (m as f64 * p[1]).sin_cos();
                    for n in m..=nmax {
                        let i = (n - m) as usize;
                        let radial = q[i] * sm;
                        if !normal {
                            if m == 0 {
                                acc[idx(n, 0)] += wi * radial;
                            } else {
                                acc[idx(n, m as i32)] += wi * SQRT_2 * radial * cmt;
                                acc[idx(n, -(m as i32))] += wi * SQRT_2 * radial * smt;
                            }
                        } else {
                            let dphi = -s * dq[i] * sm + m as f64 * u * sm1 * q[i];
                            let dth = m as f64 * q[i] * sm1;
                            let scale = wi / ((n * (n + 1)) as f64).sqrt().max(1.0);
                            if m == 0 {
                                acc[idx(n, 0)] += scale * dphi * nphi;
                            } else {
                                acc[idx(n, m as i32)] += scale * SQRT_2 * (dphi * cmt * nphi - dth * smt * ntheta);
                                acc[idx(n, -(m as i32))] += scale * SQRT_2 * (dphi * smt * nphi + dth * cmt * ntheta);
                            }
                        }
                    }
                }
            }
            acc
        })
        .collect();
    let mut periods = vec![0.0; nvec];
    for part in &partials {
        for (a, b) in periods.iter_mut().zip(part) {
            *a += b;
        }
    }
    let mut modes = Vec::with_capacity(nvec);
    for n in 0..=nmax {
        for m in -(n as i32)..=(n as i32) {
            modes.push(ModeIndex::Sphere { n, m });
        }
    }
    (modes, periods)
}

#[derive(Debug, Clone, Serialize)]
pub struct ClusterPeriod {
    pub lambda: f64,
    pub multiplicity: usize,
    /// Σ over the cluster's basis of |period|²
    pub basis_sum: f64,
    /// ∫∫_γ f(s)f(s') Π(γ(s), γ(s')) ds ds′, basis-free (value periods only)
    pub kernel_sum: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct KuznecovSums {
    pub clusters: Vec<ClusterPeriod>,
    /// (λ of cluster, S including that cluster)
    pub partial: Vec<(f64, f64)>,
    /// power fit of S over the requested λ window
    pub fit: Option<LinearFit>,
}

fn cluster_kernel(table: &PeriodTable, modes: &[ModeIndex]) -> Option<f64> {
    if table.normal {
        return None;
    }
    let n = table.samples;
    let kernel_at = |d: usize| -> f64 {
        let s = table.length * d as f64 / n as f64;
        match table.surface {
            SurfaceKind::Sphere => {
                let ModeIndex::Sphere { n: deg, .. } = modes[0] else { return 0.0 };
                let p = legendre_all(deg as usize, s.cos());
                (2 * deg + 1) as f64 / (4.0 * PI) * p[deg as usize]
            }
            SurfaceKind::Torus => {
                let Frame::Torus { dir } = table.frame else { return 0.0 };
                // the cos/sin pair of each k contributes 2cos 2π⟨k, x−y⟩, one cos per parity
                modes
                    .iter()
                    .map(|m| match *m {
                        ModeIndex::TorusConstant => 1.0,
                        ModeIndex::Torus { k, .. } => (TAU * s * (k[0] as f64 * dir[0] + k[1] as f64 * dir[1])).cos(),
                        _ => 0.0,
                    })
                    .sum::<f64>()
            }
            SurfaceKind::Disc => 0.0,
        }
    };
    let terms: Vec<f64> = (0..n).map(|d| table.autocorrelation[d] * kernel_at(d)).collect();
    Some(pairwise_sum(&terms))
}

/// Cluster-by-cluster period sums S(λ') = Σ_{λ_j ≤ λ'} |∫_γ f φ_j|² for λ' ≤ λ.
/// Cluster values are cross-checked against the projection-kernel double integral
/// for clusters up to `kernel_lambda`.
pub fn kuznecov_sum(table: &PeriodTable, lambda: f64, kernel_lambda: f64, fit_window: Option<(f64, f64)>) -> Result<KuznecovSums> {
    if !within(lambda, table.lambda_max) {
        return Err(invalid(format!(
            "the basis is enumerated to λ = {}, below the requested {lambda}",
            table.lambda_max
        )));
    }
    let mut clusters: Vec<ClusterPeriod> = Vec::new();
    let mut start = 0;
    let lam: Vec<f64> = table.modes.iter().map(|m| m.lambda()).collect();
    while start < table.modes.len() && within(lam[start], lambda) {
        let mut end = start + 1;
        while end < lam.len() && (lam[end] - lam[start]).abs() <= 1e-9 * lam[start].max(1.0) {
            end += 1;
        }
        let basis_sum = pairwise_sum(&table.periods[start..end].iter().map(|p| p * p).collect::<Vec<_>>());
        let kernel_sum = if within(lam[start], kernel_lambda) {
            cluster_kernel(table, &table.modes[start..end])
        } else {
            None
        };
        clusters.push(ClusterPeriod {
            lambda: lam[start],
            multiplicity: end - start,
            basis_sum,
            kernel_sum,
        });
        start = end;
    }
    let mut partial = Vec::with_capacity(clusters.len());
    let mut s = 0.0;
    for c in &clusters {
        s += c.basis_sum;
        partial.push((c.lambda, s));
    }
    let fit = match fit_window {
        Some((lo, hi)) => {
            let (x, y): (Vec<f64>, Vec<f64>) = partial
                .iter()
                .filter(|(l, v)| *l >= lo && *l <= hi && *v > 0.0)
                .copied()
                .unzip();
            Some(power_fit(&x, &y)?)
        }
        None => None,
    };
    Ok(KuznecovSums { clusters, partial, fit })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SmallnessFraction {
    pub total: usize,
    pub large: usize,
    pub fraction: f64,
}

/// Fraction of basis elements with λ ∈ [lo, hi] whose period exceeds λ^{−1/4}(log λ)^{1/2}.
pub fn period_smallness_fraction(table: &PeriodTable, lo: f64, hi: f64) -> SmallnessFraction {
    let mut total = 0;
    let mut large = 0;
    for (m, p) in table.modes.iter().zip(&table.periods) {
        let l = m.lambda();
        if l >= lo && l <= hi && l > 1.0 {
            total += 1;
            if p.abs() > l.powf(-0.25) * l.ln().sqrt() {
                large += 1;
            }
        }
    }
    SmallnessFraction {
        total,
        large,
        fraction: if total == 0 { 0.0 } else { large as f64 / total as f64 },
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct QerProfile {
    pub degree: u32,
    pub m: Vec<i32>,
    /// |Y^N_m|² + |ω_m⁻¹ ∂_φ Y^N_m|² at (π/2, 0), complex basis, normalized to sum 1
    pub weights: Vec<f64>,
    /// arcsine mass of [(m−½)/N, (m+½)/N]
    pub arcsine: Vec<f64>,
    /// Σ_m |Y^N_m(π/2, 0)|², which the addition theorem fixes at (2N+1)/4π
    pub value_sum: f64,
    pub cdf_distance: f64,
}

/// Equator weights of the degree-N basis against the arcsine density (1/π)(1−σ²)^{−1/2}.
pub fn qer_mode_profile(n: u32) -> Result<QerProfile> {
    if n < 8 {
        return Err(invalid("the mode-weight profile needs N ≥ 8"));
    }
    let nf = n as f64;
    let mut ms = Vec::with_capacity(2 * n as usize + 1);
    let mut raw = Vec::with_capacity(ms.capacity());
    let mut values = Vec::with_capacity(ms.capacity());
    let mut per_m = vec![(0.0, 0.0); n as usize + 1];
    for m in 0..=n {
        let (q, dq) = qbar_column(m, n, 0.0);
        // at φ = π/2: sin φ = 1, and ∂_φ[Q̄(cos φ) sin^m φ] = −Q̄'(0)
        per_m[m as usize] = (q[(n - m) as usize], dq[(n - m) as usize]);
    }
    for m in -(n as i32)..=(n as i32) {
        let (q, dq) = per_m[m.unsigned_abs() as usize];
        let omega = (nf * (nf + 1.0) - (m * m) as f64).max(1.0).sqrt();
        ms.push(m);
        values.push(q * q);
        raw.push(q * q + (dq / omega).powi(2));
    }
    let total = pairwise_sum(&raw);
    let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
    let cdf = |s: f64| 0.5 + s.clamp(-1.0, 1.0).asin() / PI;
    let arcsine: Vec<f64> = ms
        .iter()
        .map(|&m| cdf((m as f64 + 0.5) / nf) - cdf((m as f64 - 0.5) / nf))
        .collect();
    let mut a = 0.0;
    let mut b = 0.0;
    let mut dist = 0.0f64;
    for (w, r) in weights.iter().zip(&arcsine) {
        a += w;
        b += r;
        dist = dist.max((a - b).abs());
    }
    Ok(QerProfile {
        degree: n,
        m: ms,
        weights,
        arcsine,
        value_sum: pairwise_sum(&values),
        cdf_distance: dist,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::Parity;

    fn eq() -> GeodesicSegment {
        GeodesicSegment::equator()
    }

    #[test]
    fn highest_weight_on_equator() {
        let n = 12;
        let f = EigenFn::single(ModeIndex::sphere(n, n as i32).unwrap());
        let r = restrict_eigenfn(&f, &eq()).unwrap();
        assert_eq!(sign_changes(&r).unwrap(), 2 * n as usize);
        let s = orbital_fourier(&r).unwrap();
        let total = s.energy();
        let peak = s.coefficient(n as i64).unwrap().norm_sqr() + s.coefficient(-(n as i64)).unwrap().norm_sqr();
        assert!((peak - total).abs() < 1e-10 * total);
        for (k, c) in s.frequencies.iter().zip(&s.coefficients) {
            if k.abs() != n as i64 {
                assert!(c.norm() < 1e-10);
            }
        }
        // Parseval against the arc average
        let avg = r.samples.iter().map(|v| v * v).sum::<f64>() / r.count() as f64;
        assert!((total - avg).abs() < 1e-12);
    }

    #[test]
    fn zonal_restriction_is_constant() {
        let f = EigenFn::single(ModeIndex::sphere(6, 0).unwrap());
        let r = restrict_eigenfn(&f, &eq()).unwrap();
        let want = (13.0 / (4.0 * PI)).sqrt() * crate::special::legendre(6, 0.0).0;
        assert!(r.samples.iter().all(|v| (v - want).abs() < 1e-12));
        assert_eq!(sign_changes(&r).unwrap(), 0);
        let s = orbital_fourier(&r).unwrap();
        assert!((s.coefficient(0).unwrap().re - want).abs() < 1e-12);
        // odd zonal harmonics vanish on the equator
        let odd = EigenFn::single(ModeIndex::sphere(5, 0).unwrap());
        assert!(sign_changes(&restrict_eigenfn(&odd, &eq()).unwrap()).is_err());
    }

    #[test]
    fn torus_pure_frequency() {
        let f = EigenFn::single(ModeIndex::torus([2, 1], Parity::Sin).unwrap());
        let seg = GeodesicSegment::torus_closed([0.1, 0.2], 3, 4).unwrap();
        let r = restrict_eigenfn(&f, &seg).unwrap();
        // ⟨k, (3,4)⟩ = 10 periods along γ
        assert_eq!(sign_changes(&r).unwrap(), 20);
        let s = orbital_fourier(&r).unwrap();
        assert!(s.coefficient(10).unwrap().norm_sqr() > 0.49);
        let short = restrict_with_count(&f, &seg, 16).unwrap();
        assert!(orbital_fourier(&short).is_err());
    }

    #[test]
    fn equator_period_oracle() {
        let table = period_table(&eq(), &|_| 1.0, (30.0f64 * 31.0).sqrt(), false).unwrap();
        let k = kuznecov_sum(&table, table.lambda_max, table.lambda_max, None).unwrap();
        for c in &k.clusters {
            let n = ((4.0 * c.lambda * c.lambda + 1.0).sqrt() - 1.0) / 2.0;
            let n = n.round() as u32;
            let p0 = crate::special::legendre(n, 0.0).0;
            let want = PI * (2 * n + 1) as f64 * p0 * p0;
            assert!((c.basis_sum - want).abs() < 1e-10, "N={n}: {} vs {want}", c.basis_sum);
            assert!((c.kernel_sum.unwrap() - c.basis_sum).abs() < 1e-10);
        }
        assert!((k.clusters[2].basis_sum - 5.0 * PI / 4.0).abs() < 1e-10);
    }

    #[test]
    fn torus_kernel_matches_basis() {
        let seg = GeodesicSegment::torus_closed([0.3, 0.1], 1, 2).unwrap();
        let test = |t: f64| 1.0 + 0.5 * (TAU * t / 5f64.sqrt()).cos();
        let table = period_table(&seg, &test, 40.0, false).unwrap();
        let k = kuznecov_sum(&table, 40.0, 40.0, None).unwrap();
        for c in &k.clusters {
            let kern = c.kernel_sum.unwrap();
            assert!((kern - c.basis_sum).abs() < 1e-9 * c.basis_sum.max(1.0), "{}: {kern} vs {}", c.lambda, c.basis_sum);
        }
        assert!(kuznecov_sum(&table, 41.0, 0.0, None).is_err());
    }

    #[test]
    fn normal_periods_of_odd_zonal() {
        // ∂_φ Y^N_0 on the equator is constant, and zero for even N
        let table = period_table(&eq(), &|_| 1.0, 12.0, true).unwrap();
        for (m, p) in table.modes.iter().zip(&table.periods) {
            let ModeIndex::Sphere { n, m } = *m else { unreachable!() };
            if m != 0 || n % 2 == 0 {
                assert!(p.abs() < 1e-10, "N={n} m={m}: {p}");
            }
        }
    }

    #[test]
    fn qer_profile_properties() {
        let p = qer_mode_profile(64).unwrap();
        let n = p.m.len();
        for i in 0..n {
            assert!((p.weights[i] - p.weights[n - 1 - i]).abs() < 1e-14);
        }
        assert!((p.value_sum - 129.0 / (4.0 * PI)).abs() < 1e-10);
        assert!(qer_mode_profile(4).is_err());
    }
}
