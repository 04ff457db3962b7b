//! Three operations for the static page in `www/`. Each returns a string (SVG or
//! JSON) so the page only has to insert text. The `*_impl` functions carry the
//! logic and are tested natively; the exported wrappers only convert errors.

use serde_json::json;
use wasm_bindgen::prelude::*;

use nodal_lab::cx::{count_zeros_rect, growth_rate, torus_zero_count, tube_point, zero_locations, CxEigenFn, StripRect};
use nodal_lab::field::GridField;
use nodal_lab::geom::{GeodesicSegment, SurfaceKind, DEFAULT_STRIP};
use nodal_lab::io::nodal_svg;
use nodal_lab::nodal::extract_nodal;
use nodal_lab::spectra::{Bc, EigenFn, ModeIndex, Parity};

fn parity(sin: bool) -> Parity {
    if sin {
        Parity::Sin
    } else {
        Parity::Cos
    }
}

/// torus: k = (a, b); sphere: N = a, m = b; disc (Dirichlet): m = a, radial index n = b.
fn mode(surface: &str, a: i32, b: i32, sin: bool) -> Result<ModeIndex, String> {
    let s: SurfaceKind = surface.parse().map_err(|e| format!("{e}"))?;
    let m = match s {
        SurfaceKind::Torus => ModeIndex::torus([a, b], parity(sin)),
        SurfaceKind::Sphere => ModeIndex::sphere(a.max(0) as u32, b),
        SurfaceKind::Disc => ModeIndex::disc(Bc::Dirichlet, a.max(0) as u32, b.max(1) as u32, parity(sin)),
    };
    m.map_err(|e| e.to_string())
}

pub fn nodal_figure_impl(surface: &str, a: i32, b: i32, sin: bool, grid: usize) -> Result<String, String> {
    let f = EigenFn::single(mode(surface, a, b, sin)?);
    let grid = grid.clamp(32, 768);
    let curves = extract_nodal(&GridField::sample(&f, grid).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    let svg = nodal_svg(&curves);
    let meta = json!({
        "mode": f.label(),
        "lambda": f.lambda(),
        "length": curves.total_length,
        "length_over_lambda": if f.lambda() > 0.0 { curves.total_length / f.lambda() } else { 0.0 },
        "components": curves.component_count,
    });
    Ok(json!({ "svg": svg, "meta": meta }).to_string())
}

/// Zeros of the continued torus mode sin/cos 2π⟨k,x⟩ along the ray x₀ + t·(cos α, sin α)
/// in t ∈ [0, len], |τ| ≤ tau.
pub fn torus_zeros_impl(k1: i32, k2: i32, sin: bool, angle: f64, len: f64, tau: f64) -> Result<String, String> {
    let m = ModeIndex::torus([k1, k2], parity(sin)).map_err(|e| e.to_string())?;
    if m == ModeIndex::TorusConstant {
        return Err("the constant mode has no zeros".into());
    }
    if !(len > 0.0 && len <= 4.0) || !(tau > 0.0 && tau < DEFAULT_STRIP) {
        return Err(format!("need 0 < len ≤ 4 and 0 < tau < {DEFAULT_STRIP}"));
    }
    let e = |x: nodal_lab::Error| x.to_string();
    let seg = GeodesicSegment::torus([0.137, 0.291], [angle.cos(), angle.sin()], len).map_err(e)?;
    let f = CxEigenFn::single(m).map_err(e)?;
    let rect = StripRect::new(0.0, len, -tau, tau, DEFAULT_STRIP).map_err(e)?;
    let c = count_zeros_rect(&f, &seg, rect, DEFAULT_STRIP).map_err(e)?;
    let set = zero_locations(&f, &seg, rect, DEFAULT_STRIP).map_err(e)?;
    let pts: Vec<_> = set.points.iter().map(|(p, k)| json!([p.t, p.tau, k])).collect();
    Ok(json!({
        "count": c.count,
        "closed_form": torus_zero_count(m, &seg, &c.rect),
        "residual": c.residual,
        "located": set.total,
        "max_abs_tau": set.max_abs_tau(),
        "zeros": pts,
    })
    .to_string())
}

/// u = (1/λ) log|Y^C|² at E(x, ξ) on the sphere, x = (π/2, 0) on the equator,
/// ξ of length r at angle β to ∂_φ; compared with 2√ρ = 2r.
pub fn sphere_growth_impl(n: u32, m: i32, r: f64, beta: f64) -> Result<String, String> {
    let e = |x: nodal_lab::Error| x.to_string();
    if !(0.0..DEFAULT_STRIP).contains(&r) {
        return Err(format!("need 0 ≤ r < {DEFAULT_STRIP}"));
    }
    let f = if m.unsigned_abs() == n && m > 0 {
        CxEigenFn::highest_weight(n)
    } else {
        ModeIndex::sphere(n, m).and_then(CxEigenFn::single)
    }
    .map_err(e)?;
    let z = tube_point(SurfaceKind::Sphere, [std::f64::consts::FRAC_PI_2, 0.3], [r * beta.cos(), r * beta.sin()]).map_err(e)?;
    let g = growth_rate(&f, &z).map_err(e)?;
    Ok(json!({ "lambda": g.lambda, "u": g.u, "two_sqrt_rho": 2.0 * g.rho, "envelope": g.envelope }).to_string())
}

#[wasm_bindgen]
pub fn nodal_figure(surface: &str, a: i32, b: i32, sin: bool, grid: usize) -> Result<String, JsError> {
    nodal_figure_impl(surface, a, b, sin, grid).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn torus_zeros(k1: i32, k2: i32, sin: bool, angle: f64, len: f64, tau: f64) -> Result<String, JsError> {
    torus_zeros_impl(k1, k2, sin, angle, len, tau).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn sphere_growth(n: u32, m: i32, r: f64, beta: f64) -> Result<String, JsError> {
    sphere_growth_impl(n, m, r, beta).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> serde_json::Value {
        serde_json::from_str(s).unwrap()
    }

    #[test]
    fn nodal_figure_reports_length_per_frequency() {
        let v = parse(&nodal_figure_impl("torus", 3, 4, true, 256).unwrap());
        assert!(v["svg"].as_str().unwrap().starts_with("<svg"));
        let r = v["meta"]["length_over_lambda"].as_f64().unwrap();
        assert!((r - std::f64::consts::FRAC_1_PI).abs() < 1e-3);
        assert!(nodal_figure_impl("klein", 1, 1, true, 64).is_err());
    }

    #[test]
    fn torus_zero_count_matches_closed_form() {
        let v = parse(&torus_zeros_impl(2, 1, false, 0.7, 2.0, 0.3).unwrap());
        assert_eq!(v["count"], v["closed_form"]);
        assert_eq!(v["count"], v["located"]);
    }

    #[test]
    fn highest_weight_grows_like_twice_the_tube_radius() {
        // z₁ + iz₂ picks up e^{∓r} along ±∂_θ, so the highest weight grows like e^{Nr} along −∂_θ
        let v = parse(&sphere_growth_impl(40, 40, 0.2, -std::f64::consts::FRAC_PI_2).unwrap());
        let (u, want) = (v["u"].as_f64().unwrap(), v["two_sqrt_rho"].as_f64().unwrap());
        assert!((u - want).abs() < 0.15, "{u} vs {want}");
    }
}
