use std::f64::consts::{FRAC_1_PI, PI, TAU};
use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde_json::{json, Value};

use super::config::{ExperimentConfig, Format};
use super::Command;
use crate::acceptance;
use crate::cx::{growth_rate, torus_zero_count, tube_point, zero_locations, CxEigenFn, StripRect};
use crate::error::{Error, Result};
use crate::field::GridField;
use crate::fit::geometric;
use crate::geom::{GeodesicSegment, SurfaceKind, DEFAULT_STRIP};
use crate::io::{heatmap_svg, loglog_svg, nodal_svg, num, strip_svg, Svg, Table};
use crate::nodal::{boundary_zero_count, count_domains, extract_nodal, faber_krahn_check, small_ball_check};
use crate::norms::{dong_identity, scaling_fit, Family, FamilySweep, TestFunction};
use crate::restrict::{kuznecov_sum, period_table, qer_mode_profile};
use crate::spectra::{clusters, enumerate_disc_modes, enumerate_modes, remainder_exponent, Bc, EigenFn, ModeIndex, Parity};

/// Everything a command produces. Tables and figures are written according to the
/// requested formats; `files` are written unconditionally.
#[derive(Debug, Default)]
pub struct Report {
    pub stem: String,
    pub lines: Vec<String>,
    pub summary: Vec<(String, Value)>,
    pub tables: Vec<(String, Table)>,
    pub figures: Vec<(String, String)>,
    pub files: Vec<(String, String)>,
    pub checks: Vec<(String, bool)>,
}

impl Report {
    fn new(stem: &str) -> Self {
        Report { stem: stem.to_string(), ..Default::default() }
    }

    fn put(&mut self, key: &str, v: impl Into<Value>) {
        self.summary.push((key.to_string(), v.into()));
    }

    fn check(&mut self, name: impl Into<String>, ok: bool) {
        self.checks.push((name.into(), ok));
    }

    pub fn all_checks_pass(&self) -> bool {
        self.checks.iter().all(|c| c.1)
    }

    pub fn summary_json(&self) -> Value {
        let mut obj: serde_json::Map<String, Value> = self.summary.iter().cloned().collect();
        let checks: serde_json::Map<String, Value> = self.checks.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
        obj.insert("checks".into(), Value::Object(checks));
        Value::Object(obj)
    }

    pub fn summary_text(&self) -> String {
        let mut s = String::new();
        for l in &self.lines {
            s.push_str(l);
            s.push('\n');
        }
        for (k, v) in &self.summary {
            let v = match v {
                Value::String(x) => x.clone(),
                other => other.to_string(),
            };
            s.push_str(&format!("{k}: {v}\n"));
        }
        for (k, ok) in &self.checks {
            s.push_str(&format!("check {k}: {}\n", if *ok { "pass" } else { "FAIL" }));
        }
        s
    }

    /// Tables and figures are rendered first, then written one file at a time.
    pub fn write(&self, cfg: &ExperimentConfig) -> Result<()> {
        let dir = cfg.out.clone().unwrap_or_else(|| "out".into());
        let mut out: Vec<(String, String)> = Vec::new();
        for (name, t) in &self.tables {
            if cfg.wants(Format::Csv) {
                out.push((format!("{name}.csv"), t.to_csv()?));
            }
            if cfg.wants(Format::Json) {
                out.push((format!("{name}.json"), pretty(&t.to_json())));
            }
        }
        if cfg.wants(Format::Svg) {
            out.extend(self.figures.iter().map(|(n, s)| (format!("{n}.svg"), s.clone())));
        }
        if cfg.wants(Format::Json) {
            out.push((format!("{}_summary.json", self.stem), pretty(&self.summary_json())));
        }
        out.extend(self.files.iter().cloned());
        fs::create_dir_all(&dir)?;
        for (name, body) in out {
            fs::write(Path::new(&dir).join(name), body)?;
        }
        Ok(())
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

fn f64_json(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

pub fn execute(cmd: Command, cfg: &ExperimentConfig) -> Result<Report> {
    match cmd {
        Command::Modes => modes(cfg),
        Command::Weyl => weyl(cfg),
        Command::Nodal => nodal(cfg),
        Command::Domains => domains(cfg),
        Command::Identity => identity(cfg),
        Command::Norms => norms(cfg),
        Command::Kuznecov => kuznecov(cfg),
        Command::RestrictProfile => restrict_profile(cfg),
        Command::CxGrowth => cx_growth(cfg),
        Command::CxZeros => cx_zeros(cfg),
        Command::BoundaryCount => boundary_count(cfg),
        Command::CalibrateSmallball => calibrate_smallball(cfg),
        Command::All => all(),
    }
}

fn surface(cfg: &ExperimentConfig) -> SurfaceKind {
    cfg.surface.unwrap_or(SurfaceKind::Torus)
}

/// The single mode selected by `k`/`parity` (torus), `N`/`m` (sphere) or
/// `bc`/`m`/`N`/`parity` (disc, `N` the radial index).
pub fn selected_mode(cfg: &ExperimentConfig) -> Result<ModeIndex> {
    let cfg_err = |e: Error| Error::Config(e.to_string());
    match surface(cfg) {
        SurfaceKind::Torus => ModeIndex::torus(cfg.k.unwrap_or([3, 4]), cfg.parity.unwrap_or(Parity::Sin)).map_err(cfg_err),
        SurfaceKind::Sphere => ModeIndex::sphere(cfg.n.unwrap_or(8), cfg.m.unwrap_or(0)).map_err(cfg_err),
        SurfaceKind::Disc => {
            let m = cfg.m.unwrap_or(0);
            if m < 0 {
                return Err(Error::Config("disc modes take m ≥ 0; choose sin/cos with parity".into()));
            }
            ModeIndex::disc(cfg.bc.unwrap_or(Bc::Dirichlet), m as u32, cfg.n.unwrap_or(1), cfg.parity.unwrap_or(Parity::Cos))
                .map_err(cfg_err)
        }
    }
}

pub fn mode_table(modes: &[ModeIndex]) -> Table {
    let mut t = Table::new(["surface", "variant", "k1", "k2|N|m", "n", "parity", "lambda", "lambda_sq"]);
    for m in modes {
        let s = |x: &str| x.to_string();
        let (surface, variant, k1, c4, n, parity) = match *m {
            ModeIndex::TorusConstant => (s("torus"), s("constant"), s("0"), s("0"), s(""), s("")),
            ModeIndex::Torus { k, parity } => {
                (s("torus"), s("trig"), k[0].to_string(), k[1].to_string(), s(""), s(parity.name()))
            }
            ModeIndex::Sphere { n, m } => {
                let parity = match m.signum() {
                    1 => "cos",
                    -1 => "sin",
                    _ => "",
                };
                (s("sphere"), s("real"), s(""), n.to_string(), m.to_string(), s(parity))
            }
            ModeIndex::Disc { bc, m, n, parity, .. } => {
                (s("disc"), s(bc.name()), s(""), m.to_string(), n.to_string(), s(parity.name()))
            }
        };
        t.push(vec![surface, variant, k1, c4, n, parity, num(m.lambda()), num(m.lambda_sq())]);
    }
    t
}

fn modes(cfg: &ExperimentConfig) -> Result<Report> {
    let lmax = cfg.lambda_max.unwrap_or(10.0);
    let list = match surface(cfg) {
        SurfaceKind::Disc => enumerate_disc_modes(cfg.bc.unwrap_or(Bc::Dirichlet), lmax)?,
        s => enumerate_modes(s, lmax)?,
    };
    let mut r = Report::new("modes");
    r.put("surface", surface(cfg).name());
    r.put("lambda_max", f64_json(lmax));
    r.put("modes", list.len());
    r.tables.push(("modes".into(), mode_table(&list)));
    Ok(r)
}

fn weyl(cfg: &ExperimentConfig) -> Result<Report> {
    let s = surface(cfg);
    let lmax = cfg.lambda_max.unwrap_or(100.0);
    if lmax <= 0.0 {
        return Err(Error::Config("weyl needs lambda_max > 0".into()));
    }
    let cl = clusters(s, lmax)?;
    let mut t = Table::new(["lambda", "multiplicity", "count", "main", "remainder"]);
    let mut count = 0u64;
    for &(l, mult) in &cl {
        count += mult;
        let main = l * l * s.area() / (4.0 * PI);
        t.push(vec![num(l), mult.to_string(), count.to_string(), num(main), num(count as f64 - main)]);
    }
    let mut r = Report::new("weyl");
    r.put("surface", s.name());
    r.put("lambda_max", f64_json(lmax));
    r.put("eigenvalues", count);
    r.put("clusters", cl.len());
    if lmax >= 20.0 {
        let fit = remainder_exponent(s, (lmax / 40.0).max(1.0), lmax, 40)?;
        r.put("remainder_exponent", f64_json(fit.fit.slope));
        r.put("remainder_exponent_stderr", f64_json(fit.fit.slope_stderr));
        r.figures.push((
            "weyl".into(),
            loglog_svg(
                &format!("Weyl remainder envelope, {}", s.name()),
                "lambda",
                "sup |R|",
                &fit.envelope,
                Some((fit.fit.slope, fit.fit.intercept)),
            ),
        ));
    }
    r.tables.push(("weyl".into(), t));
    Ok(r)
}

fn chart_labels(s: SurfaceKind) -> [&'static str; 2] {
    match s {
        SurfaceKind::Torus => ["x1", "x2"],
        SurfaceKind::Sphere => ["phi", "theta"],
        SurfaceKind::Disc => ["r", "theta"],
    }
}

fn default_grid(cfg: &ExperimentConfig) -> usize {
    cfg.grid.unwrap_or(if surface(cfg) == SurfaceKind::Disc { 256 } else { 512 })
}

fn nodal(cfg: &ExperimentConfig) -> Result<Report> {
    let mode = selected_mode(cfg)?;
    let f = EigenFn::single(mode);
    let grid = default_grid(cfg);
    let curves = extract_nodal(&GridField::sample(&f, grid)?)?;
    let [a, b] = chart_labels(f.surface);
    let mut t = Table::new(["curve", "closed", "vertex", a, b]);
    for (i, pl) in curves.polylines.iter().enumerate() {
        for (j, p) in pl.points.iter().enumerate() {
            t.push(vec![i.to_string(), pl.closed.to_string(), j.to_string(), num(p[0]), num(p[1])]);
        }
    }
    let ratio = if f.lambda() > 0.0 { curves.total_length / f.lambda() } else { f64::NAN };
    let mut r = Report::new("nodal");
    r.put("mode", mode.label());
    r.put("grid", grid);
    r.put("lambda", f64_json(f.lambda()));
    r.put("length", f64_json(curves.total_length));
    r.put("length/lambda", f64_json(ratio));
    r.put("components", curves.component_count);
    if matches!(mode, ModeIndex::Torus { .. }) {
        // the nodal set is a family of parallel lines of total length λ/π
        r.check("torus length/lambda = 1/pi ± 0.003", (ratio - FRAC_1_PI).abs() <= 0.003);
    }
    r.tables.push(("nodal".into(), t));
    r.figures.push(("nodal".into(), nodal_svg(&curves)));
    Ok(r)
}

fn domains(cfg: &ExperimentConfig) -> Result<Report> {
    let mode = selected_mode(cfg)?;
    let f = EigenFn::single(mode);
    let grid = default_grid(cfg);
    let field = GridField::sample(&f, grid)?;
    let dec = count_domains(&field)?;
    let fk = faber_krahn_check(&dec, f.lambda())?;
    let mut t = Table::new(["domain", "sign", "area"]);
    for (i, (s, a)) in dec.signs.iter().zip(&dec.areas).enumerate() {
        t.push(vec![i.to_string(), s.to_string(), num(*a)]);
    }
    let mut r = Report::new("domains");
    r.put("mode", mode.label());
    r.put("grid", grid);
    r.put("lambda", f64_json(f.lambda()));
    r.put("domains", dec.domain_count);
    r.put("faber_krahn_bound", f64_json(fk.bound));
    r.put("faber_krahn_min_margin", f64_json(fk.min_margin));
    r.check("every domain area ≥ 98% of the Faber-Krahn bound", fk.min_margin >= -0.02);
    r.tables.push(("domains".into(), t));
    let (rows, cols) = (field.grid.n_rows(), field.grid.n_cols());
    let labels: Vec<f64> = dec.labels.iter().map(|&l| dec.signs[l as usize] as f64 * (1.0 + l as f64 % 7.0)).collect();
    let (xr, yr) = chart_ranges(f.surface);
    let [a, b] = chart_labels(f.surface);
    r.figures.push((
        "domains".into(),
        heatmap_svg(&format!("nodal domains of {}", mode.label()), xr, yr, rows, cols, &labels, (b, a)),
    ));
    Ok(r)
}

/// (column range, row range) of the chart as drawn by the heatmaps.
fn chart_ranges(s: SurfaceKind) -> ((f64, f64), (f64, f64)) {
    match s {
        SurfaceKind::Torus => ((0.0, 1.0), (0.0, 1.0)),
        SurfaceKind::Sphere => ((0.0, TAU), (0.0, PI)),
        SurfaceKind::Disc => ((0.0, TAU), (0.0, 1.0)),
    }
}

fn identity(cfg: &ExperimentConfig) -> Result<Report> {
    let mode = selected_mode(cfg)?;
    let f = EigenFn::single(mode);
    let grid = default_grid(cfg);
    let curves = extract_nodal(&GridField::sample(&f, grid)?)?;
    let mut t = Table::new(["test", "lhs", "rhs", "residual", "scale"]);
    let mut r = Report::new("identity");
    r.put("mode", mode.label());
    r.put("grid", grid);
    for (name, test) in [("1", TestFunction::One), ("cos 2pi x1", TestFunction::Cos2PiX1)] {
        let rep = dong_identity(&f, &test, &curves)?;
        t.push(vec![name.into(), num(rep.lhs), num(rep.rhs), num(rep.residual), num(rep.scale)]);
        r.check(format!("identity residual ≤ 1% for f = {name}"), rep.residual <= 0.01);
    }
    r.tables.push(("identity".into(), t));
    Ok(r)
}

fn norms(cfg: &ExperimentConfig) -> Result<Report> {
    let families = match surface(cfg) {
        SurfaceKind::Sphere => vec![Family::Zonal, Family::HighestWeight],
        SurfaceKind::Torus => vec![Family::TorusRay(cfg.k.unwrap_or([1, 0]))],
        SurfaceKind::Disc => vec![Family::DiscRadial],
    };
    let top = cfg.n.unwrap_or(64).max(8);
    let mut idx: Vec<u32> = geometric(4.0, top as f64, 8).iter().map(|x| x.round() as u32).collect();
    idx.dedup();
    let exps = [1.0, 2.0, 4.0, 6.0, f64::INFINITY];
    let grid = default_grid(cfg);
    let mut rows = Table::new(["family", "index", "lambda", "p", "norm"]);
    let mut fits = Table::new(["family", "p", "exponent", "stderr"]);
    let mut r = Report::new("norms");
    r.put("grid", grid);
    r.put("indices", format!("{idx:?}"));
    for fam in families {
        let sweep = FamilySweep::run(fam, &idx, &exps, grid)?;
        for rec in &sweep.records {
            for (p, v) in exps.iter().zip(&rec.norms) {
                rows.push(vec![fam.to_string(), rec.index.to_string(), num(rec.lambda), num(*p), num(*v)]);
            }
        }
        for &p in &exps {
            let fit = scaling_fit(&sweep, p)?;
            fits.push(vec![fam.to_string(), num(p), num(fit.slope), num(fit.slope_stderr)]);
        }
        let sup = sweep.column(f64::INFINITY)?;
        let pts: Vec<(f64, f64)> = sweep.lambdas().into_iter().zip(sup).collect();
        let fit = scaling_fit(&sweep, f64::INFINITY)?;
        r.figures.push((
            format!("norms_{}", fam.to_string().replace(['(', ')', ','], "_")),
            loglog_svg(&format!("sup norm, {fam}"), "lambda", "sup", &pts, Some((fit.slope, fit.intercept))),
        ));
    }
    r.tables.push(("norms".into(), rows));
    r.tables.push(("norms_fits".into(), fits));
    Ok(r)
}

fn kuznecov(cfg: &ExperimentConfig) -> Result<Report> {
    let s = surface(cfg);
    let seg = match s {
        SurfaceKind::Sphere => GeodesicSegment::equator(),
        SurfaceKind::Torus => {
            let [p, q] = cfg.k.unwrap_or([1, 0]);
            GeodesicSegment::torus_closed([0.0, 0.0], p as i64, q as i64).map_err(|e| Error::Config(e.to_string()))?
        }
        SurfaceKind::Disc => return Err(Error::Config("period sums need a closed geodesic: torus or sphere".into())),
    };
    let lmax = cfg.lambda_max.unwrap_or(40.0);
    let table = period_table(&seg, &|_| 1.0, lmax, false)?;
    let window = (lmax >= 16.0).then_some((4.0, lmax));
    let sums = kuznecov_sum(&table, lmax, lmax.min(30.0), window)?;
    let exponent = sums.fit.map_or(f64::NAN, |f| f.slope);
    let mut t = Table::new(["lambda", "multiplicity", "basis_sum", "kernel_sum", "S", "fitted_exponent"]);
    let mut worst = 0.0f64;
    for (c, &(l, sv)) in sums.clusters.iter().zip(&sums.partial) {
        if let Some(k) = c.kernel_sum {
            worst = worst.max((k - c.basis_sum).abs() / c.basis_sum.abs().max(1.0));
        }
        let ks = c.kernel_sum.map(num).unwrap_or_default();
        t.push(vec![num(l), c.multiplicity.to_string(), num(c.basis_sum), ks, num(sv), num(exponent)]);
    }
    let mut r = Report::new("kuznecov");
    r.put("surface", s.name());
    r.put("lambda_max", f64_json(lmax));
    r.put("fitted_exponent", f64_json(exponent));
    r.put("kernel_cross_check", f64_json(worst));
    r.check("cluster sums agree with the projection-kernel integral to 1e-8", worst <= 1e-8);
    if let Some(fit) = sums.fit {
        r.figures.push((
            "kuznecov".into(),
            loglog_svg("period sums S(lambda)", "lambda", "S", &sums.partial, Some((fit.slope, fit.intercept))),
        ));
    }
    r.tables.push(("kuznecov".into(), t));
    Ok(r)
}

fn restrict_profile(cfg: &ExperimentConfig) -> Result<Report> {
    let n = cfg.n.unwrap_or(64);
    let p = qer_mode_profile(n).map_err(|e| Error::Config(e.to_string()))?;
    let mut t = Table::new(["sigma", "W", "arcsine"]);
    let nf = n as f64;
    for ((m, w), a) in p.m.iter().zip(&p.weights).zip(&p.arcsine) {
        t.push(vec![num(*m as f64 / nf), num(*w), num(*a)]);
    }
    let mut r = Report::new("restrict-profile");
    r.put("N", n);
    r.put("cdf_distance", f64_json(p.cdf_distance));
    r.put("value_sum", f64_json(p.value_sum));
    r.put("value_sum_expected", f64_json((2.0 * nf + 1.0) / (4.0 * PI)));
    let ymax = p.weights.iter().chain(&p.arcsine).fold(0.0f64, |a, &b| a.max(b)) * nf * 1.1;
    let mut svg = Svg::new((-1.0, 1.0), (0.0, ymax.max(1e-9)), &format!("equator mode weights, N = {n}"));
    svg.axes("sigma = m/N", "N * weight");
    let curve = |v: &[f64]| -> Vec<(f64, f64)> { p.m.iter().zip(v).map(|(&m, &w)| (m as f64 / nf, w * nf)).collect() };
    svg.path(&curve(&p.arcsine), "crimson", 1.5);
    svg.path(&curve(&p.weights), "steelblue", 1.0);
    r.figures.push(("restrict-profile".into(), svg.finish()));
    r.tables.push(("restrict-profile".into(), t));
    Ok(r)
}

fn cx_mode(cfg: &ExperimentConfig) -> Result<CxEigenFn> {
    let mode = selected_mode(cfg)?;
    if mode.surface() == SurfaceKind::Disc {
        return Err(Error::Config("complexified experiments run on the torus or the sphere".into()));
    }
    CxEigenFn::single(mode)
}

fn cx_growth(cfg: &ExperimentConfig) -> Result<Report> {
    let s = surface(cfg);
    let f = cx_mode(cfg)?;
    let eps = cfg.eps.unwrap_or(DEFAULT_STRIP);
    let cols = cfg.grid.unwrap_or(64);
    let rows = 24usize;
    let mode = f.terms[0].0;
    // ξ points along the wave vector on the torus and along the equator on the sphere
    let (x_len, dir) = match mode {
        ModeIndex::Torus { k, .. } => {
            let n = (k[0] as f64).hypot(k[1] as f64);
            (1.0, [k[0] as f64 / n, k[1] as f64 / n])
        }
        _ => (TAU, [0.0, 1.0]),
    };
    let samples: Vec<(f64, f64)> = (0..rows)
        .flat_map(|i| (0..cols).map(move |j| (x_len * j as f64 / cols as f64, eps * (i as f64 + 0.5) / rows as f64)))
        .collect();
    let out: Vec<_> = samples
        .par_iter()
        .map(|&(x, r)| {
            let p = match s {
                SurfaceKind::Torus => [x, 0.25],
                _ => [0.5 * PI, x],
            };
            growth_rate(&f, &tube_point(s, p, [r * dir[0], r * dir[1]])?)
        })
        .collect::<Result<_>>()?;
    let mut t = Table::new(["x", "xi", "u", "rho", "deviation", "envelope"]);
    for (&(x, r), g) in samples.iter().zip(&out) {
        t.push(vec![num(x), num(r), num(g.u), num(g.rho), num(g.deviation), num(g.envelope)]);
    }
    let max_dev = out.iter().map(|g| g.deviation.abs()).fold(0.0, f64::max);
    let max_env = out.iter().map(|g| g.envelope).fold(f64::NEG_INFINITY, f64::max);
    let mut r = Report::new("cx-growth");
    r.put("mode", mode.label());
    r.put("lambda", f64_json(f.lambda));
    r.put("eps", f64_json(eps));
    r.put("max_abs_deviation", f64_json(max_dev));
    r.put("max_envelope_constant", f64_json(max_env));
    let u: Vec<f64> = out.iter().map(|g| g.u).collect();
    r.figures.push((
        "cx-growth".into(),
        heatmap_svg(&format!("growth rate u, {}", mode.label()), (0.0, x_len), (0.0, eps), rows, cols, &u, ("x", "|xi|")),
    ));
    r.tables.push(("cx-growth".into(), t));
    Ok(r)
}

fn cx_zeros(cfg: &ExperimentConfig) -> Result<Report> {
    let f = cx_mode(cfg)?;
    let mode = f.terms[0].0;
    let eps = cfg.eps.unwrap_or(DEFAULT_STRIP);
    let seg = match surface(cfg) {
        SurfaceKind::Torus => GeodesicSegment::torus([0.137, 0.291], [0.6, 0.8], 1.0)?,
        _ => GeodesicSegment::equator(),
    };
    let rect = StripRect::new(0.0, seg.length, -0.5 * eps, 0.5 * eps, eps)?;
    let set = zero_locations(&f, &seg, rect, eps)?;
    let mut t = Table::new(["t", "tau", "multiplicity"]);
    for (p, mult) in &set.points {
        t.push(vec![num(p.t), num(p.tau), mult.to_string()]);
    }
    let mut r = Report::new("cx-zeros");
    r.put("mode", mode.label());
    r.put("geodesic_length", f64_json(seg.length));
    r.put("strip", format!("t in [{}, {}], tau in [{}, {}]", set.rect.t0, set.rect.t1, set.rect.tau0, set.rect.tau1));
    r.put("count", set.count);
    r.put("located_with_multiplicity", set.total);
    r.put("max_abs_tau", f64_json(set.max_abs_tau()));
    r.check("located zeros account for the contour count", set.total == set.count && !set.partial);
    if let Some(want) = torus_zero_count(mode, &seg, &set.rect) {
        r.put("closed_form", want);
        r.check("count equals the closed form", set.count as u64 == want);
    }
    let pts: Vec<(f64, f64)> = set.points.iter().map(|(p, _)| (p.t, p.tau)).collect();
    r.figures.push((
        "cx-zeros".into(),
        strip_svg(&format!("zeros of {} along the complexified geodesic", mode.label()), (set.rect.t0, set.rect.t1), (set.rect.tau0, set.rect.tau1), &pts),
    ));
    r.tables.push(("cx-zeros".into(), t));
    Ok(r)
}

fn boundary_count(cfg: &ExperimentConfig) -> Result<Report> {
    if surface(cfg) != SurfaceKind::Disc {
        return Err(Error::Config("boundary-count runs on the disc (--surface disc)".into()));
    }
    let bc = cfg.bc.unwrap_or(Bc::Neumann);
    if bc != Bc::Neumann {
        return Err(Error::Config("Dirichlet modes vanish on the boundary; use --bc neumann".into()));
    }
    let lmax = cfg.lambda_max.unwrap_or(40.0);
    let modes = enumerate_disc_modes(bc, lmax)?;
    let mut t = Table::new(["lambda", "m", "n", "parity", "boundary_zeros", "predicted", "ratio"]);
    let mut worst = 0.0f64;
    let mut exact = true;
    for &mode in &modes {
        let c = boundary_zero_count(mode)?;
        let ModeIndex::Disc { n, parity, .. } = mode else { unreachable!("disc enumeration") };
        t.push(vec![
            num(c.lambda),
            c.m.to_string(),
            n.to_string(),
            parity.name().into(),
            c.zeros.to_string(),
            c.predicted.to_string(),
            num(c.ratio),
        ]);
        worst = worst.max(c.ratio);
        exact &= c.zeros == c.predicted;
    }
    let mut r = Report::new("boundary-count");
    r.put("modes", modes.len());
    r.put("lambda_max", f64_json(lmax));
    r.put("max_ratio", f64_json(worst));
    r.check("boundary zeros = 2m for every mode", exact);
    r.check("boundary zeros ≤ 2 lambda", worst <= 2.0);
    let pts: Vec<(f64, f64)> = t.rows.iter().map(|row| (row[0].parse().unwrap_or(0.0), row[6].parse().unwrap_or(0.0))).collect();
    let mut svg = Svg::new((0.0, lmax.max(1.0)), (0.0, 2.2), "boundary zeros / lambda, Neumann disc modes");
    svg.axes("lambda", "n(lambda)/lambda");
    svg.path(&[(0.0, 2.0), (lmax.max(1.0), 2.0)], "#bbbbbb", 0.5);
    for (x, y) in pts {
        svg.dot(x, y, 2.0, "steelblue");
    }
    r.figures.push(("boundary-count".into(), svg.finish()));
    r.tables.push(("boundary-count".into(), t));
    Ok(r)
}

fn calibrate_smallball(cfg: &ExperimentConfig) -> Result<Report> {
    let s = surface(cfg);
    let lmax = cfg.lambda_max.unwrap_or(20.0);
    let all = match s {
        SurfaceKind::Disc => enumerate_disc_modes(cfg.bc.unwrap_or(Bc::Dirichlet), lmax)?,
        _ => enumerate_modes(s, lmax)?,
    };
    let all: Vec<ModeIndex> = all.into_iter().filter(|m| m.lambda() > 0.0).collect();
    if all.is_empty() {
        return Err(Error::Config(format!("no non-constant {} modes with λ ≤ {lmax}", s.name())));
    }
    let pick = 24.min(all.len());
    let modes: Vec<ModeIndex> = (0..pick).map(|i| all[i * all.len() / pick]).collect();
    let a = cfg.a.unwrap_or(2.0);
    let trials = cfg.trials.unwrap_or(32);
    let seed = cfg.seed.unwrap_or(1);
    let reports: Vec<_> = modes
        .par_iter()
        .enumerate()
        .map(|(i, &m)| small_ball_check(&EigenFn::single(m), a, trials, seed.wrapping_add(i as u64)))
        .collect::<Result<_>>()?;
    let mut t = Table::new(["mode", "lambda", "a", "calibrated_a", "worst_margin", "empty_balls"]);
    let [c1, c2] = chart_labels(s);
    let mut empty = Table::new(["mode", c1, c2]);
    for (m, rep) in modes.iter().zip(&reports) {
        t.push(vec![
            m.label(),
            num(m.lambda()),
            num(a),
            num(rep.calibrated_a),
            num(rep.worst_margin),
            rep.empty_centers.len().to_string(),
        ]);
        for c in &rep.empty_centers {
            empty.push(vec![m.label(), num(c[0]), num(c[1])]);
        }
    }
    let calibrated = reports.iter().map(|r| r.calibrated_a).fold(0.0, f64::max);
    let mut r = Report::new("calibrate-smallball");
    r.put("surface", s.name());
    r.put("modes", modes.len());
    r.put("trials", trials);
    r.put("seed", seed);
    r.put("calibrated_a", f64_json(calibrated));
    r.put("empty_balls_at_a", empty.rows.len());
    if cfg.a.is_some() {
        r.check(format!("every ball of radius {a}/lambda meets the nodal set"), empty.rows.is_empty());
    }
    r.tables.push(("calibrate-smallball".into(), t));
    r.tables.push(("calibrate-smallball_empty".into(), empty));
    Ok(r)
}

fn all() -> Result<Report> {
    let results = acceptance::run_all();
    let mut r = Report::new("all");
    let mut t = Table::new(["id", "name", "measured", "expected", "tolerance", "pass", "detail"]);
    let mut summary = Vec::new();
    for c in &results {
        r.lines.push(c.line());
        r.check(format!("criterion {} {}", c.id, c.name), c.pass);
        t.push(vec![
            c.id.to_string(),
            c.name.into(),
            num(c.measured),
            num(c.expected),
            num(c.tolerance),
            c.pass.to_string(),
            c.detail.clone(),
        ]);
        summary.push(json!({
            "id": c.id,
            "name": c.name,
            "measured": f64_json(c.measured),
            "expected": f64_json(c.expected),
            "tolerance": f64_json(c.tolerance),
            "pass": c.pass,
        }));
    }
    let passed = results.iter().filter(|c| c.pass).count();
    r.put("passed", passed);
    r.put("failed", results.len() - passed);
    r.files.push(("summary.json".into(), pretty(&Value::Array(summary))));
    r.tables.push(("acceptance".into(), t));
    Ok(r)
}
