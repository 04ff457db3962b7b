//! Tables (CSV/JSON) and hand-written SVG figures.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::error::Result;
use crate::geom::SurfaceKind;
use crate::nodal::NodalCurveSet;

/// A rectangular table of already formatted cells.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(headers: impl IntoIterator<Item = S>) -> Self {
        Table { headers: headers.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.headers)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_csv()?)?;
        Ok(())
    }

    /// Array of objects keyed by header.
    pub fn to_json(&self) -> serde_json::Value {
        let rows = self.rows.iter().map(|r| {
            let obj: serde_json::Map<String, serde_json::Value> = self
                .headers
                .iter()
                .zip(r)
                .map(|(h, c)| {
                    let v = c.parse::<f64>().ok().and_then(serde_json::Number::from_f64);
                    (h.clone(), v.map_or_else(|| serde_json::Value::String(c.clone()), serde_json::Value::Number))
                })
                .collect();
            serde_json::Value::Object(obj)
        });
        serde_json::Value::Array(rows.collect())
    }
}

/// Shortest round-tripping decimal form, so outputs are byte-stable.
pub fn num(x: f64) -> String {
    format!("{x}")
}

const W: f64 = 640.0;
const H: f64 = 480.0;
const PAD: f64 = 48.0;

/// Minimal SVG canvas mapping a data rectangle onto the page.
pub struct Svg {
    body: String,
    x: (f64, f64),
    y: (f64, f64),
}

impl Svg {
    pub fn new(x: (f64, f64), y: (f64, f64), title: &str) -> Self {
        let mut body = String::new();
        let _ = write!(
            body,
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n\
             <rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>\n\
             <text x=\"{}\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\" text-anchor=\"middle\">{}</text>\n",
            W / 2.0,
            escape(title)
        );
        Svg { body, x, y }
    }

    fn px(&self, x: f64) -> f64 {
        PAD + (x - self.x.0) / (self.x.1 - self.x.0) * (W - 2.0 * PAD)
    }

    fn py(&self, y: f64) -> f64 {
        H - PAD - (y - self.y.0) / (self.y.1 - self.y.0) * (H - 2.0 * PAD)
    }

    pub fn axes(&mut self, xlabel: &str, ylabel: &str) {
        let (x0, x1, y0, y1) = (PAD, W - PAD, H - PAD, PAD);
        let _ = writeln!(
            self.body,
            "<path d=\"M{x0} {y1} L{x0} {y0} L{x1} {y0}\" stroke=\"black\" fill=\"none\"/>"
        );
        for (v, anchor, xx, yy) in [
            (self.x.0, "start", x0, y0 + 16.0),
            (self.x.1, "end", x1, y0 + 16.0),
        ] {
            let _ = writeln!(
                self.body,
                "<text x=\"{xx}\" y=\"{yy}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"{anchor}\">{}</text>",
                short(v)
            );
        }
        for (v, yy) in [(self.y.0, y0), (self.y.1, y1 + 10.0)] {
            let _ = writeln!(
                self.body,
                "<text x=\"{}\" y=\"{yy}\" font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\">{}</text>",
                x0 - 4.0,
                short(v)
            );
        }
        let _ = writeln!(
            self.body,
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\">{}</text>",
            W / 2.0,
            H - 12.0,
            escape(xlabel)
        );
        let _ = writeln!(
            self.body,
            "<text x=\"14\" y=\"{}\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 14 {})\">{}</text>",
            H / 2.0,
            H / 2.0,
            escape(ylabel)
        );
    }

    pub fn path(&mut self, pts: &[(f64, f64)], color: &str, width: f64) {
        if pts.len() < 2 {
            return;
        }
        let mut d = String::new();
        for (i, &(x, y)) in pts.iter().enumerate() {
            let _ = write!(d, "{}{:.2} {:.2}", if i == 0 { "M" } else { " L" }, self.px(x), self.py(y));
        }
        let _ = writeln!(self.body, "<path d=\"{d}\" stroke=\"{color}\" stroke-width=\"{width}\" fill=\"none\"/>");
    }

    pub fn dot(&mut self, x: f64, y: f64, r: f64, color: &str) {
        let _ = writeln!(
            self.body,
            "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"{r}\" fill=\"{color}\"/>",
            self.px(x),
            self.py(y)
        );
    }

    /// Cells of a row-major `rows × cols` array spanning the data rectangle,
    /// coloured on a diverging blue–white–red scale symmetric about 0.
    pub fn heatmap(&mut self, rows: usize, cols: usize, values: &[f64]) {
        let vmax = values.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
        let cw = (W - 2.0 * PAD) / cols as f64;
        let ch = (H - 2.0 * PAD) / rows as f64;
        for i in 0..rows {
            for j in 0..cols {
                let v = values[i * cols + j] / vmax;
                let _ = writeln!(
                    self.body,
                    "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"{}\"/>",
                    PAD + j as f64 * cw,
                    H - PAD - (i + 1) as f64 * ch,
                    cw + 0.05,
                    ch + 0.05,
                    diverging(v)
                );
            }
        }
    }

    pub fn finish(mut self) -> String {
        self.body.push_str("</svg>\n");
        self.body
    }
}

fn diverging(v: f64) -> String {
    let v = v.clamp(-1.0, 1.0);
    let (r, g, b) = if v >= 0.0 {
        (255.0, 255.0 * (1.0 - v), 255.0 * (1.0 - v))
    } else {
        (255.0 * (1.0 + v), 255.0 * (1.0 + v), 255.0)
    };
    format!("#{:02x}{:02x}{:02x}", r.round() as u8, g.round() as u8, b.round() as u8)
}

fn short(v: f64) -> String {
    if v != 0.0 && (v.abs() >= 1e4 || v.abs() < 1e-2) {
        format!("{v:.2e}")
    } else {
        format!("{v:.3}")
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Nodal curves in the chart (x₂ or θ horizontal). Polylines are broken where they
/// wrap around a periodic coordinate.
pub fn nodal_svg(curves: &NodalCurveSet) -> String {
    use std::f64::consts::{PI, TAU};
    let (xr, yr, xl, yl) = match curves.surface {
        SurfaceKind::Torus => ((0.0, 1.0), (0.0, 1.0), "x2", "x1"),
        SurfaceKind::Sphere => ((0.0, TAU), (PI, 0.0), "theta", "phi"),
        SurfaceKind::Disc => ((0.0, TAU), (0.0, 1.0), "theta", "r"),
    };
    let mut svg = Svg::new(xr, yr, &format!("nodal set of {}", curves.source));
    svg.axes(xl, yl);
    let (pc, pr) = (xr.1 - xr.0, (yr.1 - yr.0).abs());
    for line in &curves.polylines {
        let mut run: Vec<(f64, f64)> = Vec::new();
        let mut pts = line.points.clone();
        if line.closed {
            if let Some(&p) = line.points.first() {
                pts.push(p);
            }
        }
        for p in pts {
            let q = (p[1], p[0]);
            if let Some(&last) = run.last() {
                let (dx, dy): (f64, f64) = (q.0 - last.0, q.1 - last.1);
                if dx.abs() > 0.5 * pc || (curves.surface == SurfaceKind::Torus && dy.abs() > 0.5 * pr) {
                    svg.path(&run, "black", 1.0);
                    run.clear();
                }
            }
            run.push(q);
        }
        svg.path(&run, "black", 1.0);
    }
    svg.finish()
}

/// (x, y) series on logarithmic axes, with an optional fitted line y = c·x^slope.
pub fn loglog_svg(title: &str, xlabel: &str, ylabel: &str, pts: &[(f64, f64)], fit: Option<(f64, f64)>) -> String {
    let lx: Vec<(f64, f64)> = pts.iter().filter(|p| p.0 > 0.0 && p.1 > 0.0).map(|p| (p.0.ln(), p.1.ln())).collect();
    let range = |f: fn(&(f64, f64)) -> f64| {
        let lo = lx.iter().map(f).fold(f64::INFINITY, f64::min);
        let hi = lx.iter().map(f).fold(f64::NEG_INFINITY, f64::max);
        if lo.is_finite() && hi > lo {
            (lo, hi)
        } else {
            (lo.min(0.0) - 1.0, hi.max(0.0) + 1.0)
        }
    };
    let mut svg = Svg::new(range(|p| p.0), range(|p| p.1), title);
    svg.axes(&format!("log {xlabel}"), &format!("log {ylabel}"));
    for &(x, y) in &lx {
        svg.dot(x, y, 3.0, "steelblue");
    }
    if let (Some((slope, intercept)), Some(a), Some(b)) = (fit, lx.first(), lx.last()) {
        svg.path(&[(a.0, intercept + slope * a.0), (b.0, intercept + slope * b.0)], "crimson", 1.5);
    }
    svg.finish()
}

/// Points of the (t, τ) strip.
pub fn strip_svg(title: &str, t: (f64, f64), tau: (f64, f64), pts: &[(f64, f64)]) -> String {
    let mut svg = Svg::new(t, tau, title);
    svg.axes("t", "tau");
    svg.path(&[(t.0, 0.0), (t.1, 0.0)], "#bbbbbb", 0.5);
    for &(x, y) in pts {
        svg.dot(x, y, 2.5, "crimson");
    }
    svg.finish()
}

/// Heatmap of a row-major grid over the data rectangle.
pub fn heatmap_svg(title: &str, x: (f64, f64), y: (f64, f64), rows: usize, cols: usize, values: &[f64], labels: (&str, &str)) -> String {
    let mut svg = Svg::new(x, y, title);
    svg.heatmap(rows, cols, values);
    svg.axes(labels.0, labels.1);
    svg.finish()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_quotes_per_rfc4180() {
        let mut t = Table::new(["name", "value"]);
        t.push(vec!["a,b".into(), "1".into()]);
        t.push(vec!["say \"hi\"".into(), "2.5".into()]);
        assert_eq!(t.to_csv().unwrap(), "name,value\n\"a,b\",1\n\"say \"\"hi\"\"\",2.5\n");
        let j = t.to_json();
        assert_eq!(j[1]["value"], serde_json::json!(2.5));
        assert_eq!(j[0]["name"], serde_json::json!("a,b"));
    }

    #[test]
    fn svg_is_closed_and_escaped() {
        let s = loglog_svg("a<b", "x", "y", &[(1.0, 2.0), (10.0, 20.0)], Some((1.0, 2f64.ln())));
        assert!(s.starts_with("<svg") && s.ends_with("</svg>\n"));
        assert!(s.contains("a&lt;b"));
        assert_eq!(diverging(1.0), "#ff0000");
        assert_eq!(diverging(-1.0), "#0000ff");
    }
}
