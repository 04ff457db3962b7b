use std::collections::HashMap;
use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::field::GridField;
use crate::geom::{metric_length, ChartPoint, SurfaceKind};

/// Node rows of a field with the pole/centre rows attached, so that cells cover
/// the whole chart: torus rows wrap; sphere gets φ = 0 and φ = π rows; disc gets r = 0.
pub(crate) struct Augmented {
    pub surface: SurfaceKind,
    pub rows: Vec<f64>,
    pub cols: Vec<f64>,
    pub values: Vec<f64>,
    pub wrap_rows: bool,
    pub has_north: bool,
    pub has_south: bool,
}

impl Augmented {
    pub fn new(field: &GridField) -> Self {
        let g = &field.grid;
        let nc = g.n_cols();
        let mut rows = Vec::with_capacity(g.n_rows() + 2);
        let mut values = Vec::with_capacity((g.n_rows() + 2) * nc);
        let (mut has_north, mut has_south) = (false, false);
        if let Some(v) = field.poles[0] {
            rows.push(0.0);
            values.extend(std::iter::repeat_n(v, nc));
            has_north = true;
        }
        rows.extend_from_slice(&g.rows);
        values.extend_from_slice(&field.values);
        if g.surface == SurfaceKind::Sphere {
            if let Some(v) = field.poles[1] {
                rows.push(PI);
                values.extend(std::iter::repeat_n(v, nc));
                has_south = true;
            }
        }
        Augmented {
            surface: g.surface,
            rows,
            cols: g.cols.clone(),
            values,
            wrap_rows: g.surface == SurfaceKind::Torus,
            has_north,
            has_south,
        }
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.cols.len()
    }

    pub fn v(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.n_cols() + j]
    }

    pub fn col_period(&self) -> f64 {
        if self.surface == SurfaceKind::Torus {
            1.0
        } else {
            std::f64::consts::TAU
        }
    }

    /// Number of cell rows.
    pub fn cell_rows(&self) -> usize {
        if self.wrap_rows {
            self.n_rows()
        } else {
            self.n_rows() - 1
        }
    }

    /// Unwrapped row coordinates of the cell's lower and upper edges.
    pub fn cell_row_span(&self, i: usize) -> (f64, f64) {
        let i1 = (i + 1) % self.n_rows();
        let (a, mut b) = (self.rows[i], self.rows[i1]);
        if i1 < i {
            b += 1.0;
        }
        (a, b)
    }

    pub fn cell_col_span(&self, j: usize) -> (f64, f64) {
        let j1 = (j + 1) % self.n_cols();
        let (a, mut b) = (self.cols[j], self.cols[j1]);
        if j1 < j {
            b += self.col_period();
        }
        (a, b)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Polyline {
    pub points: Vec<ChartPoint>,
    pub closed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct NodalCurveSet {
    pub surface: SurfaceKind,
    pub polylines: Vec<Polyline>,
    /// Riemannian length
    pub total_length: f64,
    /// number of extracted chains
    pub component_count: usize,
    pub resolution: usize,
    pub source: String,
    pub lambda: f64,
}

impl NodalCurveSet {
    /// Consecutive vertex pairs with the second vertex unwrapped to sit next to the first.
    pub fn segments(&self) -> impl Iterator<Item = (ChartPoint, ChartPoint)> + '_ {
        let surface = self.surface;
        self.polylines.iter().flat_map(move |pl| {
            let n = pl.points.len();
            let count = if pl.closed { n } else { n.saturating_sub(1) };
            (0..count).map(move |k| {
                let a = pl.points[k];
                let b = pl.points[(k + 1) % n];
                (a, unwrap_near(surface, a, b))
            })
        })
    }
}

pub(crate) fn unwrap_near(surface: SurfaceKind, a: ChartPoint, b: ChartPoint) -> ChartPoint {
    let cp = if surface == SurfaceKind::Torus { 1.0 } else { std::f64::consts::TAU };
    let mut out = b;
    out[1] = a[1] + (b[1] - a[1] - cp * ((b[1] - a[1]) / cp).round());
    if surface == SurfaceKind::Torus {
        out[0] = a[0] + (b[0] - a[0] - (b[0] - a[0]).round());
    }
    out
}

fn wrap_point(aug: &Augmented, p: ChartPoint) -> ChartPoint {
    let mut q = p;
    q[1] = q[1].rem_euclid(aug.col_period());
    if aug.wrap_rows {
        q[0] = q[0].rem_euclid(1.0);
    }
    q
}

/// Marching squares with linear interpolation on cell edges; two-crossing (saddle)
/// cells are resolved by the sign of the mean of the four corners.
pub fn extract_nodal(field: &GridField) -> Result<NodalCurveSet> {
    if field.sup() == 0.0 {
        return Err(invalid("the field is identically zero"));
    }
    let aug = Augmented::new(field);
    let (nr, nc) = (aug.n_rows(), aug.n_cols());
    // edge id: 2·(i·nc + j) for (i,j)–(i,j+1), +1 for (i,j)–(i+1,j)
    let mut crossings: HashMap<usize, ChartPoint> = HashMap::new();
    let mut segs: Vec<(usize, usize, f64)> = Vec::new();
    let mut cross = |id: usize, p: ChartPoint| {
        crossings.entry(id).or_insert(p);
    };
    for i in 0..aug.cell_rows() {
        let i1 = (i + 1) % nr;
        let (y0, y1) = aug.cell_row_span(i);
        for j in 0..nc {
            let j1 = (j + 1) % nc;
            let (x0, x1) = aug.cell_col_span(j);
            let v00 = aug.v(i, j);
            let v01 = aug.v(i, j1);
            let v10 = aug.v(i1, j);
            let v11 = aug.v(i1, j1);
            let code = (v00 > 0.0) as u8 | ((v01 > 0.0) as u8) << 1 | ((v11 > 0.0) as u8) << 2 | ((v10 > 0.0) as u8) << 3;
            if code == 0 || code == 15 {
                continue;
            }
            let lerp = |a: f64, b: f64| a / (a - b);
            // cell-local crossing points
            let top = [y0, x0 + lerp(v00, v01) * (x1 - x0)];
            let bot = [y1, x0 + lerp(v10, v11) * (x1 - x0)];
            let left = [y0 + lerp(v00, v10) * (y1 - y0), x0];
            let right = [y0 + lerp(v01, v11) * (y1 - y0), x1];
            let e_top = 2 * (i * nc + j);
            let e_bot = 2 * (i1 * nc + j);
            let e_left = 2 * (i * nc + j) + 1;
            let e_right = 2 * (i * nc + j1) + 1;
            let mut pairs: Vec<((usize, ChartPoint), (usize, ChartPoint))> = Vec::with_capacity(2);
            let (t, b, l, r) = ((e_top, top), (e_bot, bot), (e_left, left), (e_right, right));
            match code {
                1 | 14 => pairs.push((t, l)),
                2 | 13 => pairs.push((t, r)),
                4 | 11 => pairs.push((r, b)),
                8 | 7 => pairs.push((l, b)),
                3 | 12 => pairs.push((l, r)),
                6 | 9 => pairs.push((t, b)),
                5 | 10 => {
                    let centre = 0.25 * (v00 + v01 + v10 + v11);
                    // does the centre share the sign of corner 00?
                    if (centre > 0.0) == (v00 > 0.0) {
                        pairs.push((t, r));
                        pairs.push((l, b));
                    } else {
                        pairs.push((t, l));
                        pairs.push((r, b));
                    }
                }
                _ => unreachable!(),
            }
            for ((ea, pa), (eb, pb)) in pairs {
                let mid = [0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])];
                let len = metric_length(aug.surface, mid, [pb[0] - pa[0], pb[1] - pa[1]]);
                cross(ea, wrap_point(&aug, pa));
                cross(eb, wrap_point(&aug, pb));
                segs.push((ea, eb, len));
            }
        }
    }
    let total_length: f64 = crate::quad::pairwise_sum(&segs.iter().map(|s| s.2).collect::<Vec<_>>());
    let polylines = chain(&segs, &crossings);
    Ok(NodalCurveSet {
        surface: aug.surface,
        component_count: polylines.len(),
        polylines,
        total_length,
        resolution: field.grid.resolution,
        source: field.source.clone(),
        lambda: field.lambda,
    })
}

fn chain(segs: &[(usize, usize, f64)], points: &HashMap<usize, ChartPoint>) -> Vec<Polyline> {
    let mut by_edge: HashMap<usize, Vec<usize>> = HashMap::new();
    for (k, s) in segs.iter().enumerate() {
        by_edge.entry(s.0).or_default().push(k);
        by_edge.entry(s.1).or_default().push(k);
    }
    let mut used = vec![false; segs.len()];
    let mut out = Vec::new();
    let other = |k: usize, e: usize| if segs[k].0 == e { segs[k].1 } else { segs[k].0 };
    let walk = |start_seg: usize, start_edge: usize, used: &mut Vec<bool>| -> Polyline {
        let mut edges = vec![start_edge];
        let mut k = start_seg;
        let mut e = start_edge;
        loop {
            used[k] = true;
            let next_e = other(k, e);
            if next_e == start_edge {
                return Polyline {
                    points: edges.iter().map(|e| points[e]).collect(),
                    closed: true,
                };
            }
            edges.push(next_e);
            let next = by_edge[&next_e].iter().copied().find(|&s| !used[s]);
            match next {
                Some(s) => {
                    k = s;
                    e = next_e;
                }
                None => {
                    return Polyline {
                        points: edges.iter().map(|e| points[e]).collect(),
                        closed: false,
                    }
                }
            }
        }
    };
    // open chains start at edges touched once
    let mut ends: Vec<usize> = by_edge.iter().filter(|(_, v)| v.len() == 1).map(|(e, _)| *e).collect();
    ends.sort_unstable();
    for e in ends {
        let k = by_edge[&e][0];
        if !used[k] {
            out.push(walk(k, e, &mut used));
        }
    }
    for k in 0..segs.len() {
        if !used[k] {
            let e = segs[k].0;
            out.push(walk(k, e, &mut used));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::{EigenFn, ModeIndex, Parity};

    fn length(mode: ModeIndex, res: usize) -> NodalCurveSet {
        extract_nodal(&GridField::sample(&EigenFn::single(mode), res).unwrap()).unwrap()
    }

    #[test]
    fn torus_band_lines() {
        let c = length(ModeIndex::torus([1, 0], Parity::Sin).unwrap(), 512);
        assert_eq!(c.polylines.len(), 2);
        assert!(c.polylines.iter().all(|p| p.closed));
        assert!((c.total_length - 2.0).abs() < 0.01);
    }

    #[test]
    fn sphere_equator() {
        let c = length(ModeIndex::sphere(1, 0).unwrap(), 256);
        assert_eq!(c.polylines.len(), 1);
        assert!((c.total_length - 2.0 * PI).abs() < 0.005 * 2.0 * PI);
    }

    #[test]
    fn highest_weight_meridians() {
        let c = length(ModeIndex::sphere(8, 8).unwrap(), 256);
        assert!((c.total_length - 16.0 * PI).abs() < 0.01 * 16.0 * PI, "{}", c.total_length);
    }

    #[test]
    fn identically_zero_rejected() {
        let g = crate::geom::quadrature_grid(SurfaceKind::Torus, 16).unwrap();
        let f = GridField::from_values(g, vec![0.0; 256], [None, None], 1.0).unwrap();
        assert!(extract_nodal(&f).is_err());
    }
}
