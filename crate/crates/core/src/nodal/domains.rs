use serde::Serialize;

use crate::error::{invalid, Result};
use crate::field::GridField;
use crate::geom::SurfaceKind;

pub(crate) struct UnionFind {
    parent: Vec<u32>,
    rank: Vec<u8>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n as u32).collect(),
            rank: vec![0; n],
        }
    }

    pub fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let p = self.parent[x as usize];
            self.parent[x as usize] = self.parent[p as usize];
            x = p;
        }
        x
    }

    pub fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        let (ra, rb) = if self.rank[ra as usize] < self.rank[rb as usize] { (rb, ra) } else { (ra, rb) };
        self.parent[rb as usize] = ra;
        if self.rank[ra as usize] == self.rank[rb as usize] {
            self.rank[ra as usize] += 1;
        }
    }

    /// Dense labels 0..k in order of first appearance.
    pub fn labels(&mut self) -> (Vec<u32>, usize) {
        let n = self.parent.len();
        let mut map = vec![u32::MAX; n];
        let mut labels = vec![0; n];
        let mut next = 0u32;
        for x in 0..n {
            let r = self.find(x as u32) as usize;
            if map[r] == u32::MAX {
                map[r] = next;
                next += 1;
            }
            labels[x] = map[r];
        }
        (labels, next as usize)
    }
}

/// Four-neighbourhood of node (i, j) on the field grid: columns always wrap,
/// rows wrap on the torus only. No links are made through the poles.
pub(crate) fn neighbours(surface: SurfaceKind, nr: usize, nc: usize, i: usize, j: usize) -> impl Iterator<Item = (usize, usize)> {
    let mut out = [(usize::MAX, 0); 4];
    out[0] = (i, (j + 1) % nc);
    out[1] = (i, (j + nc - 1) % nc);
    if i + 1 < nr {
        out[2] = (i + 1, j);
    } else if surface == SurfaceKind::Torus {
        out[2] = (0, j);
    }
    if i > 0 {
        out[3] = (i - 1, j);
    } else if surface == SurfaceKind::Torus {
        out[3] = (nr - 1, j);
    }
    out.into_iter().filter(|p| p.0 != usize::MAX)
}

#[derive(Debug, Clone, Serialize)]
pub struct DomainDecomposition {
    pub surface: SurfaceKind,
    /// per grid node, row-major
    pub labels: Vec<u32>,
    pub domain_count: usize,
    pub areas: Vec<f64>,
    pub signs: Vec<i8>,
}

/// Union-find over same-sign 4-neighbours. Areas start from the node weights and move
/// the part of each node cell lying beyond the interpolated nodal line to the
/// neighbouring domain, which brings the area error from O(h) to roughly O(h²).
pub fn count_domains(field: &GridField) -> Result<DomainDecomposition> {
    if field.sup() == 0.0 {
        return Err(invalid("the field is identically zero"));
    }
    let g = &field.grid;
    let (nr, nc) = (g.n_rows(), g.n_cols());
    let mut uf = UnionFind::new(nr * nc);
    for i in 0..nr {
        for j in 0..nc {
            let a = field.at(i, j) > 0.0;
            for (p, q) in neighbours(g.surface, nr, nc, i, j) {
                if (field.at(p, q) > 0.0) == a {
                    uf.union((i * nc + j) as u32, (p * nc + q) as u32);
                }
            }
        }
    }
    let (labels, count) = uf.labels();
    let mut signs = vec![0i8; count];
    for (k, &l) in labels.iter().enumerate() {
        signs[l as usize] = if field.values[k] > 0.0 { 1 } else { -1 };
    }
    let areas = corrected_areas(field, &labels, count);
    Ok(DomainDecomposition {
        surface: g.surface,
        labels,
        domain_count: count,
        areas,
        signs,
    })
}

fn corrected_areas(field: &GridField, labels: &[u32], count: usize) -> Vec<f64> {
    let g = &field.grid;
    let (nr, nc) = (g.n_rows(), g.n_cols());
    let (lo, hi) = match g.surface {
        SurfaceKind::Torus => (f64::NAN, f64::NAN),
        SurfaceKind::Sphere => (0.0, std::f64::consts::PI),
        SurfaceKind::Disc => (0.0, 1.0),
    };
    // cell extent in the row coordinate: between midpoints to neighbouring rows
    let row_extent: Vec<f64> = (0..nr)
        .map(|i| {
            if g.surface == SurfaceKind::Torus {
                return 1.0 / nr as f64;
            }
            let a = if i == 0 { lo } else { 0.5 * (g.rows[i - 1] + g.rows[i]) };
            let b = if i + 1 == nr { hi } else { 0.5 * (g.rows[i] + g.rows[i + 1]) };
            b - a
        })
        .collect();
    let hc = g.col_period() / nc as f64;
    let pole_or = |i: isize, j: usize| -> Option<(f64, f64)> {
        if i < 0 {
            match g.surface {
                SurfaceKind::Torus => Some((g.rows[nr - 1] - 1.0, field.at(nr - 1, j))),
                _ => field.poles[0].map(|v| (0.0, v)),
            }
        } else if i as usize >= nr {
            match g.surface {
                SurfaceKind::Torus => Some((g.rows[0] + 1.0, field.at(0, j))),
                SurfaceKind::Sphere => field.poles[1].map(|v| (std::f64::consts::PI, v)),
                SurfaceKind::Disc => None,
            }
        } else {
            Some((g.rows[i as usize], field.at(i as usize, j)))
        }
    };
    let mut areas = vec![0.0; count];
    for i in 0..nr {
        let y = g.rows[i];
        // metric scale of the column direction
        let col_scale = match g.surface {
            SurfaceKind::Torus => 1.0,
            SurfaceKind::Sphere => y.sin(),
            SurfaceKind::Disc => y,
        };
        for j in 0..nc {
            let k = i * nc + j;
            let v = field.values[k];
            let w = g.weight(i, j);
            let own = labels[k] as usize;
            let opp: Vec<u32> = {
                let mut o: Vec<u32> = neighbours(g.surface, nr, nc, i, j)
                    .filter(|&(p, q)| (field.at(p, q) > 0.0) != (v > 0.0))
                    .map(|(p, q)| labels[p * nc + q])
                    .collect();
                o.sort_unstable();
                o.dedup();
                o
            };
            if opp.is_empty() {
                areas[own] += w;
                continue;
            }
            let (up, down) = (pole_or(i as isize - 1, j), pole_or(i as isize + 1, j));
            let dr = match (up, down) {
                (Some(a), Some(b)) => (b.1 - a.1) / (b.0 - a.0),
                (Some(a), None) => (v - a.1) / (y - a.0),
                (None, Some(b)) => (b.1 - v) / (b.0 - y),
                (None, None) => 0.0,
            };
            let dc = (field.at(i, (j + 1) % nc) - field.at(i, (j + nc - 1) % nc)) / (2.0 * hc);
            // metric gradient components and metric cell sides
            let (gr, gc) = (dr, if col_scale > 0.0 { dc / col_scale } else { 0.0 });
            let (a, b) = (row_extent[i], hc * col_scale);
            let gn = gr.hypot(gc);
            let frac = if gn > 0.0 && a > 0.0 && b > 0.0 {
                let (cr, cc) = ((gr / gn).abs(), (gc / gn).abs());
                let chord = match (cr > 1e-12, cc > 1e-12) {
                    (true, true) => (b / cr).min(a / cc),
                    (true, false) => b,
                    _ => a,
                };
                (0.5 + v.abs() / gn * chord / (a * b)).min(1.0)
            } else {
                1.0
            };
            areas[own] += w * frac;
            let share = w * (1.0 - frac) / opp.len() as f64;
            for l in opp {
                areas[l as usize] += share;
            }
        }
    }
    areas
}
