use rayon::prelude::*;

use crate::error::{invalid, Result};
use crate::geom::{quadrature_grid, Grid, SurfaceKind};
use crate::spectra::EigenFn;
use std::f64::consts::PI;

/// Samples of one eigenfunction on a quadrature grid. Sphere fields also carry the
/// pole values (north, south) and disc fields the centre value, which the contour
/// extraction uses to close curves through those points.
#[derive(Debug, Clone)]
pub struct GridField {
    pub grid: Grid,
    /// row-major, `grid.n_rows() × grid.n_cols()`
    pub values: Vec<f64>,
    pub poles: [Option<f64>; 2],
    pub lambda: f64,
    /// label of the sampled function, used to match fields with derived data
    pub source: String,
}

impl GridField {
    pub fn sample(f: &EigenFn, resolution: usize) -> Result<Self> {
        let grid = quadrature_grid(f.surface, resolution)?;
        let nc = grid.n_cols();
        let mut values = vec![0.0; grid.len()];
        values
            .par_chunks_mut(nc)
            .enumerate()
            .for_each(|(i, row)| f.accumulate_row(grid.rows[i], &grid.cols, row));
        let poles = match f.surface {
            SurfaceKind::Sphere => [Some(f.value([0.0, 0.0])), Some(f.value([PI, 0.0]))],
            SurfaceKind::Disc => [Some(f.value([0.0, 0.0])), None],
            SurfaceKind::Torus => [None, None],
        };
        let mut field = GridField {
            grid,
            values,
            poles,
            lambda: f.lambda(),
            source: f.label(),
        };
        field.nudge_zeros();
        Ok(field)
    }

    pub fn from_values(grid: Grid, values: Vec<f64>, poles: [Option<f64>; 2], lambda: f64) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(invalid(format!(
                "field has {} values for a grid of {} nodes",
                values.len(),
                grid.len()
            )));
        }
        let mut field = GridField {
            grid,
            values,
            poles,
            lambda,
            source: String::new(),
        };
        field.nudge_zeros();
        Ok(field)
    }

    pub fn sup(&self) -> f64 {
        self.values
            .iter()
            .chain(self.poles.iter().flatten())
            .fold(0.0f64, |a, v| a.max(v.abs()))
    }

    /// Exact zeros become +1e-14·‖field‖∞ so every node has a strict sign.
    fn nudge_zeros(&mut self) {
        let bump = 1e-14 * self.sup();
        for v in self.values.iter_mut().chain(self.poles.iter_mut().flatten()) {
            if *v == 0.0 {
                *v = bump;
            }
        }
    }

    /// The field minus a constant (level sets of the original at `c`).
    pub fn shifted(&self, c: f64) -> GridField {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v -= c);
        out.poles.iter_mut().flatten().for_each(|v| *v -= c);
        out.source = format!("{} - {c}", self.source);
        out.nudge_zeros();
        out
    }

    pub fn negated(&self) -> GridField {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v = -*v);
        out.poles.iter_mut().flatten().for_each(|v| *v = -*v);
        out
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.grid.n_cols() + j]
    }

    /// Σ w·g(value) over the grid, summed row by row in a fixed order.
    pub fn integrate(&self, g: impl Fn(f64) -> f64 + Sync) -> f64 {
        self.integrate_with(|_, v| g(v))
    }

    /// Σ w·g(node, value), with the same deterministic reduction as `integrate`.
    pub fn integrate_with(&self, g: impl Fn(crate::geom::ChartPoint, f64) -> f64 + Sync) -> f64 {
        let nc = self.grid.n_cols();
        let rows: Vec<f64> = self
            .values
            .par_chunks(nc)
            .enumerate()
            .map(|(i, row)| {
                let terms: Vec<f64> = row
                    .iter()
                    .enumerate()
                    .map(|(j, v)| self.grid.col_weights[j] * g(self.grid.node(i, j), *v))
                    .collect();
                self.grid.row_weights[i] * crate::quad::pairwise_sum(&terms)
            })
            .collect();
        crate::quad::pairwise_sum(&rows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::{enumerate_modes, ModeIndex};

    #[test]
    fn orthonormal_gram() {
        for surface in [SurfaceKind::Torus, SurfaceKind::Sphere] {
            let modes: Vec<ModeIndex> = enumerate_modes(surface, 30.0).unwrap().into_iter().take(20).collect();
            let fields: Vec<GridField> = modes
                .iter()
                .map(|m| GridField::sample(&EigenFn::single(*m), 256).unwrap())
                .collect();
            for a in 0..fields.len() {
                for b in 0..=a {
                    let g: f64 = fields[a]
                        .values
                        .iter()
                        .zip(&fields[b].values)
                        .enumerate()
                        .map(|(k, (x, y))| {
                            let g = &fields[a].grid;
                            x * y * g.weight(k / g.n_cols(), k % g.n_cols())
                        })
                        .sum();
                    let want = if a == b { 1.0 } else { 0.0 };
                    assert!((g - want).abs() < 1e-6, "{surface} {a} {b}: {g}");
                }
            }
        }
    }

    #[test]
    fn disc_modes_normalised() {
        for m in crate::spectra::enumerate_disc_modes(crate::spectra::Bc::Dirichlet, 15.0).unwrap() {
            let f = GridField::sample(&EigenFn::single(m), 256).unwrap();
            let n = f.integrate(|v| v * v);
            assert!((n - 1.0).abs() < 1e-8, "{m}: {n}");
        }
        for m in crate::spectra::enumerate_disc_modes(crate::spectra::Bc::Neumann, 15.0).unwrap() {
            let f = GridField::sample(&EigenFn::single(m), 256).unwrap();
            let n = f.integrate(|v| v * v);
            assert!((n - 1.0).abs() < 1e-8, "{m}: {n}");
        }
    }
}
