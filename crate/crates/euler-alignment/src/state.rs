//! Cell-averaged solution state `w = (rho, u)` and its integral diagnostics.

use crate::grid::{Dim, Grid};

/// Density and velocity per cell, stored as flat row-major arrays
/// (one velocity array per component).
#[derive(Debug, Clone, PartialEq)]
pub struct ConservedState {
    pub grid: Grid,
    pub time: f64,
    pub rho: Vec<f64>,
    pub u: Vec<Vec<f64>>,
}

impl ConservedState {
    pub fn zeros(grid: Grid) -> Self {
        let n = grid.n_cells();
        ConservedState {
            grid,
            time: 0.0,
            rho: vec![0.0; n],
            u: vec![vec![0.0; n]; grid.dim().as_usize()],
        }
    }

    pub fn n_components(&self) -> usize {
        self.u.len()
    }

    pub fn total_mass(&self) -> f64 {
        self.rho.iter().sum::<f64>() * self.grid.cell_volume()
    }

    pub fn total_momentum(&self) -> Vec<f64> {
        let vol = self.grid.cell_volume();
        self.u
            .iter()
            .map(|uk| {
                uk.iter()
                    .zip(&self.rho)
                    .map(|(u, r)| r * u)
                    .sum::<f64>()
                    * vol
            })
            .collect()
    }

    pub fn kinetic_energy(&self) -> f64 {
        let vol = self.grid.cell_volume();
        let mut e = 0.0;
        for (k, r) in self.rho.iter().enumerate() {
            let mut sq = 0.0;
            for uk in &self.u {
                sq += uk[k] * uk[k];
            }
            e += r * sq;
        }
        e * vol
    }

    pub fn max_abs_u(&self) -> f64 {
        self.u
            .iter()
            .flat_map(|uk| uk.iter())
            .fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn min_rho(&self) -> f64 {
        self.rho.iter().fold(f64::INFINITY, |m, v| m.min(*v))
    }

    pub fn max_rho(&self) -> f64 {
        self.rho.iter().fold(f64::NEG_INFINITY, |m, v| m.max(*v))
    }

    pub fn all_finite(&self) -> bool {
        self.rho.iter().all(|v| v.is_finite())
            && self.u.iter().all(|uk| uk.iter().all(|v| v.is_finite()))
    }

    /// Largest |du_k/dx_axis| over all components and axes, by periodic
    /// centered differences. Used by the blow-up guard.
    pub fn max_velocity_gradient(&self) -> f64 {
        let mut m = 0.0_f64;
        for uk in &self.u {
            for axis in 0..self.grid.dim().as_usize() {
                for v in centered_diff(&self.grid, uk, axis) {
                    m = m.max(v.abs());
                }
            }
        }
        m
    }
}

/// Periodic centered difference of a flat field along `axis` (0 = x, 1 = y).
pub fn centered_diff(grid: &Grid, f: &[f64], axis: usize) -> Vec<f64> {
    assert_eq!(f.len(), grid.n_cells());
    let (nx, ny) = (grid.nx(), grid.ny());
    let mut out = vec![0.0; f.len()];
    match axis {
        0 => {
            let h = 2.0 * grid.dx();
            for j in 0..ny {
                for i in 0..nx {
                    let ip = (i + 1) % nx;
                    let im = (i + nx - 1) % nx;
                    out[grid.idx(i, j)] = (f[grid.idx(ip, j)] - f[grid.idx(im, j)]) / h;
                }
            }
        }
        1 => {
            assert!(matches!(grid.dim(), Dim::Two));
            let h = 2.0 * grid.dy();
            for j in 0..ny {
                let jp = (j + 1) % ny;
                let jm = (j + ny - 1) % ny;
                for i in 0..nx {
                    out[grid.idx(i, j)] = (f[grid.idx(i, jp)] - f[grid.idx(i, jm)]) / h;
                }
            }
        }
        _ => panic!("axis out of range"),
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Dim, Grid};
    use approx::assert_relative_eq;

    fn uniform(grid: Grid, rho: f64, u: &[f64]) -> ConservedState {
        let n = grid.n_cells();
        ConservedState {
            grid,
            time: 0.0,
            rho: vec![rho; n],
            u: u.iter().map(|&c| vec![c; n]).collect(),
        }
    }

    #[test]
    fn integrals_of_uniform_flock() {
        let g = Grid::new(Dim::Two, 1.0, 16).unwrap();
        let s = uniform(g, 1.0, &[1.0, 1.0]);
        assert_relative_eq!(s.total_mass(), 4.0, max_relative = 1e-13);
        let p = s.total_momentum();
        assert_relative_eq!(p[0], 4.0, max_relative = 1e-13);
        assert_relative_eq!(p[1], 4.0, max_relative = 1e-13);
        assert_relative_eq!(s.kinetic_energy(), 8.0, max_relative = 1e-13);
    }

    #[test]
    fn zero_velocity_has_no_energy() {
        let g = Grid::new(Dim::One, 1.0, 32).unwrap();
        let s = uniform(g, 2.0, &[0.0]);
        assert_eq!(s.kinetic_energy(), 0.0);
        assert_eq!(s.total_momentum()[0], 0.0);
    }

    #[test]
    fn centered_diff_of_linear_field() {
        // Interior cells see the exact slope; the wrap rows do not, so probe
        // away from the seam.
        let g = Grid::new(Dim::Two, 1.0, 16).unwrap();
        let mut f = vec![0.0; g.n_cells()];
        for j in 0..g.ny() {
            for i in 0..g.nx() {
                f[g.idx(i, j)] = 3.0 * g.center_y(j);
            }
        }
        let d = centered_diff(&g, &f, 1);
        assert_relative_eq!(d[g.idx(8, 8)], 3.0, max_relative = 1e-12);
        assert_relative_eq!(d[g.idx(2, 5)], 3.0, max_relative = 1e-12);
    }

    #[test]
    fn gradient_guard_sees_a_jump() {
        let g = Grid::new(Dim::One, 1.0, 64).unwrap();
        let mut s = uniform(g, 1.0, &[1.0]);
        for i in 32..64 {
            s.u[0][i] = -1.0;
        }
        let expect = 2.0 / (2.0 * g.dx());
        assert_relative_eq!(s.max_velocity_gradient(), expect, max_relative = 1e-13);
    }
}
