//! Uniform cell-centered grids on the periodic square `[-L, L]^d`.

use crate::error::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dim {
    One,
    Two,
}

impl Dim {
    pub fn as_usize(self) -> usize {
        match self {
            Dim::One => 1,
            Dim::Two => 2,
        }
    }
}

/// Cell-centered uniform grid with periodic wrap on every axis.
///
/// Cell centers sit at `x_i = -L + (i + 1/2) dx` with `dx = 2L/n` computed
/// once from the cell count, never by accumulated increments. In 1D the grid
/// keeps `ny = 1` and a unit cross-section (`dy = 1`) so `cell_volume` is
/// `dx` in 1D and `dx * dy` in 2D.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    dim: Dim,
    half_width: f64,
    nx: usize,
    ny: usize,
    dx: f64,
    dy: f64,
}

impl Grid {
    pub fn new(dim: Dim, half_width: f64, cells_per_axis: usize) -> Result<Self, Error> {
        if !half_width.is_finite() || half_width <= 0.0 {
            return Err(Error::Grid(format!(
                "half_width must be positive and finite, got {half_width}"
            )));
        }
        if cells_per_axis < 4 {
            return Err(Error::Grid(format!(
                "need at least 4 cells per axis, got {cells_per_axis}"
            )));
        }
        let d = 2.0 * half_width / cells_per_axis as f64;
        let (ny, dy) = match dim {
            Dim::One => (1, 1.0),
            Dim::Two => (cells_per_axis, d),
        };
        Ok(Grid {
            dim,
            half_width,
            nx: cells_per_axis,
            ny,
            dx: d,
            dy,
        })
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn dy(&self) -> f64 {
        self.dy
    }

    pub fn n_cells(&self) -> usize {
        self.nx * self.ny
    }

    pub fn cell_volume(&self) -> f64 {
        match self.dim {
            Dim::One => self.dx,
            Dim::Two => self.dx * self.dy,
        }
    }

    pub fn min_spacing(&self) -> f64 {
        match self.dim {
            Dim::One => self.dx,
            Dim::Two => self.dx.min(self.dy),
        }
    }

    /// Row-major flat index, x fastest.
    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.nx && j < self.ny);
        j * self.nx + i
    }

    #[inline]
    pub fn center_x(&self, i: usize) -> f64 {
        debug_assert!(i < self.nx);
        -self.half_width + (i as f64 + 0.5) * self.dx
    }

    #[inline]
    pub fn center_y(&self, j: usize) -> f64 {
        debug_assert!(matches!(self.dim, Dim::Two) && j < self.ny);
        -self.half_width + (j as f64 + 0.5) * self.dy
    }

    /// Coordinates of the cell with flat index `k` (y is 0 in 1D).
    pub fn center_of(&self, k: usize) -> (f64, f64) {
        let i = k % self.nx;
        let j = k / self.nx;
        match self.dim {
            Dim::One => (self.center_x(i), 0.0),
            Dim::Two => (self.center_x(i), self.center_y(j)),
        }
    }

    /// Index of the cell containing `x` on the first axis (periodic).
    pub fn cell_of_x(&self, x: f64) -> usize {
        let span = 2.0 * self.half_width;
        let mut s = (x + self.half_width).rem_euclid(span);
        if s >= span {
            s = 0.0;
        }
        ((s / self.dx) as usize).min(self.nx - 1)
    }

    /// Minimal-image displacement along one axis.
    #[inline]
    pub fn wrap_displacement(&self, d: f64) -> f64 {
        let span = 2.0 * self.half_width;
        d - span * (d / span).round()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn spacing_is_exact() {
        let g = Grid::new(Dim::One, 1.0, 200).unwrap();
        assert_eq!(g.dx(), 0.01);
        let g = Grid::new(Dim::Two, 1.0, 64).unwrap();
        assert_eq!(g.dx(), 0.03125);
        assert_eq!(g.dy(), 0.03125);
        assert_eq!(g.cell_volume(), 0.03125 * 0.03125);
    }

    #[test]
    fn four_cell_centers() {
        let g = Grid::new(Dim::One, 1.0, 4).unwrap();
        let xs: Vec<f64> = (0..4).map(|i| g.center_x(i)).collect();
        for (a, b) in xs.iter().zip([-0.75, -0.25, 0.25, 0.75]) {
            assert_relative_eq!(a, &b, max_relative = 1e-15);
        }
    }

    #[test]
    fn rejects_degenerate_input() {
        assert!(Grid::new(Dim::One, 1.0, 3).is_err());
        assert!(Grid::new(Dim::One, 0.0, 10).is_err());
        assert!(Grid::new(Dim::Two, -2.0, 10).is_err());
        assert!(Grid::new(Dim::One, f64::NAN, 10).is_err());
    }

    #[test]
    fn center_round_trip() {
        let g = Grid::new(Dim::One, 1.5, 37).unwrap();
        for i in 0..g.nx() {
            assert_eq!(g.cell_of_x(g.center_x(i)), i);
        }
    }

    #[test]
    fn wrap_is_minimal_image() {
        let g = Grid::new(Dim::One, 1.0, 10).unwrap();
        assert_relative_eq!(g.wrap_displacement(1.8), -0.2, max_relative = 1e-14);
        assert_relative_eq!(g.wrap_displacement(-1.7), 0.3, max_relative = 1e-14);
        assert_eq!(g.wrap_displacement(0.4), 0.4);
    }

    #[test]
    fn flat_index_is_row_major() {
        let g = Grid::new(Dim::Two, 1.0, 8).unwrap();
        assert_eq!(g.idx(0, 0), 0);
        assert_eq!(g.idx(3, 2), 2 * 8 + 3);
        assert_eq!(g.center_of(g.idx(3, 2)), (g.center_x(3), g.center_y(2)));
    }
}
