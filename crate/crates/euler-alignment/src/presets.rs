//! Named initial data, point-sampled at cell centers.
//!
//! Step velocities point toward the nearest coordinate axis and vanish on the
//! axis itself: the colliding presets compress mass toward the center
//! (negative initial velocity divergence), and on odd grids, where the origin
//! is a cell center, the stagnation point coincides with that cell, so the
//! accumulating point mass lands in a single cell instead of straddling an
//! interface.

use crate::error::Error;
use crate::grid::{Dim, Grid};
use crate::state::ConservedState;
use std::f64::consts::PI;

/// Cell centers that should sit exactly on an axis can carry rounding error
/// from the center formula, so the axis test uses a slack that is far below
/// any genuine off-axis center (those are at least half a cell away).
const AXIS_TOL: f64 = 1e-12;

/// Unit step toward the axis: `+1` for `x < 0`, `-1` for `x > 0`, `0` on the
/// axis itself.
#[inline]
pub fn step_toward_axis(x: f64) -> f64 {
    if x > AXIS_TOL {
        -1.0
    } else if x < -AXIS_TOL {
        1.0
    } else {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialPreset {
    /// 1D: two unit-density blocks on `[-2L/3, -L/6]` and `[L/6, 2L/3]`,
    /// velocity `-sin(pi x / L)`.
    TwoBlocks,
    /// Smooth positive density and small smooth velocity, any dimension.
    /// Useful for convergence studies and threshold experiments.
    SmoothWave,
    /// 2D: two clipped Gaussian heaps at `(1/2, 1/2)` and `(-1/2, -1/2)`,
    /// each moving toward the axes, so they collide at the origin.
    SymmetricHeaps,
    /// 2D: same heaps with the negative-quadrant heap doubled; the heavier
    /// heap carries velocity `(1, 1)` and its momentum dominates the merge.
    AsymmetricHeaps,
    /// 2D: unit density, velocity `(1, 1)` everywhere.
    UniformFlock,
    /// 2D: unit density, unit tangential velocity `(cos phi, -sin phi)`.
    Milling,
    /// 2D: clipped Gaussian `max(exp(-2|x|^2) - 1/10, 0)` compressed by the
    /// axis-seeking step velocity; concentrates into a point mass at the
    /// origin when uncontrolled.
    Blowup,
}

impl InitialPreset {
    pub const ALL: [InitialPreset; 7] = [
        InitialPreset::TwoBlocks,
        InitialPreset::SmoothWave,
        InitialPreset::SymmetricHeaps,
        InitialPreset::AsymmetricHeaps,
        InitialPreset::UniformFlock,
        InitialPreset::Milling,
        InitialPreset::Blowup,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            InitialPreset::TwoBlocks => "two_blocks",
            InitialPreset::SmoothWave => "smooth_wave",
            InitialPreset::SymmetricHeaps => "symmetric_heaps",
            InitialPreset::AsymmetricHeaps => "asymmetric_heaps",
            InitialPreset::UniformFlock => "uniform_flock",
            InitialPreset::Milling => "milling",
            InitialPreset::Blowup => "blowup",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.iter().copied().find(|p| p.name() == name)
    }

    /// The dimension this preset is defined for; `None` means any.
    pub fn dim(&self) -> Option<Dim> {
        match self {
            InitialPreset::TwoBlocks => Some(Dim::One),
            InitialPreset::SmoothWave => None,
            _ => Some(Dim::Two),
        }
    }

    pub fn density_at(&self, half_width: f64, x: f64, y: f64) -> f64 {
        let l = half_width;
        match self {
            InitialPreset::TwoBlocks => {
                let in_left = x >= -2.0 * l / 3.0 && x <= -l / 6.0;
                let in_right = x >= l / 6.0 && x <= 2.0 * l / 3.0;
                if in_left || in_right {
                    1.0
                } else {
                    0.0
                }
            }
            InitialPreset::SmoothWave => {
                0.5 + 0.25 * (PI * x / l).cos() * (PI * y / l).cos()
            }
            InitialPreset::SymmetricHeaps => heap(x, y, 0.5) + heap(x, y, -0.5),
            InitialPreset::AsymmetricHeaps => heap(x, y, 0.5) + 2.0 * heap(x, y, -0.5),
            InitialPreset::UniformFlock | InitialPreset::Milling => 1.0,
            InitialPreset::Blowup => ((-2.0 * (x * x + y * y)).exp() - 0.1).max(0.0),
        }
    }

    pub fn velocity_at(&self, half_width: f64, x: f64, y: f64) -> [f64; 2] {
        let l = half_width;
        match self {
            InitialPreset::TwoBlocks => [-(PI * x / l).sin(), 0.0],
            InitialPreset::SmoothWave => {
                [0.2 * (PI * x / l).sin(), 0.2 * (PI * y / l).sin()]
            }
            InitialPreset::SymmetricHeaps
            | InitialPreset::AsymmetricHeaps
            | InitialPreset::Blowup => [step_toward_axis(x), step_toward_axis(y)],
            InitialPreset::UniformFlock => [1.0, 1.0],
            InitialPreset::Milling => {
                let phi = y.atan2(x);
                [phi.cos(), -phi.sin()]
            }
        }
    }

    pub fn build(&self, grid: &Grid) -> Result<ConservedState, Error> {
        if let Some(d) = self.dim() {
            if d != grid.dim() {
                return Err(Error::Preset(format!(
                    "`{}` needs a {}D grid, got {}D",
                    self.name(),
                    d.as_usize(),
                    grid.dim().as_usize()
                )));
            }
        }
        let l = grid.half_width();
        let mut s = ConservedState::zeros(*grid);
        let one_d = matches!(grid.dim(), Dim::One);
        for k in 0..grid.n_cells() {
            let (x, y) = grid.center_of(k);
            s.rho[k] = self.density_at(l, x, if one_d { 0.0 } else { y });
            let v = self.velocity_at(l, x, if one_d { 0.0 } else { y });
            s.u[0][k] = v[0];
            if !one_d {
                s.u[1][k] = v[1];
            }
        }
        Ok(s)
    }
}

fn heap(x: f64, y: f64, c: f64) -> f64 {
    let r2 = (x - c) * (x - c) + (y - c) * (y - c);
    ((-10.0 * r2).exp() - 0.2).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn two_blocks_point_values() {
        let p = InitialPreset::TwoBlocks;
        assert_eq!(p.density_at(1.0, -0.4, 0.0), 1.0);
        assert_relative_eq!(
            p.velocity_at(1.0, -0.4, 0.0)[0],
            (0.4 * PI).sin(),
            max_relative = 1e-15
        );
        assert_eq!(p.density_at(1.0, 0.0, 0.0), 0.0);
        assert_eq!(p.density_at(1.0, 0.9, 0.0), 0.0);
    }

    #[test]
    fn heap_centers_and_axes() {
        let p = InitialPreset::SymmetricHeaps;
        assert_relative_eq!(p.density_at(1.0, 0.5, 0.5), 0.8, max_relative = 1e-15);
        assert_eq!(p.density_at(1.0, 0.0, 0.0), 0.0);
        assert_eq!(p.velocity_at(1.0, 0.0, 0.0), [0.0, 0.0]);
        assert_eq!(p.velocity_at(1.0, -0.1, 0.3), [1.0, -1.0]);
        assert_eq!(p.velocity_at(1.0, 0.4, 0.0), [-1.0, 0.0]);
        let a = InitialPreset::AsymmetricHeaps;
        assert_relative_eq!(a.density_at(1.0, -0.5, -0.5), 1.6, max_relative = 1e-15);
    }

    #[test]
    fn blowup_peak_value() {
        let p = InitialPreset::Blowup;
        assert_relative_eq!(p.density_at(1.0, 0.0, 0.0), 0.9, max_relative = 1e-15);
        assert_eq!(p.velocity_at(1.0, 0.0, 0.0), [0.0, 0.0]);
        assert_eq!(p.velocity_at(1.0, -0.3, 0.7), [1.0, -1.0]);
    }

    #[test]
    fn milling_is_tangential() {
        let p = InitialPreset::Milling;
        let v = p.velocity_at(1.0, 0.5, 0.0);
        assert_relative_eq!(v[0], 1.0, max_relative = 1e-15);
        assert_relative_eq!(v[1], 0.0, epsilon = 1e-15);
        let v = p.velocity_at(1.0, 0.0, 0.5);
        assert_relative_eq!(v[0], 0.0, epsilon = 1e-15);
        assert_relative_eq!(v[1], -1.0, max_relative = 1e-15);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let g1 = Grid::new(Dim::One, 1.0, 8).unwrap();
        let g2 = Grid::new(Dim::Two, 1.0, 8).unwrap();
        assert!(InitialPreset::TwoBlocks.build(&g2).is_err());
        assert!(InitialPreset::Blowup.build(&g1).is_err());
        assert!(InitialPreset::SmoothWave.build(&g1).is_ok());
        assert!(InitialPreset::SmoothWave.build(&g2).is_ok());
    }

    #[test]
    fn build_is_deterministic() {
        let g = Grid::new(Dim::Two, 1.0, 12).unwrap();
        let a = InitialPreset::AsymmetricHeaps.build(&g).unwrap();
        let b = InitialPreset::AsymmetricHeaps.build(&g).unwrap();
        assert_eq!(a, b);
    }
}
