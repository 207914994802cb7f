//! Instantaneous feedback control `phi = (ubar - u) / gamma` and the named
//! reference-velocity fields it steers toward.

use crate::error::Error;
use crate::grid::{Dim, Grid};
use crate::presets::step_toward_axis;
use crate::state::ConservedState;
use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq)]
pub enum UbarPreset {
    /// Spatially constant reference velocity (one entry per component).
    Constant(Vec<f64>),
    /// 1D `ubar(x) = sin(pi x / L)`.
    Sine,
    /// 2D constant `(-1, -1)`, opposing the uniform flock.
    Reorientation,
    /// 2D axis-seeking step field, switched off on the axis-aligned cross
    /// `|x| <= L/5 or |y| <= L/5`; drives mass onto the cross and traps it
    /// there.
    Birdcage,
    /// 2D radial repeller `2 x / |x|` inside the disk `|x|^2 <= 1/10`.
    Scarecrow,
}

impl UbarPreset {
    pub fn name(&self) -> &'static str {
        match self {
            UbarPreset::Constant(_) => "constant",
            UbarPreset::Sine => "sine",
            UbarPreset::Reorientation => "reorientation",
            UbarPreset::Birdcage => "birdcage",
            UbarPreset::Scarecrow => "scarecrow",
        }
    }

    /// The dimension the preset requires; `None` for constants (length
    /// checked against the grid instead).
    pub fn dim(&self) -> Option<Dim> {
        match self {
            UbarPreset::Constant(_) => None,
            UbarPreset::Sine => Some(Dim::One),
            _ => Some(Dim::Two),
        }
    }

    pub fn eval(&self, half_width: f64, x: f64, y: f64) -> [f64; 2] {
        let l = half_width;
        match self {
            UbarPreset::Constant(c) => [c[0], if c.len() > 1 { c[1] } else { 0.0 }],
            UbarPreset::Sine => [(PI * x / l).sin(), 0.0],
            UbarPreset::Reorientation => [-1.0, -1.0],
            UbarPreset::Birdcage => {
                let gate =
                    |t: f64| if t.abs() <= l / 5.0 { 0.0 } else { 1.0 };
                let f = gate(x) * gate(y);
                [step_toward_axis(x) * f, step_toward_axis(y) * f]
            }
            UbarPreset::Scarecrow => {
                let r2 = x * x + y * y;
                if r2 <= 0.1 && r2 > 0.0 {
                    let r = r2.sqrt();
                    [2.0 * x / r, 2.0 * y / r]
                } else {
                    [0.0, 0.0]
                }
            }
        }
    }

    /// Sample the field at every cell center of `grid`.
    pub fn build(&self, grid: &Grid) -> Result<Vec<Vec<f64>>, Error> {
        if let Some(d) = self.dim() {
            if d != grid.dim() {
                return Err(Error::Preset(format!(
                    "ubar preset `{}` needs a {}D grid, got {}D",
                    self.name(),
                    d.as_usize(),
                    grid.dim().as_usize()
                )));
            }
        }
        if let UbarPreset::Constant(c) = self {
            if c.len() != grid.dim().as_usize() {
                return Err(Error::Preset(format!(
                    "constant ubar has {} components on a {}D grid",
                    c.len(),
                    grid.dim().as_usize()
                )));
            }
        }
        let ncomp = grid.dim().as_usize();
        let mut field = vec![vec![0.0; grid.n_cells()]; ncomp];
        for k in 0..grid.n_cells() {
            let (x, y) = grid.center_of(k);
            let v = self.eval(grid.half_width(), x, y);
            for (c, fk) in field.iter_mut().enumerate() {
                fk[k] = v[c];
            }
        }
        Ok(field)
    }
}

/// Relaxation control toward a fixed reference field, or no control at all.
#[derive(Debug, Clone, PartialEq)]
pub enum ControlLaw {
    Uncontrolled,
    Controlled {
        gamma: f64,
        preset: UbarPreset,
        u_bar: Vec<Vec<f64>>,
    },
}

impl ControlLaw {
    pub fn controlled(gamma: f64, preset: UbarPreset, grid: &Grid) -> Result<Self, Error> {
        if !gamma.is_finite() || gamma <= 0.0 {
            return Err(Error::Preset(format!(
                "control strength gamma must be positive and finite, got {gamma}"
            )));
        }
        let u_bar = preset.build(grid)?;
        Ok(ControlLaw::Controlled {
            gamma,
            preset,
            u_bar,
        })
    }

    pub fn gamma_inv(&self) -> f64 {
        match self {
            ControlLaw::Uncontrolled => 0.0,
            ControlLaw::Controlled { gamma, .. } => 1.0 / gamma,
        }
    }

    /// Penalty parameter; infinite for the uncontrolled system.
    pub fn gamma(&self) -> f64 {
        match self {
            ControlLaw::Uncontrolled => f64::INFINITY,
            ControlLaw::Controlled { gamma, .. } => *gamma,
        }
    }

    pub fn u_bar(&self) -> Option<&Vec<Vec<f64>>> {
        match self {
            ControlLaw::Uncontrolled => None,
            ControlLaw::Controlled { u_bar, .. } => Some(u_bar),
        }
    }

    pub fn max_abs_u_bar(&self) -> f64 {
        self.u_bar()
            .map(|f| {
                f.iter()
                    .flat_map(|c| c.iter())
                    .fold(0.0_f64, |m, v| m.max(v.abs()))
            })
            .unwrap_or(0.0)
    }
}

/// `phi = (ubar - u) / gamma`; identically zero when uncontrolled.
pub fn instantaneous_control(state: &ConservedState, law: &ControlLaw) -> Vec<Vec<f64>> {
    let n = state.rho.len();
    match law {
        ControlLaw::Uncontrolled => vec![vec![0.0; n]; state.n_components()],
        ControlLaw::Controlled { gamma, u_bar, .. } => u_bar
            .iter()
            .zip(&state.u)
            .map(|(bk, uk)| {
                bk.iter()
                    .zip(uk)
                    .map(|(b, u)| (b - u) / gamma)
                    .collect()
            })
            .collect(),
    }
}

/// One-step feedback ancestor of the instantaneous law for step size `h`:
/// `phi_h = h/(gamma_h + h^2) (ubar - u)` with `gamma_h = h gamma`, which
/// reduces to `(ubar - u)/(gamma + h)` and converges to the instantaneous
/// control at rate `h/(gamma (gamma + h))`.
pub fn one_step_control(state: &ConservedState, law: &ControlLaw, h: f64) -> Vec<Vec<f64>> {
    assert!(h > 0.0, "step size must be positive");
    let n = state.rho.len();
    match law {
        ControlLaw::Uncontrolled => vec![vec![0.0; n]; state.n_components()],
        ControlLaw::Controlled { gamma, u_bar, .. } => u_bar
            .iter()
            .zip(&state.u)
            .map(|(bk, uk)| {
                bk.iter()
                    .zip(uk)
                    .map(|(b, u)| (b - u) / (gamma + h))
                    .collect()
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn state_with_u(grid: Grid, u: &[f64]) -> ConservedState {
        let mut s = ConservedState::zeros(grid);
        s.rho.iter_mut().for_each(|r| *r = 1.0);
        for (k, &c) in u.iter().enumerate() {
            s.u[k].iter_mut().for_each(|v| *v = c);
        }
        s
    }

    #[test]
    fn control_vanishes_on_target() {
        let g = Grid::new(Dim::Two, 1.0, 8).unwrap();
        let s = state_with_u(g, &[-1.0, -1.0]);
        let law = ControlLaw::controlled(0.5, UbarPreset::Reorientation, &g).unwrap();
        let phi = instantaneous_control(&s, &law);
        assert!(phi.iter().all(|c| c.iter().all(|&v| v == 0.0)));
    }

    #[test]
    fn strong_and_weak_control_values() {
        let g = Grid::new(Dim::Two, 1.0, 8).unwrap();
        let s = state_with_u(g, &[1.0, 1.0]);
        let law =
            ControlLaw::controlled(0.1, UbarPreset::Constant(vec![0.0, 0.0]), &g).unwrap();
        let phi = instantaneous_control(&s, &law);
        assert_relative_eq!(phi[0][3], -10.0, max_relative = 1e-14);
        assert_relative_eq!(phi[1][5], -10.0, max_relative = 1e-14);

        let g1 = Grid::new(Dim::One, 1.0, 8).unwrap();
        let s1 = state_with_u(g1, &[-0.2]);
        let law1 =
            ControlLaw::controlled(10.0, UbarPreset::Constant(vec![0.5]), &g1).unwrap();
        let phi1 = instantaneous_control(&s1, &law1);
        assert_relative_eq!(phi1[0][0], 0.07, max_relative = 1e-14);
    }

    #[test]
    fn one_step_values_and_limit() {
        let g = Grid::new(Dim::One, 1.0, 8).unwrap();
        let s = state_with_u(g, &[0.0]);
        let law = ControlLaw::controlled(1.0, UbarPreset::Constant(vec![2.0]), &g).unwrap();
        let phi = one_step_control(&s, &law, 1.0);
        assert_relative_eq!(phi[0][0], 1.0, max_relative = 1e-14);

        let s1 = state_with_u(g, &[1.0]);
        let phi = one_step_control(&s1, &law, 0.01);
        assert_relative_eq!(phi[0][0], 1.0 / 1.01, max_relative = 1e-14);

        // Gap to the instantaneous law is h/(gamma(gamma+h)) * |ubar - u|
        // and halves (to first order) with h.
        let inst = instantaneous_control(&s1, &law);
        let gap = |h: f64| (one_step_control(&s1, &law, h)[0][0] - inst[0][0]).abs();
        let (g1, g2) = (gap(1e-3), gap(5e-4));
        assert_relative_eq!(g1, 1e-3 / (1.0 + 1e-3), max_relative = 1e-10);
        let ratio = g1 / g2;
        assert!(ratio > 1.9 && ratio < 2.1, "ratio {ratio}");
    }

    #[test]
    fn uncontrolled_is_exactly_zero() {
        let g = Grid::new(Dim::One, 1.0, 8).unwrap();
        let s = state_with_u(g, &[3.0]);
        let phi = instantaneous_control(&s, &ControlLaw::Uncontrolled);
        assert!(phi[0].iter().all(|&v| v == 0.0));
        assert_eq!(ControlLaw::Uncontrolled.gamma_inv(), 0.0);
    }

    #[test]
    fn birdcage_gates_the_cross() {
        let b = UbarPreset::Birdcage;
        assert_eq!(b.eval(1.0, 0.0, 0.0), [0.0, 0.0]);
        assert_eq!(b.eval(1.0, 0.5, 0.1), [0.0, 0.0]); // |y| inside the cross
        assert_eq!(b.eval(1.0, 0.5, -0.5), [-1.0, 1.0]);
        assert_eq!(b.eval(1.0, -0.3, 0.9), [1.0, -1.0]);
    }

    #[test]
    fn scarecrow_repels_inside_the_disk() {
        let s = UbarPreset::Scarecrow;
        let v = s.eval(1.0, 0.1, 0.0);
        assert_relative_eq!(v[0], 2.0, max_relative = 1e-14);
        assert_eq!(v[1], 0.0);
        assert_eq!(s.eval(1.0, 0.5, 0.5), [0.0, 0.0]);
        assert_eq!(s.eval(1.0, 0.0, 0.0), [0.0, 0.0]);
    }

    #[test]
    fn preset_dimension_checks() {
        let g2 = Grid::new(Dim::Two, 1.0, 8).unwrap();
        assert!(UbarPreset::Sine.build(&g2).is_err());
        assert!(UbarPreset::Constant(vec![1.0]).build(&g2).is_err());
        let g1 = Grid::new(Dim::One, 1.0, 8).unwrap();
        assert!(UbarPreset::Scarecrow.build(&g1).is_err());
        assert!(ControlLaw::controlled(0.0, UbarPreset::Sine, &g1).is_err());
        assert!(ControlLaw::controlled(f64::NAN, UbarPreset::Sine, &g1).is_err());
    }
}
