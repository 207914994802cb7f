//! IMEX time integration: convection and alignment explicit, relaxation
//! control implicit.
//!
//! The pairing is the second-order SSP2(2,2,2) scheme,
//!
//! ```text
//!   explicit            implicit
//!   0    | 0    0       beta   | beta      0        beta = 1 - 1/sqrt(2)
//!   1    | 1    0       1-beta | 1-2beta   beta
//!   -----+---------     -------+----------------
//!        | 1/2  1/2             | 1/2       1/2
//! ```
//!
//! Because the stiff term `(ubar - u)/gamma` is affine in `u`, every
//! implicit stage is a convex average of the explicit prediction and `ubar`
//! and is solved in closed form; no iteration and no gamma-dependent step
//! restriction. Step sizes come from the hyperbolic CFL condition alone.

use crate::control::{instantaneous_control, ControlLaw};
use crate::kernel::KernelEvaluator;
use crate::scheme::{nonstiff_rhs, SchemeConfig};
use crate::state::ConservedState;
use crate::thresholds::support_diagnostics;

#[derive(Debug, Clone, PartialEq)]
pub struct ImexTableau {
    pub explicit_a: [[f64; 2]; 2],
    pub explicit_b: [f64; 2],
    pub explicit_c: [f64; 2],
    pub implicit_a: [[f64; 2]; 2],
    pub implicit_b: [f64; 2],
    pub implicit_c: [f64; 2],
}

impl ImexTableau {
    pub fn ssp2() -> Self {
        let beta = 1.0 - 1.0 / std::f64::consts::SQRT_2;
        ImexTableau {
            explicit_a: [[0.0, 0.0], [1.0, 0.0]],
            explicit_b: [0.5, 0.5],
            explicit_c: [0.0, 1.0],
            implicit_a: [[beta, 0.0], [1.0 - 2.0 * beta, beta]],
            implicit_b: [0.5, 0.5],
            implicit_c: [beta, 1.0 - beta],
        }
    }
}

/// Closed-form solve of `u = u_exp + (coef/gamma)(ubar - u)` per component:
/// `u = (u_exp + (coef/gamma) ubar) / (1 + coef/gamma)`.
/// Uncontrolled flows return `u_exp` unchanged.
pub fn stiff_relaxation_solve(
    u_exp: &[Vec<f64>],
    law: &ControlLaw,
    coef: f64,
) -> Vec<Vec<f64>> {
    match law {
        ControlLaw::Uncontrolled => u_exp.to_vec(),
        ControlLaw::Controlled { gamma, u_bar, .. } => {
            let q = coef / gamma;
            let denom = 1.0 + q;
            u_exp
                .iter()
                .zip(u_bar)
                .map(|(ue, ub)| {
                    ue.iter()
                        .zip(ub)
                        .map(|(e, b)| (e + q * b) / denom)
                        .collect()
                })
                .collect()
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct StepResult {
    pub dt: f64,
    pub max_speed: f64,
    pub max_velocity_gradient: f64,
    pub min_rho: f64,
}

/// One IMEX step of size `dt`. The nonstiff tendency (fluxes + alignment)
/// enters through the explicit table, the relaxation through the implicit
/// one, with stage-value arguments throughout.
pub fn imex_step(
    state: &ConservedState,
    kernel: &KernelEvaluator,
    law: &ControlLaw,
    scheme: &SchemeConfig,
    tableau: &ImexTableau,
    dt: f64,
) -> (ConservedState, StepResult) {
    let n = state.rho.len();
    let ncomp = state.n_components();
    let a_ex = tableau.explicit_a;
    let a_im = tableau.implicit_a;
    let b = tableau.explicit_b;

    // stage 1: no explicit part, implicit relaxation at beta
    let mut w1 = state.clone();
    w1.u = stiff_relaxation_solve(&state.u, law, dt * a_im[0][0]);
    let k1 = nonstiff_rhs(&w1, kernel, scheme);
    let r1 = instantaneous_control(&w1, law);

    // stage 2: explicit convection of stage 1 plus both relaxation weights
    let mut w2 = state.clone();
    w2.time = state.time + dt;
    for i in 0..n {
        w2.rho[i] = state.rho[i] + dt * a_ex[1][0] * k1.rho[i];
    }
    for c in 0..ncomp {
        for i in 0..n {
            w2.u[c][i] = state.u[c][i]
                + dt * (a_ex[1][0] * k1.u[c][i] + a_im[1][0] * r1[c][i]);
        }
    }
    w2.u = stiff_relaxation_solve(&w2.u, law, dt * a_im[1][1]);
    let k2 = nonstiff_rhs(&w2, kernel, scheme);
    let r2 = instantaneous_control(&w2, law);

    let mut out = state.clone();
    out.time = state.time + dt;
    for i in 0..n {
        out.rho[i] += dt * (b[0] * k1.rho[i] + b[1] * k2.rho[i]);
    }
    for c in 0..ncomp {
        for i in 0..n {
            out.u[c][i] += dt
                * (b[0] * (k1.u[c][i] + r1[c][i]) + b[1] * (k2.u[c][i] + r2[c][i]));
        }
    }

    let diag = StepResult {
        dt,
        max_speed: out.max_abs_u(),
        max_velocity_gradient: out.max_velocity_gradient(),
        min_rho: out.min_rho(),
    };
    (out, diag)
}

/// CFL step size: `dt = cfl * min(dx, dy) / max_cell max(|u1|, |u2|)` with a
/// tiny floor on the speed, capped at the speed-1 step `cfl * min(dx, dy)`,
/// and clipped to `remaining` so runs land exactly on output times.
pub fn select_dt(state: &ConservedState, scheme: &SchemeConfig, remaining: f64) -> f64 {
    let h = state.grid.min_spacing();
    let lambda = state.max_abs_u().max(1e-12);
    let dt = (scheme.cfl * h / lambda).min(scheme.cfl * h);
    dt.min(remaining)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DivergenceGuard {
    /// Blow-up ceiling on the velocity gradient: trigger when
    /// `max |du/dx| > factor / min(dx, dy)`.
    pub gradient_ceiling_factor: f64,
    /// Trigger when `max rho > factor * max rho(0)`.
    pub density_growth_factor: f64,
}

impl Default for DivergenceGuard {
    fn default() -> Self {
        DivergenceGuard {
            gradient_ceiling_factor: 1e3,
            density_growth_factor: 1e3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DivergenceKind {
    NonFinite,
    VelocityGradient,
    DensityGrowth,
}

impl DivergenceKind {
    pub fn label(&self) -> &'static str {
        match self {
            DivergenceKind::NonFinite => "non_finite_field",
            DivergenceKind::VelocityGradient => "velocity_gradient_ceiling",
            DivergenceKind::DensityGrowth => "density_growth_ceiling",
        }
    }
}

#[derive(Debug, Clone)]
pub struct DivergenceReport {
    pub kind: DivergenceKind,
    pub time: f64,
    pub value: f64,
    pub threshold: f64,
}

#[derive(Debug, Clone)]
pub enum RunOutcome {
    Completed,
    Diverged(DivergenceReport),
}

#[derive(Debug, Clone)]
pub struct DiagnosticsRow {
    pub t: f64,
    pub mass: f64,
    pub momentum: Vec<f64>,
    pub kinetic_energy: f64,
    pub alignment_dissipation: f64,
    pub support_diameter: f64,
    pub velocity_diameter: f64,
    pub max_abs_u: f64,
    pub min_rho: f64,
    pub max_rho: f64,
    pub dt: f64,
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub t_final: f64,
    /// Strictly increasing times in `(0, t_final]`; the initial state is
    /// always the first snapshot.
    pub snapshot_times: Vec<f64>,
    /// Record a diagnostics row every this many steps (>= 1); rows are also
    /// recorded at t = 0, at every snapshot, and at the end.
    pub diagnostic_cadence: usize,
    /// Keep a copy of the state after every accepted step (for
    /// characteristic tracking).
    pub keep_trajectory: bool,
    pub guard: DivergenceGuard,
}

impl RunOptions {
    pub fn to_time(t_final: f64) -> Self {
        RunOptions {
            t_final,
            snapshot_times: Vec::new(),
            diagnostic_cadence: 1,
            keep_trajectory: false,
            guard: DivergenceGuard::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub snapshots: Vec<ConservedState>,
    pub diagnostics: Vec<DiagnosticsRow>,
    pub trajectory: Option<Vec<ConservedState>>,
    pub final_state: ConservedState,
    pub steps: usize,
    pub outcome: RunOutcome,
}

fn diagnostics_row(
    state: &ConservedState,
    kernel: &KernelEvaluator,
    rho_floor: f64,
    dt: f64,
) -> DiagnosticsRow {
    let (s, v) = support_diagnostics(state, rho_floor);
    DiagnosticsRow {
        t: state.time,
        mass: state.total_mass(),
        momentum: state.total_momentum(),
        kinetic_energy: state.kinetic_energy(),
        alignment_dissipation: kernel.alignment_dissipation(state),
        support_diameter: s,
        velocity_diameter: v,
        max_abs_u: state.max_abs_u(),
        min_rho: state.min_rho(),
        max_rho: state.max_rho(),
        dt,
    }
}

/// March the system to `t_final`, recording snapshots and diagnostics.
/// Stops early with a divergence report when a blow-up guard trips; the
/// result then carries the last finite state.
pub fn run(
    initial: &ConservedState,
    kernel: &KernelEvaluator,
    law: &ControlLaw,
    scheme: &SchemeConfig,
    opts: &RunOptions,
) -> RunResult {
    let tableau = ImexTableau::ssp2();
    let cadence = opts.diagnostic_cadence.max(1);
    let t0 = initial.time;
    let t_end = t0 + opts.t_final;
    let eps_t = 1e-12 * (1.0 + t_end.abs());
    let rho0_max = initial.max_rho();
    let rho_floor = 1e-8 * rho0_max.abs();
    let grad_ceiling = opts.guard.gradient_ceiling_factor / initial.grid.min_spacing();
    let rho_ceiling = opts.guard.density_growth_factor * rho0_max;

    let mut state = initial.clone();
    let mut snapshots = vec![state.clone()];
    let mut diagnostics = vec![diagnostics_row(&state, kernel, rho_floor, 0.0)];
    let mut trajectory = opts.keep_trajectory.then(|| vec![state.clone()]);
    let mut next_snapshot = 0usize;
    // entries at or before t0 are already covered by the initial snapshot
    while opts
        .snapshot_times
        .get(next_snapshot)
        .is_some_and(|&s| t0 + s <= state.time + eps_t)
    {
        next_snapshot += 1;
    }
    let mut steps = 0usize;

    while state.time < t_end - eps_t {
        let next_event = opts
            .snapshot_times
            .get(next_snapshot)
            .map(|&s| t0 + s)
            .filter(|&s| s > state.time + eps_t)
            .unwrap_or(t_end)
            .min(t_end);
        let dt = select_dt(&state, scheme, next_event - state.time);
        let (mut new_state, _step) = imex_step(&state, kernel, law, scheme, &tableau, dt);
        if (new_state.time - next_event).abs() <= eps_t {
            new_state.time = next_event;
        }
        steps += 1;

        let divergence = if !new_state.all_finite() {
            Some(DivergenceReport {
                kind: DivergenceKind::NonFinite,
                time: new_state.time,
                value: f64::NAN,
                threshold: f64::NAN,
            })
        } else {
            let grad = new_state.max_velocity_gradient();
            let rho_max = new_state.max_rho();
            if grad > grad_ceiling {
                Some(DivergenceReport {
                    kind: DivergenceKind::VelocityGradient,
                    time: new_state.time,
                    value: grad,
                    threshold: grad_ceiling,
                })
            } else if rho_max > rho_ceiling {
                Some(DivergenceReport {
                    kind: DivergenceKind::DensityGrowth,
                    time: new_state.time,
                    value: rho_max,
                    threshold: rho_ceiling,
                })
            } else {
                None
            }
        };
        if let Some(report) = divergence {
            // `state` still holds the last finite pre-trigger solution.
            diagnostics.push(diagnostics_row(&state, kernel, rho_floor, dt));
            return RunResult {
                snapshots,
                diagnostics,
                trajectory,
                final_state: state,
                steps,
                outcome: RunOutcome::Diverged(report),
            };
        }

        state = new_state;
        if let Some(traj) = trajectory.as_mut() {
            traj.push(state.clone());
        }

        let mut at_snapshot = false;
        while let Some(&s) = opts.snapshot_times.get(next_snapshot) {
            if (state.time - (t0 + s)).abs() <= eps_t {
                snapshots.push(state.clone());
                next_snapshot += 1;
                at_snapshot = true;
            } else {
                break;
            }
        }
        let at_end = state.time >= t_end - eps_t;
        if steps % cadence == 0 || at_snapshot || at_end {
            diagnostics.push(diagnostics_row(&state, kernel, rho_floor, dt));
        }
    }

    RunResult {
        snapshots,
        diagnostics,
        trajectory,
        final_state: state,
        steps,
        outcome: RunOutcome::Completed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::control::UbarPreset;
    use crate::grid::{Dim, Grid};
    use crate::kernel::KernelSpec;
    use crate::presets::InitialPreset;
    use approx::assert_relative_eq;

    fn evaluator(grid: Grid) -> KernelEvaluator {
        KernelEvaluator::new(KernelSpec::standard(), grid)
    }

    #[test]
    fn tableau_is_consistent() {
        let t = ImexTableau::ssp2();
        let beta = 1.0 - 1.0 / 2.0_f64.sqrt();
        assert_relative_eq!(t.implicit_a[0][0], beta, max_relative = 1e-15);
        for s in 0..2 {
            let row_ex: f64 = t.explicit_a[s].iter().sum();
            let row_im: f64 = t.implicit_a[s].iter().sum();
            assert_relative_eq!(row_ex, t.explicit_c[s], max_relative = 1e-14);
            assert_relative_eq!(row_im, t.implicit_c[s], epsilon = 1e-15);
        }
        assert_eq!(t.explicit_b.iter().sum::<f64>(), 1.0);
        assert_eq!(t.implicit_b.iter().sum::<f64>(), 1.0);
    }

    #[test]
    fn stiff_solve_values() {
        let g = Grid::new(Dim::One, 1.0, 8).unwrap();
        let law = ControlLaw::controlled(1.0, UbarPreset::Constant(vec![2.0]), &g).unwrap();
        let u = vec![vec![0.0; 8]];
        let solved = stiff_relaxation_solve(&u, &law, 1.0);
        assert_relative_eq!(solved[0][0], 1.0, max_relative = 1e-15);
        // coef = 0 keeps the input
        let same = stiff_relaxation_solve(&u, &law, 0.0);
        assert_eq!(same, u);
        // large coef pins to ubar
        let pinned = stiff_relaxation_solve(&u, &law, 1e12);
        assert_relative_eq!(pinned[0][3], 2.0, max_relative = 1e-10);
        // uncontrolled passes through
        let id = stiff_relaxation_solve(&u, &ControlLaw::Uncontrolled, 7.0);
        assert_eq!(id, u);
    }

    #[test]
    fn dt_selection() {
        let g = Grid::new(Dim::One, 1.0, 200).unwrap();
        let mut s = ConservedState::zeros(g);
        s.u[0].iter_mut().for_each(|v| *v = 1.0);
        s.rho.iter_mut().for_each(|v| *v = 1.0);
        let cfg = SchemeConfig::standard();
        assert_relative_eq!(select_dt(&s, &cfg, 1e9), 0.0095, max_relative = 1e-13);
        // u = 0 hits the speed-1 cap instead of dividing by zero
        s.u[0].iter_mut().for_each(|v| *v = 0.0);
        assert_relative_eq!(select_dt(&s, &cfg, 1e9), 0.0095, max_relative = 1e-13);
        // remaining time clips
        s.u[0].iter_mut().for_each(|v| *v = 1.0);
        assert_eq!(select_dt(&s, &cfg, 1e-3), 1e-3);
    }

    #[test]
    fn uniform_uncontrolled_state_is_stationary() {
        let g = Grid::new(Dim::Two, 1.0, 8).unwrap();
        let s = InitialPreset::UniformFlock.build(&g).unwrap();
        let ev = evaluator(g);
        let (out, _) = imex_step(
            &s,
            &ev,
            &ControlLaw::Uncontrolled,
            &SchemeConfig::standard(),
            &ImexTableau::ssp2(),
            0.01,
        );
        assert_eq!(out.rho, s.rho);
        assert_eq!(out.u, s.u);
    }

    #[test]
    fn relaxation_only_is_second_order() {
        // rho = 0 and uniform u reduce the step to the scalar ODE
        // u' = (ubar - u)/gamma with exact solution ubar + (u0-ubar) e^(-t/gamma).
        let g = Grid::new(Dim::One, 1.0, 8).unwrap();
        let mut s = ConservedState::zeros(g);
        s.u[0].iter_mut().for_each(|v| *v = 1.0);
        let law = ControlLaw::controlled(0.1, UbarPreset::Constant(vec![0.0]), &g).unwrap();
        let ev = evaluator(g);
        let cfg = SchemeConfig::standard();
        let tab = ImexTableau::ssp2();
        let t_final = 0.5;
        let exact = (-t_final / 0.1_f64).exp();
        let err = |steps: usize| {
            let dt = t_final / steps as f64;
            let mut w = s.clone();
            for _ in 0..steps {
                w = imex_step(&w, &ev, &law, &cfg, &tab, dt).0;
            }
            (w.u[0][0] - exact).abs()
        };
        let (e1, e2) = (err(64), err(128));
        let order = (e1 / e2).log2();
        assert!(order > 1.8 && order < 2.3, "observed order {order}");
    }

    #[test]
    fn implicit_stage_is_a_convex_average() {
        let g = Grid::new(Dim::One, 1.0, 8).unwrap();
        let law = ControlLaw::controlled(0.01, UbarPreset::Constant(vec![0.3]), &g).unwrap();
        let u = vec![vec![-1.0, 1.0, 0.3, 0.0, 0.9, -0.5, 0.2, 0.7]];
        for coef in [1e-4, 0.01, 0.5, 3.0, 1e6] {
            let s = stiff_relaxation_solve(&u, &law, coef);
            for (a, b) in s[0].iter().zip(&u[0]) {
                let lo = b.min(0.3) - 1e-12;
                let hi = b.max(0.3) + 1e-12;
                assert!(*a >= lo && *a <= hi, "{a} outside [{lo}, {hi}]");
            }
        }
    }

    #[test]
    fn zero_horizon_returns_initial_snapshot_only() {
        let g = Grid::new(Dim::One, 1.0, 16).unwrap();
        let s = InitialPreset::TwoBlocks.build(&g).unwrap();
        let ev = evaluator(g);
        let r = run(
            &s,
            &ev,
            &ControlLaw::Uncontrolled,
            &SchemeConfig::standard(),
            &RunOptions::to_time(0.0),
        );
        assert_eq!(r.snapshots.len(), 1);
        assert_eq!(r.steps, 0);
        assert!(matches!(r.outcome, RunOutcome::Completed));
    }

    #[test]
    fn snapshots_land_exactly() {
        let g = Grid::new(Dim::One, 1.0, 32).unwrap();
        let s = InitialPreset::TwoBlocks.build(&g).unwrap();
        let ev = evaluator(g);
        let mut opts = RunOptions::to_time(0.3);
        opts.snapshot_times = vec![0.1, 0.25, 0.3];
        let r = run(
            &s,
            &ev,
            &ControlLaw::Uncontrolled,
            &SchemeConfig::standard(),
            &opts,
        );
        assert!(matches!(r.outcome, RunOutcome::Completed));
        assert_eq!(r.snapshots.len(), 4);
        assert_eq!(r.snapshots[1].time, 0.1);
        assert_eq!(r.snapshots[2].time, 0.25);
        assert_eq!(r.snapshots[3].time, 0.3);
        assert_eq!(r.final_state.time, 0.3);
    }

    #[test]
    fn guard_reports_non_finite() {
        let g = Grid::new(Dim::One, 1.0, 16).unwrap();
        let mut s = InitialPreset::TwoBlocks.build(&g).unwrap();
        s.u[0][3] = 1e308; // blows up the Burgers flux within a step
        let ev = evaluator(g);
        let r = run(
            &s,
            &ev,
            &ControlLaw::Uncontrolled,
            &SchemeConfig::standard(),
            &RunOptions::to_time(1.0),
        );
        match r.outcome {
            RunOutcome::Diverged(rep) => {
                assert!(r.final_state.all_finite());
                assert!(rep.time <= 1.0);
            }
            RunOutcome::Completed => panic!("expected divergence"),
        }
    }
}
