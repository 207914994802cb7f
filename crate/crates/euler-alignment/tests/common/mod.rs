//! Shared oracles for the integration tests: independent quadrature,
//! brute-force reference implementations, and seeded random data. Everything
//! here is deliberately written from the mathematical definitions, not by
//! calling back into the solver paths under test.

#![allow(dead_code)]

use euler_alignment::control::ControlLaw;
use euler_alignment::grid::{Dim, Grid};
use euler_alignment::state::ConservedState;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

/// Adaptive Simpson quadrature with absolute tolerance `tol`.
pub fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn simpson_rule<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> f64 {
        (b - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b))
    }
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        whole: f64,
        tol: f64,
        depth: usize,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let left = simpson_rule(f, a, m);
        let right = simpson_rule(f, m, b);
        let split = left + right;
        if depth == 0 || (split - whole).abs() <= 15.0 * tol {
            split + (split - whole) / 15.0
        } else {
            recurse(f, a, m, left, 0.5 * tol, depth - 1)
                + recurse(f, m, b, right, 0.5 * tol, depth - 1)
        }
    }
    recurse(f, a, b, simpson_rule(f, a, b), tol, 40)
}

/// 2D quadrature over `[ax, bx] x [ay, by]` by nested adaptive Simpson.
pub fn simpson_2d<F: Fn(f64, f64) -> f64>(
    f: &F,
    ax: f64,
    bx: f64,
    ay: f64,
    by: f64,
    tol: f64,
) -> f64 {
    let inner_tol = tol / (bx - ax).max(1.0);
    simpson(&|x| simpson(&|y| f(x, y), ay, by, inner_tol), ax, bx, tol)
}

/// The communication weight, written out from its definition.
pub fn psi(zeta: f64, beta: f64, r: f64) -> f64 {
    (zeta + r.abs()).powf(-beta)
}

/// Minimal-image wrap of a displacement to `[-L, L)`.
pub fn wrap(d: f64, half_width: f64) -> f64 {
    let span = 2.0 * half_width;
    (d + half_width).rem_euclid(span) - half_width
}

/// Brute-force alignment force by the double sum over cell pairs,
/// `force_i = sum_j psi(|x_i - x_j|) (u_j - u_i) rho_j vol`, with
/// minimal-image periodic distances. The reference for the kernel module.
pub fn brute_force_alignment(
    state: &ConservedState,
    zeta: f64,
    beta: f64,
) -> Vec<Vec<f64>> {
    let grid = &state.grid;
    let l = grid.half_width();
    let n = grid.n_cells();
    let vol = grid.cell_volume();
    let n_comp = state.u.len();
    let mut force = vec![vec![0.0; n]; n_comp];
    for i in 0..n {
        let (xi, yi) = grid.center_of(i);
        for j in 0..n {
            let (xj, yj) = grid.center_of(j);
            let r = match grid.dim() {
                Dim::One => wrap(xi - xj, l).abs(),
                Dim::Two => {
                    let dx = wrap(xi - xj, l);
                    let dy = wrap(yi - yj, l);
                    dx.hypot(dy)
                }
            };
            let w = psi(zeta, beta, r) * state.rho[j] * vol;
            for (c, fc) in force.iter_mut().enumerate() {
                fc[i] += w * (state.u[c][j] - state.u[c][i]);
            }
        }
    }
    force
}

/// Brute-force alignment kinetic-energy dissipation rate,
/// `sum_ij psi_ij |u_i - u_j|^2 rho_i rho_j vol^2`, the decay rate of the
/// unhalved kinetic energy `sum rho |u|^2 vol`.
pub fn brute_force_dissipation(state: &ConservedState, zeta: f64, beta: f64) -> f64 {
    let grid = &state.grid;
    let l = grid.half_width();
    let n = grid.n_cells();
    let vol = grid.cell_volume();
    let mut total = 0.0;
    for i in 0..n {
        let (xi, yi) = grid.center_of(i);
        for j in 0..n {
            let (xj, yj) = grid.center_of(j);
            let r = match grid.dim() {
                Dim::One => wrap(xi - xj, l).abs(),
                Dim::Two => wrap(xi - xj, l).hypot(wrap(yi - yj, l)),
            };
            let du2: f64 = state
                .u
                .iter()
                .map(|uc| (uc[i] - uc[j]) * (uc[i] - uc[j]))
                .sum();
            total += psi(zeta, beta, r) * du2 * state.rho[i] * state.rho[j];
        }
    }
    total * vol * vol
}

/// Random smooth periodic 1D data: a strictly positive Fourier density and a
/// small Fourier velocity. Deterministic per seed.
pub fn random_smooth_1d(seed: u64, grid: Grid, u_scale: f64) -> ConservedState {
    assert_eq!(grid.dim(), Dim::One);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let modes = 3;
    let mut rho_a = vec![0.0; modes];
    let mut rho_b = vec![0.0; modes];
    let mut u_a = vec![0.0; modes];
    let mut u_b = vec![0.0; modes];
    for k in 0..modes {
        rho_a[k] = rng.gen_range(-1.0..1.0);
        rho_b[k] = rng.gen_range(-1.0..1.0);
        u_a[k] = rng.gen_range(-1.0..1.0);
        u_b[k] = rng.gen_range(-1.0..1.0);
    }
    let dip: f64 = rho_a.iter().chain(rho_b.iter()).map(|a: &f64| a.abs()).sum();
    let rho_scale = 0.4 / dip.max(1e-12);
    let mut state = ConservedState::zeros(grid);
    let l = grid.half_width();
    for i in 0..grid.nx() {
        let x = grid.center_x(i);
        let mut rho = 1.0;
        let mut u = 0.0;
        for k in 0..modes {
            let th = (k + 1) as f64 * 2.0 * PI * x / (2.0 * l);
            rho += rho_scale * (rho_a[k] * th.cos() + rho_b[k] * th.sin());
            u += u_scale * (u_a[k] * th.cos() + u_b[k] * th.sin());
        }
        state.rho[i] = rho;
        state.u[0][i] = u;
    }
    state
}

/// Random smooth periodic 2D data built from low product modes.
pub fn random_smooth_2d(seed: u64, grid: Grid, u_scale: f64) -> ConservedState {
    assert_eq!(grid.dim(), Dim::Two);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let amp: Vec<f64> = (0..6).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mut state = ConservedState::zeros(grid);
    let l = grid.half_width();
    for j in 0..grid.ny() {
        for i in 0..grid.nx() {
            let x = PI * grid.center_x(i) / l;
            let y = PI * grid.center_y(j) / l;
            let k = grid.idx(i, j);
            state.rho[k] = 1.0
                + 0.2 * amp[0] * x.cos() * y.cos()
                + 0.2 * amp[1] * x.sin() * y.cos();
            state.u[0][k] = u_scale * (amp[2] * x.sin() + amp[3] * y.cos() * x.cos());
            state.u[1][k] = u_scale * (amp[4] * y.sin() + amp[5] * x.cos() * y.cos());
        }
    }
    state
}

/// A constant-ubar control law; `values` length must match the grid dim.
pub fn constant_law(gamma: f64, values: &[f64], grid: &Grid) -> ControlLaw {
    ControlLaw::controlled(
        gamma,
        euler_alignment::control::UbarPreset::Constant(values.to_vec()),
        grid,
    )
    .unwrap()
}

/// Path to a shipped config file at the repository root.
pub fn shipped_config(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name)
}

/// Run the CLI binary with the given arguments and an output-dir override,
/// returning (exit code, stdout, stderr).
pub fn run_cli(args: &[&str], output_dir: Option<&std::path::Path>) -> (i32, String, String) {
    let mut cmd = std::process::Command::new(env!("CARGO_BIN_EXE_euler-alignment"));
    cmd.args(args);
    if let Some(dir) = output_dir {
        cmd.env("EULER_ALIGNMENT_OUTPUT_DIR", dir);
    }
    let out = cmd.output().expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}
