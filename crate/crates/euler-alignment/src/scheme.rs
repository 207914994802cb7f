//! Second-order central scheme for the convective part of the system.
//!
//! The conservative variables are `w = (rho, u)` with fluxes
//! `F = (rho u, u^2/2)` in 1D and
//! `F1 = (rho u1, u1^2/2, u1 u2/2)`, `F2 = (rho u2, u1 u2/2, u2^2/2)` in 2D.
//! The velocity flux is the Burgers-type form of the transport term, not a
//! momentum flux; only the density component telescopes exactly. That is
//! deliberate and matched by the velocity-gradient blow-up theory, so do not
//! "fix" it into a conservative momentum update.
//!
//! Interfaces use MUSCL reconstruction with the minmod limiter and the
//! Kurganov-Tadmor flux; the 2D variant is the genuinely multidimensional
//! one with corner-reconstructed states and a trapezoid average along each
//! interface.

use crate::grid::{Dim, Grid};
use crate::kernel::{ConvolutionMode, KernelEvaluator};
use crate::state::ConservedState;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Limiter {
    Minmod,
    /// Unlimited central slopes; second order everywhere on smooth data,
    /// oscillatory at jumps. For convergence studies.
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SchemeConfig {
    pub limiter: Limiter,
    pub cfl: f64,
    pub convolution: ConvolutionMode,
}

impl SchemeConfig {
    pub fn standard() -> Self {
        SchemeConfig {
            limiter: Limiter::Minmod,
            cfl: 0.95,
            convolution: ConvolutionMode::Direct,
        }
    }
}

impl Default for SchemeConfig {
    fn default() -> Self {
        SchemeConfig::standard()
    }
}

/// Time tendency `d/dt w`, same layout as the state fields.
#[derive(Debug, Clone)]
pub struct Tendency {
    pub rho: Vec<f64>,
    pub u: Vec<Vec<f64>>,
}

impl Tendency {
    fn zeros(state: &ConservedState) -> Self {
        Tendency {
            rho: vec![0.0; state.rho.len()],
            u: vec![vec![0.0; state.rho.len()]; state.n_components()],
        }
    }
}

#[inline]
pub fn minmod(a: f64, b: f64) -> f64 {
    if a * b <= 0.0 {
        0.0
    } else if a.abs() < b.abs() {
        a
    } else {
        b
    }
}

/// Limited cell slopes of `f` along `axis`, in derivative units.
pub fn slopes(grid: &Grid, f: &[f64], limiter: Limiter, axis: usize) -> Vec<f64> {
    let (nx, ny) = (grid.nx(), grid.ny());
    let mut out = vec![0.0; f.len()];
    let apply = |bwd: f64, fwd: f64| match limiter {
        Limiter::Minmod => minmod(bwd, fwd),
        Limiter::None => 0.5 * (bwd + fwd),
    };
    match axis {
        0 => {
            let h = grid.dx();
            for j in 0..ny {
                for i in 0..nx {
                    let k = j * nx + i;
                    let kp = j * nx + (i + 1) % nx;
                    let km = j * nx + (i + nx - 1) % nx;
                    out[k] = apply((f[k] - f[km]) / h, (f[kp] - f[k]) / h);
                }
            }
        }
        1 => {
            let h = grid.dy();
            for j in 0..ny {
                let jp = (j + 1) % ny;
                let jm = (j + ny - 1) % ny;
                for i in 0..nx {
                    let k = j * nx + i;
                    out[k] = apply(
                        (f[k] - f[jm * nx + i]) / h,
                        (f[jp * nx + i] - f[k]) / h,
                    );
                }
            }
        }
        _ => panic!("axis out of range"),
    }
    out
}

/// One-sided local wave speeds from candidate velocities: the eigenvalues of
/// the convective Jacobian are `{u, u/2}` per state, clamped so that
/// `a+ >= 0 >= a-`.
#[inline]
pub fn wave_speeds(us: &[f64]) -> (f64, f64) {
    let mut ap = 0.0_f64;
    let mut am = 0.0_f64;
    for &u in us {
        ap = ap.max(u).max(0.5 * u);
        am = am.min(u).min(0.5 * u);
    }
    (ap, am)
}

#[inline]
pub fn physical_flux_1d(w: [f64; 2]) -> [f64; 2] {
    [w[0] * w[1], 0.5 * w[1] * w[1]]
}

#[inline]
pub fn physical_flux_2d_x(w: [f64; 3]) -> [f64; 3] {
    [w[0] * w[1], 0.5 * w[1] * w[1], 0.5 * w[1] * w[2]]
}

#[inline]
pub fn physical_flux_2d_y(w: [f64; 3]) -> [f64; 3] {
    [w[0] * w[2], 0.5 * w[1] * w[2], 0.5 * w[2] * w[2]]
}

/// Central-upwind combination of one interface. `wl`/`fl` are the state and
/// physical flux seen from the left (east face of the left cell), `wr`/`fr`
/// from the right. Degenerate speeds fall back to the plain average.
#[inline]
fn kt_combine<const C: usize>(
    ap: f64,
    am: f64,
    wl: &[f64; C],
    wr: &[f64; C],
    fl: &[f64; C],
    fr: &[f64; C],
) -> [f64; C] {
    let mut out = [0.0; C];
    let d = ap - am;
    if d == 0.0 {
        for c in 0..C {
            out[c] = 0.5 * (fl[c] + fr[c]);
        }
    } else {
        let k = ap * am / d;
        for c in 0..C {
            out[c] = (ap * fl[c] - am * fr[c]) / d + k * (wr[c] - wl[c]);
        }
    }
    out
}

/// 1D interface flux from reconstructed side states.
pub fn kt_flux_1d(wl: [f64; 2], wr: [f64; 2], ap: f64, am: f64) -> [f64; 2] {
    kt_combine(ap, am, &wl, &wr, &physical_flux_1d(wl), &physical_flux_1d(wr))
}

fn avg3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1]), 0.5 * (a[2] + b[2])]
}

/// 2D x-interface flux from the four adjacent corner states (trapezoid rule
/// along the face): `left = (EN, ES)` of the left cell, `right = (WN, WS)`
/// of the right cell.
pub fn kt_flux_2d_x(
    left: ([f64; 3], [f64; 3]),
    right: ([f64; 3], [f64; 3]),
    ap: f64,
    am: f64,
) -> [f64; 3] {
    let wl = avg3(left.0, left.1);
    let wr = avg3(right.0, right.1);
    let fl = avg3(physical_flux_2d_x(left.0), physical_flux_2d_x(left.1));
    let fr = avg3(physical_flux_2d_x(right.0), physical_flux_2d_x(right.1));
    kt_combine(ap, am, &wl, &wr, &fl, &fr)
}

/// 2D y-interface flux: `bottom = (WN, EN)` of the lower cell,
/// `top = (WS, ES)` of the upper cell.
pub fn kt_flux_2d_y(
    bottom: ([f64; 3], [f64; 3]),
    top: ([f64; 3], [f64; 3]),
    bp: f64,
    bm: f64,
) -> [f64; 3] {
    let wb = avg3(bottom.0, bottom.1);
    let wt = avg3(top.0, top.1);
    let fb = avg3(physical_flux_2d_y(bottom.0), physical_flux_2d_y(bottom.1));
    let ft = avg3(physical_flux_2d_y(top.0), physical_flux_2d_y(top.1));
    kt_combine(bp, bm, &wb, &wt, &fb, &ft)
}

/// Full nonstiff tendency: flux divergence plus the alignment force on the
/// velocity components. Control is not included here; the time integrator
/// treats it implicitly.
pub fn nonstiff_rhs(
    state: &ConservedState,
    kernel: &KernelEvaluator,
    scheme: &SchemeConfig,
) -> Tendency {
    match state.grid.dim() {
        Dim::One => rhs_1d(state, kernel, scheme),
        Dim::Two => rhs_2d(state, kernel, scheme),
    }
}

fn rhs_1d(
    state: &ConservedState,
    kernel: &KernelEvaluator,
    scheme: &SchemeConfig,
) -> Tendency {
    let grid = &state.grid;
    let n = grid.nx();
    let dx = grid.dx();
    let half = 0.5 * dx;
    let s_rho = slopes(grid, &state.rho, scheme.limiter, 0);
    let s_u = slopes(grid, &state.u[0], scheme.limiter, 0);

    // flux[i] sits on the interface between cells i and i+1
    let mut flux = vec![[0.0; 2]; n];
    for i in 0..n {
        let r = (i + 1) % n;
        let wl = [
            state.rho[i] + half * s_rho[i],
            state.u[0][i] + half * s_u[i],
        ];
        let wr = [
            state.rho[r] - half * s_rho[r],
            state.u[0][r] - half * s_u[r],
        ];
        let (ap, am) = wave_speeds(&[wl[1], wr[1]]);
        flux[i] = kt_flux_1d(wl, wr, ap, am);
    }

    let force = kernel.alignment_force(state);
    let mut out = Tendency::zeros(state);
    for i in 0..n {
        let l = (i + n - 1) % n;
        out.rho[i] = -(flux[i][0] - flux[l][0]) / dx;
        out.u[0][i] = -(flux[i][1] - flux[l][1]) / dx + force[0][i];
    }
    out
}

fn rhs_2d(
    state: &ConservedState,
    kernel: &KernelEvaluator,
    scheme: &SchemeConfig,
) -> Tendency {
    let grid = &state.grid;
    let (nx, ny) = (grid.nx(), grid.ny());
    let (dx, dy) = (grid.dx(), grid.dy());
    let (hx, hy) = (0.5 * dx, 0.5 * dy);
    let n = grid.n_cells();

    let fields: [&[f64]; 3] = [&state.rho, &state.u[0], &state.u[1]];
    let mut sx = Vec::with_capacity(3);
    let mut sy = Vec::with_capacity(3);
    for f in fields {
        sx.push(slopes(grid, f, scheme.limiter, 0));
        sy.push(slopes(grid, f, scheme.limiter, 1));
    }

    let mut en = vec![[0.0; 3]; n];
    let mut es = vec![[0.0; 3]; n];
    let mut wn = vec![[0.0; 3]; n];
    let mut ws = vec![[0.0; 3]; n];
    for k in 0..n {
        for c in 0..3 {
            let w = fields[c][k];
            let ax = hx * sx[c][k];
            let ay = hy * sy[c][k];
            en[k][c] = w + ax + ay;
            es[k][c] = w + ax - ay;
            wn[k][c] = w - ax + ay;
            ws[k][c] = w - ax - ay;
        }
    }

    // flux_x[k] with k = j*nx + i sits between cells (i, j) and (i+1, j);
    // flux_y[k] between (i, j) and (i, j+1).
    let mut flux_x = vec![[0.0; 3]; n];
    let mut flux_y = vec![[0.0; 3]; n];
    for j in 0..ny {
        for i in 0..nx {
            let k = j * nx + i;
            let r = j * nx + (i + 1) % nx;
            let (ap, am) = wave_speeds(&[en[k][1], es[k][1], wn[r][1], ws[r][1]]);
            flux_x[k] = kt_flux_2d_x((en[k], es[k]), (wn[r], ws[r]), ap, am);

            let t = ((j + 1) % ny) * nx + i;
            let (bp, bm) = wave_speeds(&[wn[k][2], en[k][2], ws[t][2], es[t][2]]);
            flux_y[k] = kt_flux_2d_y((wn[k], en[k]), (ws[t], es[t]), bp, bm);
        }
    }

    let force = kernel.alignment_force(state);
    let mut out = Tendency::zeros(state);
    for j in 0..ny {
        for i in 0..nx {
            let k = j * nx + i;
            let l = j * nx + (i + nx - 1) % nx;
            let b = ((j + ny - 1) % ny) * nx + i;
            let div = |c: usize| {
                (flux_x[k][c] - flux_x[l][c]) / dx + (flux_y[k][c] - flux_y[b][c]) / dy
            };
            out.rho[k] = -div(0);
            out.u[0][k] = -div(1) + force[0][k];
            out.u[1][k] = -div(2) + force[1][k];
        }
    }
    out
}
