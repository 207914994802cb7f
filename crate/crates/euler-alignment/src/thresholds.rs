//! Critical-threshold analysis: sharp 1D classification, 2D sufficient
//! conditions, the characteristic ODE oracle, and support diagnostics.
//!
//! Along characteristics the 1D system reduces to
//!
//! ```text
//!   rho' = -rho v,    d' = -d (d - psi*rho - 1/gamma),    d = v + psi*rho + 1/gamma
//! ```
//!
//! so the sign of d0 = d(0) decides everything: d0 >= 0 everywhere means a
//! global solution, d0 < 0 anywhere means finite-time blow-up. The ratio
//! beta = d/rho is constant along each characteristic, which gives a
//! discretization-quality diagnostic for free.

use crate::control::ControlLaw;
use crate::error::Error;
use crate::grid::Dim;
use crate::kernel::KernelEvaluator;
use crate::ode::{integrate, OdeOptions, OdeOutcome};
use crate::state::{centered_diff, ConservedState};

/// Divergence magnitude above which the ODE oracle declares blow-up.
pub const BLOWUP_MAGNITUDE: f64 = 1e8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification1d {
    Subcritical,
    Supercritical,
}

impl Classification1d {
    pub fn label(&self) -> &'static str {
        match self {
            Classification1d::Subcritical => "subcritical",
            Classification1d::Supercritical => "supercritical",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ThresholdReport1d {
    pub dx_u0: Vec<f64>,
    pub psi_rho0: Vec<f64>,
    /// m(x) = dx_u0 + psi*rho0 + 1/gamma, the quantity whose sign is sharp.
    pub margin: Vec<f64>,
    pub min_margin: f64,
    pub min_margin_x: f64,
    pub classification: Classification1d,
    /// Upper bound on the blow-up time, -1/min_margin, when supercritical.
    pub predicted_blowup_bound: Option<f64>,
}

/// Sharp 1D classification of initial data: subcritical iff
/// `du0/dx >= -psi*rho0 - 1/gamma` everywhere.
pub fn classify_1d(
    state: &ConservedState,
    kernel: &KernelEvaluator,
    law: &ControlLaw,
) -> Result<ThresholdReport1d, Error> {
    if state.grid.dim() != Dim::One {
        return Err(Error::Grid(
            "1D threshold classification needs a one-dimensional state".into(),
        ));
    }
    let dx_u0 = centered_diff(&state.grid, &state.u[0], 0);
    let psi_rho0 = kernel.convolve(&state.rho);
    let gamma_inv = law.gamma_inv();
    let margin: Vec<f64> = dx_u0
        .iter()
        .zip(&psi_rho0)
        .map(|(d, p)| d + p + gamma_inv)
        .collect();
    let (imin, &min_margin) = margin
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("grid has at least four cells");
    let classification = if min_margin >= 0.0 {
        Classification1d::Subcritical
    } else {
        Classification1d::Supercritical
    };
    Ok(ThresholdReport1d {
        dx_u0,
        psi_rho0,
        margin,
        min_margin,
        min_margin_x: state.grid.center_x(imin),
        classification,
        predicted_blowup_bound: (min_margin < 0.0).then(|| -1.0 / min_margin),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification2d {
    RegularitySufficient,
    BlowupSufficient,
    Undetermined,
}

impl Classification2d {
    pub fn label(&self) -> &'static str {
        match self {
            Classification2d::RegularitySufficient => "regularity_sufficient",
            Classification2d::BlowupSufficient => "blowup_sufficient",
            Classification2d::Undetermined => "undetermined",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ThresholdReport2d {
    /// q = d1 u1 - d2 u2, r = d2 u1, s = d1 u2, v = div u, per cell.
    pub q0: Vec<f64>,
    pub r0: Vec<f64>,
    pub s0: Vec<f64>,
    pub divergence0: Vec<f64>,
    pub d0: Vec<f64>,
    /// delta0 = max{|q0|, 2|r0|, 2|s0|} per cell.
    pub delta0: Vec<f64>,
    pub support_diameter: f64,
    pub velocity_diameter: f64,
    /// D = S0 + gamma V0; infinite for uncontrolled data with V0 > 0.
    pub diameter_bound: f64,
    /// Q~ = ||grad psi||_inf * mass * V0.
    pub q_tilde: f64,
    pub mass: f64,
    pub classification: Classification2d,
    pub note: Option<String>,
}

/// 2D sufficient conditions. Regularity holds when, at every support point,
///
/// ```text
///   psi(D) mass + 1/gamma >= sqrt(4 Q~^2 + 2 delta0^4) / delta0
///   and d0 >= 2 Q~ / delta0,
/// ```
///
/// blow-up when some support point has
///
/// ```text
///   min{r0, s0} >= Q~ / (||psi||_inf mass + 1/gamma)
///   and d0 < -||psi||_inf mass - 1/gamma.
/// ```
///
/// Neither condition holding leaves the data undetermined (the conditions
/// are sufficient, not sharp).
pub fn classify_2d(
    state: &ConservedState,
    kernel: &KernelEvaluator,
    law: &ControlLaw,
) -> Result<ThresholdReport2d, Error> {
    if state.grid.dim() != Dim::Two {
        return Err(Error::Grid(
            "2D threshold classification needs a two-dimensional state".into(),
        ));
    }
    let n = state.rho.len();
    let d1_u1 = centered_diff(&state.grid, &state.u[0], 0);
    let d2_u1 = centered_diff(&state.grid, &state.u[0], 1);
    let d1_u2 = centered_diff(&state.grid, &state.u[1], 0);
    let d2_u2 = centered_diff(&state.grid, &state.u[1], 1);
    let psi_rho0 = kernel.convolve(&state.rho);
    let gamma_inv = law.gamma_inv();
    let gamma = law.gamma();

    let mut q0 = vec![0.0; n];
    let mut divergence0 = vec![0.0; n];
    let mut d0 = vec![0.0; n];
    let mut delta0 = vec![0.0; n];
    for i in 0..n {
        q0[i] = d1_u1[i] - d2_u2[i];
        divergence0[i] = d1_u1[i] + d2_u2[i];
        d0[i] = divergence0[i] + psi_rho0[i] + gamma_inv;
        delta0[i] = q0[i]
            .abs()
            .max(2.0 * d2_u1[i].abs())
            .max(2.0 * d1_u2[i].abs());
    }
    let r0 = d2_u1;
    let s0 = d1_u2;

    let rho_floor = 1e-8 * state.max_rho();
    let support: Vec<usize> = (0..n).filter(|&i| state.rho[i] > rho_floor).collect();
    let mass = state.total_mass();
    let (s_diam, v_diam) = support_diagnostics(state, rho_floor);
    let diameter_bound = if v_diam == 0.0 {
        s_diam
    } else {
        s_diam + gamma * v_diam
    };
    let spec = kernel.spec();
    let q_tilde = spec.grad_psi_max() * mass * v_diam;
    let psi_at_d = spec.psi_radial(diameter_bound);

    let mut report = ThresholdReport2d {
        q0,
        r0,
        s0,
        divergence0,
        d0,
        delta0,
        support_diameter: s_diam,
        velocity_diameter: v_diam,
        diameter_bound,
        q_tilde,
        mass,
        classification: Classification2d::Undetermined,
        note: None,
    };

    if support.is_empty() {
        report.note = Some("empty density support".into());
        return Ok(report);
    }

    let regularity = support.iter().all(|&i| {
        let delta = report.delta0[i];
        delta > 0.0
            && psi_at_d * mass + gamma_inv >= (4.0 * q_tilde * q_tilde
                + 2.0 * delta.powi(4))
            .sqrt()
                / delta
            && report.d0[i] >= 2.0 * q_tilde / delta
    });
    let blowup = support.iter().any(|&i| {
        report.r0[i].min(report.s0[i]) >= q_tilde / (spec.psi_max() * mass + gamma_inv)
            && report.d0[i] < -spec.psi_max() * mass - gamma_inv
    });

    if regularity {
        report.classification = Classification2d::RegularitySufficient;
    } else if blowup {
        report.classification = Classification2d::BlowupSufficient;
    } else if support.iter().all(|&i| report.delta0[i] == 0.0) {
        report.note = Some(
            "degenerate delta0 = 0 on the support (constant-velocity data); \
             the regularity condition is vacuous"
                .into(),
        );
    }
    Ok(report)
}

/// Diameters of the density support: S = max pairwise distance between
/// occupied cell centers, V = max pairwise velocity difference over the same
/// cells. Occupied means rho > rho_floor. Empty support gives (0, 0).
pub fn support_diagnostics(state: &ConservedState, rho_floor: f64) -> (f64, f64) {
    let grid = &state.grid;
    match grid.dim() {
        Dim::One => {
            let mut x_min = f64::INFINITY;
            let mut x_max = f64::NEG_INFINITY;
            let mut u_min = f64::INFINITY;
            let mut u_max = f64::NEG_INFINITY;
            let mut any = false;
            for i in 0..grid.nx() {
                if state.rho[i] > rho_floor {
                    any = true;
                    let x = grid.center_x(i);
                    x_min = x_min.min(x);
                    x_max = x_max.max(x);
                    u_min = u_min.min(state.u[0][i]);
                    u_max = u_max.max(state.u[0][i]);
                }
            }
            if any {
                (x_max - x_min, u_max - u_min)
            } else {
                (0.0, 0.0)
            }
        }
        Dim::Two => {
            let mut centers = Vec::new();
            let mut velocities = Vec::new();
            for j in 0..grid.ny() {
                for i in 0..grid.nx() {
                    let k = grid.idx(i, j);
                    if state.rho[k] > rho_floor {
                        centers.push((grid.center_x(i), grid.center_y(j)));
                        velocities.push((state.u[0][k], state.u[1][k]));
                    }
                }
            }
            (point_set_diameter(&centers), point_set_diameter(&velocities))
        }
    }
}

fn cross(o: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

fn convex_hull(points: &mut Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    points.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    points.dedup();
    let n = points.len();
    if n <= 2 {
        return points.clone();
    }
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(2 * n);
    for &p in points.iter() {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    let lower_len = hull.len() + 1;
    for &p in points.iter().rev() {
        while hull.len() >= lower_len && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0
        {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    hull
}

fn max_pairwise_distance(points: &[(f64, f64)]) -> f64 {
    let mut best = 0.0_f64;
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            let d2 = (a.0 - b.0).powi(2) + (a.1 - b.1).powi(2);
            best = best.max(d2);
        }
    }
    best.sqrt()
}

/// Exact diameter of a planar point set; goes through the convex hull when
/// the set is large enough for the quadratic scan to hurt.
fn point_set_diameter(points: &[(f64, f64)]) -> f64 {
    if points.len() < 2 {
        return 0.0;
    }
    if points.len() <= 64 {
        return max_pairwise_distance(points);
    }
    let mut pts = points.to_vec();
    let hull = convex_hull(&mut pts);
    max_pairwise_distance(&hull)
}

/// A prescribed time path of psi*rho along a characteristic: the ODE oracle
/// freezes the convolution because the exact path needs the PDE solution.
#[derive(Debug, Clone)]
pub enum PsiRhoPath {
    Constant(f64),
    /// Piecewise-linear samples; evaluation clamps outside the sampled span.
    Sampled { times: Vec<f64>, values: Vec<f64> },
}

impl PsiRhoPath {
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            PsiRhoPath::Constant(c) => *c,
            PsiRhoPath::Sampled { times, values } => {
                if times.is_empty() {
                    return 0.0;
                }
                if t <= times[0] {
                    return values[0];
                }
                if t >= *times.last().unwrap() {
                    return *values.last().unwrap();
                }
                let k = times.partition_point(|&s| s <= t) - 1;
                let w = (t - times[k]) / (times[k + 1] - times[k]);
                values[k] * (1.0 - w) + values[k + 1] * w
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct CharacteristicSolution {
    pub times: Vec<f64>,
    pub rho: Vec<f64>,
    pub d: Vec<f64>,
    /// Estimated singularity time when |d| crossed the blow-up magnitude;
    /// the tail behaves like d ~ -1/(t* - t), so t* = t_stop + 1/|d|.
    pub blowup_time: Option<f64>,
}

impl CharacteristicSolution {
    pub fn final_rho(&self) -> f64 {
        *self.rho.last().unwrap()
    }
    pub fn final_d(&self) -> f64 {
        *self.d.last().unwrap()
    }
}

/// Integrate `rho' = -rho v`, `d' = -d (d - c(t))` with
/// `v = d - c(t)` and `c(t) = psi*rho(t) + 1/gamma` to `t_final` or blow-up,
/// whichever comes first. Tolerances are 1e-10.
pub fn characteristic_ode_oracle(
    rho0: f64,
    d0: f64,
    path: &PsiRhoPath,
    gamma_inv: f64,
    t_final: f64,
) -> CharacteristicSolution {
    let rhs = move |t: f64, y: &[f64; 2]| {
        let c = path.eval(t) + gamma_inv;
        let v = y[1] - c;
        [-y[0] * v, -y[1] * (y[1] - c)]
    };
    let mut times = Vec::new();
    let mut rho = Vec::new();
    let mut d = Vec::new();
    let mut observer = |t: f64, y: &[f64; 2]| {
        times.push(t);
        rho.push(y[0]);
        d.push(y[1]);
    };
    let event = |_t: f64, y: &[f64; 2]| y[1].abs() > BLOWUP_MAGNITUDE;
    let (t_stop, y_stop, outcome) = integrate(
        &rhs,
        0.0,
        [rho0, d0],
        t_final,
        &OdeOptions::default(),
        &mut observer,
        &event,
    );
    let blowup_time = match outcome {
        OdeOutcome::ReachedEnd => None,
        OdeOutcome::EventTriggered => Some(t_stop + 1.0 / y_stop[1].abs()),
        OdeOutcome::StepUnderflow => Some(t_stop),
    };
    CharacteristicSolution {
        times,
        rho,
        d,
        blowup_time,
    }
}

#[derive(Debug, Clone)]
pub struct BetaSeries {
    pub times: Vec<f64>,
    pub positions: Vec<f64>,
    pub rho: Vec<f64>,
    pub d: Vec<f64>,
    pub beta: Vec<f64>,
    /// True when the characteristic left the resolvable region (rho below
    /// the floor) before the last trajectory frame.
    pub truncated: bool,
}

impl BetaSeries {
    pub fn beta0(&self) -> f64 {
        self.beta[0]
    }

    /// Max relative drift |beta(t) - beta0| / |beta0| over the series.
    pub fn max_drift(&self) -> f64 {
        let b0 = self.beta0();
        let scale = b0.abs().max(1e-14);
        self.beta
            .iter()
            .map(|b| (b - b0).abs() / scale)
            .fold(0.0, f64::max)
    }
}

/// Periodic linear interpolation of a cell-centered 1D field.
fn interp_periodic(grid: &crate::grid::Grid, f: &[f64], x: f64) -> f64 {
    let n = grid.nx();
    let span = 2.0 * grid.half_width();
    let s = (x + grid.half_width()).rem_euclid(span) / grid.dx() - 0.5;
    let i0 = s.floor();
    let w = s - i0;
    let i = (i0 as i64).rem_euclid(n as i64) as usize;
    let j = (i + 1) % n;
    f[i] * (1.0 - w) + f[j] * w
}

/// Track the characteristic launched from `x0` through a recorded 1D
/// trajectory and report the invariant ratio beta = d/rho along it. The
/// particle path uses Heun steps between stored frames; fields are linearly
/// interpolated in space.
pub fn beta_invariant(
    trajectory: &[ConservedState],
    kernel: &KernelEvaluator,
    law: &ControlLaw,
    x0: f64,
    rho_floor: f64,
) -> Result<BetaSeries, Error> {
    let first = trajectory
        .first()
        .ok_or_else(|| Error::Grid("empty trajectory".into()))?;
    if first.grid.dim() != Dim::One {
        return Err(Error::Grid(
            "characteristic tracking needs a one-dimensional trajectory".into(),
        ));
    }
    let grid = first.grid;
    let gamma_inv = law.gamma_inv();

    let d_field = |state: &ConservedState| -> Vec<f64> {
        let dx_u = centered_diff(&grid, &state.u[0], 0);
        let psi_rho = kernel.convolve(&state.rho);
        dx_u.iter()
            .zip(&psi_rho)
            .map(|(a, b)| a + b + gamma_inv)
            .collect()
    };

    let mut series = BetaSeries {
        times: Vec::new(),
        positions: Vec::new(),
        rho: Vec::new(),
        d: Vec::new(),
        beta: Vec::new(),
        truncated: false,
    };
    let mut x = x0;
    for (k, state) in trajectory.iter().enumerate() {
        let rho_here = interp_periodic(&grid, &state.rho, x);
        if rho_here < rho_floor {
            series.truncated = true;
            break;
        }
        let d_here = interp_periodic(&grid, &d_field(state), x);
        series.times.push(state.time);
        series.positions.push(x);
        series.rho.push(rho_here);
        series.d.push(d_here);
        series.beta.push(d_here / rho_here);

        if let Some(next) = trajectory.get(k + 1) {
            let dt = next.time - state.time;
            let u_here = interp_periodic(&grid, &state.u[0], x);
            let x_pred = x + dt * u_here;
            let u_next = interp_periodic(&grid, &next.u[0], x_pred);
            x += 0.5 * dt * (u_here + u_next);
        }
    }
    if series.times.is_empty() {
        return Err(Error::Grid(
            "characteristic starts outside the density support".into(),
        ));
    }
    Ok(series)
}
