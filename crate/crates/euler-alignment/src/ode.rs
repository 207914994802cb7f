//! Adaptive Dormand-Prince 5(4) integrator for the small ODE systems used
//! by the threshold analysis. Fixed-dimension state via const generics; no
//! dense output, just accepted-step observation and an event predicate.

const A: [[f64; 6]; 6] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            rtol: 1e-10,
            atol: 1e-10,
            max_steps: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OdeOutcome {
    ReachedEnd,
    EventTriggered,
    StepUnderflow,
}

/// Integrate `y' = f(t, y)` from `(t0, y0)` to `t_final`. The observer sees
/// every accepted step including the initial point; `event` is checked on
/// accepted states and halts integration when it returns true.
pub fn integrate<const N: usize>(
    f: &dyn Fn(f64, &[f64; N]) -> [f64; N],
    t0: f64,
    y0: [f64; N],
    t_final: f64,
    opts: &OdeOptions,
    observer: &mut dyn FnMut(f64, &[f64; N]),
    event: &dyn Fn(f64, &[f64; N]) -> bool,
) -> (f64, [f64; N], OdeOutcome) {
    let mut t = t0;
    let mut y = y0;
    observer(t, &y);
    if event(t, &y) {
        return (t, y, OdeOutcome::EventTriggered);
    }
    let span = t_final - t0;
    if span <= 0.0 {
        return (t, y, OdeOutcome::ReachedEnd);
    }
    let mut dt = (span / 100.0).min(1e-3).max(1e-12);
    let mut k = [[0.0_f64; N]; 7];
    k[0] = f(t, &y);

    for _ in 0..opts.max_steps {
        dt = dt.min(t_final - t);
        for s in 1..7 {
            let mut ys = y;
            for (j, kj) in k.iter().enumerate().take(s) {
                let a = if s < 6 { A[s][j] } else { B5[j] };
                if a != 0.0 {
                    for i in 0..N {
                        ys[i] += dt * a * kj[i];
                    }
                }
            }
            k[s] = f(t + C[s] * dt, &ys);
        }
        let mut y5 = y;
        let mut err = 0.0_f64;
        for i in 0..N {
            let mut d5 = 0.0;
            let mut d4 = 0.0;
            for s in 0..7 {
                d5 += B5[s] * k[s][i];
                d4 += B4[s] * k[s][i];
            }
            y5[i] += dt * d5;
            let scale = opts.atol + opts.rtol * y[i].abs().max(y5[i].abs());
            let e = dt * (d5 - d4) / scale;
            err += e * e;
        }
        err = (err / N as f64).sqrt();

        if err <= 1.0 {
            t += dt;
            y = y5;
            observer(t, &y);
            if event(t, &y) {
                return (t, y, OdeOutcome::EventTriggered);
            }
            if t >= t_final - 1e-14 * (1.0 + t_final.abs()) {
                return (t, y, OdeOutcome::ReachedEnd);
            }
            k[0] = f(t, &y); // not FSAL-reused above, recompute at the new point
        }
        let factor = if err.is_finite() && err > 0.0 {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        } else if err == 0.0 {
            5.0
        } else {
            0.2
        };
        dt *= factor;
        if !dt.is_finite() || dt < 1e-15 * (1.0 + t.abs()) {
            return (t, y, OdeOutcome::StepUnderflow);
        }
    }
    (t, y, OdeOutcome::StepUnderflow)
}
