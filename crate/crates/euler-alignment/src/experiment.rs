//! Experiment orchestration: resolve a parsed config into a run, write the
//! output files, classify initial data, and drive self-convergence studies.

use crate::config::{config_hash, serialize_config, RunConfig};
use crate::error::Error;
use crate::grid::{Dim, Grid};
use crate::output;
use crate::presets::InitialPreset;
use crate::state::ConservedState;
use crate::thresholds::{classify_1d, classify_2d};
use crate::timestep::{run, RunOutcome, RunResult};
use std::fmt::Write as _;
use std::path::PathBuf;

/// Overrides the output directory from the config when set.
pub const OUTPUT_DIR_ENV: &str = "EULER_ALIGNMENT_OUTPUT_DIR";

/// Precedence: environment override, then `run.output_dir`, then `output`.
pub fn resolve_output_dir(config: &RunConfig) -> PathBuf {
    if let Some(dir) = std::env::var_os(OUTPUT_DIR_ENV) {
        return PathBuf::from(dir);
    }
    config
        .run
        .output_dir
        .as_ref()
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("output"))
}

#[derive(Debug)]
pub struct ExperimentReport {
    pub output_dir: PathBuf,
    pub summary_path: PathBuf,
    pub snapshot_paths: Vec<PathBuf>,
    pub diagnostics_path: PathBuf,
    pub result: RunResult,
}

fn mean_and_max_speed(state: &ConservedState) -> (f64, f64) {
    let n = state.rho.len();
    let mut sum = 0.0;
    let mut max = 0.0_f64;
    for i in 0..n {
        let speed = state
            .u
            .iter()
            .map(|c| c[i] * c[i])
            .sum::<f64>()
            .sqrt();
        sum += speed;
        max = max.max(speed);
    }
    (sum / n as f64, max)
}

fn threshold_section(
    state: &ConservedState,
    kernel: &crate::kernel::KernelEvaluator,
    law: &crate::control::ControlLaw,
) -> Result<String, Error> {
    let mut s = String::new();
    writeln!(s, "# threshold report (initial data)").unwrap();
    match state.grid.dim() {
        Dim::One => {
            let rep = classify_1d(state, kernel, law)?;
            writeln!(s, "classification = {}", rep.classification.label()).unwrap();
            writeln!(s, "min_margin = {:.16e}", rep.min_margin).unwrap();
            writeln!(s, "min_margin_x = {:.16e}", rep.min_margin_x).unwrap();
            if let Some(t) = rep.predicted_blowup_bound {
                writeln!(s, "predicted_blowup_bound = {t:.16e}").unwrap();
            }
        }
        Dim::Two => {
            let rep = classify_2d(state, kernel, law)?;
            writeln!(s, "classification = {}", rep.classification.label()).unwrap();
            if let Some(note) = &rep.note {
                writeln!(s, "note = {note}").unwrap();
            }
            writeln!(s, "support_diameter = {:.16e}", rep.support_diameter).unwrap();
            writeln!(s, "velocity_diameter = {:.16e}", rep.velocity_diameter).unwrap();
            writeln!(s, "diameter_bound = {:.16e}", rep.diameter_bound).unwrap();
            writeln!(s, "q_tilde = {:.16e}", rep.q_tilde).unwrap();
            writeln!(s, "mass = {:.16e}", rep.mass).unwrap();
        }
    }
    Ok(s)
}

/// Run a configured experiment and write `used_config.toml`, snapshots,
/// `diagnostics.csv`, and `summary.txt` into the output directory.
/// Divergence is a reported outcome, not an error.
pub fn run_experiment(config: &RunConfig) -> Result<ExperimentReport, Error> {
    let grid = config.build_grid()?;
    let initial = config.build_initial(&grid)?;
    let kernel = config.build_kernel(grid);
    let law = config.build_control(&grid)?;
    let scheme = config.scheme;
    let opts = config.run_options();
    let hash = config_hash(config);

    let threshold = threshold_section(&initial, &kernel, &law)?;
    let result = run(&initial, &kernel, &law, &scheme, &opts);

    let dir = resolve_output_dir(config);
    std::fs::create_dir_all(&dir)?;
    output::write_text(&dir, "used_config.toml", &serialize_config(config))?;
    let mut snapshot_paths = Vec::new();
    for snap in &result.snapshots {
        snapshot_paths.push(output::write_snapshot(&dir, snap, &hash)?);
    }
    let diagnostics_path =
        output::write_diagnostics(&dir, &result.diagnostics, grid.dim(), &hash)?;

    let mut summary = String::new();
    writeln!(summary, "# euler-alignment run summary").unwrap();
    writeln!(summary, "config = {hash}").unwrap();
    writeln!(summary, "dim = {}", grid.dim().as_usize()).unwrap();
    match grid.dim() {
        Dim::One => writeln!(summary, "cells = {}", grid.nx()).unwrap(),
        Dim::Two => writeln!(summary, "cells = {} {}", grid.nx(), grid.ny()).unwrap(),
    }
    writeln!(summary, "half_width = {:.16e}", grid.half_width()).unwrap();
    writeln!(summary, "t_final = {:.16e}", config.run.t_final).unwrap();
    match &result.outcome {
        RunOutcome::Completed => writeln!(summary, "outcome = completed").unwrap(),
        RunOutcome::Diverged(rep) => {
            writeln!(summary, "outcome = diverged").unwrap();
            writeln!(summary, "divergence_kind = {}", rep.kind.label()).unwrap();
            writeln!(summary, "divergence_time = {:.16e}", rep.time).unwrap();
            writeln!(summary, "divergence_value = {:.16e}", rep.value).unwrap();
            writeln!(summary, "divergence_threshold = {:.16e}", rep.threshold).unwrap();
        }
    }
    writeln!(summary, "steps = {}", result.steps).unwrap();
    let final_state = &result.final_state;
    writeln!(summary, "final_time = {:.16e}", final_state.time).unwrap();

    let mass0 = initial.total_mass();
    let mass_final = final_state.total_mass();
    let mass_scale = mass0.abs().max(f64::MIN_POSITIVE);
    writeln!(summary, "mass_initial = {mass0:.16e}").unwrap();
    writeln!(summary, "mass_final = {mass_final:.16e}").unwrap();
    writeln!(
        summary,
        "mass_drift_rel = {:.16e}",
        (mass_final - mass0).abs() / mass_scale
    )
    .unwrap();

    let p0 = initial.total_momentum();
    let p_final = final_state.total_momentum();
    let momentum_scale = p0
        .iter()
        .map(|p| p.abs())
        .fold(mass0 * initial.max_abs_u(), f64::max)
        .max(f64::MIN_POSITIVE);
    let drift = p0
        .iter()
        .zip(&p_final)
        .map(|(a, b)| (b - a).abs())
        .fold(0.0, f64::max);
    let join = |v: &[f64]| {
        v.iter()
            .map(|p| format!("{p:.16e}"))
            .collect::<Vec<_>>()
            .join(",")
    };
    writeln!(summary, "momentum_initial = {}", join(&p0)).unwrap();
    writeln!(summary, "momentum_final = {}", join(&p_final)).unwrap();
    writeln!(summary, "momentum_drift_rel = {:.16e}", drift / momentum_scale).unwrap();

    writeln!(
        summary,
        "kinetic_energy_final = {:.16e}",
        final_state.kinetic_energy()
    )
    .unwrap();
    let (mean_speed, max_speed) = mean_and_max_speed(final_state);
    writeln!(summary, "mean_speed_final = {mean_speed:.16e}").unwrap();
    writeln!(summary, "max_speed_final = {max_speed:.16e}").unwrap();
    let peak_fraction = if mass_final > 0.0 {
        final_state.max_rho() * grid.cell_volume() / mass_final
    } else {
        0.0
    };
    writeln!(summary, "peak_cell_mass_fraction = {peak_fraction:.16e}").unwrap();
    let last = result.diagnostics.last().expect("at least the initial row");
    writeln!(summary, "support_diameter_final = {:.16e}", last.support_diameter).unwrap();
    writeln!(
        summary,
        "velocity_diameter_final = {:.16e}",
        last.velocity_diameter
    )
    .unwrap();
    writeln!(summary).unwrap();
    summary.push_str(&threshold);

    let summary_path = output::write_text(&dir, "summary.txt", &summary)?;
    Ok(ExperimentReport {
        output_dir: dir,
        summary_path,
        snapshot_paths,
        diagnostics_path,
        result,
    })
}

#[derive(Debug)]
pub struct ClassifyReport {
    pub text: String,
    pub output_dir: PathBuf,
    pub files: Vec<PathBuf>,
}

/// Threshold classification of the configured initial data, no time
/// integration. Writes `threshold_report.txt` plus a per-cell CSV of the
/// classifier fields.
pub fn classify_experiment(config: &RunConfig) -> Result<ClassifyReport, Error> {
    let grid = config.build_grid()?;
    let initial = config.build_initial(&grid)?;
    let kernel = config.build_kernel(grid);
    let law = config.build_control(&grid)?;
    let hash = config_hash(config);

    let dir = resolve_output_dir(config);
    std::fs::create_dir_all(&dir)?;
    let mut files = Vec::new();
    let text = threshold_section(&initial, &kernel, &law)?;

    match grid.dim() {
        Dim::One => {
            let rep = classify_1d(&initial, &kernel, &law)?;
            let mut csv = String::new();
            writeln!(csv, "# euler-alignment threshold fields").unwrap();
            writeln!(csv, "# config = {hash}").unwrap();
            writeln!(csv, "x,dx_u0,psi_rho0,margin").unwrap();
            for i in 0..grid.nx() {
                writeln!(
                    csv,
                    "{:.16e},{:.16e},{:.16e},{:.16e}",
                    grid.center_x(i),
                    rep.dx_u0[i],
                    rep.psi_rho0[i],
                    rep.margin[i]
                )
                .unwrap();
            }
            files.push(output::write_text(&dir, "threshold_fields.csv", &csv)?);
        }
        Dim::Two => {
            let rep = classify_2d(&initial, &kernel, &law)?;
            let mut csv = String::new();
            writeln!(csv, "# euler-alignment threshold fields").unwrap();
            writeln!(csv, "# config = {hash}").unwrap();
            writeln!(csv, "x,y,q0,r0,s0,divergence0,d0,delta0").unwrap();
            for j in 0..grid.ny() {
                for i in 0..grid.nx() {
                    let k = grid.idx(i, j);
                    writeln!(
                        csv,
                        "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                        grid.center_x(i),
                        grid.center_y(j),
                        rep.q0[k],
                        rep.r0[k],
                        rep.s0[k],
                        rep.divergence0[k],
                        rep.d0[k],
                        rep.delta0[k]
                    )
                    .unwrap();
                }
            }
            files.push(output::write_text(&dir, "threshold_fields.csv", &csv)?);
        }
    }
    files.push(output::write_text(&dir, "threshold_report.txt", &text)?);
    Ok(ClassifyReport {
        text,
        output_dir: dir,
        files,
    })
}

/// Average a factor-2 finer solution down onto `coarse`: 2 cells per cell in
/// 1D, 4 in 2D. Exact for cell-averaged data.
pub fn restrict(fine: &ConservedState, coarse: Grid) -> ConservedState {
    assert_eq!(fine.grid.nx(), 2 * coarse.nx(), "restriction needs a 2x finer grid");
    let mut out = ConservedState::zeros(coarse);
    out.time = fine.time;
    match coarse.dim() {
        Dim::One => {
            for i in 0..coarse.nx() {
                out.rho[i] = 0.5 * (fine.rho[2 * i] + fine.rho[2 * i + 1]);
                out.u[0][i] = 0.5 * (fine.u[0][2 * i] + fine.u[0][2 * i + 1]);
            }
        }
        Dim::Two => {
            for j in 0..coarse.ny() {
                for i in 0..coarse.nx() {
                    let k = coarse.idx(i, j);
                    let f = [
                        fine.grid.idx(2 * i, 2 * j),
                        fine.grid.idx(2 * i + 1, 2 * j),
                        fine.grid.idx(2 * i, 2 * j + 1),
                        fine.grid.idx(2 * i + 1, 2 * j + 1),
                    ];
                    out.rho[k] = 0.25 * f.iter().map(|&q| fine.rho[q]).sum::<f64>();
                    for c in 0..2 {
                        out.u[c][k] = 0.25 * f.iter().map(|&q| fine.u[c][q]).sum::<f64>();
                    }
                }
            }
        }
    }
    out
}

fn l1_distance(a: &[f64], b: &[f64], cell_volume: f64) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .sum::<f64>()
        * cell_volume
}

#[derive(Debug, Clone)]
pub struct EocTable {
    pub levels: Vec<usize>,
    /// L1 self-convergence errors between consecutive levels (restricted
    /// fine minus coarse), one per adjacent pair.
    pub rho_errors: Vec<f64>,
    pub u_errors: Vec<f64>,
    /// Observed orders, log2 of consecutive error ratios.
    pub rho_eoc: Vec<f64>,
    pub u_eoc: Vec<f64>,
}

impl EocTable {
    pub fn min_eoc(&self) -> f64 {
        self.rho_eoc
            .iter()
            .chain(&self.u_eoc)
            .fold(f64::INFINITY, |m, &e| m.min(e))
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        writeln!(s, "{:>8} {:>14} {:>8} {:>14} {:>8}", "cells", "rho_error", "eoc", "u_error", "eoc")
            .unwrap();
        for (k, pair) in self.levels.windows(2).enumerate() {
            let eoc = |v: &Vec<f64>| {
                if k == 0 {
                    "-".to_string()
                } else {
                    format!("{:.3}", v[k - 1])
                }
            };
            writeln!(
                s,
                "{:>8} {:>14.6e} {:>8} {:>14.6e} {:>8}",
                format!("{}/{}", pair[0], pair[1]),
                self.rho_errors[k],
                eoc(&self.rho_eoc),
                self.u_errors[k],
                eoc(&self.u_eoc),
            )
            .unwrap();
        }
        s
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("coarse_cells,fine_cells,rho_error,u_error,rho_eoc,u_eoc\n");
        for (k, pair) in self.levels.windows(2).enumerate() {
            let eoc = |v: &Vec<f64>| {
                if k == 0 {
                    String::new()
                } else {
                    format!("{:.16e}", v[k - 1])
                }
            };
            writeln!(
                s,
                "{},{},{:.16e},{:.16e},{},{}",
                pair[0],
                pair[1],
                self.rho_errors[k],
                self.u_errors[k],
                eoc(&self.rho_eoc),
                eoc(&self.u_eoc),
            )
            .unwrap();
        }
        s
    }
}

/// Self-convergence study: run the configured problem on each level, restrict
/// each finer solution onto the next coarser grid, and measure L1 errors at
/// the final time. Levels default to 100/200/400 when the config has no
/// `[convergence]` section.
pub fn convergence_study(config: &RunConfig) -> Result<EocTable, Error> {
    let levels = config
        .convergence
        .as_ref()
        .map(|c| c.levels.clone())
        .unwrap_or_else(|| vec![100, 200, 400]);

    let mut finals = Vec::new();
    for &cells in &levels {
        let grid = config.build_grid_with_cells(cells)?;
        let initial = config.build_initial(&grid)?;
        let kernel = config.build_kernel(grid);
        let law = config.build_control(&grid)?;
        let mut opts = config.run_options();
        opts.snapshot_times.clear();
        opts.keep_trajectory = false;
        opts.diagnostic_cadence = usize::MAX;
        let result = run(&initial, &kernel, &law, &config.scheme, &opts);
        if let RunOutcome::Diverged(rep) = &result.outcome {
            return Err(Error::Config(format!(
                "convergence run at {cells} cells diverged at t = {:.3e} ({})",
                rep.time,
                rep.kind.label()
            )));
        }
        finals.push(result.final_state);
    }

    let mut rho_errors = Vec::new();
    let mut u_errors = Vec::new();
    for pair in finals.windows(2) {
        let coarse = &pair[0];
        let restricted = restrict(&pair[1], coarse.grid);
        let vol = coarse.grid.cell_volume();
        rho_errors.push(l1_distance(&coarse.rho, &restricted.rho, vol));
        u_errors.push(
            coarse
                .u
                .iter()
                .zip(&restricted.u)
                .map(|(a, b)| l1_distance(a, b, vol))
                .sum(),
        );
    }
    let eoc = |errors: &[f64]| {
        errors
            .windows(2)
            .map(|w| (w[0] / w[1]).log2())
            .collect::<Vec<f64>>()
    };
    Ok(EocTable {
        levels,
        rho_eoc: eoc(&rho_errors),
        u_eoc: eoc(&u_errors),
        rho_errors,
        u_errors,
    })
}

/// One line per named preset: initial data first, then reference velocities.
pub fn presets_catalog() -> String {
    let mut s = String::from("initial presets\n");
    for preset in InitialPreset::ALL {
        let dim = match preset.dim() {
            Some(Dim::One) => "1D",
            Some(Dim::Two) => "2D",
            None => "any",
        };
        let blurb = match preset {
            InitialPreset::TwoBlocks => {
                "two density blocks on vacuum with an opposing sine velocity (threshold study)"
            }
            InitialPreset::SmoothWave => {
                "strictly positive cosine density with a gentle sine velocity (convergence study)"
            }
            InitialPreset::SymmetricHeaps => "two equal Gaussian heaps pushed toward each other",
            InitialPreset::AsymmetricHeaps => "unequal Gaussian heaps colliding off-center",
            InitialPreset::UniformFlock => "constant density and velocity (reorientation control)",
            InitialPreset::Milling => "constant density with a tangential milling velocity",
            InitialPreset::Blowup => {
                "truncated Gaussian with an axis-seeking step velocity (finite-time blow-up)"
            }
        };
        s.push_str(&format!("  {:<17} {:<4} {}\n", preset.name(), dim, blurb));
    }
    s.push_str("\nreference velocity (ubar) presets\n");
    let ubars: [(&str, &str, &str); 5] = [
        ("constant", "any", "fixed vector; components from `values` in the config"),
        ("sine", "1D", "sin(pi x / L)"),
        ("reorientation", "2D", "constant (-1, -1), opposing the uniform flock"),
        ("birdcage", "2D", "axis-seeking push, switched off on an axis-aligned cross"),
        ("scarecrow", "2D", "radial repeller inside the disk |x|^2 <= 1/10"),
    ];
    for (name, dim, blurb) in ubars {
        s.push_str(&format!("  {name:<17} {dim:<4} {blurb}\n"));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;
    use crate::grid::Grid;
    use approx::assert_relative_eq;

    fn smoke_config(dir: &str) -> RunConfig {
        parse_config(&format!(
            r#"
            [grid]
            dim = 1
            half_width = 2.0
            cells = 32

            [initial]
            preset = "two_blocks"

            [control]
            gamma = 1.0
            ubar = "constant"
            values = [0.0]

            [run]
            t_final = 0.1
            snapshot_times = [0.05, 0.1]
            output_dir = "{dir}"
            "#
        ))
        .unwrap()
    }

    #[test]
    fn run_experiment_writes_the_full_file_set() {
        let tmp = tempfile::tempdir().unwrap();
        let dir = tmp.path().join("out");
        let config = smoke_config(dir.to_str().unwrap());
        let report = run_experiment(&config).unwrap();
        assert!(matches!(report.result.outcome, RunOutcome::Completed));
        assert_eq!(report.snapshot_paths.len(), 3); // t = 0 plus two scheduled
        assert!(report.summary_path.exists());
        assert!(report.diagnostics_path.exists());
        assert!(report.output_dir.join("used_config.toml").exists());
        let summary = std::fs::read_to_string(&report.summary_path).unwrap();
        assert!(summary.contains("outcome = completed"));
        assert!(summary.contains("classification = "));
        assert!(summary.contains("mass_drift_rel"));
    }

    #[test]
    fn classify_writes_report_without_integrating() {
        let tmp = tempfile::tempdir().unwrap();
        let dir = tmp.path().join("cls");
        let config = smoke_config(dir.to_str().unwrap());
        let report = classify_experiment(&config).unwrap();
        assert!(report.text.contains("classification = "));
        assert!(report.output_dir.join("threshold_report.txt").exists());
        assert!(report.output_dir.join("threshold_fields.csv").exists());
        assert!(!report.output_dir.join("diagnostics.csv").exists());
    }

    #[test]
    fn restriction_is_exact_on_linear_fields() {
        let coarse = Grid::new(Dim::One, 1.0, 8).unwrap();
        let fine = Grid::new(Dim::One, 1.0, 16).unwrap();
        let mut f = ConservedState::zeros(fine);
        for i in 0..16 {
            f.rho[i] = 2.0 + 3.0 * fine.center_x(i);
            f.u[0][i] = -1.0 + 0.5 * fine.center_x(i);
        }
        let r = restrict(&f, coarse);
        for i in 0..8 {
            // the mean of the two fine cell values is the coarse cell value
            assert_relative_eq!(r.rho[i], 2.0 + 3.0 * coarse.center_x(i), max_relative = 1e-14);
            assert_relative_eq!(r.u[0][i], -1.0 + 0.5 * coarse.center_x(i), max_relative = 1e-14);
        }
    }

    #[test]
    fn restriction_preserves_mass_2d() {
        let coarse = Grid::new(Dim::Two, 1.0, 4).unwrap();
        let fine = Grid::new(Dim::Two, 1.0, 8).unwrap();
        let s = InitialPreset::Blowup.build(&fine).unwrap();
        let r = restrict(&s, coarse);
        assert_relative_eq!(r.total_mass(), s.total_mass(), max_relative = 1e-13);
    }

    #[test]
    fn eoc_table_renders_all_levels() {
        let table = EocTable {
            levels: vec![100, 200, 400],
            rho_errors: vec![4.0e-3, 1.0e-3],
            u_errors: vec![8.0e-4, 2.1e-4],
            rho_eoc: vec![2.0],
            u_eoc: vec![1.93],
        };
        let text = table.render();
        assert!(text.contains("100/200"));
        assert!(text.contains("200/400"));
        assert!(text.contains("2.000"));
        assert_relative_eq!(table.min_eoc(), 1.93, max_relative = 1e-12);
        let csv = table.to_csv();
        assert_eq!(csv.lines().count(), 3);
    }

    #[test]
    fn catalog_names_every_preset() {
        let catalog = presets_catalog();
        for preset in InitialPreset::ALL {
            assert!(catalog.contains(preset.name()), "{}", preset.name());
        }
        for name in ["constant", "sine", "reorientation", "birdcage", "scarecrow"] {
            assert!(catalog.contains(name), "{name}");
        }
    }

    #[test]
    fn output_dir_env_wins_over_config() {
        let config = smoke_config("from_config");
        assert_eq!(resolve_output_dir(&config), PathBuf::from("from_config"));
        std::env::set_var(OUTPUT_DIR_ENV, "from_env");
        let resolved = resolve_output_dir(&config);
        std::env::remove_var(OUTPUT_DIR_ENV);
        assert_eq!(resolved, PathBuf::from("from_env"));
    }
}
