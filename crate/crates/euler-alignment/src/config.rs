//! TOML run configuration: parsing, validation, defaults, and construction
//! of the solver objects a run needs.
//!
//! The format is sectioned key-value text. Unknown keys are rejected so a
//! typo cannot silently fall back to a default:
//!
//! ```toml
//! [grid]
//! dim = 1
//! half_width = 2.0
//! cells = 200
//!
//! [initial]
//! preset = "two_blocks"
//!
//! [control]          # omit the whole section for the uncontrolled system
//! gamma = 10.0
//! ubar = "constant"
//! values = [0.0]
//!
//! [run]
//! t_final = 3.0
//! snapshot_times = [1.0, 2.0, 3.0]
//! ```
//!
//! Defaults follow the experiments: `zeta = 1`, `beta = 10`,
//! `limiter = "minmod"`, `cfl = 0.95`, `convolution = "direct"`.

use crate::control::{ControlLaw, UbarPreset};
use crate::error::Error;
use crate::grid::{Dim, Grid};
use crate::kernel::{KernelSpec, KernelEvaluator};
use crate::presets::InitialPreset;
use crate::scheme::SchemeConfig;
use crate::state::ConservedState;
use crate::timestep::{DivergenceGuard, RunOptions};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub dim: usize,
    pub half_width: f64,
    /// Cells per axis; 2D grids are square.
    pub cells: usize,
}

/// Smooth inline initial data, 1D only:
/// `rho(x) = rho0 + sum_k rho_cos[k-1] cos(k pi x / L)`,
/// `u(x) = sum_k u_sin[k-1] sin(k pi x / L)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InlineInitial {
    pub rho0: f64,
    #[serde(default)]
    pub rho_cos: Vec<f64>,
    #[serde(default)]
    pub u_sin: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inline: Option<InlineInitial>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct KernelSection {
    pub zeta: f64,
    pub beta: f64,
}

impl Default for KernelSection {
    fn default() -> Self {
        KernelSection {
            zeta: 1.0,
            beta: 10.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControlSection {
    pub gamma: f64,
    pub ubar: String,
    /// Components of a constant ubar; only valid with `ubar = "constant"`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
}

fn default_cadence() -> usize {
    1
}

fn default_guard_factor() -> f64 {
    1e3
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub t_final: f64,
    #[serde(default)]
    pub snapshot_times: Vec<f64>,
    #[serde(default = "default_cadence")]
    pub diagnostic_cadence: usize,
    /// Keep every accepted step in memory (characteristic tracking).
    #[serde(default)]
    pub keep_trajectory: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<String>,
    /// Reserved; every preset is deterministic, so the seed is carried but
    /// unused.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default = "default_guard_factor")]
    pub gradient_ceiling_factor: f64,
    #[serde(default = "default_guard_factor")]
    pub density_growth_factor: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergenceSection {
    /// Cell counts, each double the previous, coarsest first.
    pub levels: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub grid: GridSection,
    pub initial: InitialSection,
    #[serde(default)]
    pub kernel: KernelSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub control: Option<ControlSection>,
    #[serde(default)]
    pub scheme: SchemeConfig,
    pub run: RunSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub convergence: Option<ConvergenceSection>,
}

const UBAR_NAMES: [&str; 5] = ["constant", "sine", "reorientation", "birdcage", "scarecrow"];

/// Parse and validate a configuration. Parse errors carry the line and
/// column; validation errors name the offending field.
pub fn parse_config(text: &str) -> Result<RunConfig, Error> {
    let config: RunConfig =
        toml::from_str(text).map_err(|e| Error::Config(e.to_string().trim().to_string()))?;
    config.validate()?;
    Ok(config)
}

/// Canonical TOML serialization; `parse_config(serialize_config(c)) == c`.
pub fn serialize_config(config: &RunConfig) -> String {
    toml::to_string_pretty(config).expect("config serializes")
}

/// Hex digest of the canonical serialization, so logically identical
/// configurations hash identically. Shortened to 16 characters for headers.
pub fn config_hash(config: &RunConfig) -> String {
    let mut hasher = Sha256::new();
    hasher.update(serialize_config(config).as_bytes());
    let digest = hasher.finalize();
    let mut hex = String::with_capacity(16);
    for byte in digest.iter().take(8) {
        hex.push_str(&format!("{byte:02x}"));
    }
    hex
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), Error> {
        let field = |name: &str, msg: String| Error::Config(format!("{name}: {msg}"));

        if self.grid.dim != 1 && self.grid.dim != 2 {
            return Err(field("grid.dim", format!("must be 1 or 2, got {}", self.grid.dim)));
        }
        if !(self.grid.half_width.is_finite() && self.grid.half_width > 0.0) {
            return Err(field(
                "grid.half_width",
                format!("must be positive and finite, got {}", self.grid.half_width),
            ));
        }
        if self.grid.cells < 4 {
            return Err(field("grid.cells", format!("needs at least 4, got {}", self.grid.cells)));
        }

        match (&self.initial.preset, &self.initial.inline) {
            (Some(_), Some(_)) => {
                return Err(field(
                    "initial",
                    "give either `preset` or `inline`, not both".into(),
                ))
            }
            (None, None) => {
                return Err(field("initial", "needs a `preset` name or an `inline` table".into()))
            }
            (Some(name), None) => {
                let preset = InitialPreset::from_name(name).ok_or_else(|| {
                    field(
                        "initial.preset",
                        format!(
                            "unknown preset `{name}`; valid names: {}",
                            InitialPreset::ALL.map(|p| p.name()).join(", ")
                        ),
                    )
                })?;
                if let Some(d) = preset.dim() {
                    if d.as_usize() != self.grid.dim {
                        return Err(field(
                            "initial.preset",
                            format!(
                                "`{name}` is {}D but grid.dim = {}",
                                d.as_usize(),
                                self.grid.dim
                            ),
                        ));
                    }
                }
            }
            (None, Some(inline)) => {
                if self.grid.dim != 1 {
                    return Err(field(
                        "initial.inline",
                        "inline initial data is one-dimensional; use a preset in 2D".into(),
                    ));
                }
                let dip: f64 = inline.rho_cos.iter().map(|a| a.abs()).sum();
                if !(inline.rho0.is_finite() && inline.rho0 - dip >= 0.0) {
                    return Err(field(
                        "initial.inline",
                        format!(
                            "density can reach {} < 0; lower the cosine amplitudes",
                            inline.rho0 - dip
                        ),
                    ));
                }
            }
        }

        if !(self.kernel.zeta.is_finite() && self.kernel.zeta > 0.0) {
            return Err(field(
                "kernel.zeta",
                format!("must be positive and finite, got {}", self.kernel.zeta),
            ));
        }
        if !(self.kernel.beta.is_finite() && self.kernel.beta > 0.0) {
            return Err(field(
                "kernel.beta",
                format!("must be positive and finite, got {}", self.kernel.beta),
            ));
        }

        if let Some(control) = &self.control {
            if !(control.gamma.is_finite() && control.gamma > 0.0) {
                return Err(field(
                    "control.gamma",
                    format!(
                        "must be positive and finite, got {}; omit [control] for the uncontrolled system",
                        control.gamma
                    ),
                ));
            }
            if !UBAR_NAMES.contains(&control.ubar.as_str()) {
                return Err(field(
                    "control.ubar",
                    format!("unknown field `{}`; valid names: {}", control.ubar, UBAR_NAMES.join(", ")),
                ));
            }
            match (control.ubar.as_str(), &control.values) {
                ("constant", None) => {
                    return Err(field(
                        "control.values",
                        "constant ubar needs component values".into(),
                    ))
                }
                ("constant", Some(v)) => {
                    if v.len() != self.grid.dim {
                        return Err(field(
                            "control.values",
                            format!("{} components on a {}D grid", v.len(), self.grid.dim),
                        ));
                    }
                }
                (_, Some(_)) => {
                    return Err(field(
                        "control.values",
                        format!("only `constant` takes values, not `{}`", control.ubar),
                    ))
                }
                _ => {}
            }
        }

        if !(self.scheme.cfl > 0.0 && self.scheme.cfl <= 1.0) {
            return Err(field(
                "scheme.cfl",
                format!("must be in (0, 1], got {}", self.scheme.cfl),
            ));
        }

        if !(self.run.t_final.is_finite() && self.run.t_final >= 0.0) {
            return Err(field(
                "run.t_final",
                format!("must be nonnegative and finite, got {}", self.run.t_final),
            ));
        }
        let times = &self.run.snapshot_times;
        for w in times.windows(2) {
            if w[0] >= w[1] {
                return Err(field(
                    "run.snapshot_times",
                    format!("must be strictly increasing, got {} then {}", w[0], w[1]),
                ));
            }
        }
        if let Some(&t) = times.first() {
            if t < 0.0 {
                return Err(field("run.snapshot_times", format!("negative time {t}")));
            }
        }
        if let Some(&t) = times.last() {
            if t > self.run.t_final {
                return Err(field(
                    "run.snapshot_times",
                    format!("{t} exceeds t_final = {}", self.run.t_final),
                ));
            }
        }
        if self.run.diagnostic_cadence == 0 {
            return Err(field("run.diagnostic_cadence", "must be at least 1".into()));
        }
        if !(self.run.gradient_ceiling_factor.is_finite() && self.run.gradient_ceiling_factor > 0.0)
        {
            return Err(field(
                "run.gradient_ceiling_factor",
                format!("must be positive, got {}", self.run.gradient_ceiling_factor),
            ));
        }
        if !(self.run.density_growth_factor.is_finite() && self.run.density_growth_factor > 0.0) {
            return Err(field(
                "run.density_growth_factor",
                format!("must be positive, got {}", self.run.density_growth_factor),
            ));
        }

        if let Some(convergence) = &self.convergence {
            if convergence.levels.len() < 3 {
                return Err(field(
                    "convergence.levels",
                    format!("needs at least 3 levels, got {}", convergence.levels.len()),
                ));
            }
            for w in convergence.levels.windows(2) {
                if w[1] != 2 * w[0] {
                    return Err(field(
                        "convergence.levels",
                        format!("each level must double the previous, got {} then {}", w[0], w[1]),
                    ));
                }
            }
            if convergence.levels[0] < 4 {
                return Err(field(
                    "convergence.levels",
                    format!("coarsest level needs at least 4 cells, got {}", convergence.levels[0]),
                ));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> Dim {
        if self.grid.dim == 1 {
            Dim::One
        } else {
            Dim::Two
        }
    }

    pub fn build_grid(&self) -> Result<Grid, Error> {
        Grid::new(self.dim(), self.grid.half_width, self.grid.cells)
    }

    /// Same configuration on a different resolution (convergence studies).
    pub fn build_grid_with_cells(&self, cells: usize) -> Result<Grid, Error> {
        Grid::new(self.dim(), self.grid.half_width, cells)
    }

    pub fn build_initial(&self, grid: &Grid) -> Result<ConservedState, Error> {
        match (&self.initial.preset, &self.initial.inline) {
            (Some(name), None) => {
                let preset = InitialPreset::from_name(name)
                    .ok_or_else(|| Error::Config(format!("initial.preset: unknown preset `{name}`")))?;
                preset.build(grid)
            }
            (None, Some(inline)) => {
                let mut state = ConservedState::zeros(*grid);
                let l = grid.half_width();
                for i in 0..grid.nx() {
                    let x = grid.center_x(i);
                    let mut rho = inline.rho0;
                    for (k, a) in inline.rho_cos.iter().enumerate() {
                        rho += a * ((k + 1) as f64 * PI * x / l).cos();
                    }
                    let mut u = 0.0;
                    for (k, b) in inline.u_sin.iter().enumerate() {
                        u += b * ((k + 1) as f64 * PI * x / l).sin();
                    }
                    state.rho[i] = rho;
                    state.u[0][i] = u;
                }
                Ok(state)
            }
            _ => Err(Error::Config("initial: needs exactly one of preset/inline".into())),
        }
    }

    pub fn kernel_spec(&self) -> KernelSpec {
        KernelSpec {
            zeta: self.kernel.zeta,
            beta: self.kernel.beta,
            evaluation: self.scheme.convolution,
        }
    }

    pub fn build_kernel(&self, grid: Grid) -> KernelEvaluator {
        KernelEvaluator::new(self.kernel_spec(), grid)
    }

    pub fn build_control(&self, grid: &Grid) -> Result<ControlLaw, Error> {
        match &self.control {
            None => Ok(ControlLaw::Uncontrolled),
            Some(section) => {
                let preset = match section.ubar.as_str() {
                    "constant" => UbarPreset::Constant(
                        section.values.clone().unwrap_or_default(),
                    ),
                    "sine" => UbarPreset::Sine,
                    "reorientation" => UbarPreset::Reorientation,
                    "birdcage" => UbarPreset::Birdcage,
                    "scarecrow" => UbarPreset::Scarecrow,
                    other => {
                        return Err(Error::Config(format!("control.ubar: unknown field `{other}`")))
                    }
                };
                ControlLaw::controlled(section.gamma, preset, grid)
            }
        }
    }

    pub fn run_options(&self) -> RunOptions {
        RunOptions {
            t_final: self.run.t_final,
            snapshot_times: self.run.snapshot_times.clone(),
            diagnostic_cadence: self.run.diagnostic_cadence,
            keep_trajectory: self.run.keep_trajectory,
            guard: DivergenceGuard {
                gradient_ceiling_factor: self.run.gradient_ceiling_factor,
                density_growth_factor: self.run.density_growth_factor,
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::ConvolutionMode;
    use crate::scheme::Limiter;

    const MINIMAL: &str = r#"
        [grid]
        dim = 1
        half_width = 2.0
        cells = 200

        [initial]
        preset = "two_blocks"

        [control]
        gamma = 10.0
        ubar = "constant"
        values = [0.0]

        [run]
        t_final = 3.0
        snapshot_times = [1.0, 2.0, 3.0]
    "#;

    #[test]
    fn minimal_config_parses_with_defaults() {
        let c = parse_config(MINIMAL).unwrap();
        assert_eq!(c.grid.cells, 200);
        assert_eq!(c.kernel.zeta, 1.0);
        assert_eq!(c.kernel.beta, 10.0);
        assert_eq!(c.scheme.limiter, Limiter::Minmod);
        assert_eq!(c.scheme.cfl, 0.95);
        assert_eq!(c.scheme.convolution, ConvolutionMode::Direct);
        assert_eq!(c.run.diagnostic_cadence, 1);
        let grid = c.build_grid().unwrap();
        let law = c.build_control(&grid).unwrap();
        assert_eq!(law.gamma(), 10.0);
    }

    #[test]
    fn omitted_control_means_uncontrolled() {
        let text = MINIMAL.replace(
            "[control]\n        gamma = 10.0\n        ubar = \"constant\"\n        values = [0.0]\n",
            "",
        );
        let c = parse_config(&text).unwrap();
        assert!(c.control.is_none());
        let grid = c.build_grid().unwrap();
        assert_eq!(c.build_control(&grid).unwrap(), ControlLaw::Uncontrolled);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = MINIMAL.replace("cells = 200", "cells = 200\n        spacing = 0.01");
        let err = parse_config(&text).unwrap_err().to_string();
        assert!(err.contains("spacing"), "{err}");
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let text = MINIMAL.replace("cells = 200", "cells = \"many\"");
        let err = parse_config(&text).unwrap_err().to_string();
        assert!(err.contains("line"), "{err}");
    }

    #[test]
    fn cfl_above_one_is_rejected() {
        let text = MINIMAL.replace("[run]", "[scheme]\n        cfl = 1.5\n\n        [run]");
        let err = parse_config(&text).unwrap_err().to_string();
        assert!(err.contains("scheme.cfl"), "{err}");
    }

    #[test]
    fn unsorted_snapshots_are_rejected() {
        let text = MINIMAL.replace("[1.0, 2.0, 3.0]", "[2.0, 1.0]");
        let err = parse_config(&text).unwrap_err().to_string();
        assert!(err.contains("snapshot_times"), "{err}");
    }

    #[test]
    fn snapshot_beyond_t_final_is_rejected() {
        let text = MINIMAL.replace("[1.0, 2.0, 3.0]", "[1.0, 4.0]");
        let err = parse_config(&text).unwrap_err().to_string();
        assert!(err.contains("t_final"), "{err}");
    }

    #[test]
    fn constant_ubar_needs_matching_components() {
        let text = MINIMAL.replace("values = [0.0]", "values = [0.0, 0.0]");
        let err = parse_config(&text).unwrap_err().to_string();
        assert!(err.contains("control.values"), "{err}");
    }

    #[test]
    fn dimension_mismatch_is_caught_at_parse_time() {
        let text = MINIMAL.replace("dim = 1", "dim = 2");
        let err = parse_config(&text).unwrap_err().to_string();
        assert!(err.contains("two_blocks"), "{err}");
    }

    #[test]
    fn round_trip_preserves_the_config() {
        let c = parse_config(MINIMAL).unwrap();
        let again = parse_config(&serialize_config(&c)).unwrap();
        assert_eq!(c, again);
        assert_eq!(config_hash(&c), config_hash(&again));
    }

    #[test]
    fn hash_distinguishes_configs() {
        let a = parse_config(MINIMAL).unwrap();
        let b = parse_config(&MINIMAL.replace("gamma = 10.0", "gamma = 1.0")).unwrap();
        assert_ne!(config_hash(&a), config_hash(&b));
        assert_eq!(config_hash(&a).len(), 16);
    }

    #[test]
    fn inline_initial_builds_fourier_data() {
        let text = MINIMAL.replace(
            "preset = \"two_blocks\"",
            "inline = { rho0 = 1.0, rho_cos = [0.5], u_sin = [0.2, -0.1] }",
        );
        let c = parse_config(&text).unwrap();
        let grid = c.build_grid().unwrap();
        let s = c.build_initial(&grid).unwrap();
        let x = grid.center_x(17);
        let expected_rho = 1.0 + 0.5 * (PI * x / 2.0).cos();
        let expected_u = 0.2 * (PI * x / 2.0).sin() - 0.1 * (PI * x).sin();
        approx::assert_relative_eq!(s.rho[17], expected_rho, max_relative = 1e-14);
        approx::assert_relative_eq!(s.u[0][17], expected_u, max_relative = 1e-14);
    }

    #[test]
    fn inline_negative_density_is_rejected() {
        let text = MINIMAL.replace(
            "preset = \"two_blocks\"",
            "inline = { rho0 = 0.3, rho_cos = [0.5] }",
        );
        let err = parse_config(&text).unwrap_err().to_string();
        assert!(err.contains("negative") || err.contains("< 0"), "{err}");
    }

    #[test]
    fn convergence_levels_must_double() {
        let text = format!("{MINIMAL}\n        [convergence]\n        levels = [100, 150, 300]");
        let err = parse_config(&text).unwrap_err().to_string();
        assert!(err.contains("double"), "{err}");
        let ok = format!("{MINIMAL}\n        [convergence]\n        levels = [100, 200, 400]");
        assert!(parse_config(&ok).is_ok());
    }

    #[test]
    fn seed_key_is_reserved_but_accepted() {
        let text = MINIMAL.replace("t_final = 3.0", "t_final = 3.0\n        seed = 7");
        let c = parse_config(&text).unwrap();
        assert_eq!(c.run.seed, Some(7));
    }
}
