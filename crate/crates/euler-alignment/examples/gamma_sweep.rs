//! The 1D threshold margin `du0/dx + psi * rho0 + 1/gamma` as the control
//! strength varies. Shrinking gamma shifts the whole margin up by `1/gamma`,
//! so every subcritical gamma stays subcritical when halved.
//!
//! Each classified case is then integrated to T = 3 with `u_bar = 0`; weak
//! control barely changes the uncontrolled concentration, strong control
//! freezes the blocks almost in place.

use euler_alignment::control::{ControlLaw, UbarPreset};
use euler_alignment::grid::{Dim, Grid};
use euler_alignment::kernel::{KernelEvaluator, KernelSpec};
use euler_alignment::presets::InitialPreset;
use euler_alignment::scheme::SchemeConfig;
use euler_alignment::thresholds::classify_1d;
use euler_alignment::timestep::{run, RunOptions};

fn main() {
    let grid = Grid::new(Dim::One, 1.0, 200).unwrap();
    let initial = InitialPreset::TwoBlocks.build(&grid).unwrap();
    let kernel = KernelEvaluator::new(KernelSpec::standard(), grid);
    let scheme = SchemeConfig::standard();

    println!(
        "{:>14} {:>14} {:>16} {:>12} {:>14}",
        "gamma", "min margin", "classification", "final max", "final kinetic"
    );
    println!(
        "{:>14} {:>14} {:>16} {:>12} {:>14}",
        "", "", "", "density", "energy"
    );

    let mut cases: Vec<(String, ControlLaw)> =
        vec![("infinity".into(), ControlLaw::Uncontrolled)];
    for gamma in [10.0, 1.0, 0.1] {
        cases.push((
            format!("{gamma}"),
            ControlLaw::controlled(gamma, UbarPreset::Constant(vec![0.0]), &grid).unwrap(),
        ));
    }

    for (label, law) in &cases {
        let report = classify_1d(&initial, &kernel, law).unwrap();
        let result = run(&initial, &kernel, law, &scheme, &RunOptions::to_time(3.0));
        let last = result.diagnostics.last().unwrap();
        println!(
            "{:>14} {:>+14.4} {:>16} {:>12.3} {:>14.6}",
            label,
            report.min_margin,
            report.classification.label(),
            last.max_rho,
            last.kinetic_energy
        );
    }
}
