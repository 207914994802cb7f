//! Threshold reports without any time integration, in one and two
//! dimensions.
//!
//! The 1D condition is sharp: smooth global solutions exist exactly when
//! the margin `du0/dx + psi * rho0 + 1/gamma` is nonnegative everywhere.
//! The 2D conditions are one-sided: a regularity certificate, a blow-up
//! certificate, and an honest "undetermined" in between.

use euler_alignment::control::{ControlLaw, UbarPreset};
use euler_alignment::grid::{Dim, Grid};
use euler_alignment::kernel::{KernelEvaluator, KernelSpec};
use euler_alignment::presets::InitialPreset;
use euler_alignment::thresholds::{classify_1d, classify_2d};

fn main() {
    let grid_1d = Grid::new(Dim::One, 1.0, 200).unwrap();
    let blocks = InitialPreset::TwoBlocks.build(&grid_1d).unwrap();
    let kernel_1d = KernelEvaluator::new(KernelSpec::standard(), grid_1d);

    println!("two_blocks, 200 cells");
    let mut laws: Vec<(String, ControlLaw)> =
        vec![("uncontrolled".into(), ControlLaw::Uncontrolled)];
    for gamma in [10.0, 1.0, 0.1] {
        laws.push((
            format!("gamma = {gamma}"),
            ControlLaw::controlled(gamma, UbarPreset::Constant(vec![0.0]), &grid_1d).unwrap(),
        ));
    }
    for (name, law) in &laws {
        let rep = classify_1d(&blocks, &kernel_1d, law).unwrap();
        print!(
            "  {:<14} {:<14} min margin {:+.4}",
            name,
            rep.classification.label(),
            rep.min_margin
        );
        match rep.predicted_blowup_bound {
            Some(t) => println!(", blow-up by t <= {t:.3}"),
            None => println!(),
        }
    }

    println!();
    println!("blowup (truncated Gaussian, axis-seeking step velocity), 65 x 65 cells");
    let grid_2d = Grid::new(Dim::Two, 1.0, 65).unwrap();
    let gaussian = InitialPreset::Blowup.build(&grid_2d).unwrap();
    let kernel_2d = KernelEvaluator::new(KernelSpec::standard(), grid_2d);
    let laws_2d = [
        ("uncontrolled".to_string(), ControlLaw::Uncontrolled),
        (
            "gamma = 0.01".to_string(),
            ControlLaw::controlled(0.01, UbarPreset::Constant(vec![0.0, 0.0]), &grid_2d).unwrap(),
        ),
    ];
    for (name, law) in &laws_2d {
        let rep = classify_2d(&gaussian, &kernel_2d, law).unwrap();
        println!("  {:<14} {}", name, rep.classification.label());
        if let Some(note) = &rep.note {
            println!("                 note: {note}");
        }
        println!(
            "                 support diameter {:.3}, velocity diameter {:.3}, bound D = {:.3}",
            rep.support_diameter, rep.velocity_diameter, rep.diameter_bound
        );
        println!(
            "                 mass {:.4}, Q~ = {:.4}",
            rep.mass, rep.q_tilde
        );
    }

    println!();
    println!("uniform_flock, 32 x 32 cells (degenerate spectral gap)");
    let grid_f = Grid::new(Dim::Two, 1.0, 32).unwrap();
    let flock = InitialPreset::UniformFlock.build(&grid_f).unwrap();
    let kernel_f = KernelEvaluator::new(KernelSpec::standard(), grid_f);
    let rep = classify_2d(&flock, &kernel_f, &ControlLaw::Uncontrolled).unwrap();
    println!("  uncontrolled   {}", rep.classification.label());
    if let Some(note) = &rep.note {
        println!("                 note: {note}");
    }
}
