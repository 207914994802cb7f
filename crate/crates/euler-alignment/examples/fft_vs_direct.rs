//! The two convolution paths compute the same alignment force.
//!
//! The direct path sums the tabulated kernel against every cell pair; the
//! FFT path multiplies in frequency space. Both use the same midpoint-rule
//! quadrature, so they agree to round-off, and the FFT path turns an O(N^2)
//! sum into O(N log N).

use euler_alignment::grid::{Dim, Grid};
use euler_alignment::kernel::{ConvolutionMode, KernelEvaluator, KernelSpec};
use euler_alignment::presets::InitialPreset;
use std::time::Instant;

fn max_force_gap(grid: Grid, preset: InitialPreset) -> f64 {
    let state = preset.build(&grid).unwrap();
    let spec = KernelSpec::standard();
    let direct = KernelEvaluator::new(spec, grid);
    let fft = KernelEvaluator::new(
        KernelSpec {
            evaluation: ConvolutionMode::Fft,
            ..spec
        },
        grid,
    );
    let fa = direct.alignment_force(&state);
    let fb = fft.alignment_force(&state);
    let mut gap = 0.0_f64;
    for (a, b) in fa.iter().zip(&fb) {
        for (x, y) in a.iter().zip(b) {
            gap = gap.max((x - y).abs());
        }
    }
    gap
}

fn main() {
    let gap_1d = max_force_gap(
        Grid::new(Dim::One, 1.0, 256).unwrap(),
        InitialPreset::TwoBlocks,
    );
    println!("1D, 256 cells, two_blocks:      max force gap {gap_1d:.3e}");

    let gap_2d = max_force_gap(
        Grid::new(Dim::Two, 1.0, 48).unwrap(),
        InitialPreset::SymmetricHeaps,
    );
    println!("2D, 48 x 48, symmetric_heaps:   max force gap {gap_2d:.3e}");

    // one force evaluation at the paper's 2D resolution, both ways
    let grid = Grid::new(Dim::Two, 1.0, 64).unwrap();
    let state = InitialPreset::AsymmetricHeaps.build(&grid).unwrap();
    let spec = KernelSpec::standard();
    let direct = KernelEvaluator::new(spec, grid);
    let fft = KernelEvaluator::new(
        KernelSpec {
            evaluation: ConvolutionMode::Fft,
            ..spec
        },
        grid,
    );
    let t0 = Instant::now();
    let _ = direct.alignment_force(&state);
    let direct_time = t0.elapsed();
    let t1 = Instant::now();
    let _ = fft.alignment_force(&state);
    let fft_time = t1.elapsed();
    println!();
    println!("one alignment force at 64 x 64:");
    println!("  direct {direct_time:>12.3?}");
    println!("  fft    {fft_time:>12.3?}");
}
