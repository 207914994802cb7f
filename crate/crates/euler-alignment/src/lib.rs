//! Finite-volume solver for the controlled pressureless Euler alignment
//! system on periodic 1D and 2D domains.
//!
//! The model is compressible, pressureless gas dynamics with a nonlocal
//! velocity-alignment force (a Cucker-Smale interaction under a bounded
//! radial kernel) plus an optional linear relaxation control `(u_bar - u) /
//! gamma` that steers the flow toward a prescribed reference velocity. The
//! crate integrates the system with a central (Kurganov-Tadmor) scheme and an
//! IMEX Runge-Kutta step that treats the stiff control implicitly, classifies
//! initial data against critical-threshold conditions for global regularity
//! versus finite-time blow-up, and ships the experiment drivers used to
//! reproduce the reference simulations.
//!
//! The `examples/` directory is the primary tour of the library; each file is
//! a self-contained study that prints what it measures.
//!
//! ## Directory Structure
//!
//! ```text
//! examples/
//! ├── two_blocks_threshold.rs     # 1D threshold: control rescues a steep sine
//! ├── gamma_sweep.rs              # margin growth as gamma shrinks
//! ├── sine_steering.rs            # steering toward a spatially varying u_bar
//! ├── classify_initial_data.rs    # threshold reports without time integration
//! ├── characteristic_trichotomy.rs# blow-up / flat / damped characteristic ODE
//! ├── heap_collisions.rs          # colliding Gaussian heaps, maximum principle
//! ├── reorientation.rs            # 2D uniform flock relaxing onto u_bar
//! ├── birdcage.rs                 # trapping a drifting flock on a cross
//! ├── scarecrow.rs                # radial repeller carving a hole in a mill
//! ├── blowup_comparison.rs        # 2D mass concentration, resolution study
//! ├── convergence_order.rs        # self-convergence orders on smooth data
//! └── fft_vs_direct.rs            # the two convolution paths agree
//! ```
//!
//! ## Threshold Examples
//!
//! The 1D critical threshold is pointwise: initial data stay smooth exactly
//! when `du0/dx + psi * rho0 + 1/gamma` is nonnegative everywhere.
//!
//! - **`two_blocks_threshold`** - classify the two-block data with and
//!   without control, then integrate both and compare outcomes
//! - **`gamma_sweep`** - the threshold margin at gamma in {10, 1, 0.1}
//! - **`classify_initial_data`** - threshold reports for 1D and 2D presets
//! - **`characteristic_trichotomy`** - the characteristic-line ODE: blow-up
//!   in finite time, the flat borderline, and relaxation toward the
//!   alignment coefficient
//!
//! ```bash
//! cargo run --release --example two_blocks_threshold
//! cargo run --release --example gamma_sweep
//! cargo run --release --example classify_initial_data
//! cargo run --release --example characteristic_trichotomy
//! ```
//!
//! ## Control Examples
//!
//! - **`sine_steering`** - relax a 1D flow onto `sin(pi x / L)`
//! - **`reorientation`** - turn a 2D flock around; strong control tracks
//!   `u_bar` fast, weak control barely deflects it
//! - **`birdcage`** - trap a drifting flock with an axis-seeking reference
//!   velocity that is switched off on a cross-shaped region
//! - **`scarecrow`** - short-time repulsion from a protected disk
//!
//! ```bash
//! cargo run --release --example sine_steering
//! cargo run --release --example reorientation
//! cargo run --release --example birdcage
//! cargo run --release --example scarecrow
//! ```
//!
//! ## Dynamics and Verification Examples
//!
//! - **`heap_collisions`** - symmetric and asymmetric heap collisions; the
//!   velocity never overshoots its initial and reference bounds
//! - **`blowup_comparison`** - uncontrolled 2D data concentrate mass into a
//!   single cell; control below the critical strength prevents it
//! - **`convergence_order`** - L1 self-convergence orders for the smooth
//!   wave, with and without the slope limiter
//! - **`fft_vs_direct`** - FFT and direct convolution agree to near machine
//!   precision, and the FFT path is the fast one at scale
//!
//! ```bash
//! cargo run --release --example heap_collisions
//! cargo run --release --example blowup_comparison
//! cargo run --release --example convergence_order
//! cargo run --release --example fft_vs_direct
//! ```
//!
//! ## CLI
//!
//! The same drivers back a small binary: `run`, `classify`, `presets`, and
//! `convergence` subcommands, all taking a TOML config. See `README.md`.

pub mod config;
pub mod control;
pub mod error;
pub mod experiment;
pub mod grid;
pub mod kernel;
pub mod ode;
pub mod output;
pub mod presets;
pub mod scheme;
pub mod state;
pub mod thresholds;
pub mod timestep;

pub use error::Error;
