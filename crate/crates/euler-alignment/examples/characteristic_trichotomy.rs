//! The characteristic-line ODE behind the critical threshold:
//!
//! ```text
//! rho' = -rho (d - c),      d' = -d (d - c),      c = psi * rho + 1/gamma
//! ```
//!
//! With a frozen coefficient c the velocity-gradient variable d obeys a
//! Riccati equation with three regimes: d0 < 0 blows down to -infinity in
//! finite time, d0 = 0 stays zero forever, and d0 > 0 relaxes to c. The
//! integrator detects the blow-up and refines the recorded time; both
//! closed-form cases below agree with it to high accuracy.

use euler_alignment::thresholds::{characteristic_ode_oracle, PsiRhoPath};

fn main() {
    // pure Riccati (c = 0): d(t) = d0 / (1 + d0 t), so t* = -1/d0
    let d0 = -2.0;
    let sol = characteristic_ode_oracle(1.0, d0, &PsiRhoPath::Constant(0.0), 0.0, 10.0);
    let t_star = sol.blowup_time.expect("negative d0 must blow up");
    println!("pure Riccati, d0 = {d0}");
    println!("  exact    t* = {:.10}", -1.0 / d0);
    println!("  detected t* = {t_star:.10}");
    println!();

    // frozen positive coefficient: t* = (1/c) ln(1 - c/d0)
    let c = 0.5;
    let d0 = -1.0;
    let sol = characteristic_ode_oracle(1.0, d0, &PsiRhoPath::Constant(c), 0.0, 20.0);
    let t_star = sol.blowup_time.expect("negative d0 must blow up");
    let exact = (1.0 - c / d0).ln() / c;
    println!("frozen coefficient c = {c}, d0 = {d0}");
    println!("  exact    t* = {exact:.10}");
    println!("  detected t* = {t_star:.10}");
    println!(
        "  density along the characteristic grows to {:.3e} before the stop",
        sol.final_rho()
    );
    println!();

    // the borderline: d0 = 0 is a fixed point
    let sol = characteristic_ode_oracle(1.0, 0.0, &PsiRhoPath::Constant(c), 0.0, 50.0);
    println!("borderline d0 = 0");
    println!(
        "  |d| stays below {:.3e} up to t = 50",
        sol.d.iter().fold(0.0_f64, |m, &v| m.max(v.abs()))
    );
    println!();

    // d0 > 0 relaxes to the coefficient
    let sol = characteristic_ode_oracle(1.0, 3.0, &PsiRhoPath::Constant(c), 0.0, 50.0);
    println!("d0 = 3 relaxes toward c = {c}");
    println!(
        "  d(50) = {:.12}   (|d - c| = {:.3e})",
        sol.final_d(),
        (sol.final_d() - c).abs()
    );
}
