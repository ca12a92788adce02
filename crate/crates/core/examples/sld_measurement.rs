//! Solve the symmetric logarithmic derivative and measure in its
//! eigenbasis; both QFI routes agree and the measurement saturates them.
//!
//! ```bash
//! cargo run -p qlim --example sld_measurement
//! ```

use qlim::fisher::{cfi, qfi, qfi_from_fidelity, sld_residual, sld_solve, DEFAULT_SUPPORT_TOL};
use qlim::interferometer::build_sld;
use qlim::scene::Scene;
use std::f64::consts::PI;

fn main() {
    let scene = Scene::shifted_pair();
    let theta = PI; // scale = 1, so this is the half period

    let rho = scene.density(theta).unwrap();
    let drho = scene.density_derivative(theta).unwrap();
    println!("state at scale·θ = π:\nρ = {rho:.4}");
    println!("∂ρ = {drho:.4}");

    let bundle = sld_solve(&rho, &drho, DEFAULT_SUPPORT_TOL).unwrap();
    println!("SLD L = {:.4}", bundle.l);
    println!("SLD equation residual: {:.3e}", sld_residual(&bundle));

    let q_direct = qfi(&scene, theta).unwrap();
    let q_curved = qfi_from_fidelity(&scene, theta, 1e-4).unwrap();
    println!("\nQFI from Tr(ρL²):          {q_direct:.9}");
    println!("QFI from fidelity curvature: {q_curved:.9}");

    let plan = build_sld(&scene, theta, DEFAULT_SUPPORT_TOL).unwrap();
    let c = cfi(&rho, &drho, &plan.r).unwrap();
    println!("CFI in the SLD eigenbasis:   {c:.9}");

    println!("\nacross the grid:");
    println!("{:>8} {:>12} {:>12} {:>12}", "θ", "qfi", "qfi_fid", "cfi_sld");
    for i in 0..8 {
        let t = 0.4 + i as f64 * 0.8;
        let q = qfi(&scene, t).unwrap();
        let qf = qfi_from_fidelity(&scene, t, 1e-4).unwrap();
        let plan = build_sld(&scene, t, DEFAULT_SUPPORT_TOL).unwrap();
        let rho = scene.density(t).unwrap();
        let drho = scene.density_derivative(t).unwrap();
        let c = cfi(&rho, &drho, &plan.r).unwrap();
        println!("{t:>8.2} {q:>12.8} {qf:>12.8} {c:>12.8}");
    }
}
