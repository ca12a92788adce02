//! Build the corrected interferometer from P = B·A⁺ and verify its
//! defining identities at a single working point.
//!
//! ```bash
//! cargo run -p qlim --example optimal_interferometer
//! ```

use num_complex::Complex64;
use qlim::fisher::{cfi, qfi};
use qlim::interferometer::{build_finite_shift, plan_residual};
use qlim::matdecomp::{hermitian_residual, unitarity_residual, CMatrix};
use qlim::purify::{overlap_decomp, purifications};
use qlim::scene::Scene;

fn main() {
    let scene = Scene::shifted_pair();
    let theta = 2.0;
    let delta = 1e-5;

    let plan = build_finite_shift(&scene, theta, delta, None).unwrap();
    let decomp = overlap_decomp(&scene, theta, theta + delta).unwrap();
    let pair = purifications(&decomp, &scene).unwrap();

    let p = plan.p.as_ref().unwrap();
    let lambda = plan.lambda.as_ref().unwrap();
    println!("generator P = B·A⁺ at theta = {theta}, delta = {delta:e}");
    println!("{p:.6}");
    println!("eigenvalues Λ = {lambda:?}");
    println!("Hermiticity residual of P:   {:.3e}", hermitian_residual(p));
    println!("two-form agreement:          {:.3e}", plan.form_agreement.unwrap());
    println!("unitarity of R:              {:.3e}", unitarity_residual(&plan.r));

    let mut lam_m = CMatrix::zeros(lambda.len(), lambda.len());
    for (i, &l) in lambda.iter().enumerate() {
        lam_m[(i, i)] = Complex64::new(l, 0.0);
    }
    let identity_residual = (&plan.r * &pair.b - lam_m * &plan.r * &pair.a).norm();
    println!("‖RB − Λ·RA‖_F:               {identity_residual:.3e}");
    println!("row saturation defect:       {:.3e}", plan_residual(&plan, &pair));

    let rho = scene.density(theta).unwrap();
    let drho = scene.density_derivative(theta).unwrap();
    let q = qfi(&scene, theta).unwrap();
    let c = cfi(&rho, &drho, &plan.r).unwrap();
    println!("\nQFI = {q:.9}");
    println!("CFI behind this R = {c:.9}  (deficit {:.2e})", q - c);
}
