//! Two independent fidelity routes: the nuclear norm of the overlap matrix
//! versus the Uhlmann form Tr|√ρ·√σ| through matrix square roots.
//!
//! ```bash
//! cargo run -p qlim --example fidelity_oracles
//! ```

use qlim::fisher::quantum_fidelity;
use qlim::oracle::uhlmann_fidelity;
use qlim::scene::Scene;

fn main() {
    let scene = Scene::shifted_pair();
    let theta = 1.0;
    println!(
        "{:>8} {:>18} {:>18} {:>12}",
        "θ'", "Σ d_v (overlap)", "Tr|√ρ√σ|", "difference"
    );
    let mut worst = 0.0f64;
    for i in 0..12 {
        let theta_prime = 0.2 + i as f64 * 0.5;
        let f_overlap = quantum_fidelity(&scene, theta, theta_prime).unwrap();
        let rho = scene.density(theta).unwrap();
        let sigma = scene.density(theta_prime).unwrap();
        let f_uhlmann = uhlmann_fidelity(&rho, &sigma).unwrap();
        let diff = (f_overlap - f_uhlmann).abs();
        worst = worst.max(diff);
        println!("{theta_prime:>8.2} {f_overlap:>18.12} {f_uhlmann:>18.12} {diff:>12.2e}");
    }
    println!("\nworst disagreement: {worst:.2e}");
}
