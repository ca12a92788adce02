//! Independent brute-force baselines.
//!
//! Nothing here is needed to *run* the constructions; these routines audit
//! them. Random-unitary search certifies that no measurement in a large
//! seeded sample beats the constructed plans, and the Uhlmann route
//! `Tr|√ρ·√σ|` checks the overlap-SVD fidelity through matrix square
//! roots instead.

use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::fisher::cfi;
use crate::interferometer::{build_qr, build_sld};
use crate::matdecomp::{hermitian_residual, qr_positive, sqrtm_psd, svd_fixed, CMatrix};
use crate::purify::{overlap_decomp, purifications};
use crate::scene::Scene;

/// PRNG identifier recorded in search results: all randomness comes from
/// ChaCha8 streams, with per-sample seeds derived by splitmix64.
pub const GENERATOR: &str = "chacha8+splitmix64";

/// Outcome of a random-measurement search.
#[derive(Debug, Clone)]
pub struct SearchResult {
    pub best_cfi: f64,
    pub best_r: CMatrix,
    pub samples: usize,
    pub seed: u64,
    pub generator: &'static str,
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic per-sample seed, independent of how samples are
/// partitioned across workers.
pub fn sample_seed(seed: u64, index: u64) -> u64 {
    splitmix64(seed ^ (index.wrapping_add(1)).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Haar-distributed unitary: QR of a complex Ginibre matrix with the
/// positive-diagonal correction folded in by [`qr_positive`].
pub fn haar_unitary(n: usize, seed: u64) -> Result<CMatrix> {
    if n == 0 {
        return Err(Error::BadConfig("haar_unitary needs n >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = CMatrix::from_fn(n, n, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let (q, _) = qr_positive(&g)?;
    Ok(q)
}

/// Evaluates the photon-counting CFI over `n_samples` Haar unitaries plus
/// the identity and both constructed plans, returning the best.
pub fn random_search_cfi(
    scene: &Scene,
    theta: f64,
    n_samples: usize,
    seed: u64,
) -> Result<SearchResult> {
    if n_samples == 0 {
        return Err(Error::BadConfig("random_search_cfi needs n_samples >= 1".into()));
    }
    let rho = scene.density(theta)?;
    let drho = scene.density_derivative(theta)?;
    let dim = rho.nrows();

    let mut candidates: Vec<CMatrix> = vec![CMatrix::identity(dim, dim)];
    candidates.push(build_sld(scene, theta, crate::fisher::DEFAULT_SUPPORT_TOL)?.r);
    if scene.num_collectors() >= scene.num_sources() {
        let decomp = overlap_decomp(scene, theta, theta + 1e-5)?;
        let pair = purifications(&decomp, scene)?;
        candidates.push(build_qr(&pair)?.r);
    }

    let mut best_cfi = f64::NEG_INFINITY;
    let mut best_r = CMatrix::identity(dim, dim);
    let mut consider = |r: CMatrix| -> Result<()> {
        let value = cfi(&rho, &drho, &r)?;
        if value > best_cfi {
            best_cfi = value;
            best_r = r;
        }
        Ok(())
    };
    for r in candidates {
        consider(r)?;
    }
    for index in 0..n_samples {
        let r = haar_unitary(dim, sample_seed(seed, index as u64))?;
        consider(r)?;
    }
    Ok(SearchResult {
        best_cfi,
        best_r,
        samples: n_samples,
        seed,
        generator: GENERATOR,
    })
}

/// Root fidelity `Tr|√ρ·√σ|` through matrix square roots; the independent
/// check of the overlap-SVD route.
pub fn uhlmann_fidelity(rho: &CMatrix, sigma: &CMatrix) -> Result<f64> {
    for (m, ctx) in [(rho, "uhlmann_fidelity rho"), (sigma, "uhlmann_fidelity sigma")] {
        let tol = 1e-8 * m.norm().max(1.0);
        let residual = hermitian_residual(m);
        if residual > tol {
            return Err(Error::NotHermitian {
                context: ctx,
                residual,
                tol,
            });
        }
        let trace: f64 = (0..m.nrows()).map(|i| m[(i, i)].re).sum();
        if trace > 1.0 + 1e-10 {
            return Err(Error::BadConfig(format!(
                "{ctx}: trace {trace} exceeds 1 + 1e-10"
            )));
        }
    }
    let root_rho = sqrtm_psd(rho)?;
    let root_sigma = sqrtm_psd(sigma)?;
    let product = root_rho * root_sigma;
    Ok(svd_fixed(&product)?.sigma.iter().sum())
}
