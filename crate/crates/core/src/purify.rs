//! Overlap matrix between two parameter values and the canonical
//! purification pair built from its SVD.
//!
//! With `M = C(θ)†C(θ′) = U diag(d) V†`, the purifications `A = C(θ)U` and
//! `B = C(θ′)V` satisfy `A†B = diag(d)` with `d ≥ 0`, so the quantum
//! fidelity between the two states is simply `Σ d_v`. The SVD phase
//! conventions of [`crate::matdecomp`] pin the gauge the construction
//! leaves free.

use crate::error::{Error, Result};
use crate::matdecomp::{default_rtol, svd_fixed, CMatrix, SvdResult};
use crate::scene::Scene;
use num_complex::Complex64;

/// `M = C(θ)†C(θ′)` and its fixed-convention SVD.
#[derive(Debug, Clone)]
pub struct OverlapDecomp {
    pub theta: f64,
    pub theta_prime: f64,
    pub m: CMatrix,
    pub svd: SvdResult,
}

/// Purification matrices with `A†B = diag(d)`, `AA† = ρ(θ)`,
/// `BB† = ρ(θ′)`.
#[derive(Debug, Clone)]
pub struct PurificationPair {
    pub a: CMatrix,
    pub b: CMatrix,
    pub d: Vec<f64>,
}

/// Column-space comparison of the two purifications.
#[derive(Debug, Clone)]
pub struct ConsistencyReport {
    /// true iff ranks agree and the largest principal angle is ≤ 1e-6 rad
    pub consistent: bool,
    /// principal angles (radians) between the column spaces
    pub principal_angles: Vec<f64>,
    /// largest off-diagonal magnitude of the rotated Gram matrices A†A, B†B;
    /// vanishes exactly when the overlap SVD diagonalizes both Grams
    pub gram_offdiag: f64,
    pub rank_a: usize,
    pub rank_b: usize,
}

/// Builds the overlap matrix between `θ` and `θ′` and decomposes it.
pub fn overlap_decomp(scene: &Scene, theta: f64, theta_prime: f64) -> Result<OverlapDecomp> {
    let c = scene.transfer_matrix(theta)?.c;
    let c_prime = scene.transfer_matrix(theta_prime)?.c;
    let m = c.adjoint() * &c_prime;
    let svd = svd_fixed(&m)?;
    Ok(OverlapDecomp {
        theta,
        theta_prime,
        m,
        svd,
    })
}

/// Canonical purification pair `A = C(θ)U`, `B = C(θ′)V`.
pub fn purifications(decomp: &OverlapDecomp, scene: &Scene) -> Result<PurificationPair> {
    let c = scene.transfer_matrix(decomp.theta)?.c;
    let c_prime = scene.transfer_matrix(decomp.theta_prime)?.c;
    let a = &c * &decomp.svd.u;
    let b = &c_prime * &decomp.svd.v;
    let d = decomp.svd.sigma.clone();

    // construction identity A†B = diag(d)
    let mut gauge = a.adjoint() * &b;
    for (i, &di) in d.iter().enumerate() {
        gauge[(i, i)] -= Complex64::new(di, 0.0);
    }
    let residual = gauge.norm();
    if residual > 1e-9 {
        return Err(Error::GaugeResidual {
            residual,
            tol: 1e-9,
        });
    }
    Ok(PurificationPair { a, b, d })
}

/// Rank of a matrix at the given relative singular-value cutoff, together
/// with an orthonormal basis for its column space.
fn column_space(m: &CMatrix, rtol: f64) -> Result<(usize, CMatrix)> {
    let svd = svd_fixed(m)?;
    let sigma_max = svd.sigma.first().copied().unwrap_or(0.0);
    let cutoff = rtol * sigma_max;
    let rank = svd.sigma.iter().filter(|&&s| s > cutoff && s > 0.0).count();
    let mut basis = CMatrix::zeros(m.nrows(), rank);
    for j in 0..rank {
        basis.set_column(j, &svd.u.column(j));
    }
    Ok((rank, basis))
}

/// Compares the column spaces of `A` and `B` and reports the Gram
/// off-diagonal diagnostic. Never fails; callers that need matching
/// supports act on `consistent`.
pub fn local_consistency(pair: &PurificationPair, rtol: Option<f64>) -> Result<ConsistencyReport> {
    let rtol = rtol.unwrap_or_else(|| default_rtol(&pair.a));
    let (rank_a, basis_a) = column_space(&pair.a, rtol)?;
    let (rank_b, basis_b) = column_space(&pair.b, rtol)?;

    let mut principal_angles = Vec::new();
    if rank_a > 0 && rank_b > 0 {
        let overlap = basis_a.adjoint() * &basis_b;
        let cosines = svd_fixed(&overlap)?.sigma;
        principal_angles = cosines
            .iter()
            .map(|&c| c.clamp(-1.0, 1.0).acos())
            .collect();
    }
    let max_angle = principal_angles.iter().cloned().fold(0.0f64, f64::max);
    let consistent = rank_a == rank_b && max_angle <= 1e-6;

    let mut gram_offdiag = 0.0f64;
    for g in [pair.a.adjoint() * &pair.a, pair.b.adjoint() * &pair.b] {
        for i in 0..g.nrows() {
            for j in 0..g.ncols() {
                if i != j {
                    gram_offdiag = gram_offdiag.max(g[(i, j)].norm());
                }
            }
        }
    }

    Ok(ConsistencyReport {
        consistent,
        principal_angles,
        gram_offdiag,
        rank_a,
        rank_b,
    })
}
