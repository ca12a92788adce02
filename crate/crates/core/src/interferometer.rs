//! Candidate interferometers for incoherent-imaging estimation.
//!
//! Three constructions are provided:
//!
//! * [`build_qr`] — the unitary from a QR factorization of `A`, which makes
//!   `RA` upper triangular. This only yields an optimal measurement when
//!   the rotated purifications come out diagonal (inversion-symmetric
//!   scenes); elsewhere it is demonstrably suboptimal.
//! * [`build_finite_shift`] — the corrected construction: `P = BA⁺` is the
//!   unique solution of `B = PA` on the shared support, it equals
//!   `(A⁺)†·diag(d)·A⁺` and is therefore Hermitian PSD, and diagonalizing
//!   `P = R†ΛR` gives an `R` with `RB = Λ·RA` row by row.
//! * [`build_sld`] — the δθ → 0 limit: the eigenbasis of the symmetric
//!   logarithmic derivative.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fisher::sld_solve;
use crate::matdecomp::{eigh_fixed, hermitian_residual, pinv, qr_positive, CMatrix};
use crate::purify::{local_consistency, overlap_decomp, purifications, PurificationPair};
use crate::scene::Scene;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlanMethod {
    QrBased,
    FiniteShift,
    SldLimit,
}

/// A measurement plan: unitary `r` whose rows are the detected output
/// modes, plus whatever the construction produced along the way.
#[derive(Debug, Clone)]
pub struct InterferometerPlan {
    pub r: CMatrix,
    pub method: PlanMethod,
    /// eigenvalues of `P` (finite-shift construction only)
    pub lambda: Option<Vec<f64>>,
    /// the Hermitian generator `P = BA⁺`
    pub p: Option<CMatrix>,
    /// the SLD `L` (SLD-limit construction only)
    pub sld: Option<CMatrix>,
    /// parameter shift the plan was built at
    pub delta: Option<f64>,
    /// max magnitude above the diagonal of `RB`: how far the QR plan is
    /// from the lower-triangular form the original recipe assumes
    pub rb_lower_residual: Option<f64>,
    /// Frobenius distance between the `BA⁺` and `(A⁺)†·diag(d)·A⁺` forms
    pub form_agreement: Option<f64>,
}

/// Interferometer from the QR route: `R = Q†` for `A = QT`, so `RA = T` is
/// upper triangular with nonnegative diagonal. Records how far `RB` is from
/// lower triangular; only in symmetric scenes does that residual vanish.
pub fn build_qr(pair: &PurificationPair) -> Result<InterferometerPlan> {
    let (q, _t) = qr_positive(&pair.a)?;
    let r = q.adjoint();
    let b_rot = &r * &pair.b;
    let mut residual = 0.0f64;
    for i in 0..b_rot.nrows() {
        for j in (i + 1)..b_rot.ncols() {
            residual = residual.max(b_rot[(i, j)].norm());
        }
    }
    Ok(InterferometerPlan {
        r,
        method: PlanMethod::QrBased,
        lambda: None,
        p: None,
        sld: None,
        delta: None,
        rb_lower_residual: Some(residual),
        form_agreement: None,
    })
}

/// Finite-shift plan from an explicit purification pair. The pair must be
/// locally consistent at `rtol`, otherwise `B = PA` has no solution and
/// [`Error::SupportMismatch`] is raised.
pub fn finite_shift_plan(
    pair: &PurificationPair,
    rtol: Option<f64>,
    delta: Option<f64>,
) -> Result<InterferometerPlan> {
    let report = local_consistency(pair, rtol)?;
    if !report.consistent {
        return Err(Error::SupportMismatch {
            rank_a: report.rank_a,
            rank_b: report.rank_b,
            max_angle: report
                .principal_angles
                .iter()
                .cloned()
                .fold(0.0f64, f64::max),
        });
    }

    let a_pinv = pinv(&pair.a, rtol)?;
    let p_raw = &pair.b * &a_pinv;
    let asym = hermitian_residual(&p_raw);
    let tol = 1e-6 * p_raw.norm().max(f64::MIN_POSITIVE);
    if asym > tol {
        return Err(Error::NotHermitian {
            context: "finite-shift generator P",
            residual: asym,
            tol,
        });
    }
    let p = (&p_raw + p_raw.adjoint()) * Complex64::new(0.5, 0.0);

    // second algebraic route: P = (A⁺)† diag(d) A⁺
    let mut d_mat = CMatrix::zeros(pair.d.len(), pair.d.len());
    for (i, &di) in pair.d.iter().enumerate() {
        d_mat[(i, i)] = Complex64::new(di, 0.0);
    }
    let p_alt = a_pinv.adjoint() * d_mat * &a_pinv;
    let form_agreement = (&p - &p_alt).norm();

    let (w, mut lambda) = eigh_fixed(&p)?;
    for l in &mut lambda {
        if *l < 0.0 && *l >= -1e-10 {
            *l = 0.0;
        }
    }
    Ok(InterferometerPlan {
        r: w.adjoint(),
        method: PlanMethod::FiniteShift,
        lambda: Some(lambda),
        p: Some(p),
        sld: None,
        delta,
        rb_lower_residual: None,
        form_agreement: Some(form_agreement),
    })
}

/// Builds the purification pair at `(θ, θ+δ)` and diagonalizes `P = BA⁺`.
pub fn build_finite_shift(
    scene: &Scene,
    theta: f64,
    delta: f64,
    rtol: Option<f64>,
) -> Result<InterferometerPlan> {
    if delta == 0.0 || !delta.is_finite() {
        return Err(Error::BadConfig(format!(
            "finite-shift delta must be finite and nonzero, got {delta}"
        )));
    }
    let decomp = overlap_decomp(scene, theta, theta + delta)?;
    let pair = purifications(&decomp, scene)?;
    finite_shift_plan(&pair, rtol, Some(delta))
}

/// Measurement in the eigenbasis of the symmetric logarithmic derivative,
/// the δθ → 0 limit of the finite-shift construction.
pub fn build_sld(scene: &Scene, theta: f64, support_tol: f64) -> Result<InterferometerPlan> {
    let rho = scene.density(theta)?;
    let drho = scene.density_derivative(theta)?;
    let bundle = sld_solve(&rho, &drho, support_tol)?;
    let (w, _) = eigh_fixed(&bundle.l)?;
    Ok(InterferometerPlan {
        r: w.adjoint(),
        method: PlanMethod::SldLimit,
        lambda: None,
        p: None,
        sld: Some(bundle.l),
        delta: None,
        rb_lower_residual: None,
        form_agreement: None,
    })
}

/// Saturation defect of a plan on a pair: the worst row residual of
/// `b′(v) = λ_v a′(v)`.
///
/// Plans carrying eigenvalues use them directly; otherwise the best
/// `λ_v ≥ 0` is fitted per row. Rows where both rotated purifications
/// vanish contribute nothing.
pub fn plan_residual(plan: &InterferometerPlan, pair: &PurificationPair) -> f64 {
    let a_rot = &plan.r * &pair.a;
    let b_rot = &plan.r * &pair.b;
    let mut worst = 0.0f64;
    for v in 0..a_rot.nrows() {
        let a_row = a_rot.row(v);
        let b_row = b_rot.row(v);
        let a_norm = a_row.norm();
        let b_norm = b_row.norm();
        if a_norm <= 1e-12 && b_norm <= 1e-12 {
            continue;
        }
        let lambda_v = match &plan.lambda {
            Some(l) => l[v].max(0.0),
            None => {
                if a_norm > 0.0 {
                    let mut inner = Complex64::new(0.0, 0.0);
                    for j in 0..a_row.ncols() {
                        inner += a_row[j].conj() * b_row[j];
                    }
                    (inner.re / (a_norm * a_norm)).max(0.0)
                } else {
                    0.0
                }
            }
        };
        let mut resid_sq = 0.0f64;
        for j in 0..a_row.ncols() {
            resid_sq += (b_row[j] - a_row[j] * lambda_v).norm_sqr();
        }
        worst = worst.max(resid_sq.sqrt());
    }
    worst
}
