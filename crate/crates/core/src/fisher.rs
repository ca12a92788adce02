//! Quantum and classical fidelities and Fisher information.
//!
//! The classical fidelity of photon counting behind an interferometer `R`
//! is the row-norm sum `f^c = Σ_v ‖a′(v)‖·‖b′(v)‖` over the rotated
//! purifications `A′ = RA`, `B′ = RB`; it never drops below the quantum
//! fidelity `f = Σ_v d_v`. The diagonal-product sum `Σ_v |a′(v,v)|·|b′(v,v)|`
//! is kept as a diagnostic only: it is *not* a valid simplification of the
//! row-norm sum unless both matrices are diagonal, which is the root of the
//! suboptimality this crate demonstrates.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::interferometer::{build_qr, build_sld};
use crate::matdecomp::{eigh_fixed, hermitian_residual, unitarity_residual, CMatrix};
use crate::purify::{local_consistency, overlap_decomp, purifications, PurificationPair};
use crate::scene::Scene;

/// Default floor on `λ_i + λ_j` below which SLD matrix elements are set to
/// zero (the state has no support there).
pub const DEFAULT_SUPPORT_TOL: f64 = 1e-12;

/// Probability floor for photon-counting outcomes. Below it an outcome is
/// treated as unpopulated; a nonvanishing derivative there is an error, not
/// a zero contribution.
pub const PROB_FLOOR: f64 = 1e-12;

/// State, derivative and the symmetric logarithmic derivative solving
/// `∂ρ = ½(Lρ + ρL)` on the support of `ρ`.
#[derive(Debug, Clone)]
pub struct SldBundle {
    pub rho: CMatrix,
    pub drho: CMatrix,
    pub l: CMatrix,
    pub support_tol: f64,
}

fn require_hermitian(m: &CMatrix, context: &'static str) -> Result<CMatrix> {
    let tol = 1e-8 * m.norm().max(1.0);
    let residual = hermitian_residual(m);
    if residual > tol {
        return Err(Error::NotHermitian {
            context,
            residual,
            tol,
        });
    }
    Ok((m + m.adjoint()) * Complex64::new(0.5, 0.0))
}

fn require_unitary(r: &CMatrix, context: &'static str) -> Result<()> {
    if r.nrows() != r.ncols() {
        return Err(Error::NotSquare {
            context,
            rows: r.nrows(),
            cols: r.ncols(),
        });
    }
    let residual = unitarity_residual(r);
    if residual > 1e-8 {
        return Err(Error::NotUnitary {
            context,
            residual,
            tol: 1e-8,
        });
    }
    Ok(())
}

/// Solves the SLD equation in the eigenbasis of `ρ`:
/// `L_ij = 2(∂ρ)_ij / (λ_i + λ_j)` wherever `λ_i + λ_j > support_tol`.
///
/// Weight of `∂ρ` on the null-null block (where the equation has no
/// solution) above 1e-8 is reported as [`Error::SupportLeak`].
pub fn sld_solve(rho: &CMatrix, drho: &CMatrix, support_tol: f64) -> Result<SldBundle> {
    let rho = require_hermitian(rho, "sld_solve rho")?;
    let drho = require_hermitian(drho, "sld_solve drho")?;
    let (w, lam) = eigh_fixed(&rho)?;
    let n = lam.len();

    let drho_eig = w.adjoint() * &drho * &w;
    let mut l_eig = CMatrix::zeros(n, n);
    let mut leak_sq = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let denom = lam[i] + lam[j];
            if denom > support_tol {
                l_eig[(i, j)] = drho_eig[(i, j)] * Complex64::new(2.0 / denom, 0.0);
            } else {
                leak_sq += drho_eig[(i, j)].norm_sqr();
            }
        }
    }
    let leak = leak_sq.sqrt();
    if leak > 1e-8 {
        return Err(Error::SupportLeak { leak });
    }
    let l_eig = (&l_eig + l_eig.adjoint()) * Complex64::new(0.5, 0.0);
    let l = &w * l_eig * w.adjoint();
    let l = (&l + l.adjoint()) * Complex64::new(0.5, 0.0);
    Ok(SldBundle {
        rho,
        drho,
        l,
        support_tol,
    })
}

/// Residual `‖∂ρ − ½(Lρ + ρL)‖_F` of a bundle, restricted to the support
/// (the dropped null-null block is excluded).
pub fn sld_residual(bundle: &SldBundle) -> f64 {
    let half = Complex64::new(0.5, 0.0);
    let recon = (&bundle.l * &bundle.rho + &bundle.rho * &bundle.l) * half;
    let diff = &bundle.drho - recon;
    // project out the null-null block
    let (w, lam) = match eigh_fixed(&bundle.rho) {
        Ok(x) => x,
        Err(_) => return diff.norm(),
    };
    let diff_eig = w.adjoint() * diff * &w;
    let mut total = 0.0f64;
    for i in 0..lam.len() {
        for j in 0..lam.len() {
            if lam[i] + lam[j] > bundle.support_tol {
                total += diff_eig[(i, j)].norm_sqr();
            }
        }
    }
    total.sqrt()
}

/// Quantum fidelity `f = Σ d_v`, the nuclear norm of `C(θ)†C(θ′)`.
pub fn quantum_fidelity(scene: &Scene, theta: f64, theta_prime: f64) -> Result<f64> {
    let decomp = overlap_decomp(scene, theta, theta_prime)?;
    Ok(decomp.svd.sigma.iter().sum())
}

/// Classical fidelity of photon counting behind `r`: the row-norm sum
/// `Σ_v ‖a′(v)‖·‖b′(v)‖` with `A′ = RA`, `B′ = RB`.
pub fn classical_fidelity(pair: &PurificationPair, r: &CMatrix) -> Result<f64> {
    require_unitary(r, "classical_fidelity")?;
    if r.ncols() != pair.a.nrows() {
        return Err(Error::ShapeMismatch {
            context: "classical_fidelity",
            lhs: format!("{}x{}", r.nrows(), r.ncols()),
            rhs: format!("{}x{}", pair.a.nrows(), pair.a.ncols()),
        });
    }
    let a_rot = r * &pair.a;
    let b_rot = r * &pair.b;
    let mut total = 0.0f64;
    for v in 0..a_rot.nrows() {
        total += a_rot.row(v).norm() * b_rot.row(v).norm();
    }
    Ok(total)
}

/// The diagonal-product sum `Σ_v |a′(v,v)|·|b′(v,v)|`.
///
/// This is the *invalid* simplification of the row-norm sum: for triangular
/// matrices `‖a′(v)‖ ≥ |a′(v,v)|` per row, with equality only when both
/// matrices are diagonal. Exposed as a diagnostic of how far a triangular
/// pair is from the diagonal case.
pub fn diagonal_fidelity(a_rot: &CMatrix, b_rot: &CMatrix) -> Result<f64> {
    for (m, ctx) in [(a_rot, "diagonal_fidelity a"), (b_rot, "diagonal_fidelity b")] {
        if m.nrows() != m.ncols() {
            return Err(Error::NotSquare {
                context: ctx,
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
    }
    if a_rot.nrows() != b_rot.nrows() {
        return Err(Error::ShapeMismatch {
            context: "diagonal_fidelity",
            lhs: format!("{}", a_rot.nrows()),
            rhs: format!("{}", b_rot.nrows()),
        });
    }
    let mut total = 0.0f64;
    for v in 0..a_rot.nrows() {
        total += a_rot[(v, v)].norm() * b_rot[(v, v)].norm();
    }
    Ok(total)
}

/// Quantum Fisher information `Tr(ρ L²)` from the analytic state family.
pub fn qfi(scene: &Scene, theta: f64) -> Result<f64> {
    let rho = scene.density(theta)?;
    let drho = scene.density_derivative(theta)?;
    qfi_from_state(&rho, &drho, DEFAULT_SUPPORT_TOL)
}

/// QFI of an explicitly given `(ρ, ∂ρ)` pair.
pub fn qfi_from_state(rho: &CMatrix, drho: &CMatrix, support_tol: f64) -> Result<f64> {
    let bundle = sld_solve(rho, drho, support_tol)?;
    let value = (&bundle.rho * &bundle.l * &bundle.l).trace().re;
    Ok(value.max(0.0))
}

/// Independent QFI route through the fidelity curvature:
/// `8·(1 − f(θ−δ/2, θ+δ/2))/δ²`, with an O(δ²) bias.
pub fn qfi_from_fidelity(scene: &Scene, theta: f64, delta: f64) -> Result<f64> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::BadConfig(format!(
            "qfi_from_fidelity delta must be finite and > 0, got {delta}"
        )));
    }
    let f = quantum_fidelity(scene, theta - delta / 2.0, theta + delta / 2.0)?;
    Ok(8.0 * (1.0 - f) / (delta * delta))
}

/// Classical Fisher information of photon counting behind `r`:
/// `Σ_v (dp_v)²/p_v` over outcomes `p_v = (RρR†)_vv`.
///
/// Outcomes below [`PROB_FLOOR`] are skipped; if such an outcome still has
/// `|dp_v| > 1e-9` the contribution diverges and [`Error::SingularOutcome`]
/// is raised.
pub fn cfi(rho: &CMatrix, drho: &CMatrix, r: &CMatrix) -> Result<f64> {
    let rho = require_hermitian(rho, "cfi rho")?;
    let drho = require_hermitian(drho, "cfi drho")?;
    require_unitary(r, "cfi")?;
    let p_mat = r * &rho * r.adjoint();
    let dp_mat = r * &drho * r.adjoint();
    let mut total = 0.0f64;
    for v in 0..p_mat.nrows() {
        let p = p_mat[(v, v)].re;
        let dp = dp_mat[(v, v)].re;
        if p > PROB_FLOOR {
            total += dp * dp / p;
        } else if dp.abs() > 1e-9 {
            return Err(Error::SingularOutcome {
                index: v,
                prob: p,
                dprob: dp,
            });
        }
    }
    Ok(total)
}

/// Settings for [`fisher_report`].
#[derive(Debug, Clone)]
pub struct ReportSettings {
    /// parameter shift used for the purification pair and the QR plan
    pub delta: f64,
    /// rank tolerance passed to pseudoinverse/consistency checks
    pub rtol: Option<f64>,
    /// SLD support floor
    pub support_tol: f64,
    /// stencil width for the fidelity-curvature QFI route
    pub fid_delta: f64,
    /// replace the analytic ∂ρ by a central finite difference (cross-check
    /// mode)
    pub fd_derivative: bool,
}

impl Default for ReportSettings {
    fn default() -> Self {
        ReportSettings {
            delta: 1e-5,
            rtol: None,
            support_tol: DEFAULT_SUPPORT_TOL,
            fid_delta: 1e-4,
            fd_derivative: false,
        }
    }
}

/// Diagnostics carried by a [`FisherReport`].
#[derive(Debug, Clone, Default)]
pub struct ReportDiagnostics {
    /// SLD equation residual on the support
    pub sld_residual: Option<f64>,
    /// largest magnitude above the diagonal of `RB` for the QR plan
    pub qr_lower_residual: Option<f64>,
    /// Gram off-diagonal diagnostic of the purification pair
    pub gram_offdiag: Option<f64>,
}

/// Per-point summary of every fidelity and Fisher quantity. Failed fields
/// hold NaN and are listed in `status` instead of aborting the whole scan.
#[derive(Debug, Clone)]
pub struct FisherReport {
    pub theta: f64,
    pub qfi: f64,
    pub qfi_fid: f64,
    pub cfi_opt: f64,
    pub cfi_qr: f64,
    pub f_quantum: f64,
    pub f_classical_opt: f64,
    pub f_classical_qr: f64,
    pub residuals: ReportDiagnostics,
    /// (field, error) pairs for every entry that could not be computed
    pub status: Vec<(&'static str, String)>,
}

impl FisherReport {
    pub fn is_clean(&self) -> bool {
        self.status.is_empty()
    }
}

/// Assembles QFI (both routes), the CFI of the SLD-basis and QR-basis
/// measurements, and the quantum/classical fidelities at `(θ, θ+δ)`.
pub fn fisher_report(scene: &Scene, theta: f64, settings: &ReportSettings) -> Result<FisherReport> {
    let mut status: Vec<(&'static str, String)> = Vec::new();
    let mut residuals = ReportDiagnostics::default();

    let rho = scene.density(theta)?;
    let drho = if settings.fd_derivative {
        let h = settings.delta;
        (scene.density(theta + h)? - scene.density(theta - h)?) / Complex64::new(2.0 * h, 0.0)
    } else {
        scene.density_derivative(theta)?
    };

    let qfi_val = match sld_solve(&rho, &drho, settings.support_tol) {
        Ok(bundle) => {
            residuals.sld_residual = Some(sld_residual(&bundle));
            (&bundle.rho * &bundle.l * &bundle.l).trace().re.max(0.0)
        }
        Err(e) => {
            status.push(("qfi", e.kind().to_string()));
            f64::NAN
        }
    };

    let qfi_fid_val = match qfi_from_fidelity(scene, theta, settings.fid_delta) {
        Ok(v) => v,
        Err(e) => {
            status.push(("qfi_fid", e.kind().to_string()));
            f64::NAN
        }
    };

    // measurement from the corrected construction (SLD eigenbasis)
    let plan_opt = build_sld(scene, theta, settings.support_tol);
    let cfi_opt_val = match &plan_opt {
        Ok(plan) => match cfi(&rho, &drho, &plan.r) {
            Ok(v) => v,
            Err(e) => {
                status.push(("cfi_opt", e.kind().to_string()));
                f64::NAN
            }
        },
        Err(e) => {
            status.push(("cfi_opt", e.kind().to_string()));
            f64::NAN
        }
    };

    // purification pair at (θ, θ+δ) for the fidelity columns and the QR plan
    let pair = overlap_decomp(scene, theta, theta + settings.delta)
        .and_then(|d| purifications(&d, scene));
    let (mut f_quantum, mut f_cl_opt, mut f_cl_qr, mut cfi_qr_val) =
        (f64::NAN, f64::NAN, f64::NAN, f64::NAN);
    match &pair {
        Ok(pair) => {
            f_quantum = pair.d.iter().sum();
            if let Ok(report) = local_consistency(pair, settings.rtol) {
                residuals.gram_offdiag = Some(report.gram_offdiag);
            }
            if let Ok(plan) = &plan_opt {
                match classical_fidelity(pair, &plan.r) {
                    Ok(v) => f_cl_opt = v,
                    Err(e) => status.push(("f_classical_opt", e.kind().to_string())),
                }
            }
            match build_qr(pair) {
                Ok(plan) => {
                    residuals.qr_lower_residual = plan.rb_lower_residual;
                    match cfi(&rho, &drho, &plan.r) {
                        Ok(v) => cfi_qr_val = v,
                        Err(e) => status.push(("cfi_qr", e.kind().to_string())),
                    }
                    match classical_fidelity(pair, &plan.r) {
                        Ok(v) => f_cl_qr = v,
                        Err(e) => status.push(("f_classical_qr", e.kind().to_string())),
                    }
                }
                Err(e) => {
                    status.push(("cfi_qr", e.kind().to_string()));
                    status.push(("f_classical_qr", e.kind().to_string()));
                }
            }
        }
        Err(e) => {
            status.push(("f_quantum", e.kind().to_string()));
            status.push(("f_classical_opt", e.kind().to_string()));
            status.push(("f_classical_qr", e.kind().to_string()));
            status.push(("cfi_qr", e.kind().to_string()));
        }
    }

    // report-level invariants: CFI never exceeds QFI, classical fidelity
    // never drops below quantum
    if qfi_val.is_finite() {
        for (name, v) in [("cfi_opt", cfi_opt_val), ("cfi_qr", cfi_qr_val)] {
            if v.is_finite() && v > qfi_val + 1e-6 {
                status.push((name, "InvariantViolation".to_string()));
            }
        }
    }
    if f_quantum.is_finite() {
        for (name, v) in [
            ("f_classical_opt", f_cl_opt),
            ("f_classical_qr", f_cl_qr),
        ] {
            if v.is_finite() && v < f_quantum - 1e-10 {
                status.push((name, "InvariantViolation".to_string()));
            }
        }
    }

    Ok(FisherReport {
        theta,
        qfi: qfi_val,
        qfi_fid: qfi_fid_val,
        cfi_opt: cfi_opt_val,
        cfi_qr: cfi_qr_val,
        f_quantum,
        f_classical_opt: f_cl_opt,
        f_classical_qr: f_cl_qr,
        residuals,
        status,
    })
}
