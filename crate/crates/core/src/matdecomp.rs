//! Deterministic dense complex-matrix decompositions.
//!
//! Every factorization here fixes the gauge freedom the underlying algebra
//! leaves open: eigenvalues and singular values are sorted descending, and
//! each returned eigen/singular vector is phased so its largest-magnitude
//! entry is real and nonnegative (ties broken by lowest row index). QR
//! forces a real nonnegative diagonal on the triangular factor. Identical
//! inputs therefore yield bit-identical outputs, and downstream CSV
//! artifacts are diffable.
//!
//! The decompositions are Householder QR, cyclic Jacobi for Hermitian
//! eigenproblems and one-sided Jacobi for the SVD. Jacobi is slow for large
//! matrices but this crate never exceeds dimension ~64, and it delivers
//! high relative accuracy even for vanishing singular values, which the
//! fidelity sums downstream depend on.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense complex matrix in row-major semantics.
pub type CMatrix = DMatrix<Complex64>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Singular value decomposition `m = u · diag(sigma) · v†` with full square
/// `u` and `v` and `sigma` sorted descending.
#[derive(Debug, Clone)]
pub struct SvdResult {
    pub u: CMatrix,
    pub sigma: Vec<f64>,
    pub v: CMatrix,
}

/// Rejects matrices containing NaN or Inf entries.
pub fn ensure_finite(m: &CMatrix, context: &'static str) -> Result<()> {
    if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite { context })
    }
}

/// Frobenius norm of the anti-Hermitian part, `‖h − h†‖_F`.
pub fn hermitian_residual(h: &CMatrix) -> f64 {
    (h - h.adjoint()).norm()
}

/// Frobenius norm of `r†r − I`.
pub fn unitarity_residual(r: &CMatrix) -> f64 {
    let n = r.ncols();
    (r.adjoint() * r - CMatrix::identity(n, n)).norm()
}

/// Default rank tolerance for `pinv`: `max(rows, cols) · machine epsilon`.
pub fn default_rtol(m: &CMatrix) -> f64 {
    m.nrows().max(m.ncols()) as f64 * f64::EPSILON
}

fn check_hermitian(h: &CMatrix, context: &'static str) -> Result<()> {
    if h.nrows() != h.ncols() {
        return Err(Error::NotSquare {
            context,
            rows: h.nrows(),
            cols: h.ncols(),
        });
    }
    let tol = 1e-10 * h.norm().max(1.0);
    let residual = hermitian_residual(h);
    if residual > tol {
        return Err(Error::NotHermitian {
            context,
            residual,
            tol,
        });
    }
    Ok(())
}

/// Phases column `k` of `m` so its largest-magnitude entry (lowest row index
/// on ties) is real and nonnegative. Returns the factor that was applied.
fn phase_fix_column(m: &mut CMatrix, k: usize) -> Complex64 {
    let mut anchor = 0;
    let mut best = 0.0f64;
    for i in 0..m.nrows() {
        let mag = m[(i, k)].norm();
        if mag > best {
            best = mag;
            anchor = i;
        }
    }
    if best == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    let factor = (m[(anchor, k)] / best).conj();
    for i in 0..m.nrows() {
        m[(i, k)] *= factor;
    }
    // the anchor is now exactly real
    m[(anchor, k)] = Complex64::new(m[(anchor, k)].re.abs(), 0.0);
    factor
}

fn scale_column(m: &mut CMatrix, k: usize, factor: Complex64) {
    for i in 0..m.nrows() {
        m[(i, k)] *= factor;
    }
}

/// Stable descending sort; returns the column permutation.
fn descending_order(vals: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..vals.len()).collect();
    idx.sort_by(|&i, &j| {
        vals[j]
            .partial_cmp(&vals[i])
            .expect("finite values")
            .then(i.cmp(&j))
    });
    idx
}

fn permute_columns(m: &CMatrix, order: &[usize]) -> CMatrix {
    let mut out = CMatrix::zeros(m.nrows(), order.len());
    for (new, &old) in order.iter().enumerate() {
        out.set_column(new, &m.column(old));
    }
    out
}

/// QR factorization `a = q·t` with square unitary `q` and upper-triangular
/// `t` whose diagonal is real and nonnegative.
///
/// Requires rows ≥ cols so that `q` spans all output modes.
pub fn qr_positive(a: &CMatrix) -> Result<(CMatrix, CMatrix)> {
    ensure_finite(a, "qr_positive")?;
    let (m, n) = (a.nrows(), a.ncols());
    if m < n {
        return Err(Error::ShapeMismatch {
            context: "qr_positive requires rows >= cols",
            lhs: format!("{m}x{n}"),
            rhs: format!(">= {n} rows"),
        });
    }
    let mut t = a.clone();
    let mut q = CMatrix::identity(m, m);

    for k in 0..n {
        // Householder reflector zeroing t[k+1.., k]
        let mut norm_sq = 0.0f64;
        for i in k..m {
            norm_sq += t[(i, k)].norm_sqr();
        }
        if norm_sq == 0.0 {
            continue;
        }
        let norm = norm_sq.sqrt();
        let alpha = t[(k, k)];
        let alpha_mag = alpha.norm();
        let phase = if alpha_mag > 0.0 {
            alpha / alpha_mag
        } else {
            Complex64::new(1.0, 0.0)
        };
        let beta = -phase * norm;
        // v = x - beta*e1; gamma = v†x is real and never cancels
        let mut v = vec![ZERO; m - k];
        v[0] = alpha - beta;
        for i in (k + 1)..m {
            v[i - k] = t[(i, k)];
        }
        let gamma = norm_sq + norm * alpha_mag;

        // t[k.., j] -= v * (v† t[k.., j]) / gamma
        for j in k..n {
            let mut w = ZERO;
            for i in k..m {
                w += v[i - k].conj() * t[(i, j)];
            }
            w /= gamma;
            for i in k..m {
                t[(i, j)] -= v[i - k] * w;
            }
        }
        t[(k, k)] = beta;
        for i in (k + 1)..m {
            t[(i, k)] = ZERO;
        }

        // q ← q·H
        for i in 0..m {
            let mut w = ZERO;
            for j in k..m {
                w += q[(i, j)] * v[j - k];
            }
            w /= gamma;
            for j in k..m {
                q[(i, j)] -= w * v[j - k].conj();
            }
        }
    }

    // rotate phases so every t[k,k] is real nonnegative
    for k in 0..n {
        let d = t[(k, k)];
        let mag = d.norm();
        if mag > 0.0 {
            let ph = d / mag;
            let ph_conj = ph.conj();
            for j in k..n {
                t[(k, j)] *= ph_conj;
            }
            t[(k, k)] = Complex64::new(mag, 0.0);
            scale_column(&mut q, k, ph);
        }
    }
    Ok((q, t))
}

/// Jacobi rotation parameters diagonalizing the real symmetric block
/// [[a, g], [g, b]] with g > 0.
fn jacobi_cs(a: f64, b: f64, g: f64) -> (f64, f64) {
    let tau = (b - a) / (2.0 * g);
    let t = if tau >= 0.0 {
        1.0 / (tau + (1.0 + tau * tau).sqrt())
    } else {
        1.0 / (tau - (1.0 + tau * tau).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    (c, t * c)
}

/// Eigendecomposition of a Hermitian matrix, `h = w · diag(lam) · w†`, with
/// eigenvalues sorted descending and phase-fixed eigenvector columns.
pub fn eigh_fixed(h: &CMatrix) -> Result<(CMatrix, Vec<f64>)> {
    ensure_finite(h, "eigh_fixed")?;
    check_hermitian(h, "eigh_fixed")?;
    let n = h.nrows();
    // work on the exactly Hermitian average
    let mut a = (h + h.adjoint()) * Complex64::new(0.5, 0.0);
    let mut w = CMatrix::identity(n, n);
    let scale = a.norm();
    let skip = (1e-18 * scale).max(1e-290);
    let done = |a: &CMatrix| -> bool {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in 0..n {
                if p != q {
                    off += a[(p, q)].norm_sqr();
                }
            }
        }
        off.sqrt() <= 1e-14 * scale
    };

    for _sweep in 0..64 {
        if done(&a) {
            break;
        }
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                let g = a[(p, q)];
                let gmag = g.norm();
                if gmag <= skip {
                    continue;
                }
                let phase = g / gmag; // e^{i φ}
                let (c, s) = jacobi_cs(a[(p, p)].re, a[(q, q)].re, gmag);
                // J = [[c, s], [-s e^{-iφ}, c e^{-iφ}]]
                let jqp = -phase.conj() * s;
                let jqq = phase.conj() * c;
                let (jpp, jpq) = (Complex64::new(c, 0.0), Complex64::new(s, 0.0));

                // columns: a ← a·J
                for i in 0..n {
                    let (hp, hq) = (a[(i, p)], a[(i, q)]);
                    a[(i, p)] = hp * jpp + hq * jqp;
                    a[(i, q)] = hp * jpq + hq * jqq;
                }
                // rows: a ← J†·a
                for i in 0..n {
                    let (hp, hq) = (a[(p, i)], a[(q, i)]);
                    a[(p, i)] = jpp.conj() * hp + jqp.conj() * hq;
                    a[(q, i)] = jpq.conj() * hp + jqq.conj() * hq;
                }
                // the rotation was chosen to annihilate exactly these entries
                a[(p, q)] = ZERO;
                a[(q, p)] = ZERO;
                a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
                a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);

                for i in 0..n {
                    let (wp, wq) = (w[(i, p)], w[(i, q)]);
                    w[(i, p)] = wp * jpp + wq * jqp;
                    w[(i, q)] = wp * jpq + wq * jqq;
                }
            }
        }
    }

    let lam_raw: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    let order = descending_order(&lam_raw);
    let lam: Vec<f64> = order.iter().map(|&i| lam_raw[i]).collect();
    let mut vecs = permute_columns(&w, &order);
    for k in 0..n {
        phase_fix_column(&mut vecs, k);
    }
    Ok((vecs, lam))
}

/// One-sided Jacobi SVD with the crate's fixed conventions: descending
/// singular values, full square `u` and `v`, phase-anchored columns.
pub fn svd_fixed(m: &CMatrix) -> Result<SvdResult> {
    ensure_finite(m, "svd_fixed")?;
    let (rows, cols) = (m.nrows(), m.ncols());
    let k = rows.min(cols);
    let mut w = m.clone();
    let mut v = CMatrix::identity(cols, cols);
    let mscale = m.norm();
    // columns at the rounding-noise floor are frozen: rotating them only
    // cancels noise against noise and can descend into denormals, where
    // |z| is no longer representable and the rotations stop being unitary
    let floor_sq = (f64::EPSILON * mscale).powi(2);

    for _sweep in 0..64 {
        let mut rotated = false;
        for p in 0..cols.saturating_sub(1) {
            for q in (p + 1)..cols {
                let mut app = 0.0f64;
                let mut aqq = 0.0f64;
                let mut apq = ZERO;
                for i in 0..rows {
                    app += w[(i, p)].norm_sqr();
                    aqq += w[(i, q)].norm_sqr();
                    apq += w[(i, p)].conj() * w[(i, q)];
                }
                if app <= floor_sq || aqq <= floor_sq {
                    continue;
                }
                let gmag = apq.norm();
                if gmag <= 1e-15 * (app * aqq).sqrt() || gmag < 1e-290 {
                    continue;
                }
                rotated = true;
                let phase_conj = (apq / gmag).conj(); // e^{-i φ}
                let (c, s) = jacobi_cs(app, aqq, gmag);
                for i in 0..rows {
                    let wp = w[(i, p)];
                    let yq = w[(i, q)] * phase_conj;
                    w[(i, p)] = wp * c - yq * s;
                    w[(i, q)] = wp * s + yq * c;
                }
                for i in 0..cols {
                    let vp = v[(i, p)];
                    let yq = v[(i, q)] * phase_conj;
                    v[(i, p)] = vp * c - yq * s;
                    v[(i, q)] = vp * s + yq * c;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    // norms at the noise floor are zero to working precision
    let zero_cut = mscale * f64::EPSILON * rows.max(cols) as f64;
    let norms: Vec<f64> = (0..cols)
        .map(|j| {
            let n = w.column(j).norm();
            if n <= zero_cut {
                0.0
            } else {
                n
            }
        })
        .collect();
    let order = descending_order(&norms);
    let w_sorted = permute_columns(&w, &order);
    let mut v_sorted = permute_columns(&v, &order);
    let sigma: Vec<f64> = order.iter().take(k).map(|&j| norms[j]).collect();

    // normalized left vectors; zero-σ directions completed afterwards
    let mut u = CMatrix::zeros(rows, rows);
    let mut filled = Vec::with_capacity(rows);
    for (j, &s) in sigma.iter().enumerate() {
        if s > 0.0 {
            let col = w_sorted.column(j) / Complex64::new(s, 0.0);
            u.set_column(j, &col);
            filled.push(j);
        }
    }
    complete_unitary(&mut u, &filled);

    for j in 0..k {
        let factor = phase_fix_column(&mut u, j);
        scale_column(&mut v_sorted, j, factor);
    }
    for j in k..rows {
        phase_fix_column(&mut u, j);
    }
    for j in k..cols {
        phase_fix_column(&mut v_sorted, j);
    }

    Ok(SvdResult {
        u,
        sigma,
        v: v_sorted,
    })
}

/// Fills the columns of `u` not listed in `filled` with an orthonormal
/// completion, chosen deterministically from the canonical basis.
fn complete_unitary(u: &mut CMatrix, filled: &[usize]) {
    let dim = u.nrows();
    let mut have: Vec<usize> = filled.to_vec();
    let missing: Vec<usize> = (0..dim).filter(|j| !have.contains(j)).collect();
    for slot in missing {
        // canonical vector with the largest residual against the current set;
        // the max is always ≥ 1/√dim, so normalization is safe
        let mut best_norm = -1.0f64;
        let mut best = nalgebra::DVector::<Complex64>::zeros(dim);
        for cand in 0..dim {
            let mut r = nalgebra::DVector::<Complex64>::zeros(dim);
            r[cand] = Complex64::new(1.0, 0.0);
            for _ in 0..2 {
                for &j in &have {
                    let proj = u.column(j).adjoint() * &r;
                    r -= u.column(j) * proj[(0, 0)];
                }
            }
            let norm = r.norm();
            if norm > best_norm + 1e-12 {
                best_norm = norm;
                best = r;
            }
        }
        best /= Complex64::new(best_norm, 0.0);
        u.set_column(slot, &best);
        have.push(slot);
    }
}

/// Moore–Penrose pseudoinverse; singular values at or below
/// `rtol · σ_max` are treated as zero. `None` selects the default
/// tolerance `max(rows, cols) · ε`.
pub fn pinv(a: &CMatrix, rtol: Option<f64>) -> Result<CMatrix> {
    let rtol = rtol.unwrap_or_else(|| default_rtol(a));
    if !(rtol > 0.0) {
        return Err(Error::BadConfig(format!("pinv rtol must be > 0, got {rtol}")));
    }
    let svd = svd_fixed(a)?;
    let (rows, cols) = (a.nrows(), a.ncols());
    let cutoff = rtol * svd.sigma.first().copied().unwrap_or(0.0);
    let mut out = CMatrix::zeros(cols, rows);
    for (j, &s) in svd.sigma.iter().enumerate() {
        if s > cutoff && s > 0.0 {
            let scale = Complex64::new(1.0 / s, 0.0);
            let vj = svd.v.column(j);
            let uj = svd.u.column(j);
            for r in 0..cols {
                for c in 0..rows {
                    out[(r, c)] += vj[r] * uj[c].conj() * scale;
                }
            }
        }
    }
    Ok(out)
}

/// Principal square root of a Hermitian PSD matrix. Eigenvalues in
/// `[-1e-10·max(1, λ_max), 0)` are clamped to zero; anything lower is an
/// error.
pub fn sqrtm_psd(h: &CMatrix) -> Result<CMatrix> {
    let (w, lam) = eigh_fixed(h)?;
    let lam_max = lam.first().copied().unwrap_or(0.0);
    let floor = -1e-10 * lam_max.max(1.0);
    let min_eig = lam.last().copied().unwrap_or(0.0);
    if min_eig < floor {
        return Err(Error::NotPsd {
            context: "sqrtm_psd",
            min_eig,
            floor,
        });
    }
    let n = h.nrows();
    let mut root = CMatrix::zeros(n, n);
    for (j, &l) in lam.iter().enumerate() {
        let s = Complex64::new(l.max(0.0).sqrt(), 0.0);
        let wj = w.column(j);
        for r in 0..n {
            for c in 0..n {
                root[(r, c)] += wj[r] * wj[c].conj() * s;
            }
        }
    }
    // kill rounding-level asymmetry
    let root = (&root + root.adjoint()) * Complex64::new(0.5, 0.0);
    Ok(root)
}

/// Builds `u · diag(sigma) · v†` back from an [`SvdResult`].
pub fn svd_reconstruct(svd: &SvdResult) -> CMatrix {
    let (rows, cols) = (svd.u.nrows(), svd.v.nrows());
    let mut s = CMatrix::zeros(rows, cols);
    for (i, &val) in svd.sigma.iter().enumerate() {
        s[(i, i)] = Complex64::new(val, 0.0);
    }
    &svd.u * s * svd.v.adjoint()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn r(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    pub(crate) fn random_cmatrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMatrix {
        CMatrix::from_fn(rows, cols, |_, _| {
            c(rng.gen::<f64>() * 2.0 - 1.0, rng.gen::<f64>() * 2.0 - 1.0)
        })
    }

    fn assert_close(a: &CMatrix, b: &CMatrix, tol: f64, what: &str) {
        let d = (a - b).norm();
        assert!(d <= tol, "{what}: distance {d:e} > {tol:e}\n{a}\nvs\n{b}");
    }

    // -- qr_positive ------------------------------------------------------

    #[test]
    fn qr_identity() {
        let i2 = CMatrix::identity(2, 2);
        let (q, t) = qr_positive(&i2).unwrap();
        assert_close(&q, &i2, 1e-14, "q");
        assert_close(&t, &i2, 1e-14, "t");
    }

    #[test]
    fn qr_sign_convention_forced() {
        let a = CMatrix::from_row_slice(2, 2, &[r(-2.0), r(0.0), r(0.0), r(1.0)]);
        let (q, t) = qr_positive(&a).unwrap();
        let q_exp = CMatrix::from_row_slice(2, 2, &[r(-1.0), r(0.0), r(0.0), r(1.0)]);
        let t_exp = CMatrix::from_row_slice(2, 2, &[r(2.0), r(0.0), r(0.0), r(1.0)]);
        assert_close(&q, &q_exp, 1e-14, "q");
        assert_close(&t, &t_exp, 1e-14, "t");
    }

    /// Hand Gram–Schmidt oracle for full-rank square inputs.
    fn gram_schmidt_qr(a: &CMatrix) -> (CMatrix, CMatrix) {
        let (m, n) = (a.nrows(), a.ncols());
        let mut q = CMatrix::zeros(m, n);
        let mut t = CMatrix::zeros(n, n);
        for j in 0..n {
            let mut col = a.column(j).into_owned();
            for i in 0..j {
                let proj = (q.column(i).adjoint() * a.column(j))[(0, 0)];
                t[(i, j)] = proj;
                col -= q.column(i) * proj;
            }
            let norm = col.norm();
            t[(j, j)] = r(norm);
            q.set_column(j, &(col / r(norm)));
        }
        (q, t)
    }

    #[test]
    fn qr_swap_matrix_matches_gram_schmidt() {
        let a = CMatrix::from_row_slice(2, 2, &[r(0.0), r(1.0), r(1.0), r(0.0)]);
        let (q, t) = qr_positive(&a).unwrap();
        let (q_gs, t_gs) = gram_schmidt_qr(&a);
        assert_close(&q, &q_gs, 1e-14, "q vs gram-schmidt");
        assert_close(&t, &t_gs, 1e-14, "t vs gram-schmidt");
        // frozen values: swap is its own orthogonal factor
        assert_close(&q, &a, 1e-14, "q frozen");
        assert_close(&t, &CMatrix::identity(2, 2), 1e-14, "t frozen");
    }

    #[test]
    fn qr_random_reconstruction_and_conventions() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for trial in 0..200 {
            let n = 1 + trial % 6;
            let m = n + trial % 3;
            let a = random_cmatrix(&mut rng, m, n);
            let (q, t) = qr_positive(&a).unwrap();
            assert!(((&q * &t) - &a).norm() <= 1e-12 * a.norm().max(1.0));
            assert!(unitarity_residual(&q) <= 1e-12);
            for i in 0..n {
                assert!(t[(i, i)].im.abs() <= 1e-14);
                assert!(t[(i, i)].re >= 0.0);
                for j in 0..i {
                    assert_eq!(t[(i, j)], ZERO, "strict lower-zero at ({i},{j})");
                }
            }
        }
    }

    #[test]
    fn qr_rejects_nonfinite_and_wide() {
        let mut a = CMatrix::identity(2, 2);
        a[(0, 0)] = c(f64::NAN, 0.0);
        assert!(matches!(
            qr_positive(&a),
            Err(Error::NonFinite { .. })
        ));
        let wide = CMatrix::zeros(1, 2);
        assert!(qr_positive(&wide).is_err());
    }

    // -- svd_fixed --------------------------------------------------------

    #[test]
    fn svd_identity_and_diagonal() {
        let i2 = CMatrix::identity(2, 2);
        let svd = svd_fixed(&i2).unwrap();
        assert_eq!(svd.sigma, vec![1.0, 1.0]);
        assert_close(&svd.u, &i2, 1e-14, "u");
        assert_close(&svd.v, &i2, 1e-14, "v");

        let d = CMatrix::from_row_slice(2, 2, &[r(3.0), r(0.0), r(0.0), r(0.0)]);
        let svd = svd_fixed(&d).unwrap();
        assert!((svd.sigma[0] - 3.0).abs() <= 1e-14);
        assert!(svd.sigma[1].abs() <= 1e-14);
    }

    /// Eigen-of-M†M oracle for the frozen example [[0,2],[1,0]].
    #[test]
    fn svd_antidiagonal_matches_normal_equations_oracle() {
        let m = CMatrix::from_row_slice(2, 2, &[r(0.0), r(2.0), r(1.0), r(0.0)]);
        // M†M = diag(1, 4): eigenpairs (4, e2), (1, e1) by hand, so
        // σ = (2, 1), v-columns (e2, e1), u_k = M v_k / σ_k = (e1, e2).
        let svd = svd_fixed(&m).unwrap();
        assert!((svd.sigma[0] - 2.0).abs() <= 1e-14);
        assert!((svd.sigma[1] - 1.0).abs() <= 1e-14);
        assert_close(&svd.u, &CMatrix::identity(2, 2), 1e-14, "u");
        let v_exp = CMatrix::from_row_slice(2, 2, &[r(0.0), r(1.0), r(1.0), r(0.0)]);
        assert_close(&svd.v, &v_exp, 1e-14, "v");
    }

    #[test]
    fn svd_random_reconstruction_orthogonality_phases() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for trial in 0..300 {
            let rows = 1 + trial % 6;
            let cols = 1 + (trial / 2) % 6;
            let mut m = random_cmatrix(&mut rng, rows, cols);
            if trial % 4 == 0 && cols > 1 {
                let col = m.column(0).into_owned();
                m.set_column(cols - 1, &col); // force rank deficiency
            }
            let svd = svd_fixed(&m).unwrap();
            assert!(
                (svd_reconstruct(&svd) - &m).norm() <= 1e-12 * m.norm().max(1.0),
                "reconstruction trial {trial}"
            );
            assert!(unitarity_residual(&svd.u) <= 1e-13);
            assert!(unitarity_residual(&svd.v) <= 1e-13);
            for i in 1..svd.sigma.len() {
                assert!(svd.sigma[i] <= svd.sigma[i - 1]);
            }
            for j in 0..svd.u.ncols() {
                let (mut best, mut anchor) = (0.0, 0);
                for i in 0..svd.u.nrows() {
                    if svd.u[(i, j)].norm() > best {
                        best = svd.u[(i, j)].norm();
                        anchor = i;
                    }
                }
                assert!(svd.u[(anchor, j)].im.abs() <= 1e-12);
                assert!(svd.u[(anchor, j)].re >= 0.0);
            }
        }
    }

    #[test]
    fn svd_zero_matrix_and_tall_wide() {
        let z = CMatrix::zeros(3, 2);
        let svd = svd_fixed(&z).unwrap();
        assert_eq!(svd.sigma, vec![0.0, 0.0]);
        assert!(unitarity_residual(&svd.u) <= 1e-14);
        assert_eq!(svd.u.ncols(), 3);

        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let wide = random_cmatrix(&mut rng, 2, 5);
        let svd = svd_fixed(&wide).unwrap();
        assert_eq!(svd.sigma.len(), 2);
        assert_eq!(svd.v.ncols(), 5);
        assert!((svd_reconstruct(&svd) - &wide).norm() <= 1e-13 * wide.norm());
    }

    // -- eigh_fixed -------------------------------------------------------

    #[test]
    fn eigh_identity_and_swap() {
        let (w, lam) = eigh_fixed(&CMatrix::identity(2, 2)).unwrap();
        assert_eq!(lam, vec![1.0, 1.0]);
        assert!(unitarity_residual(&w) <= 1e-14);

        let swap = CMatrix::from_row_slice(2, 2, &[r(0.0), r(1.0), r(1.0), r(0.0)]);
        let (w, lam) = eigh_fixed(&swap).unwrap();
        assert!((lam[0] - 1.0).abs() <= 1e-14);
        assert!((lam[1] + 1.0).abs() <= 1e-14);
        let inv_sqrt2 = 1.0 / 2.0f64.sqrt();
        assert!((w[(0, 0)].re - inv_sqrt2).abs() <= 1e-14);
        assert!((w[(1, 0)].re - inv_sqrt2).abs() <= 1e-14);
    }

    #[test]
    fn eigh_reorders_descending() {
        let d = CMatrix::from_row_slice(2, 2, &[r(0.2), r(0.0), r(0.0), r(0.9)]);
        let (w, lam) = eigh_fixed(&d).unwrap();
        assert_eq!(lam, vec![0.9, 0.2]);
        let perm = CMatrix::from_row_slice(2, 2, &[r(0.0), r(1.0), r(1.0), r(0.0)]);
        assert_close(&w, &perm, 1e-14, "permutation eigenvectors");
    }

    #[test]
    fn eigh_random_hermitian_reconstruction() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for trial in 0..200 {
            let n = 1 + trial % 8;
            let g = random_cmatrix(&mut rng, n, n);
            let h = (&g + g.adjoint()) * r(0.5);
            let (w, lam) = eigh_fixed(&h).unwrap();
            let mut d = CMatrix::zeros(n, n);
            for i in 0..n {
                d[(i, i)] = r(lam[i]);
            }
            let rec = &w * d * w.adjoint();
            assert!(
                (&rec - &h).norm() <= 1e-12 * h.norm().max(1.0),
                "trial {trial}: {:e}",
                (&rec - &h).norm()
            );
            assert!(unitarity_residual(&w) <= 1e-13);
            for i in 1..n {
                assert!(lam[i] <= lam[i - 1]);
            }
        }
    }

    #[test]
    fn eigh_rejects_non_hermitian() {
        let a = CMatrix::from_row_slice(2, 2, &[r(0.0), r(1.0), r(2.0), r(0.0)]);
        assert!(matches!(
            eigh_fixed(&a),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn eigh_degenerate_64() {
        // spectrum with heavy degeneracy at larger dimension
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        let g = random_cmatrix(&mut rng, 64, 64);
        let (q, _) = qr_positive(&g).unwrap();
        let mut d = CMatrix::zeros(64, 64);
        for i in 0..64 {
            d[(i, i)] = r(match i % 3 {
                0 => 1.0,
                1 => 1.0,
                _ => -0.5,
            });
        }
        let h = &q * d * q.adjoint();
        let h = (&h + h.adjoint()) * r(0.5);
        let (w, lam) = eigh_fixed(&h).unwrap();
        let mut dd = CMatrix::zeros(64, 64);
        for i in 0..64 {
            dd[(i, i)] = r(lam[i]);
        }
        assert!((&w * dd * w.adjoint() - &h).norm() <= 1e-12 * h.norm());
    }

    // -- pinv -------------------------------------------------------------

    #[test]
    fn pinv_diagonal_and_identity() {
        let d = CMatrix::from_row_slice(2, 2, &[r(2.0), r(0.0), r(0.0), r(0.0)]);
        let p = pinv(&d, None).unwrap();
        let exp = CMatrix::from_row_slice(2, 2, &[r(0.5), r(0.0), r(0.0), r(0.0)]);
        assert_close(&p, &exp, 1e-14, "pinv diag");

        let i3 = CMatrix::identity(3, 3);
        assert_close(&pinv(&i3, None).unwrap(), &i3, 1e-14, "pinv identity");
    }

    #[test]
    fn pinv_rank_one_matches_formula() {
        // A = σ u v† with u = v = (1,1)/√2, σ = 2 → A⁺ = v u†/σ
        let a = CMatrix::from_row_slice(2, 2, &[r(1.0), r(1.0), r(1.0), r(1.0)]);
        let p = pinv(&a, None).unwrap();
        let exp = CMatrix::from_row_slice(2, 2, &[r(0.25), r(0.25), r(0.25), r(0.25)]);
        assert_close(&p, &exp, 1e-14, "rank-1 pinv");
    }

    #[test]
    fn pinv_moore_penrose_conditions() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for trial in 0..120 {
            let rows = 1 + trial % 5;
            let cols = 1 + (trial / 3) % 5;
            let mut a = random_cmatrix(&mut rng, rows, cols);
            if trial % 3 == 0 && cols > 1 {
                let col = a.column(0).into_owned();
                a.set_column(cols - 1, &col);
            }
            let p = pinv(&a, None).unwrap();
            let scale = a.norm().max(1.0);
            assert!((&a * &p * &a - &a).norm() <= 1e-10 * scale);
            assert!((&p * &a * &p - &p).norm() <= 1e-10 * scale);
            assert!(hermitian_residual(&(&a * &p)) <= 1e-10 * scale);
            assert!(hermitian_residual(&(&p * &a)) <= 1e-10 * scale);
        }
    }

    #[test]
    fn pinv_involution_on_full_rank() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for _ in 0..60 {
            let n = 2 + (rng.gen::<u32>() % 4) as usize;
            let a = random_cmatrix(&mut rng, n, n);
            let back = pinv(&pinv(&a, None).unwrap(), None).unwrap();
            assert!((&back - &a).norm() <= 1e-9 * a.norm().max(1.0));
        }
    }

    // -- sqrtm_psd --------------------------------------------------------

    #[test]
    fn sqrt_diagonal_cases() {
        let d = CMatrix::from_row_slice(2, 2, &[r(4.0), r(0.0), r(0.0), r(9.0)]);
        let s = sqrtm_psd(&d).unwrap();
        let exp = CMatrix::from_row_slice(2, 2, &[r(2.0), r(0.0), r(0.0), r(3.0)]);
        assert_close(&s, &exp, 1e-13, "sqrt diag");

        let half = CMatrix::identity(2, 2) * r(0.5);
        let s = sqrtm_psd(&half).unwrap();
        let exp = CMatrix::identity(2, 2) * r(1.0 / 2.0f64.sqrt());
        assert_close(&s, &exp, 1e-13, "sqrt of I/2");
    }

    #[test]
    fn sqrt_rank_one_scaling() {
        // projector onto (1,1)/√2 is its own square root
        let proj = CMatrix::from_row_slice(2, 2, &[r(0.5), r(0.5), r(0.5), r(0.5)]);
        let s = sqrtm_psd(&proj).unwrap();
        assert_close(&s, &proj, 1e-13, "projector sqrt");

        // half the projector: rank-1 eigenvalue 1/2 scales to 1/√2
        let m = &proj * r(0.5);
        let s = sqrtm_psd(&m).unwrap();
        let exp = &proj * r(1.0 / 2.0f64.sqrt());
        assert_close(&s, &exp, 1e-13, "scaled rank-1 sqrt");
        assert!((&s * &s - &m).norm() <= 1e-12);
    }

    #[test]
    fn sqrt_rejects_indefinite() {
        let d = CMatrix::from_row_slice(2, 2, &[r(1.0), r(0.0), r(0.0), r(-0.5)]);
        assert!(matches!(sqrtm_psd(&d), Err(Error::NotPsd { .. })));
    }

    #[test]
    fn sqrt_squares_back_on_random_psd() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..80 {
            let n = 1 + (rng.gen::<u32>() % 5) as usize;
            let g = random_cmatrix(&mut rng, n, n);
            let h = &g * g.adjoint();
            let h = (&h + h.adjoint()) * r(0.5);
            let s = sqrtm_psd(&h).unwrap();
            assert!((&s * &s - &h).norm() <= 1e-10 * h.norm().max(1.0));
            assert!(hermitian_residual(&s) <= 1e-13);
        }
    }

    // -- property tests ---------------------------------------------------

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn arb_cmatrix(max_dim: usize) -> impl Strategy<Value = CMatrix> {
            ((1..=max_dim), (1..=max_dim)).prop_flat_map(|(m, n)| {
                proptest::collection::vec((-1.0..1.0f64, -1.0..1.0f64), m * n)
                    .prop_map(move |entries| {
                        CMatrix::from_fn(m, n, |i, j| {
                            let (re, im) = entries[i * n + j];
                            Complex64::new(re, im)
                        })
                    })
            })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]

            #[test]
            fn svd_reconstructs_and_fixes_phases(m in arb_cmatrix(6)) {
                let svd = svd_fixed(&m).unwrap();
                prop_assert!(
                    (svd_reconstruct(&svd) - &m).norm() <= 1e-12 * m.norm().max(1.0)
                );
                prop_assert!(unitarity_residual(&svd.u) <= 1e-12);
                prop_assert!(unitarity_residual(&svd.v) <= 1e-12);
                for j in 0..svd.u.ncols() {
                    let col = svd.u.column(j);
                    let anchor = (0..col.len())
                        .max_by(|&a, &b| col[a].norm().partial_cmp(&col[b].norm()).unwrap())
                        .unwrap();
                    prop_assert!(col[anchor].im.abs() <= 1e-12);
                    prop_assert!(col[anchor].re >= 0.0);
                }
            }

            #[test]
            fn qr_reconstructs_with_nonnegative_diagonal(m in arb_cmatrix(6)) {
                let tall = if m.nrows() >= m.ncols() { m } else { m.adjoint() };
                let (q, t) = qr_positive(&tall).unwrap();
                prop_assert!(((&q * &t) - &tall).norm() <= 1e-12 * tall.norm().max(1.0));
                for i in 0..t.ncols() {
                    prop_assert!(t[(i, i)].im == 0.0);
                    prop_assert!(t[(i, i)].re >= 0.0);
                }
            }

            #[test]
            fn pinv_satisfies_moore_penrose(m in arb_cmatrix(5)) {
                let p = pinv(&m, None).unwrap();
                let scale = m.norm().max(1.0);
                prop_assert!((&m * &p * &m - &m).norm() <= 1e-10 * scale);
                prop_assert!((&p * &m * &p - &p).norm() <= 1e-10 * scale);
                prop_assert!(hermitian_residual(&(&m * &p)) <= 1e-10 * scale);
                prop_assert!(hermitian_residual(&(&p * &m)) <= 1e-10 * scale);
            }
        }
    }

    // -- determinism ------------------------------------------------------

    #[test]
    fn decompositions_are_bit_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let a = random_cmatrix(&mut rng, 5, 4);
        let h = (&a * a.adjoint()) + CMatrix::identity(5, 5);
        let h = (&h + h.adjoint()) * r(0.5);

        let (q1, t1) = qr_positive(&a).unwrap();
        let (q2, t2) = qr_positive(&a).unwrap();
        assert_eq!(q1, q2);
        assert_eq!(t1, t2);

        let s1 = svd_fixed(&a).unwrap();
        let s2 = svd_fixed(&a).unwrap();
        assert_eq!(s1.u, s2.u);
        assert_eq!(s1.sigma, s2.sigma);
        assert_eq!(s1.v, s2.v);

        let (w1, l1) = eigh_fixed(&h).unwrap();
        let (w2, l2) = eigh_fixed(&h).unwrap();
        assert_eq!(w1, w2);
        assert_eq!(l1, l2);
    }
}
