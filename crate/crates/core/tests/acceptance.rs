//! Acceptance suite: one test per release criterion, each printing a
//! PASS line with the observed margins (run with `--nocapture` to see
//! them). Tolerances are pinned here and nowhere else.

use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use qlim::fisher::{
    cfi, classical_fidelity, diagonal_fidelity, qfi, qfi_from_fidelity, quantum_fidelity,
    sld_residual, sld_solve, ReportSettings, DEFAULT_SUPPORT_TOL,
};
use qlim::interferometer::{build_finite_shift, build_sld};
use qlim::matdecomp::{hermitian_residual, CMatrix};
use qlim::oracle::{haar_unitary, random_search_cfi, uhlmann_fidelity};
use qlim::purify::{overlap_decomp, purifications, PurificationPair};
use qlim::scan::{run_scan, GridSpec, ScanRow};
use qlim::scene::Scene;
use qlim::selfcheck::{random_scene, random_theta, scene_corpus, supported_corpus};

fn r(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn default_scan(scene: &Scene) -> Vec<ScanRow> {
    run_scan(scene, &GridSpec::default(), &ReportSettings::default())
}

/// Criterion 1: on the default scene grid the corrected construction
/// saturates the QFI at every informative point.
#[test]
fn criterion_1_saturation_of_corrected_construction() {
    let rows = default_scan(&Scene::shifted_pair());
    assert_eq!(rows.len(), 126);
    let mut worst_ratio = f64::INFINITY;
    for row in &rows {
        assert!(row.is_clean(), "row {} flagged: {}", row.theta_scaled, row.status);
        if row.qfi > 1e-6 {
            worst_ratio = worst_ratio.min(row.cfi_opt / row.qfi);
            assert!(
                row.cfi_opt >= row.qfi * (1.0 - 1e-6),
                "at theta_scaled {}: cfi_opt {} < qfi {}",
                row.theta_scaled,
                row.cfi_opt,
                row.qfi
            );
        }
    }
    println!("PASS criterion 1: cfi_opt/qfi ≥ {worst_ratio:.9} across 126 grid points");
}

/// Criterion 2: the QR construction loses information on the asymmetric
/// grid over a contiguous region, and loses nothing on the symmetric grid.
#[test]
fn criterion_2_qr_suboptimality_and_symmetric_recovery() {
    let rows = default_scan(&Scene::shifted_pair());
    let mut longest_run = 0usize;
    let mut current = 0usize;
    let mut max_rel_gap = 0.0f64;
    for row in &rows {
        let gap = row.qfi - row.cfi_qr;
        if row.qfi > 1e-6 && gap > 0.01 * row.qfi {
            current += 1;
            longest_run = longest_run.max(current);
            max_rel_gap = max_rel_gap.max(gap / row.qfi);
        } else {
            current = 0;
        }
    }
    assert!(
        longest_run >= 5,
        "no contiguous suboptimality region found (longest run {longest_run})"
    );

    let sym_rows = default_scan(&Scene::symmetric_pair());
    let mut worst_sym = 0.0f64;
    for row in &sym_rows {
        assert!(row.is_clean(), "symmetric row {} flagged: {}", row.theta_scaled, row.status);
        if row.qfi > 1e-6 {
            let rel = (row.qfi - row.cfi_qr) / row.qfi;
            worst_sym = worst_sym.max(rel);
            assert!(
                rel <= 1e-6,
                "symmetric scene at {}: relative gap {rel}",
                row.theta_scaled
            );
        }
    }
    println!(
        "PASS criterion 2: contiguous QR gap over {longest_run} points (max relative gap {max_rel_gap:.3}); symmetric grid gap ≤ {worst_sym:.2e}"
    );
}

/// Criterion 3: classical fidelity never drops below quantum fidelity on
/// 1000 random instances, and the finite-shift basis saturates it.
#[test]
fn criterion_3_fidelity_ordering_and_saturation() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst_order = f64::NEG_INFINITY;
    for trial in 0..1000 {
        let scene = random_scene(&mut rng);
        let theta = random_theta(&mut rng);
        let delta = *[1e-5, 1e-4, 1e-3, 1e-2].choose(&mut rng).unwrap();
        let decomp = overlap_decomp(&scene, theta, theta + delta).unwrap();
        let pair = purifications(&decomp, &scene).unwrap();
        let f_q: f64 = pair.d.iter().sum();
        let r_mat = haar_unitary(scene.num_collectors(), rng.gen()).unwrap();
        let f_c = classical_fidelity(&pair, &r_mat).unwrap();
        worst_order = worst_order.max(f_q - f_c);
        assert!(
            f_c >= f_q - 1e-10,
            "trial {trial}: f^c {f_c} < f {f_q} - 1e-10"
        );
    }

    let mut worst_sat = 0.0f64;
    for (scene, theta) in supported_corpus(2025, 1000) {
        let delta = 1e-5;
        let plan = build_finite_shift(&scene, theta, delta, None).unwrap();
        let decomp = overlap_decomp(&scene, theta, theta + delta).unwrap();
        let pair = purifications(&decomp, &scene).unwrap();
        let f_q: f64 = pair.d.iter().sum();
        let f_c = classical_fidelity(&pair, &plan.r).unwrap();
        worst_sat = worst_sat.max((f_c - f_q).abs());
        assert!(
            (f_c - f_q).abs() <= 1e-8,
            "finite-shift basis: |f^c - f| = {:e}",
            (f_c - f_q).abs()
        );
    }
    println!(
        "PASS criterion 3: ordering margin {worst_order:.2e} over 1000 Haar instances; |f^c−f| ≤ {worst_sat:.2e} behind finite-shift plans"
    );
}

/// Criterion 4: the row-norm formula strictly dominates the diagonal
/// formula on the canonical triangular pair, and per-row on random
/// triangular matrices.
#[test]
fn criterion_4_row_norm_vs_diagonal_gap() {
    let a = CMatrix::from_row_slice(2, 2, &[r(1.0), r(1.0), r(0.0), r(1.0)]);
    let b = CMatrix::from_row_slice(2, 2, &[r(1.0), r(0.0), r(1.0), r(1.0)]);
    let pair = PurificationPair {
        a: a.clone(),
        b: b.clone(),
        d: vec![0.0, 0.0],
    };
    let row_sum = classical_fidelity(&pair, &CMatrix::identity(2, 2)).unwrap();
    let diag_sum = diagonal_fidelity(&a, &b).unwrap();
    assert!((row_sum - 2.0 * 2.0f64.sqrt()).abs() <= 1e-12);
    assert!((diag_sum - 2.0).abs() <= 1e-12);
    assert!(row_sum - diag_sum >= 0.8284 - 1e-12);

    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..1000 {
        let n = rng.gen_range(1..=5usize);
        let mut t = CMatrix::from_fn(n, n, |_, _| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        for i in 0..n {
            for j in 0..i {
                t[(i, j)] = r(0.0);
            }
        }
        for v in 0..n {
            assert!(t.row(v).norm() >= t[(v, v)].norm() - 1e-15);
        }
    }
    println!(
        "PASS criterion 4: row-norm 2√2 vs diagonal 2 (gap {:.6}); per-row bound on 1000 triangulars",
        row_sum - diag_sum
    );
}

/// Criterion 5: the finite-shift construction identities hold across the
/// 100-scene corpus.
#[test]
fn criterion_5_construction_identities() {
    let corpus = supported_corpus(77, 100);
    let (mut worst_rbra, mut worst_herm, mut worst_eig, mut worst_forms) =
        (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for (scene, theta) in &corpus {
        let delta = 1e-5;
        let plan = build_finite_shift(scene, *theta, delta, None).unwrap();
        let decomp = overlap_decomp(scene, *theta, theta + delta).unwrap();
        let pair = purifications(&decomp, scene).unwrap();
        let lam = plan.lambda.as_ref().unwrap();
        let mut lam_m = CMatrix::zeros(lam.len(), lam.len());
        for (i, &l) in lam.iter().enumerate() {
            lam_m[(i, i)] = r(l);
        }
        let rbra = (&plan.r * &pair.b - lam_m * &plan.r * &pair.a).norm();
        let p = plan.p.as_ref().unwrap();
        let herm = hermitian_residual(p);
        let min_eig = lam.iter().cloned().fold(f64::INFINITY, f64::min);
        let forms = plan.form_agreement.unwrap();

        assert!(rbra <= 1e-7, "‖RB − ΛRA‖ = {rbra:e}");
        assert!(herm <= 1e-9, "P Hermiticity residual {herm:e}");
        assert!(min_eig >= -1e-10, "min eig(P) = {min_eig:e}");
        assert!(forms <= 1e-8, "BA⁺ vs (A⁺)†DA⁺ distance {forms:e}");

        worst_rbra = worst_rbra.max(rbra);
        worst_herm = worst_herm.max(herm);
        worst_eig = worst_eig.min(min_eig).min(0.0).abs().max(worst_eig);
        worst_forms = worst_forms.max(forms);
    }
    println!(
        "PASS criterion 5: ‖RB−ΛRA‖ ≤ {worst_rbra:.2e}, P asym ≤ {worst_herm:.2e}, eig floor ≥ -{worst_eig:.2e}, forms ≤ {worst_forms:.2e} on 100 scenes"
    );
}

/// Criterion 6: SLD equation residuals, the closed-form anchor at the half
/// period, and agreement between the two QFI routes.
#[test]
fn criterion_6_sld_correctness() {
    let corpus = scene_corpus(31, 100);
    let mut worst_resid = 0.0f64;
    for (scene, theta) in &corpus {
        let rho = scene.density(*theta).unwrap();
        let drho = scene.density_derivative(*theta).unwrap();
        let bundle = sld_solve(&rho, &drho, DEFAULT_SUPPORT_TOL).unwrap();
        let resid = sld_residual(&bundle) / drho.norm().max(1.0);
        worst_resid = worst_resid.max(resid);
        assert!(resid <= 1e-8, "SLD residual {resid:e}");
    }

    let scene = Scene::shifted_pair();
    let anchor = qfi(&scene, std::f64::consts::PI).unwrap();
    assert!(
        (anchor - 0.25).abs() <= 1e-9,
        "qfi at scale·θ = π: {anchor}"
    );

    let mut worst_route = 0.0f64;
    for (scene, theta) in corpus.iter().take(50) {
        let q = qfi(scene, *theta).unwrap();
        if q > 1e-3 {
            let qf = qfi_from_fidelity(scene, *theta, 1e-4).unwrap();
            let rel = (q - qf).abs() / q;
            worst_route = worst_route.max(rel);
            assert!(rel <= 1e-4, "route disagreement {rel:e} at qfi {q}");
        }
    }
    println!(
        "PASS criterion 6: SLD residual ≤ {worst_resid:.2e}; anchor |qfi(π)−1/4| = {:.2e}; route agreement ≤ {worst_route:.2e}",
        (anchor - 0.25).abs()
    );
}

/// Criterion 7: 10⁴ random measurements never beat the QFI ceiling nor the
/// corrected construction.
#[test]
fn criterion_7_random_search_ceiling() {
    let scene = Scene::shifted_pair();
    let mut worst_over_qfi = f64::NEG_INFINITY;
    let mut worst_over_opt = f64::NEG_INFINITY;
    for (i, theta) in [1.0, 2.0, 3.0].into_iter().enumerate() {
        let q = qfi(&scene, theta).unwrap();
        let rho = scene.density(theta).unwrap();
        let drho = scene.density_derivative(theta).unwrap();
        let plan = build_sld(&scene, theta, DEFAULT_SUPPORT_TOL).unwrap();
        let cfi_opt = cfi(&rho, &drho, &plan.r).unwrap();
        let result = random_search_cfi(&scene, theta, 10_000, 1000 + i as u64).unwrap();
        assert!(
            result.best_cfi <= q + 1e-8,
            "theta {theta}: best {} exceeds qfi {q}",
            result.best_cfi
        );
        assert!(
            result.best_cfi <= cfi_opt + 1e-6,
            "theta {theta}: best {} exceeds cfi_opt {cfi_opt}",
            result.best_cfi
        );
        worst_over_qfi = worst_over_qfi.max(result.best_cfi - q);
        worst_over_opt = worst_over_opt.max(result.best_cfi - cfi_opt);
    }
    println!(
        "PASS criterion 7: best−qfi ≤ {worst_over_qfi:.2e}, best−cfi_opt ≤ {worst_over_opt:.2e} over 3×10⁴ samples"
    );
}

/// Criterion 8: the overlap-SVD fidelity matches Tr|√ρ√σ| on 100 random
/// scene pairs.
#[test]
fn criterion_8_cross_oracle_fidelity() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let scene = random_scene(&mut rng);
        let t1 = random_theta(&mut rng);
        let t2 = random_theta(&mut rng);
        let f = quantum_fidelity(&scene, t1, t2).unwrap();
        let u = uhlmann_fidelity(
            &scene.density(t1).unwrap(),
            &scene.density(t2).unwrap(),
        )
        .unwrap();
        worst = worst.max((f - u).abs());
        assert!((f - u).abs() <= 1e-9, "fidelity routes differ by {:e}", (f - u).abs());
    }
    println!("PASS criterion 8: |Tr D − Tr|√ρ√σ|| ≤ {worst:.2e} on 100 pairs");
}

/// Criterion 9: identical flags produce byte-identical CSV output.
#[test]
fn criterion_9_scan_determinism() {
    let bin = env!("CARGO_BIN_EXE_qlim");
    let dir = tempfile::tempdir().unwrap();
    let out_a = dir.path().join("a.csv");
    let out_b = dir.path().join("b.csv");
    for out in [&out_a, &out_b] {
        let status = std::process::Command::new(bin)
            .args(["fig1", "--points", "40", "--out"])
            .arg(out)
            .status()
            .unwrap();
        assert!(status.success());
    }
    let a = std::fs::read(&out_a).unwrap();
    let b = std::fs::read(&out_b).unwrap();
    assert_eq!(a, b, "CSV output differs between identical runs");
    println!("PASS criterion 9: {} bytes, identical across runs", a.len());
}
