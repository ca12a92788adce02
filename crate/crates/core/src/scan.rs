//! Parameter-grid scans and the artifacts built from them (CSV, SVG,
//! counterexample tables).
//!
//! The grid is specified in *scaled* units θ·(k/z₀) so the output is
//! directly comparable across scenes with different scales. Rows are
//! computed in parallel but always written in grid order; repeated runs
//! with the same inputs produce byte-identical files.

use rayon::prelude::*;

use crate::error::Result;
use crate::fisher::{fisher_report, qfi, quantum_fidelity, classical_fidelity, ReportSettings};
use crate::interferometer::{build_qr, plan_residual};
use crate::purify::{local_consistency, overlap_decomp, purifications};
use crate::scene::{ParamBinding, Scene, SceneConfig, SourceSpec};

/// CSV schema emitted by [`rows_to_csv`]. Fixed; downstream plots rely on it.
pub const CSV_HEADER: &str =
    "theta_scaled,qfi,qfi_fid,cfi_opt,cfi_qr,f_quantum,f_classical_qr,status";

/// Scaled-parameter grid.
#[derive(Debug, Clone)]
pub struct GridSpec {
    pub theta_scaled_min: f64,
    pub theta_scaled_max: f64,
    pub points: usize,
}

impl Default for GridSpec {
    /// 126 points across one kernel period of the default scene.
    fn default() -> Self {
        GridSpec {
            theta_scaled_min: 0.05,
            theta_scaled_max: 6.28,
            points: 126,
        }
    }
}

impl GridSpec {
    pub fn values(&self) -> Vec<f64> {
        if self.points <= 1 {
            return vec![self.theta_scaled_min];
        }
        let step = (self.theta_scaled_max - self.theta_scaled_min) / (self.points - 1) as f64;
        (0..self.points)
            .map(|i| self.theta_scaled_min + step * i as f64)
            .collect()
    }
}

/// One grid point of the scan.
#[derive(Debug, Clone)]
pub struct ScanRow {
    pub theta_scaled: f64,
    pub qfi: f64,
    pub qfi_fid: f64,
    pub cfi_opt: f64,
    pub cfi_qr: f64,
    pub f_quantum: f64,
    pub f_classical_qr: f64,
    /// "ok" or ';'-joined `field=ErrorKind` flags
    pub status: String,
}

impl ScanRow {
    pub fn is_clean(&self) -> bool {
        self.status == "ok"
    }
}

/// Evaluates the full report on every grid point (in parallel, output in
/// grid order).
pub fn run_scan(scene: &Scene, grid: &GridSpec, settings: &ReportSettings) -> Vec<ScanRow> {
    let scale = scene.scale();
    grid.values()
        .par_iter()
        .map(|&theta_scaled| {
            let theta = theta_scaled / scale;
            match fisher_report(scene, theta, settings) {
                Ok(report) => {
                    let status = if report.status.is_empty() {
                        "ok".to_string()
                    } else {
                        report
                            .status
                            .iter()
                            .map(|(field, kind)| format!("{field}={kind}"))
                            .collect::<Vec<_>>()
                            .join(";")
                    };
                    ScanRow {
                        theta_scaled,
                        qfi: report.qfi,
                        qfi_fid: report.qfi_fid,
                        cfi_opt: report.cfi_opt,
                        cfi_qr: report.cfi_qr,
                        f_quantum: report.f_quantum,
                        f_classical_qr: report.f_classical_qr,
                        status,
                    }
                }
                Err(e) => ScanRow {
                    theta_scaled,
                    qfi: f64::NAN,
                    qfi_fid: f64::NAN,
                    cfi_opt: f64::NAN,
                    cfi_qr: f64::NAN,
                    f_quantum: f64::NAN,
                    f_classical_qr: f64::NAN,
                    status: format!("row={}", e.kind()),
                },
            }
        })
        .collect()
}

fn fmt(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else {
        format!("{x}")
    }
}

/// Serializes rows under [`CSV_HEADER`]. Shortest-round-trip float
/// formatting keeps the file diffable and deterministic.
pub fn rows_to_csv(rows: &[ScanRow]) -> String {
    let mut out = String::with_capacity(rows.len() * 96 + CSV_HEADER.len() + 1);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for row in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            fmt(row.theta_scaled),
            fmt(row.qfi),
            fmt(row.qfi_fid),
            fmt(row.cfi_opt),
            fmt(row.cfi_qr),
            fmt(row.f_quantum),
            fmt(row.f_classical_qr),
            row.status
        ));
    }
    out
}

/// Minimal polyline plot of qfi, cfi_opt and cfi_qr against the scaled
/// parameter. No styling contract; the CSV is the primary artifact.
pub fn rows_to_svg(rows: &[ScanRow]) -> String {
    const W: f64 = 640.0;
    const H: f64 = 400.0;
    const ML: f64 = 50.0;
    const MR: f64 = 15.0;
    const MT: f64 = 15.0;
    const MB: f64 = 40.0;

    let finite = |v: f64| v.is_finite();
    let xs: Vec<f64> = rows.iter().map(|r| r.theta_scaled).collect();
    let x_min = xs.iter().cloned().fold(f64::INFINITY, f64::min);
    let x_max = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut y_max = 0.0f64;
    for r in rows {
        for v in [r.qfi, r.cfi_opt, r.cfi_qr] {
            if finite(v) {
                y_max = y_max.max(v);
            }
        }
    }
    if y_max <= 0.0 {
        y_max = 1.0;
    }
    let x_span = if x_max > x_min { x_max - x_min } else { 1.0 };
    let to_px = |x: f64, y: f64| -> (f64, f64) {
        (
            ML + (x - x_min) / x_span * (W - ML - MR),
            H - MB - (y / y_max) * (H - MT - MB),
        )
    };

    let polyline = |getter: fn(&ScanRow) -> f64, color: &str| -> String {
        let pts: Vec<String> = rows
            .iter()
            .filter(|r| finite(getter(r)))
            .map(|r| {
                let (px, py) = to_px(r.theta_scaled, getter(r));
                format!("{px:.2},{py:.2}")
            })
            .collect();
        format!(
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
            pts.join(" ")
        )
    };

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" viewBox=\"0 0 {W} {H}\">\n"
    ));
    svg.push_str(&format!(
        "<rect width=\"{W}\" height=\"{H}\" fill=\"white\"/>\n"
    ));
    let (ox, oy) = (ML, H - MB);
    svg.push_str(&format!(
        "<line x1=\"{ox}\" y1=\"{oy}\" x2=\"{:.2}\" y2=\"{oy}\" stroke=\"black\"/>\n",
        W - MR
    ));
    svg.push_str(&format!(
        "<line x1=\"{ox}\" y1=\"{oy}\" x2=\"{ox}\" y2=\"{MT}\" stroke=\"black\"/>\n"
    ));
    svg.push_str(&format!(
        "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\">theta_scaled</text>\n",
        W / 2.0 - 30.0,
        H - 8.0
    ));
    svg.push_str(&format!(
        "<text x=\"8\" y=\"{:.2}\" font-size=\"12\" transform=\"rotate(-90 12,{:.2})\">Fisher information</text>\n",
        H / 2.0,
        H / 2.0
    ));
    svg.push_str(&polyline(|r| r.qfi, "black"));
    svg.push_str(&polyline(|r| r.cfi_opt, "#1f77b4"));
    svg.push_str(&polyline(|r| r.cfi_qr, "#d62728"));
    for (i, (label, color)) in [
        ("qfi", "black"),
        ("cfi_opt", "#1f77b4"),
        ("cfi_qr", "#d62728"),
    ]
    .iter()
    .enumerate()
    {
        let y = MT + 14.0 * (i as f64 + 1.0);
        svg.push_str(&format!(
            "<line x1=\"{:.2}\" y1=\"{y:.2}\" x2=\"{:.2}\" y2=\"{y:.2}\" stroke=\"{color}\" stroke-width=\"1.5\"/>\n",
            W - 130.0,
            W - 105.0
        ));
        svg.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"11\">{label}</text>\n",
            W - 100.0,
            y + 4.0
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

/// Metrics for one scene variant in the counterexample table.
#[derive(Debug, Clone)]
pub struct VariantMetrics {
    pub label: &'static str,
    /// Gram off-diagonal of the purification pair
    pub gram_offdiag: f64,
    /// max |entry| above the diagonal of RB for the QR plan (vanishes in
    /// the canonical gauge regardless of symmetry)
    pub qr_lower_residual: f64,
    /// row-proportionality defect of the QR plan: the actual saturation
    /// failure
    pub qr_row_defect: f64,
    /// classical minus quantum fidelity behind the QR plan
    pub fc_qr_minus_f: f64,
    /// Fisher-information gap of the QR measurement
    pub qfi_minus_cfi_qr: f64,
    /// true when the scene carries no parameter information at all
    pub degenerate: bool,
}

/// Side-by-side comparison of a scene with its inversion-symmetric
/// counterpart: symmetry closes every gap, breaking it opens them.
#[derive(Debug, Clone)]
pub struct CounterexampleReport {
    pub theta_scaled: f64,
    pub delta: f64,
    pub variants: Vec<VariantMetrics>,
}

fn variant_metrics(
    label: &'static str,
    scene: &Scene,
    theta: f64,
    delta: f64,
) -> Result<VariantMetrics> {
    let decomp = overlap_decomp(scene, theta, theta + delta)?;
    let pair = purifications(&decomp, scene)?;
    let consistency = local_consistency(&pair, None)?;
    let qr_plan = build_qr(&pair)?;
    let f_q = quantum_fidelity(scene, theta, theta + delta)?;
    let f_c = classical_fidelity(&pair, &qr_plan.r)?;
    let q = qfi(scene, theta)?;
    let rho = scene.density(theta)?;
    let drho = scene.density_derivative(theta)?;
    let cfi_qr = crate::fisher::cfi(&rho, &drho, &qr_plan.r)?;
    Ok(VariantMetrics {
        label,
        gram_offdiag: consistency.gram_offdiag,
        qr_lower_residual: qr_plan.rb_lower_residual.unwrap_or(f64::NAN),
        qr_row_defect: plan_residual(&qr_plan, &pair),
        fc_qr_minus_f: f_c - f_q,
        qfi_minus_cfi_qr: q - cfi_qr,
        degenerate: q <= 1e-12,
    })
}

/// Evaluates the counterexample metrics for `scene` and, when the scene has
/// two sources, for its inversion-symmetric counterpart (sources at ±θ/2,
/// collectors at ±1/2, same scale).
pub fn counterexample_report(
    scene: &Scene,
    theta_scaled: f64,
    delta: f64,
) -> Result<CounterexampleReport> {
    let theta = theta_scaled / scene.scale();
    let mut variants = vec![variant_metrics("scene", scene, theta, delta)?];
    if scene.num_sources() == 2 {
        let symmetric = Scene::from_config(&SceneConfig {
            sources: vec![SourceSpec { x: 0.0, w: 0.5 }, SourceSpec { x: 0.0, w: 0.5 }],
            collectors: vec![-0.5, 0.5],
            scale: scene.scale(),
            binding: ParamBinding::SymmetricSeparation,
        })?;
        variants.push(variant_metrics("symmetric", &symmetric, theta, delta)?);
    }
    Ok(CounterexampleReport {
        theta_scaled,
        delta,
        variants,
    })
}

pub const COUNTEREXAMPLE_CSV_HEADER: &str =
    "variant,gram_offdiag,qr_lower_residual,qr_row_defect,fc_qr_minus_f,qfi_minus_cfi_qr,degenerate";

impl CounterexampleReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(COUNTEREXAMPLE_CSV_HEADER);
        out.push('\n');
        for v in &self.variants {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                v.label,
                fmt(v.gram_offdiag),
                fmt(v.qr_lower_residual),
                fmt(v.qr_row_defect),
                fmt(v.fc_qr_minus_f),
                fmt(v.qfi_minus_cfi_qr),
                v.degenerate
            ));
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "counterexample metrics at theta_scaled = {}, delta = {}\n",
            self.theta_scaled, self.delta
        ));
        out.push_str(&format!(
            "{:<12} {:>14} {:>14} {:>14} {:>14} {:>16}\n",
            "variant", "gram_offdiag", "rb_residual", "row_defect", "fc_qr - f", "qfi - cfi_qr"
        ));
        for v in &self.variants {
            out.push_str(&format!(
                "{:<12} {:>14.3e} {:>14.3e} {:>14.3e} {:>14.3e} {:>16.3e}{}\n",
                v.label,
                v.gram_offdiag,
                v.qr_lower_residual,
                v.qr_row_defect,
                v.fc_qr_minus_f,
                v.qfi_minus_cfi_qr,
                if v.degenerate { "  (degenerate)" } else { "" }
            ));
        }
        out
    }
}
