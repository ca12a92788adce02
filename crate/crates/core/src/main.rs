//! Thin command-line front end; all logic lives in the library.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use qlim::fisher::ReportSettings;
use qlim::scan::{counterexample_report, rows_to_csv, rows_to_svg, run_scan, GridSpec};
use qlim::scene::{Scene, SceneConfig};
use qlim::selfcheck::run_selfcheck;

#[derive(Parser)]
#[command(
    name = "qlim",
    version,
    about = "Quantum vs classical Fisher information for incoherent imaging with linear interferometers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Scan QFI/CFI curves over a scaled-θ grid and write the CSV artifact
    Fig1 {
        /// output CSV path
        #[arg(long, default_value = "fig1.csv")]
        out: PathBuf,
        /// also write a minimal SVG line plot
        #[arg(long)]
        svg: Option<PathBuf>,
        /// number of grid points
        #[arg(long, default_value_t = 126)]
        points: usize,
        /// grid start, in scaled units θ·k/z₀
        #[arg(long, default_value_t = 0.05)]
        theta_min: f64,
        /// grid end, in scaled units θ·k/z₀
        #[arg(long, default_value_t = 6.28)]
        theta_max: f64,
        /// evaluate at this single scaled θ (overrides the grid ends)
        #[arg(long)]
        theta: Option<f64>,
        /// purification shift δ
        #[arg(long, default_value_t = 1e-5)]
        delta: f64,
        /// pseudoinverse rank tolerance (default: dimension · ε)
        #[arg(long)]
        rtol: Option<f64>,
        /// scene description JSON (defaults to the two-source demo scene)
        #[arg(long)]
        config: Option<PathBuf>,
    },
    /// Show how breaking inversion symmetry opens the QR-construction gap
    Counterexample {
        /// scene description JSON (defaults to the two-source demo scene)
        #[arg(long)]
        config: Option<PathBuf>,
        /// output CSV path
        #[arg(long, default_value = "counterexample.csv")]
        out: PathBuf,
        /// scaled θ at which to evaluate
        #[arg(long, default_value_t = 2.0)]
        theta: f64,
        /// purification shift δ
        #[arg(long, default_value_t = 1e-3)]
        delta: f64,
    },
    /// Run the seeded invariant corpus and print one line per invariant
    Selfcheck {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// override every invariant tolerance with this value
        #[arg(long)]
        strict: Option<f64>,
    },
}

fn load_scene(config: &Option<PathBuf>) -> Result<Scene> {
    let cfg = match config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .with_context(|| format!("reading scene config {}", path.display()))?;
            serde_json::from_str::<SceneConfig>(&text)
                .with_context(|| format!("parsing scene config {}", path.display()))?
        }
        None => SceneConfig::default(),
    };
    Scene::from_config(&cfg).context("validating scene config")
}

fn write_file(path: &Path, content: &str) -> Result<()> {
    std::fs::write(path, content).with_context(|| format!("writing {}", path.display()))
}

fn init_threads() {
    if let Ok(value) = std::env::var("QLIM_THREADS") {
        if let Ok(n) = value.parse::<usize>() {
            if n >= 1 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
}

fn cmd_fig1(
    out: &Path,
    svg: Option<&Path>,
    grid: GridSpec,
    settings: ReportSettings,
    config: &Option<PathBuf>,
) -> Result<u8> {
    let scene = load_scene(config)?;
    let rows = run_scan(&scene, &grid, &settings);
    write_file(out, &rows_to_csv(&rows))?;
    if let Some(svg_path) = svg {
        write_file(svg_path, &rows_to_svg(&rows))?;
    }
    let clean = rows.iter().filter(|r| r.is_clean()).count();
    println!(
        "wrote {} rows to {} ({} clean)",
        rows.len(),
        out.display(),
        clean
    );
    if (clean as f64) < 0.9 * rows.len() as f64 {
        eprintln!("more than 10% of rows carry error flags");
        return Ok(1);
    }
    Ok(0)
}

fn run() -> Result<u8> {
    let cli = Cli::parse();
    init_threads();
    match cli.command {
        Command::Fig1 {
            out,
            svg,
            points,
            theta_min,
            theta_max,
            theta,
            delta,
            rtol,
            config,
        } => {
            let (lo, hi) = match theta {
                Some(t) => (t, t),
                None => (theta_min, theta_max),
            };
            let grid = GridSpec {
                theta_scaled_min: lo,
                theta_scaled_max: hi,
                points,
            };
            let settings = ReportSettings {
                delta,
                rtol,
                ..ReportSettings::default()
            };
            cmd_fig1(&out, svg.as_deref(), grid, settings, &config)
        }
        Command::Counterexample {
            config,
            out,
            theta,
            delta,
        } => {
            let scene = load_scene(&config)?;
            let report = counterexample_report(&scene, theta, delta)
                .map_err(|e| anyhow::anyhow!("counterexample evaluation failed: {e}"))?;
            print!("{}", report.to_text());
            write_file(&out, &report.to_csv())?;
            println!("wrote {}", out.display());
            Ok(0)
        }
        Command::Selfcheck { seed, strict } => {
            let summary = run_selfcheck(seed, strict);
            print!("{}", summary.to_text());
            Ok(if summary.passed() { 0 } else { 1 })
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
