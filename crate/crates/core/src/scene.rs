//! Imaging configuration: point sources, collectors and the far-field
//! transfer matrix.
//!
//! The propagation kernel is the unimodular phase `exp(i·scale·u·x)` with
//! per-source amplitude `√(w_j/V)`, so `Tr(C C†) = 1` independently of the
//! parameter and the one-photon density matrix `ρ = C C†` needs no
//! renormalization anywhere downstream.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matdecomp::CMatrix;

/// How the estimation parameter θ moves the sources.
///
/// `ShiftLastSource` places the final source at `x = θ` (the remaining
/// sources stay put); a single-source scene has no separation to estimate
/// and is left static. `SymmetricSeparation` needs exactly two sources and
/// places them at `±θ/2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ParamBinding {
    ShiftLastSource,
    SymmetricSeparation,
}

/// One emitter in a scene description file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SourceSpec {
    /// transverse position
    pub x: f64,
    /// relative weight; all weights must sum to 1
    pub w: f64,
}

/// JSON-serializable scene description. See the CLI documentation for the
/// schema; field names match the file format.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SceneConfig {
    pub sources: Vec<SourceSpec>,
    pub collectors: Vec<f64>,
    pub scale: f64,
    pub binding: ParamBinding,
}

impl Default for SceneConfig {
    /// Two equal point sources at x = 0 (the second bound to θ), collectors
    /// at u = 0 and u = 1. The weights are not dictated by the physical
    /// setup; equal weights are assumed and can be overridden in the config.
    fn default() -> Self {
        SceneConfig {
            sources: vec![SourceSpec { x: 0.0, w: 0.5 }, SourceSpec { x: 0.0, w: 0.5 }],
            collectors: vec![0.0, 1.0],
            scale: 1.0,
            binding: ParamBinding::ShiftLastSource,
        }
    }
}

/// Validated imaging configuration. Immutable once built.
#[derive(Debug, Clone)]
pub struct Scene {
    source_positions: Vec<f64>,
    source_weights: Vec<f64>,
    collector_positions: Vec<f64>,
    scale: f64,
    binding: ParamBinding,
}

/// Transfer matrix `C(θ)` (collectors × sources) together with the
/// parameter value it was evaluated at.
#[derive(Debug, Clone)]
pub struct TransferMatrix {
    pub c: CMatrix,
    pub theta: f64,
}

impl Scene {
    /// Validates a config and builds the scene. Weight sums within 1e-9 of
    /// one are renormalized; larger deviations are rejected.
    pub fn from_config(config: &SceneConfig) -> Result<Scene> {
        if config.sources.is_empty() {
            return Err(Error::BadConfig("at least one source required".into()));
        }
        if config.collectors.is_empty() {
            return Err(Error::BadConfig("at least one collector required".into()));
        }
        if !config.scale.is_finite() || config.scale <= 0.0 {
            return Err(Error::BadConfig(format!(
                "scale must be finite and > 0, got {}",
                config.scale
            )));
        }
        let mut weights = Vec::with_capacity(config.sources.len());
        let mut positions = Vec::with_capacity(config.sources.len());
        for (i, s) in config.sources.iter().enumerate() {
            if !s.x.is_finite() || !s.w.is_finite() {
                return Err(Error::BadConfig(format!("source {i} has non-finite fields")));
            }
            if s.w < 0.0 {
                return Err(Error::BadConfig(format!("source {i} has negative weight {}", s.w)));
            }
            positions.push(s.x);
            weights.push(s.w);
        }
        for (i, u) in config.collectors.iter().enumerate() {
            if !u.is_finite() {
                return Err(Error::BadConfig(format!("collector {i} is non-finite")));
            }
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::BadConfig(format!(
                "source weights sum to {sum}, expected 1 within 1e-9"
            )));
        }
        for w in &mut weights {
            *w /= sum;
        }
        if config.binding == ParamBinding::SymmetricSeparation && config.sources.len() != 2 {
            return Err(Error::BadBinding(format!(
                "symmetric_separation requires exactly 2 sources, got {}",
                config.sources.len()
            )));
        }
        Ok(Scene {
            source_positions: positions,
            source_weights: weights,
            collector_positions: config.collectors.clone(),
            scale: config.scale,
            binding: config.binding,
        })
    }

    /// The default asymmetric demo scene: sources at x = 0 and x = θ,
    /// collectors at u = 0, 1, equal weights.
    pub fn shifted_pair() -> Scene {
        Scene::from_config(&SceneConfig::default()).expect("default config is valid")
    }

    /// Inversion-symmetric variant: sources at ±θ/2, collectors at ±1/2.
    /// The QR-based construction is optimal exactly in this case.
    pub fn symmetric_pair() -> Scene {
        Scene::from_config(&SceneConfig {
            sources: vec![SourceSpec { x: 0.0, w: 0.5 }, SourceSpec { x: 0.0, w: 0.5 }],
            collectors: vec![-0.5, 0.5],
            scale: 1.0,
            binding: ParamBinding::SymmetricSeparation,
        })
        .expect("symmetric config is valid")
    }

    pub fn num_sources(&self) -> usize {
        self.source_positions.len()
    }

    pub fn num_collectors(&self) -> usize {
        self.collector_positions.len()
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn binding(&self) -> ParamBinding {
        self.binding
    }

    pub fn weights(&self) -> &[f64] {
        &self.source_weights
    }

    pub fn collectors(&self) -> &[f64] {
        &self.collector_positions
    }

    /// Source positions with the parameter binding applied.
    fn bound_positions(&self, theta: f64) -> Vec<f64> {
        let mut xs = self.source_positions.clone();
        match self.binding {
            ParamBinding::ShiftLastSource => {
                // a single source has no separation; the scene stays static
                if xs.len() >= 2 {
                    *xs.last_mut().unwrap() = theta;
                }
            }
            ParamBinding::SymmetricSeparation => {
                xs[0] = -theta / 2.0;
                xs[1] = theta / 2.0;
            }
        }
        xs
    }

    /// Index of the θ-bound column, if any, with its derivative prefactor
    /// (position derivative dx/dθ).
    fn bound_columns(&self) -> Vec<(usize, f64)> {
        match self.binding {
            ParamBinding::ShiftLastSource => {
                if self.source_positions.len() >= 2 {
                    vec![(self.source_positions.len() - 1, 1.0)]
                } else {
                    vec![]
                }
            }
            ParamBinding::SymmetricSeparation => vec![(0, -0.5), (1, 0.5)],
        }
    }

    /// Transfer matrix `c[v,j] = √(w_j/V) · exp(i·scale·u_v·x_j(θ))`.
    pub fn transfer_matrix(&self, theta: f64) -> Result<TransferMatrix> {
        if !theta.is_finite() {
            return Err(Error::NonFinite {
                context: "transfer_matrix theta",
            });
        }
        let xs = self.bound_positions(theta);
        let v = self.collector_positions.len();
        let s = xs.len();
        let mut c = CMatrix::zeros(v, s);
        for (vi, &u) in self.collector_positions.iter().enumerate() {
            for (j, &x) in xs.iter().enumerate() {
                let amp = (self.source_weights[j] / v as f64).sqrt();
                let phase = self.scale * u * x;
                c[(vi, j)] = Complex64::new(phase.cos() * amp, phase.sin() * amp);
            }
        }
        Ok(TransferMatrix { c, theta })
    }

    /// Analytic entrywise derivative `∂C/∂θ`: bound columns pick up the
    /// factor `i·(dx_j/dθ)·scale·u_v`.
    pub fn transfer_derivative(&self, theta: f64) -> Result<CMatrix> {
        let tm = self.transfer_matrix(theta)?;
        let v = self.collector_positions.len();
        let s = tm.c.ncols();
        let mut d = CMatrix::zeros(v, s);
        for (j, dx) in self.bound_columns() {
            for (vi, &u) in self.collector_positions.iter().enumerate() {
                let factor = Complex64::new(0.0, dx * self.scale * u);
                d[(vi, j)] = factor * tm.c[(vi, j)];
            }
        }
        Ok(d)
    }

    /// One-photon density matrix `ρ = C C†`: Hermitian PSD with unit trace
    /// by construction of the kernel.
    pub fn density(&self, theta: f64) -> Result<CMatrix> {
        let tm = self.transfer_matrix(theta)?;
        let rho = &tm.c * tm.c.adjoint();
        let trace: f64 = (0..rho.nrows()).map(|i| rho[(i, i)].re).sum();
        assert!(
            (trace - 1.0).abs() <= 1e-12,
            "unimodular kernel must give trace 1, got {trace}"
        );
        Ok(rho)
    }

    /// Analytic `∂ρ = (∂C)C† + C(∂C)†`: Hermitian and traceless.
    pub fn density_derivative(&self, theta: f64) -> Result<CMatrix> {
        let tm = self.transfer_matrix(theta)?;
        let d = self.transfer_derivative(theta)?;
        let drho = &d * tm.c.adjoint() + &tm.c * d.adjoint();
        let trace: f64 = (0..drho.nrows()).map(|i| drho[(i, i)].re).sum();
        assert!(
            trace.abs() <= 1e-12,
            "phase-only parameter dependence must give traceless ∂ρ, got {trace}"
        );
        Ok(drho)
    }
}
