//! Shared error type for all numerical operations.

use thiserror::Error;

/// Errors raised by scene construction, decompositions and Fisher-information
/// evaluation. Every variant names the check that failed; values carry the
/// offending magnitudes so callers can report them.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Input contained NaN or Inf entries.
    #[error("non-finite entries in {context}")]
    NonFinite { context: &'static str },

    /// Matrix expected Hermitian but ‖H − H†‖ exceeded tolerance.
    #[error("{context}: Hermiticity residual {residual:.3e} exceeds {tol:.3e}")]
    NotHermitian {
        context: &'static str,
        residual: f64,
        tol: f64,
    },

    /// Matrix expected positive semidefinite but a significantly negative
    /// eigenvalue was found.
    #[error("{context}: eigenvalue {min_eig:.3e} below PSD floor {floor:.3e}")]
    NotPsd {
        context: &'static str,
        min_eig: f64,
        floor: f64,
    },

    /// Matrix expected unitary but ‖R†R − I‖ exceeded tolerance.
    #[error("{context}: unitarity residual {residual:.3e} exceeds {tol:.3e}")]
    NotUnitary {
        context: &'static str,
        residual: f64,
        tol: f64,
    },

    /// Square matrix required.
    #[error("{context}: matrix is {rows}x{cols}, square required")]
    NotSquare {
        context: &'static str,
        rows: usize,
        cols: usize,
    },

    /// Shape mismatch between operands.
    #[error("{context}: incompatible shapes {lhs} vs {rhs}")]
    ShapeMismatch {
        context: &'static str,
        lhs: String,
        rhs: String,
    },

    /// Invalid scene description.
    #[error("bad scene config: {0}")]
    BadConfig(String),

    /// Parameter binding incompatible with the scene.
    #[error("bad parameter binding: {0}")]
    BadBinding(String),

    /// Purification pair failed the A†B = diag(d) construction identity.
    #[error("purification gauge residual {residual:.3e} exceeds {tol:.3e}")]
    GaugeResidual { residual: f64, tol: f64 },

    /// Column spaces of the two purifications do not coincide at the
    /// requested rank tolerance, so B = PA has no solution.
    #[error("support mismatch: ranks {rank_a}/{rank_b}, largest principal angle {max_angle:.3e} rad")]
    SupportMismatch {
        rank_a: usize,
        rank_b: usize,
        max_angle: f64,
    },

    /// The derivative has weight on the kernel of rho, where the SLD
    /// equation is unsolvable.
    #[error("SLD support leak: ‖∂ρ‖ on null-null block = {leak:.3e}")]
    SupportLeak { leak: f64 },

    /// An outcome probability vanished while its derivative did not; the
    /// Fisher-information contribution diverges.
    #[error("singular outcome {index}: p = {prob:.3e}, dp = {dprob:.3e}")]
    SingularOutcome {
        index: usize,
        prob: f64,
        dprob: f64,
    },
}

impl Error {
    /// Short stable identifier, used for per-row status flags in CSV output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NonFinite { .. } => "NonFinite",
            Error::NotHermitian { .. } => "NotHermitian",
            Error::NotPsd { .. } => "NotPsd",
            Error::NotUnitary { .. } => "NotUnitary",
            Error::NotSquare { .. } => "NotSquare",
            Error::ShapeMismatch { .. } => "ShapeMismatch",
            Error::BadConfig(_) => "BadConfig",
            Error::BadBinding(_) => "BadBinding",
            Error::GaugeResidual { .. } => "GaugeResidual",
            Error::SupportMismatch { .. } => "SupportMismatch",
            Error::SupportLeak { .. } => "SupportLeak",
            Error::SingularOutcome { .. } => "SingularOutcome",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
