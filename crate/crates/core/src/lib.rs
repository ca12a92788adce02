//! Quantum-limited estimation of source separations in weak incoherent
//! imaging with linear interferometers.
//!
//! A scene of point emitters feeds a bank of collectors through a phase
//! kernel; the per-photon state is `ρ(θ) = C(θ)C(θ)†`. This crate computes
//! the quantum Fisher information of that family and builds interferometers
//! (unitaries on collector modes, followed by photon counting) that reach
//! it:
//!
//! * the **corrected construction** diagonalizes `P = B·A⁺` over a
//!   purification pair with `A†B = diag(d)`, which enforces the row
//!   proportionality `RB = Λ·RA` and saturates the quantum fidelity;
//! * the **QR construction** triangularizes the purifications instead.
//!   It is optimal only for inversion-symmetric scenes; elsewhere the
//!   row-norm fidelity strictly exceeds the diagonal-product shortcut it
//!   relies on, and photon counting in that basis loses information;
//! * the **SLD limit** measures in the eigenbasis of the symmetric
//!   logarithmic derivative, the δθ → 0 limit of the corrected plan.
//!
//! Everything is verified against independent oracles: fidelity through
//! matrix square roots, QFI through fidelity curvature, and brute-force
//! random-unitary search.
//!
//! ## Examples
//!
//! Each major capability has a runnable example:
//!
//! ```bash
//! cargo run -p qlim --example fig1_scan              # full grid scan, CSV + SVG
//! cargo run -p qlim --example counterexample         # symmetry on/off comparison
//! cargo run -p qlim --example optimal_interferometer # P = BA⁺ identities
//! cargo run -p qlim --example qr_suboptimality       # row norms vs diagonals
//! cargo run -p qlim --example sld_measurement        # SLD solve + saturation
//! cargo run -p qlim --example fidelity_oracles       # overlap vs Uhlmann routes
//! cargo run -p qlim --example random_search          # Haar search ceiling
//! cargo run -p qlim --example custom_scene           # JSON scene configs
//! ```
//!
//! The `qlim` binary exposes the same machinery as `fig1`,
//! `counterexample` and `selfcheck` subcommands; see the README.
//!
//! ## Conventions
//!
//! All decompositions ([`matdecomp`]) fix ordering and phases so results
//! are bit-reproducible: spectra descend, and every eigen/singular vector
//! is phased to make its largest-magnitude entry real and nonnegative.
//! Randomized routines take explicit seeds and document their generator.

pub mod error;
pub mod fisher;
pub mod interferometer;
pub mod matdecomp;
pub mod oracle;
pub mod purify;
pub mod scan;
pub mod scene;
pub mod selfcheck;

pub use error::{Error, Result};
pub use matdecomp::CMatrix;
pub use scene::{Scene, SceneConfig};
