//! Hellinger-distance coherence of bipartite quantum states relative to
//! von Neumann and weak measurements.
//!
//! The crate is `no_std` (it needs `alloc`) and contains only numerics:
//!
//! - [`linalg`]: dense complex matrices, Hermitian eigendecomposition, PSD square roots.
//! - [`states`]: density matrices and the Bell-diagonal / Werner families.
//! - [`measurements`]: projective measurements on subsystem `a` and the weak
//!   two-outcome family `Ω±x`.
//! - [`coherence`]: Hellinger distance, skew information, coherence relative
//!   to projective and weak measurements, H-MIN.
//! - [`correlation`]: the coherence-induced correlation `Q_w` and the channel
//!   machinery used to audit it.
//! - [`uncertainty`]: variance decomposition, the Hellinger uncertainty
//!   product, weak values and weak variance.
//! - [`optimize`]: grid + Nelder–Mead search over measurement bases.
//! - [`rng`]: splitmix64-based seeded sampling.
//!
//! File formats, the audit harness and the command-line tool live in the
//! `weakcoh` crate.

#![cfg_attr(not(test), no_std)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![forbid(unsafe_code)]

extern crate alloc;

mod error;
mod math;

pub mod coherence;
pub mod correlation;
pub mod linalg;
pub mod measurements;
pub mod optimize;
pub mod rng;
pub mod states;
pub mod uncertainty;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, EigenDecomposition};
pub use num_complex::Complex64;

/// Tolerances shared across modules.
pub mod tol {
    /// Elementwise Hermiticity tolerance for matrix constructors.
    pub const HERMITIAN: f64 = 1e-9;
    /// Allowed `|tr ρ − 1|` for a density matrix.
    pub const TRACE: f64 = 1e-8;
    /// Most negative eigenvalue accepted for a density matrix.
    pub const PSD: f64 = 1e-9;
    /// Default clamp for [`crate::linalg::psd_sqrt`].
    pub const SQRT_CLAMP: f64 = 1e-10;
    /// Unitarity tolerance for `U†U = I`.
    pub const UNITARY: f64 = 1e-9;
    /// Orthogonality / completeness tolerance for projective measurements.
    pub const PROJECTOR: f64 = 1e-10;
    /// Completeness tolerance for Kraus channels.
    pub const KRAUS: f64 = 1e-9;
    /// Normalization tolerance for probability vectors and kets.
    pub const NORMALIZATION: f64 = 1e-10;
    /// Negative coherence values above `-CLAMP` are reported as zero.
    pub const CLAMP: f64 = 1e-12;
    /// Smallest post-selection probability accepted for weak values.
    pub const POSTSELECTION: f64 = 1e-12;
    /// Spectral gap below which marginal eigenvalues count as degenerate.
    pub const DEGENERACY_GAP: f64 = 1e-8;
}
