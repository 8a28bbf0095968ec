//! Casimir interaction energies between compact scatterers.
//!
//! The interaction energy of two bodies immersed in a fluctuating field is
//! computed from the determinant of `1 - T_A G_0 T_B G_0`, where `T` are the
//! transition operators of the bodies and `G_0` is the free propagator,
//! integrated along the imaginary frequency axis:
//!
//! ```text
//! E = sum_m  integral dw/2pi  ln det(1 - K^(m)(iw))
//! ```
//!
//! The operator is truncated in a spherical-wave basis around the two body
//! centers. The crate ships the special-function layer (scaled half-integer
//! modified Bessel functions), the angular-momentum layer (Wigner 3j symbols
//! and multipole translation matrices), T-matrices for spheres and mirrors,
//! block assembly with stable log-determinants, and the frequency quadrature
//! that turns all of it into energies.
//!
//! Everything is evaluated in renormalized (scaled) form so that the extreme
//! exponential ranges of the Bessel factors cancel analytically; determinants
//! are invariant under this similarity rescaling.

pub mod angular;
pub mod energy;
pub mod kernel;
pub mod quad;
pub mod specfun;
pub mod tmatrix;

use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument was outside the documented domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A scaled Bessel value left the representable floating-point range.
    #[error("scaled Bessel value out of floating range at l={l}, x={x}")]
    BesselRange { l: usize, x: f64 },

    /// An invalid physical configuration (overlapping bodies, wrong field kind, ...).
    #[error("configuration error: {0}")]
    Config(String),

    /// A pivot collapsed during factorization; valid configurations cannot do this.
    #[error("singular factorization: |pivot| = {pivot:e} at step {step}")]
    SingularPivot { pivot: f64, step: usize },

    /// det(1 - K) came out non-positive, which is impossible for valid blocks.
    #[error("non-positive determinant (parity {parity})")]
    NonPositiveDeterminant { parity: i32 },

    /// Doubling the quadrature nodes moved the result more than the requested tolerance.
    #[error("quadrature not converged: relative change {change:e} exceeds {tol:e}")]
    NonConvergence { change: f64, tol: f64 },

    /// The truncation-convergence fit could not be performed.
    #[error("degenerate convergence fit: {0}")]
    FitDegenerate(String),
}

pub type Result<T> = std::result::Result<T, Error>;
