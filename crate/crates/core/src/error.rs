//! Crate-wide error type.
//!
//! Every failure mode is a named variant so callers (and the CLI) can map
//! numerical diagnostics to actionable messages: an inadmissible parameter
//! is not the same condition as a truncation tail that merely needs a larger
//! cutoff, and a quadrature that failed its refinement check is not the same
//! as one that was configured with an aliasing angular grid.

use thiserror::Error;

/// All errors produced by this crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Matrix cutoff too small for the requested construction.
    #[error("dimension too small: need at least {needed} levels, got {got}")]
    DimensionTooSmall { needed: usize, got: usize },

    /// Guard band leaves no usable block.
    #[error("guard band {guard} leaves no usable block below {levels} levels")]
    GuardTooLarge { guard: usize, levels: usize },

    /// Deformation coefficients do not satisfy `alpha*delta - beta*gamma = 1`.
    #[error("not a canonical pair: alpha*delta - beta*gamma = {value}, must equal 1")]
    NotCanonical { value: f64 },

    /// Structurally invalid parameters (zero diagonal coefficients, NaN, ...).
    #[error("invalid deformation parameters: {0}")]
    InvalidParams(String),

    /// Parameters outside the square-summability region of the vacua.
    #[error("inadmissible parameters for {family}: {reason}")]
    Admissibility { family: String, reason: String },

    /// Vacuum or family mass on the guarded top levels exceeds tolerance.
    #[error("truncation tail mass {tail:.3e} exceeds tolerance {tol:.3e}; increase the dimension")]
    Truncation { tail: f64, tol: f64 },

    /// The two vacua are numerically orthogonal; no biorthogonal scaling exists.
    #[error("vacuum pairing {value:.3e} is too close to zero to normalize against")]
    Pairing { value: f64 },

    /// A Gram or metric matrix failed its positivity floor.
    #[error("matrix not positive definite: eigenvalue {eigenvalue:.3e} below floor {floor:.3e}")]
    NotPositiveDefinite { eigenvalue: f64, floor: f64 },

    /// A matrix inversion was refused or failed.
    #[error("ill-conditioned matrix: {0}")]
    IllConditioned(String),

    /// Coherent displacement series truncated too early for the requested `z`.
    #[error(
        "coherent series tail {tail:.3e} exceeds tolerance {tol:.3e} at |z|^2 = {z_sq:.3}; \
         extend the family"
    )]
    Tail { tail: f64, tol: f64, z_sq: f64 },

    /// Refining the quadrature nodes moved the result more than tolerance.
    #[error(
        "quadrature unconverged: a 50% node refinement moved the result by {delta:.3e} \
         (tolerance {tol:.3e})"
    )]
    Quadrature { delta: f64, tol: f64 },

    /// Log-profile of grid data is not a straight line in `x^2`.
    #[error("gaussian fit residual {residual:.3e} exceeds {tol:.3e}: profile is not gaussian")]
    Fit { residual: f64, tol: f64 },

    /// Not enough trustworthy grid points to regress on.
    #[error("too few usable grid points for the gaussian fit: {0}")]
    FitWindow(usize),

    /// Malformed matrix text file.
    #[error("matrix file: {0}")]
    MatrixFile(String),

    /// Invalid run configuration.
    #[error("config: {0}")]
    Config(String),

    /// Report emission failed at a specific path.
    #[error("writing {path}: {source}")]
    Emit { path: String, source: std::io::Error },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
