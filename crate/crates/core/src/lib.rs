//! Generalized Douglas-Rachford (gDR) projection methods for set feasibility
//! problems in finite-dimensional Euclidean space.
//!
//! The crate provides:
//!
//! * a catalog of sets with exact projectors ([`sets`]),
//! * the gDR operator family `T = (1-a)Id + a P_B^mu P_A^lambda` and its
//!   fixed-point / gap analysis ([`operators`]),
//! * cyclic schedules over indexed set families, including the pair-graph
//!   connectedness conditions ([`cyclic`]),
//! * numerical estimators for regularity quantities (CQ numbers, linear
//!   regularity moduli) and the closed-form convergence-rate constants
//!   ([`regularity`]),
//! * trajectory diagnostics: rate fitting and inequality audits
//!   ([`diagnostics`]),
//! * a built-in instance catalog plus JSON/CSV reporting used by the `gdr`
//!   command-line tool ([`catalog`], [`config`], [`report`]).
//!
//! Everything is plain `f64` arithmetic on `Vec<f64>` points; runs are
//! deterministic given identical inputs and seeds.

pub mod catalog;
pub mod config;
pub mod cyclic;
pub mod diagnostics;
pub mod geometry;
pub mod operators;
pub mod predict;
pub mod regularity;
pub mod report;
pub mod sets;

/// Errors shared by every module in the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("polyhedron is empty (no feasible point found by face enumeration)")]
    InfeasiblePolyhedron,

    #[error("non-finite iterate at sub-step {step} (diverging run)")]
    NonFiniteIterate { step: usize },

    #[error("unsupported size: {0}")]
    UnsupportedSize(String),

    #[error("degenerate sampling: {0}")]
    DegenerateSampling(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("configuration error: {0}")]
    Config(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
