//! roadfield: discretization, principal eigenvalues, and long-time dynamics
//! for a reaction-diffusion habitat coupled to a fast diffusion road.
//!
//! The crate assembles finite-difference operators for the coupled
//! road-field system on several geometries (truncated rectangles, periodic
//! cells and strips, half-strips with an exchange boundary), computes their
//! generalized principal eigenvalues, and integrates the nonlinear dynamics
//! to observe the persistence/extinction dichotomy the eigenvalue sign
//! predicts.

pub mod analysis;
pub mod artifacts;
pub mod banded;
pub mod config;
pub mod dynamics;
pub mod eigen;
pub mod error;
pub mod fixtures;
pub mod geometry;
pub mod model;
pub mod operator;
pub mod runner;
pub mod sparse;
pub mod util;

pub use error::{Error, Result};
pub use model::{
    validate_hypotheses, HypothesisCheck, ModelParams, ReactionKind, ReactionSpec,
    ValidationReport,
};
