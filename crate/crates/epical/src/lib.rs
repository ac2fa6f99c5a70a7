//! Calibration of covariate-dependent SIR epidemic parameters.
//!
//! The contact rate β(x) and removal rate γ(x) of a discrete SIR model are
//! treated as unknown functions of daily covariates (weather, intervention
//! level). A joint Gaussian-process prior on their logits, with a
//! cross-correlation ρ coupling the two surfaces, is fit to daily count data
//! by a Gibbs-within-Metropolis sampler under a Poisson likelihood. From the
//! posterior the crate produces:
//!
//! - forecasts of future daily counts with posterior-predictive intervals,
//! - draws of the basic reproduction number surface R₀(x) = β(x)/γ(x),
//! - a functional-ANOVA decomposition of R₀(x) with Sobol main-effect and
//!   pairwise-interaction indices.
//!
//! See the `examples/` directory for one runnable program per capability, and
//! the `epical` binary for the `simulate` / `fit` / `predict` / `sensitivity`
//! / `report` pipeline.

// `!(v > 0.0)` style guards are used throughout: unlike `v <= 0.0`, they also
// reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod data;
pub mod error;
pub mod gp;
pub mod mcmc;
pub mod posterior;
pub mod sensitivity;
pub mod sir;

pub use error::{Error, Result};
