//! Random eigenpairs of monotone homogeneous maps on solid cones.
//!
//! Given a stationary random sequence of maps `D_k : K_k -> K_{k+1}` between
//! solid polyhedral cones, this crate computes the pair `(alpha_k, x_k)` with
//! `alpha_k * x_{k+1} = D_k(x_k)`, `x_k` interior to `K_k` and normalized by a
//! dual functional. The vector at time zero is obtained by pullback iteration:
//! compositions started ever further in the past, normalized on the section of
//! the cone, contract to a single point in the Hilbert projective metric.
//!
//! Module map:
//!
//! - [`cones`]: polyhedral cones, their orders, dual functionals and sections.
//! - [`hilbert`]: the Hilbert projective metric and its ratio functionals.
//! - [`maps`]: monotone homogeneous map families and sampling classifiers.
//! - [`envpath`]: a seeded two-sided environment path and the cocycle over it.
//! - [`solver`]: pullback solve, forward eigenpair path and diagnostics.
//! - [`experiment`]: config-driven runs, sweeps and the verification suite.

// `!(v > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cones;
pub mod envpath;
mod error;
pub mod experiment;
pub mod hilbert;
pub mod maps;
pub mod solver;

pub use error::{Error, Result};

pub use nalgebra::{DMatrix, DVector};
