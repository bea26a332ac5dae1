//! Covariance and precision structure of nonparanormal distributions.
//!
//! `Y = f(X)` with `X ~ N(0, Sigma)` and a scalar `f` applied to every
//! coordinate. For odd `f` the covariance of `Y` is available in closed form
//! from the derivatives of `f` at zero, zeros of `Sigma` stay exactly zero,
//! and for near-identity precisions the transformed precision keeps the
//! original sparsity pattern up to `O(eps^2)` terms.
//!
//! Modules, bottom-up:
//!
//! - [`series`]: derivative sequences, `F_k`, `G_k`, mean/variance coefficients.
//! - [`moments`]: Gaussian moments and the Isserlis product formula.
//! - [`covariance`]: the exact transformed covariance and its double-series oracle.
//! - [`precision`]: near-identity analysis, `kappa`/`lambda`, predictions.
//! - [`graph`]: chain, star and grid precisions.
//! - [`mc`]: Monte Carlo verification.
//! - [`render`]: grayscale PGM export.

#![allow(clippy::needless_range_loop)]

pub mod covariance;
pub mod error;
pub mod exec;
pub mod graph;
pub mod matrix;
pub mod mc;
pub mod moments;
pub mod precision;
pub mod render;
pub mod series;

pub use error::{Error, Result};
pub use exec::Execution;
pub use matrix::SymMatrix;
pub use series::{make_builtin, Builtin, DerivativeSeries, Parity};
