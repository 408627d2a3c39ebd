//! Frobenius manifold of the dispersionless 2D Toda hierarchy, realized on
//! truncated Laurent series.
//!
//! Points of the manifold are pairs of series `(lambda, lambda_bar)`. The
//! crate computes the Frobenius structure at a point (products, flat metric,
//! intersection form), flat and canonical coordinates, the potential and its
//! third derivatives, and the loop-space hierarchy with its two Poisson
//! structures.
//!
//! Modules `verify` and `cli` drive the identity suites and the `todafm`
//! binary.

// tolerance checks read `!(x <= tol)`, which NaN fails
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod canonical;
pub mod cli;
pub mod error;
pub mod flatcoords;
pub mod hierarchy;
pub mod laurent;
pub mod manifold;
pub mod potential;
pub mod sampling;
pub mod verify;

pub use error::{Error, Result};
