//! Radial solutions of the overdetermined free-boundary problems
//! `QS(f, g)` (Laplacian, `|∇u| = g` on the free boundary) and `B(f, g)`
//! (bi-Laplacian with Navier conditions, `|∇v| |∇Δv| = g`), together with
//! evaluators for their integral existence conditions and numerical checks
//! of the accompanying integral identities.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod biharmonic;
pub mod calculus;
pub mod cli;
pub mod error;
pub mod existence;
pub mod freeboundary;
pub mod ledger;
pub mod model;
pub mod parallel;
pub mod poisson;

pub use error::{Error, Result};
