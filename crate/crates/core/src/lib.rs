//! A laboratory for a strong law of large numbers over sequences that mix a
//! pairwise independent, centered part with a sparse, arbitrarily dependent
//! part whose moment orders shrink to zero.
//!
//! The crate is organized bottom-up:
//!
//! * [`rng`] derives reproducible per-path random streams.
//! * [`schedules`] builds the moment-order schedule `a_n` and the sparsity
//!   pattern that decides where the heavy-tailed terms are inserted.
//! * [`generators`] samples the well-behaved part `X` and the heavy part `Y`.
//! * [`mixture`] interleaves them into the observed sequence `Z_n`.
//! * [`hypotheses`] checks every assumption of the limit theorem.
//! * [`calculus`] reproduces the series bounds used to control the heavy part.
//! * [`diagnostics`] runs path ensembles and turns suffix maxima of the running
//!   averages into a convergence verdict.
//! * [`experiment`] is the batch front end: JSON configs in, reports out.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod calculus;
pub mod diagnostics;
pub mod error;
pub mod experiment;
pub mod generators;
pub mod hypotheses;
pub mod mixture;
pub mod quadrature;
pub mod rng;
pub mod schedules;
mod serde_float;

pub use error::{Error, Result};
