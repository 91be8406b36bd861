//! Spectral tooling for testing scale-invariant blow-up criteria on periodic Euler,
//! Navier–Stokes and surface quasi-geostrophic flows.

// `!(x > 0.0)` is used on purpose so NaN is rejected along with the rest.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod criteria;
pub mod diagnostics;
pub mod error;
pub mod flow;
pub mod spectral;

pub use error::{Error, Result};
