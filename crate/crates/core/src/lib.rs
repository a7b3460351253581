//! Fractional integrals and derivatives of radial basis functions.

// `!(x > 0.0)` is used on purpose: it also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod closedform;
pub mod error;
pub mod fracops;
pub mod rbf;
pub mod solvers;
pub mod specfun;

pub use error::{Error, Result};
