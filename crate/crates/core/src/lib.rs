//! Symbolic-numeric engine for four- and five-point correlation functions of
//! fusion products: log-power series, Fuchsian and Levelt solvers, a
//! Borcherds-identity rewriter, and a rank-one free-boson testbed.

pub mod error;
pub mod fuchsian;
pub mod heisenberg;
pub mod logseries;
pub mod mat;
pub mod pipeline;
pub mod rewriter;
pub mod scalar;
pub mod cli;

pub use error::{Error, Result};
pub use scalar::{GaussRational, Scalar, Q};
