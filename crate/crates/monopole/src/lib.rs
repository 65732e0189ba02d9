//! Numerical tests of the Hitchin conditions for the cyclically symmetric
//! charge-3 spectral curves η³ + χ(ζ⁶ + bζ³ − 1) = 0.
//!
//! The pipeline runs [`curve::solve_curve`] → [`curve::build_period_matrices`]
//! → [`curve::build_vectors`] and then counts zeros of the reduced theta
//! quotients with [`vanishing::count_zeros`].

pub mod error;
pub mod specfun;
pub mod theta;
pub mod symplectic;
pub mod curve;
pub mod vanishing;
pub mod report;
pub mod selftest;
pub mod cli;

pub use error::{Error, Result};
