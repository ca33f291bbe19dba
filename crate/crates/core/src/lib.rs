//! Solver for regular solutions and eigenvalues of perturbed Bessel
//! equations −u″ + (l(l+1)/x² + q(x))u = λu on (0, b].
//!
//! The method approximates the transmutation kernel of the problem by a
//! linear combination of generalized wave polynomials built from recursive
//! integrals of a particular solution. Fixing the combination through a
//! one-dimensional uniform approximation problem yields closed-form
//! approximate solutions whose accuracy is uniform in the spectral
//! parameter, so large batches of eigenvalues come out with near-constant
//! absolute error.

pub mod approx;
pub mod cli;
pub mod error;
pub mod grid;
mod linalg;
pub mod spps;
pub mod wavebasis;
pub mod solver;
pub mod specfun;

pub use error::{Error, Result};
