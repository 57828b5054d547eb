//! Truncated Jacobi expansions of functions with one algebraic singularity:
//! expansion coefficients, pointwise/weighted/max truncation errors, the
//! reproducing-kernel error identity, best uniform approximation for
//! comparison, and a harness that fits and checks the convergence rates.

pub mod bessel;
pub mod best_approx;
pub mod error;
pub mod expansion;
pub mod gamma;
pub mod jacobi;
pub mod kernel;
pub mod phi;
pub mod quadrature;
pub mod rates;

pub use error::{Error, Result};
