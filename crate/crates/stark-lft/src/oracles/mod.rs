//! Independent validation machinery: a plain Numerov integrator and a
//! high-precision linear-algebra path.  Nothing here shares discretization or
//! solver code with the production modules.

pub mod highprec;
pub mod numerov;

pub use highprec::{highprec_eigvals_sym, highprec_inverse, highprec_solve, BigFloat};
pub use numerov::{numerov_integrate, shoot_eigenvalue, OdeProblem};
