//! Dense linear algebra, forward-mode differentiation, Newton's method and
//! Gauss–Legendre quadrature for the small systems handled by this crate.

pub mod diff;
pub mod linalg;
pub mod newton;
pub mod quadrature;
pub mod scalar;

pub use diff::{jacobian, JacobianMode, VectorMap};
pub use linalg::{solve_dense, Matrix};
pub use newton::{newton_solve, NewtonOutcome, NewtonSettings};
pub use quadrature::{gauss_legendre, gauss_rule, GaussRule, MAX_GAUSS_ORDER};
pub use scalar::{Dual, Scalar};
