//! Structure-preserving time integration for QSR-dissipative systems.
//!
//! The central method ([`integrators::dg_qsr_step`]) combines a discrete
//! gradient of the storage function with an orthogonal splitting of the
//! drift so that every step satisfies the discrete power balance
//!
//! ```text
//! (H(z_{i+1}) − H(z_i)) / τ_i = s(ū_i, ȳ_i) − ‖ℓ̄_i + W̄_i ū_i‖²
//! ```
//!
//! up to the accuracy of the nonlinear solve. The [`systems`] module ships
//! four benchmark systems and [`bench`] drives the convergence and power
//! balance experiments behind the `qsr-dg` command line tool.

pub mod bench;
pub mod dgradients;
pub mod error;
pub mod integrators;
pub mod model;
pub mod numerics;
pub mod systems;

pub use error::{Error, Result};
