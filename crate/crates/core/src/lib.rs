//! Exact operator norms of generalized Cesaro means on the local Dirichlet
//! space at a boundary point, together with certified upper and lower bounds
//! and a harness for checking their growth as the degree tends to infinity.
//!
//! The norm of `sigma_n^a` equals the spectral norm of the upper-triangular
//! multiplier matrix `T_c` built from its coefficients; see [`hadamard`].

pub mod bounds;
pub mod cesaro;
pub mod cli;
pub mod dirichlet;
pub mod error;
pub mod hadamard;
pub mod specfun;
pub mod sweep;
pub mod verify;

pub use error::{Error, Result};
