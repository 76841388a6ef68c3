//! Numerical laboratory for spectral analysis on Heisenberg-type groups:
//! group structures and their symplectic geometry, stable special-function
//! evaluation, twisted Laplacians with their Laguerre spectral projections,
//! a joint functional calculus with explicit convolution kernels, and scan
//! experiments for the associated restriction and Plancherel estimates.
//!
//! Heavy paths are data-parallel via rayon (feature `parallel`, on by
//! default) with a sequential fallback; both modes produce bit-identical
//! results because reductions use a fixed pairwise order.

pub mod counterexample;
pub mod error;
pub mod estimates;
pub mod exec;
pub mod fftutil;
pub mod grid;
pub mod group;
pub mod calculus;
pub mod kernel;
pub mod multiplier;
pub mod quad;
pub mod specfun;
pub mod twisted;

pub use error::{Error, Result};
