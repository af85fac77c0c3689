//! Numerical laboratory for the failure of Neumann eigenvalue domain
//! monotonicity on convex domains.
//!
//! Layers, bottom up: [`specfun`] (Bessel functions and zeros), [`constants`]
//! (closed-form bounds), [`analytic_spectra`] (exact spectra), [`geometry`]
//! (domains and meshes), [`fem`] (P1 eigensolver), [`experiments`] (CLI
//! reports).

pub mod analytic_spectra;
pub mod constants;
pub mod error;
pub mod experiments;
pub mod fem;
pub mod format;
pub mod geometry;
pub mod specfun;

pub use error::{Error, Result};
