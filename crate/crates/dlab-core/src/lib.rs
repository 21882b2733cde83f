//! Spectral numerics for mass-subcritical generalized KdV.
//!
//! The real line is modelled by a large periodic grid. Fourier-side norms
//! treat the coefficient array as a piecewise-constant function of frequency,
//! which makes dyadic sums exact and keeps the scale and modulation
//! symmetries of the continuous problem intact on the grid.

pub mod checks;
pub mod deformations;
pub mod embedding;
pub mod error;
pub mod evolutions;
pub mod norms;
pub mod profiles;
pub mod special;
pub mod spectral_core;

pub use error::{Error, Result};
