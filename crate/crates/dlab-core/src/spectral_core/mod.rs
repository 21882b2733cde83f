//! Periodic grids, unitary transforms, multipliers and binary I/O.

mod field;
mod function;
mod grid;
pub mod io;

pub use field::SpaceTimeField;
pub(crate) use function::fft_in_place;
pub use function::{derivative, fractional_derivative, GridFunction, Side};
pub use grid::Grid;
