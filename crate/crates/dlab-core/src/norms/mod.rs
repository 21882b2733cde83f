//! Fourier-side Lebesgue and Morrey norms, the modulation infimum `ℓ`,
//! mixed space-time norms and the Strichartz exponent calculus.

mod cells;
mod dyadic;
mod exponents;
mod interpolation;
mod morrey;
mod spacetime;
mod spec;

pub use cells::{lebesgue, morrey, Cells, MorreyExponents, MorreyValue, ScaleWindow};
pub use dyadic::{scale_length, DyadicInterval};
pub use exponents::{
    exponents_x, exponents_y, is_acceptable, is_conjugate_acceptable, ExponentPair, Preset, PRESET_EPS,
};
pub use interpolation::morrey_interpolation_check;
pub use morrey::{
    check_alpha_sigma, conj, default_window, ell, lhat_norm, morrey_hat, morrey_norm, morrey_physical, sample_cells,
    spectrum_cells, EllValue,
};
pub use spacetime::{mixed_norm, x_norm, y_norm};
pub use spec::{NormKind, NormSpec};
