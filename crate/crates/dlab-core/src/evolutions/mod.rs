//! Linear propagators, the gKdV and NLS solvers, and the soliton family.

mod config;
mod gkdv;
mod linear;
mod nls;
mod soliton;

pub use config::{gkdv_stable_dt, in_subcritical_range, require_subcritical_range, SolveConfig, BLOWUP_SUP, RK4_IMAGINARY_LIMIT};
pub use gkdv::gkdv_solve;
pub(crate) use gkdv::{from_raw, raw_coefficients, Padded};
pub use linear::{airy_propagate, schrodinger_propagate};
pub use nls::nls_solve;
pub use soliton::{c_alpha, energy, mass, soliton_profile, soliton_q, soliton_wave, stability_compare, StabilityReport};
