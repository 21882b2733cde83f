use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::norms::{lhat_norm, x_norm, Preset};
use crate::spectral_core::{derivative, Grid, GridFunction, SpaceTimeField};
use crate::special::integrate;

/// `Q(x) = (α+1)^{1/(2α)} sech^{1/α}(αx)`, the positive even solution of `−Q″ + Q = Q^{2α+1}`.
pub fn soliton_profile(alpha: f64, x: f64) -> f64 {
    (alpha + 1.0).powf(0.5 / alpha) * (1.0 / (alpha * x).cosh()).powf(1.0 / alpha)
}

pub fn soliton_q(alpha: f64, grid: Grid) -> GridFunction {
    GridFunction::from_real_fn(grid, |x| soliton_profile(alpha, x))
}

/// Travelling wave `c^{1/α} Q(c(x − c²t))` of the focusing (`μ = −1`) equation.
pub fn soliton_wave(alpha: f64, c: f64, t: f64, grid: Grid) -> GridFunction {
    GridFunction::from_real_fn(grid, |x| c.powf(1.0 / alpha) * soliton_profile(alpha, c * (x - c * c * t)))
}

// The integrals below decay like e^{−2|x|} or faster.
const HALF_WIDTH: f64 = 60.0;

fn sech(z: f64) -> f64 {
    1.0 / z.cosh()
}

/// `(‖Q′‖², ‖Q‖^{2α+2}_{2α+2})` by adaptive quadrature of the closed forms.
fn soliton_integrals(alpha: f64) -> (f64, f64) {
    let amp = (alpha + 1.0).powf(0.5 / alpha);
    let dq2 = integrate(
        |x| {
            let z = alpha * x;
            (amp * sech(z).powf(1.0 / alpha) * z.tanh()).powi(2)
        },
        0.0,
        HALF_WIDTH,
        1e-15,
    );
    let qp = integrate(|x| soliton_profile(alpha, x).powf(2.0 * alpha + 2.0), 0.0, HALF_WIDTH, 1e-15);
    (2.0 * dq2, 2.0 * qp)
}

/// `c_α = ((α+1)‖Q′‖² / ‖Q‖^{2α+2}_{2α+2})^{1/(2α)}`, the scale with `E[c_α Q] = 0`.
pub fn c_alpha(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0) {
        return invalid(format!("alpha = {alpha} must be positive"));
    }
    let (dq2, qp) = soliton_integrals(alpha);
    let c = ((alpha + 1.0) * dq2 / qp).powf(0.5 / alpha);
    debug_assert!(c < 1.0, "c_alpha = {c} is not below 1");
    Ok(c)
}

/// `E[u] = ½‖∂ₓu‖² + μ/(2α+2)‖u‖^{2α+2}_{2α+2}` on the grid.
pub fn energy(u: &GridFunction, alpha: f64, mu: f64) -> f64 {
    let du = derivative(u, 1).physical();
    let u = u.physical();
    let dx = u.grid().dx();
    let kinetic: f64 = du.values().iter().map(|v| v.norm_sqr()).sum::<f64>() * dx;
    let potential: f64 = u.values().iter().map(|v| v.norm().powf(2.0 * alpha + 2.0)).sum::<f64>() * dx;
    0.5 * kinetic + mu / (2.0 * alpha + 2.0) * potential
}

/// `M[u] = ½‖u‖²`.
pub fn mass(u: &GridFunction) -> f64 {
    0.5 * u.physical().l2_norm().powi(2)
}

/// Distances between two runs on a common window.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub s_gap: f64,
    pub l_gap: f64,
    pub lhat_sup_gap: f64,
}

pub fn stability_compare(a: &SpaceTimeField, b: &SpaceTimeField, alpha: f64) -> Result<StabilityReport> {
    if !a.grid().same_as(b.grid()) {
        return invalid("runs live on different grids");
    }
    if a.times().len() != b.times().len() || a.times().iter().zip(b.times()).any(|(x, y)| (x - y).abs() > 1e-12) {
        return invalid("runs have different time samples");
    }
    let d = a.sub(b)?;
    let s_gap = x_norm(&d, Preset::S.s(alpha), alpha)?;
    let l_gap = x_norm(&d, Preset::L.s(alpha), alpha)?;
    let mut lhat_sup_gap = 0.0f64;
    for f in d.frames() {
        lhat_sup_gap = lhat_sup_gap.max(lhat_norm(f, alpha)?);
    }
    Ok(StabilityReport { s_gap, l_gap, lhat_sup_gap })
}
