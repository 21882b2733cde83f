use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Largest `|λ dt|` on the imaginary axis inside the RK4 stability region.
pub const RK4_IMAGINARY_LIMIT: f64 = 2.8;

/// Sup norm beyond which a run is declared blown up.
pub const BLOWUP_SUP: f64 = 1e8;

/// Parameters shared by the gKdV and NLS solvers.
///
/// `t_end` may be negative, in which case the equation is run backward and
/// the returned frames are still in increasing time order.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveConfig {
    pub alpha: f64,
    pub mu: f64,
    pub coupling: f64,
    pub t_end: f64,
    pub dt: f64,
    pub store_every: usize,
    pub dealias_pad: usize,
}

impl SolveConfig {
    pub fn new(alpha: f64, mu: f64, t_end: f64, dt: f64) -> Self {
        SolveConfig { alpha, mu, coupling: 1.0, t_end, dt, store_every: 1, dealias_pad: 2 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return invalid(format!("alpha = {} must be positive", self.alpha));
        }
        if self.mu != 1.0 && self.mu != -1.0 {
            return invalid(format!("mu must be ±1, got {}", self.mu));
        }
        if !(self.coupling >= 0.0 && self.coupling.is_finite()) {
            return invalid(format!("coupling {} must be nonnegative", self.coupling));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return invalid(format!("dt = {} must be positive", self.dt));
        }
        if !self.t_end.is_finite() {
            return invalid("t_end must be finite");
        }
        if self.store_every == 0 || self.dealias_pad == 0 {
            return invalid("store_every and dealias_pad must be at least 1");
        }
        if !in_subcritical_range(self.alpha) {
            log::warn!("alpha = {} lies outside (8/5, 10/3); running anyway", self.alpha);
        }
        Ok(())
    }

    /// Step count and signed step that land exactly on `t_end`.
    pub fn steps(&self) -> (usize, f64) {
        let n = (self.t_end.abs() / self.dt).ceil().max(0.0) as usize;
        if n == 0 {
            (0, 0.0)
        } else {
            (n, self.t_end / n as f64)
        }
    }
}

/// The range of α covered by the long-time stability theory.
pub fn in_subcritical_range(alpha: f64) -> bool {
    alpha > 1.6 && alpha < 10.0 / 3.0
}

/// Rejects α outside `(8/5, 10/3)`, for checks that only hold in that range.
pub fn require_subcritical_range(alpha: f64) -> Result<()> {
    if in_subcritical_range(alpha) {
        Ok(())
    } else {
        invalid(format!("alpha = {alpha} is outside (8/5, 10/3)"))
    }
}

/// RK4 bound for the linearised nonlinear term `μ·C·∂ₓ((2α+1)|u|^{2α}·)`;
/// the dispersive term is integrated exactly and imposes no bound.
pub fn gkdv_stable_dt(alpha: f64, coupling: f64, sup_u: f64, xi_max: f64) -> f64 {
    let rate = (2.0 * alpha + 1.0) * coupling * sup_u.powf(2.0 * alpha) * xi_max;
    if rate > 0.0 {
        RK4_IMAGINARY_LIMIT / rate
    } else {
        f64::INFINITY
    }
}
