use num_complex::Complex64;

use super::config::SolveConfig;
use super::gkdv::{check_frame, finish, from_raw, raw_coefficients};
use crate::error::Result;
use crate::spectral_core::{GridFunction, SpaceTimeField};

/// Strang split-step for `i∂ₜv − ∂ₓ²v = −μC|v|^{2α}v`.
///
/// The linear part has symbol `e^{itξ²}`; the nonlinear part is the exact
/// pointwise rotation `v ↦ e^{iμC|v|^{2α}dt} v`, which is what the equation
/// as written integrates to.
pub fn nls_solve(v0: &GridFunction, cfg: &SolveConfig) -> Result<SpaceTimeField> {
    cfg.validate()?;
    let grid = *v0.grid();
    let (steps, dt) = cfg.steps();
    let half: Vec<Complex64> = grid.xis().iter().map(|x| Complex64::from_polar(1.0, 0.5 * dt * x * x)).collect();
    let coeff = cfg.mu * cfg.coupling * dt;
    let alpha = cfg.alpha;
    let mut c = raw_coefficients(v0);
    let mut times = vec![0.0];
    let mut frames = vec![v0.physical()];
    let mut t = 0.0;
    for step in 1..=steps {
        c.iter_mut().zip(&half).for_each(|(c, e)| *c *= e);
        if coeff != 0.0 {
            let mut v = from_raw(grid, &c);
            for x in v.values_mut() {
                *x *= Complex64::from_polar(1.0, coeff * x.norm_sqr().powf(alpha));
            }
            c = raw_coefficients(&v);
        }
        c.iter_mut().zip(&half).for_each(|(c, e)| *c *= e);
        let t_new = step as f64 * dt;
        if step % cfg.store_every == 0 || step == steps {
            let frame = from_raw(grid, &c);
            check_frame(t, &frame)?;
            times.push(t_new);
            frames.push(frame);
        }
        t = t_new;
    }
    finish(grid, times, frames)
}
