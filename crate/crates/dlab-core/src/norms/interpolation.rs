use super::cells::ScaleWindow;
use super::morrey::morrey_physical;
use crate::error::{invalid, Result};
use crate::spectral_core::GridFunction;

/// `‖f‖_{M^p_{q,r}} / (‖f‖_{M^p_{s,∞}}^{1−p/r} ‖f‖_{M^p_{p,∞}}^{p/r})` on the physical side.
pub fn morrey_interpolation_check(f: &GridFunction, p: f64, q: f64, r: f64, s: f64) -> Result<f64> {
    if !(0.0 < q && q < p && p < r && r.is_finite()) {
        return invalid(format!("need 0 < q < p < r < ∞, got q = {q}, p = {p}, r = {r}"));
    }
    let theta = 1.0 - p / r;
    if !(theta / s + 1.0 / r < 1.0 / q) {
        return invalid(format!(
            "hypothesis (1/s)(1 − p/r) + (1/p)(p/r) < 1/q fails: {} ≥ {}",
            theta / s + 1.0 / r,
            1.0 / q
        ));
    }
    if !(s > 0.0 && s <= p) {
        return invalid(format!("M^p_(s,∞) needs 0 < s ≤ p, got s = {s}"));
    }
    let num = morrey_physical(f, p, q, r, ScaleWindow::All)?;
    if num == 0.0 {
        return Ok(0.0);
    }
    let a = morrey_physical(f, p, s, f64::INFINITY, ScaleWindow::All)?;
    let b = morrey_physical(f, p, p, f64::INFINITY, ScaleWindow::All)?;
    Ok(num / (a.powf(theta) * b.powf(p / r)))
}
