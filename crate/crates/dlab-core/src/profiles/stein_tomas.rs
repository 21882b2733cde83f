use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::norms::{check_alpha_sigma, morrey_norm, ScaleWindow};
use crate::spectral_core::GridFunction;

/// Largest relative change of the ratio between the half and the full window.
pub const TAIL_TOL: f64 = 0.01;

/// Symmetric time window `[−T, T]`: uniform steps `fine_step` up to `knee`,
/// then geometric steps of ratio `1 + growth`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeWindow {
    pub half_width: f64,
    pub knee: f64,
    pub fine_step: f64,
    pub growth: f64,
}

impl TimeWindow {
    /// Window in units of `τ = ξ_c^{−3}` with `ξ_c` the rms frequency of `f`,
    /// so it transforms with `f` under dilations.
    pub fn auto(f: &GridFunction) -> Self {
        let tau = rms_frequency(f).map(|x| x.powi(-3)).unwrap_or(1.0);
        TimeWindow { half_width: 256.0 * tau, knee: tau, fine_step: tau / 64.0, growth: 0.02 }
    }

    pub fn with_half_width(self, half_width: f64) -> Self {
        TimeWindow { half_width, ..self }
    }

    fn validate(&self) -> Result<()> {
        if !(self.half_width > 0.0 && self.knee > 0.0 && self.fine_step > 0.0 && self.growth > 0.0) {
            return invalid(format!("time window parameters must be positive: {self:?}"));
        }
        Ok(())
    }

    /// Nonnegative sample times `0 = t₀ < … < t_m = T`.
    pub fn times(&self) -> Vec<f64> {
        let mut ts = vec![0.0];
        let mut t = 0.0;
        while t < self.half_width {
            let step = if t < self.knee { self.fine_step } else { t * self.growth };
            t = (t + step).min(self.half_width);
            ts.push(t);
        }
        ts
    }
}

fn rms_frequency(f: &GridFunction) -> Option<f64> {
    let hat = f.fourier();
    let g = *hat.grid();
    let (mut m0, mut m2) = (0.0, 0.0);
    for (k, c) in hat.values().iter().enumerate() {
        let w = c.norm_sqr();
        m0 += w;
        m2 += w * g.xi(k).powi(2);
    }
    (m0 > 0.0 && m2 > 0.0).then(|| (m2 / m0).sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SteinTomas {
    pub ratio: f64,
    /// `‖|∂ₓ|^{1/(3α)} e^{−t∂ₓ³} f‖_{L^{3α}}` over `[−T, T]`.
    pub lhs: f64,
    /// `‖f‖_{M̂^α_{2,σ}}`.
    pub rhs: f64,
    /// Ratio over `[−T/2, T/2]`.
    pub half_window_ratio: f64,
    pub tail_change: f64,
    pub window: TimeWindow,
}

/// `∫|·|^q dx` of `|∂ₓ|^s e^{−t∂ₓ³} f` at each time.
fn slice_integrals(f: &GridFunction, s: f64, q: f64, times: &[f64]) -> Vec<f64> {
    use rayon::prelude::*;
    let hat = f.fourier();
    let g = *hat.grid();
    let weighted: Vec<Complex64> =
        hat.values().iter().enumerate().map(|(k, c)| c * g.xi(k).abs().powf(s)).collect();
    let xis = g.xis();
    let dx = g.dx();
    times
        .par_iter()
        .map(|&t| {
            let vals: Vec<Complex64> =
                weighted.iter().zip(&xis).map(|(c, x)| c * Complex64::from_polar(1.0, t * x * x * x)).collect();
            let u = GridFunction::new(g, vals, crate::spectral_core::Side::Fourier).expect("length").physical();
            u.values().iter().map(|v| v.norm().powf(q)).sum::<f64>() * dx
        })
        .collect()
}

fn trapezoid(ts: &[f64], ys: &[f64]) -> f64 {
    ts.windows(2).zip(ys.windows(2)).map(|(t, y)| 0.5 * (t[1] - t[0]) * (y[0] + y[1])).sum()
}

/// `‖|∂ₓ|^{1/(3α)} e^{−t∂ₓ³} f‖_{L^{3α}_{t,x}} / ‖f‖_{M̂^α_{2,σ}}` over the window.
///
/// The window is rejected when halving it moves the ratio by more than
/// [`TAIL_TOL`]; the error suggests a longer one.
pub fn stein_tomas_ratio(f: &GridFunction, alpha: f64, sigma: f64, window: &TimeWindow) -> Result<SteinTomas> {
    check_alpha_sigma(alpha, sigma)?;
    window.validate()?;
    let rhs = morrey_norm(f, alpha, 2.0, sigma, ScaleWindow::All)?;
    if rhs == 0.0 {
        return Ok(SteinTomas { ratio: 0.0, lhs: 0.0, rhs: 0.0, half_window_ratio: 0.0, tail_change: 0.0, window: *window });
    }
    let q = 3.0 * alpha;
    let s = 1.0 / q;
    let pos = window.times();
    let neg: Vec<f64> = pos.iter().map(|t| -t).collect();
    let ip = slice_integrals(f, s, q, &pos);
    let in_ = slice_integrals(f, s, q, &neg);
    let half = 0.5 * window.half_width;
    let cut = pos.partition_point(|&t| t <= half);
    let full = trapezoid(&pos, &ip) + trapezoid(&pos, &in_);
    let part = trapezoid(&pos[..cut], &ip[..cut]) + trapezoid(&pos[..cut], &in_[..cut]);
    let lhs = full.powf(1.0 / q);
    let ratio = lhs / rhs;
    let half_window_ratio = part.powf(1.0 / q) / rhs;
    let tail_change = (ratio - half_window_ratio).abs() / ratio;
    if tail_change > TAIL_TOL || !ratio.is_finite() {
        return Err(Error::Budget(format!(
            "halving the time window moves the ratio by {:.2}% (limit {:.0}%); try half_width >= {:.4e}, or a longer grid if the wave wraps around",
            100.0 * tail_change,
            100.0 * TAIL_TOL,
            4.0 * window.half_width
        )));
    }
    Ok(SteinTomas { ratio, lhs, rhs, half_window_ratio, tail_change, window: *window })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deformations::{translate, Deformation};
    use crate::evolutions::airy_propagate;
    use crate::spectral_core::{Grid, Side};

    fn grid() -> Grid {
        Grid::centered(16384, 4096.0).unwrap()
    }

    #[test]
    fn zero_gives_zero() {
        let z = GridFunction::zeros(Grid::centered(64, 10.0).unwrap(), Side::Physical);
        let r = stein_tomas_ratio(&z, 1.8, 3.0, &TimeWindow::auto(&z)).unwrap();
        assert_eq!(r.ratio, 0.0);
    }

    #[test]
    fn gaussian_ratio_is_converged_and_invariant() {
        let g = grid();
        let f = GridFunction::from_real_fn(g, |x| (-x * x).exp());
        let w = TimeWindow::auto(&f);
        let base = stein_tomas_ratio(&f, 1.8, 3.0, &w).unwrap();
        assert!(base.ratio.is_finite() && base.ratio > 0.0);
        let finer = TimeWindow { fine_step: w.fine_step / 2.0, growth: w.growth / 2.0, ..w };
        let r2 = stein_tomas_ratio(&f, 1.8, 3.0, &finer).unwrap();
        assert!((r2.ratio / base.ratio - 1.0).abs() < 1e-3, "{} {}", r2.ratio, base.ratio);
        let moved = translate(&f, 3.7);
        let rt = stein_tomas_ratio(&moved, 1.8, 3.0, &w).unwrap();
        assert!((rt.ratio / base.ratio - 1.0).abs() < 1e-6, "{} {}", rt.ratio, base.ratio);
        let evolved = airy_propagate(&f, 0.05);
        let ra = stein_tomas_ratio(&evolved, 1.8, 3.0, &w).unwrap();
        assert!((ra.ratio / base.ratio - 1.0).abs() < 0.01);
        let dil = Deformation::dyadic(1, 0.0, 0.0, 0.0).unwrap().apply(&f, 1.8).unwrap();
        let rd = stein_tomas_ratio(&dil, 1.8, 3.0, &TimeWindow::auto(&dil)).unwrap();
        assert!((rd.ratio / base.ratio - 1.0).abs() < 0.01, "{} {}", rd.ratio, base.ratio);
    }

    #[test]
    fn short_window_is_rejected() {
        let g = grid();
        let f = GridFunction::from_real_fn(g, |x| (-x * x).exp());
        let w = TimeWindow::auto(&f).with_half_width(0.05);
        match stein_tomas_ratio(&f, 1.8, 3.0, &w) {
            Err(Error::Budget(msg)) => assert!(msg.contains("half_width")),
            other => panic!("expected a budget error, got {other:?}"),
        }
    }
}
