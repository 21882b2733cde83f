use num_complex::Complex64;
use rustfft::FftDirection;

use super::config::{gkdv_stable_dt, SolveConfig, BLOWUP_SUP};
use crate::error::{invalid, Error, Result};
use crate::spectral_core::fft_in_place;
use crate::spectral_core::{Grid, GridFunction, SpaceTimeField, Side};

/// Pointwise `F(u)` evaluated on a zero-padded grid; operates on raw DFT
/// coefficients of the base grid so diagonal multipliers commute with it.
pub(crate) struct Padded {
    n: usize,
    m: usize,
    buf: Vec<Complex64>,
}

impl Padded {
    pub(crate) fn new(n: usize, pad: usize) -> Self {
        let m = n * pad;
        Padded { n, m, buf: vec![Complex64::new(0.0, 0.0); m] }
    }

    /// Coefficients of `F(u)` where `u` has coefficients `c`; the Nyquist slot is zeroed.
    pub(crate) fn apply(&mut self, c: &[Complex64], out: &mut [Complex64], f: impl Fn(Complex64) -> Complex64) {
        let (n, m) = (self.n, self.m);
        let half = n / 2;
        self.buf.iter_mut().for_each(|b| *b = Complex64::new(0.0, 0.0));
        for k in 0..half {
            self.buf[k] = c[k];
        }
        for k in half + 1..n {
            self.buf[m - n + k] = c[k];
        }
        if m == n {
            self.buf[half] = c[half];
        }
        fft_in_place(&mut self.buf, FftDirection::Inverse);
        let inv_n = 1.0 / n as f64;
        for b in self.buf.iter_mut() {
            *b = f(*b * inv_n);
        }
        fft_in_place(&mut self.buf, FftDirection::Forward);
        let r = n as f64 / m as f64;
        for k in 0..half {
            out[k] = self.buf[k] * r;
        }
        out[half] = Complex64::new(0.0, 0.0);
        for k in half + 1..n {
            out[k] = self.buf[m - n + k] * r;
        }
    }
}

pub(crate) fn raw_coefficients(f: &GridFunction) -> Vec<Complex64> {
    let mut c = f.physical().into_values();
    fft_in_place(&mut c, FftDirection::Forward);
    c
}

pub(crate) fn from_raw(grid: Grid, c: &[Complex64]) -> GridFunction {
    let mut v = c.to_vec();
    fft_in_place(&mut v, FftDirection::Inverse);
    let s = 1.0 / grid.n() as f64;
    v.iter_mut().for_each(|x| *x *= s);
    GridFunction::new(grid, v, Side::Physical).expect("length matches grid")
}

pub(crate) fn check_frame(t: f64, u: &GridFunction) -> Result<()> {
    if !u.is_finite() {
        return Err(Error::SolverAbort { t, reason: "non-finite values".into() });
    }
    let sup = u.sup_norm();
    if sup > BLOWUP_SUP {
        return Err(Error::SolverAbort { t, reason: format!("sup norm {sup:.3e} exceeds {BLOWUP_SUP:.0e}") });
    }
    Ok(())
}

/// Integrating-factor RK4 for `∂ₜu + ∂ₓ³u = μC ∂ₓ(|u|^{2α}u)`.
///
/// In `w = e^{−itξ³}û` the dispersive term disappears; the nonlinearity is
/// evaluated on a grid zero-padded by `dealias_pad`.
pub fn gkdv_solve(u0: &GridFunction, cfg: &SolveConfig) -> Result<SpaceTimeField> {
    cfg.validate()?;
    let grid = *u0.grid();
    let u0 = u0.physical();
    let sup = u0.sup_norm();
    if u0.max_imag() > 1e-12 * sup.max(1.0) {
        return invalid("gKdV data must be real-valued");
    }
    let stable = gkdv_stable_dt(cfg.alpha, cfg.coupling, sup, grid.xi_max());
    if cfg.dt > stable {
        return invalid(format!("dt = {} exceeds the RK4 stability bound {stable:.3e} for this data", cfg.dt));
    }
    let (steps, dt) = cfg.steps();
    let n = grid.n();
    let xis = grid.xis();
    let e_half: Vec<Complex64> = xis.iter().map(|x| Complex64::from_polar(1.0, 0.5 * dt * x * x * x)).collect();
    let e_full: Vec<Complex64> = e_half.iter().map(|e| e * e).collect();
    // iξ with the Nyquist derivative zeroed
    let dx_sym: Vec<Complex64> =
        xis.iter().enumerate().map(|(k, x)| if k == n / 2 { Complex64::new(0.0, 0.0) } else { Complex64::new(0.0, *x) }).collect();
    let coeff = cfg.mu * cfg.coupling;
    let two_alpha = 2.0 * cfg.alpha;
    let mut pad = Padded::new(n, cfg.dealias_pad);
    let mut rhs = |c: &[Complex64], out: &mut [Complex64]| {
        if coeff == 0.0 {
            out.iter_mut().for_each(|o| *o = Complex64::new(0.0, 0.0));
            return;
        }
        pad.apply(c, out, |u| {
            let u = u.re;
            Complex64::new(u.abs().powf(two_alpha) * u, 0.0)
        });
        for (o, d) in out.iter_mut().zip(&dx_sym) {
            *o *= d * coeff;
        }
    };

    let mut u = raw_coefficients(&u0);
    // a complex phase on the Nyquist mode would break realness
    u[n / 2] = Complex64::new(0.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) = (vec![zero; n], vec![zero; n], vec![zero; n], vec![zero; n], vec![zero; n]);
    let mut times = vec![0.0];
    let mut frames = vec![u0.clone()];
    let mut t = 0.0;
    for step in 1..=steps {
        rhs(&u, &mut k1);
        for i in 0..n {
            tmp[i] = e_half[i] * (u[i] + 0.5 * dt * k1[i]);
        }
        rhs(&tmp, &mut k2);
        for i in 0..n {
            tmp[i] = e_half[i] * u[i] + 0.5 * dt * k2[i];
        }
        rhs(&tmp, &mut k3);
        for i in 0..n {
            tmp[i] = e_full[i] * u[i] + dt * e_half[i] * k3[i];
        }
        rhs(&tmp, &mut k4);
        for i in 0..n {
            u[i] = e_full[i] * u[i] + dt / 6.0 * (e_full[i] * k1[i] + 2.0 * e_half[i] * (k2[i] + k3[i]) + k4[i]);
        }
        let t_new = step as f64 * dt;
        if step % cfg.store_every == 0 || step == steps {
            let frame = from_raw(grid, &u);
            check_frame(t, &frame)?;
            times.push(t_new);
            frames.push(frame);
        } else if !u.iter().all(|c| c.re.is_finite() && c.im.is_finite()) {
            return Err(Error::SolverAbort { t, reason: "non-finite values".into() });
        }
        t = t_new;
    }
    finish(grid, times, frames)
}

/// Orders frames by increasing time (backward runs are reversed).
pub(crate) fn finish(grid: Grid, mut times: Vec<f64>, mut frames: Vec<GridFunction>) -> Result<SpaceTimeField> {
    if times.len() > 1 && times[1] < times[0] {
        times.reverse();
        frames.reverse();
    }
    SpaceTimeField::new(grid, times, frames)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolutions::airy_propagate;
    use std::f64::consts::PI;

    #[test]
    fn zero_data_stays_zero() {
        let g = Grid::centered(64, 20.0).unwrap();
        let z = GridFunction::zeros(g, Side::Physical);
        let out = gkdv_solve(&z, &SolveConfig::new(1.8, -1.0, 0.1, 0.01)).unwrap();
        assert!(out.frames().iter().all(|f| f.sup_norm() == 0.0));
        assert_eq!(out.len(), 11);
    }

    #[test]
    fn linear_limit_is_airy() {
        let g = Grid::centered(256, 16.0 * PI).unwrap();
        let u0 = GridFunction::from_real_fn(g, |x| (-x * x).exp());
        let cfg = SolveConfig { coupling: 0.0, store_every: 5, ..SolveConfig::new(1.8, 1.0, 0.5, 0.01) };
        let out = gkdv_solve(&u0, &cfg).unwrap();
        for (t, f) in out.times().iter().zip(out.frames()) {
            let want = airy_propagate(&u0, *t);
            assert!(f.sub(&want).unwrap().sup_norm() < 1e-10, "t = {t}");
        }
    }

    #[test]
    fn backward_run_is_time_ordered() {
        let g = Grid::centered(64, 30.0).unwrap();
        let u0 = GridFunction::from_real_fn(g, |x| 0.3 * (-x * x).exp());
        let out = gkdv_solve(&u0, &SolveConfig::new(1.8, 1.0, -0.05, 0.01)).unwrap();
        assert_eq!(out.times().first().copied(), Some(-0.05));
        assert_eq!(out.times().last().copied(), Some(0.0));
    }

    #[test]
    fn rejects_bad_input() {
        let g = Grid::centered(64, 30.0).unwrap();
        let complex = GridFunction::from_fn(g, |x| Complex64::new(0.0, (-x * x).exp()));
        assert!(gkdv_solve(&complex, &SolveConfig::new(1.8, 1.0, 0.1, 0.01)).is_err());
        let big = GridFunction::from_real_fn(g, |x| 5.0 * (-x * x).exp());
        assert!(gkdv_solve(&big, &SolveConfig::new(1.8, 1.0, 0.1, 0.05)).is_err());
        assert!(gkdv_solve(&big, &SolveConfig { mu: 0.5, ..SolveConfig::new(1.8, 1.0, 0.1, 1e-5) }).is_err());
    }
}
