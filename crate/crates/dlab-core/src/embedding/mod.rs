//! NLS solutions ridden on a carrier wave as approximate gKdV solutions.
//!
//! For a carrier `ξ`, the approximate solution is
//! `ũ(t) = Re[e^{−itξ³} P(ξ) T(−3ξ²t) v(−3ξt)]` while `|t| ≤ T/(3ξ)`, and the
//! free Airy flow of the seam value beyond. `v` solves the NLS with coupling
//! `C₀`, the first Fourier-sine coefficient of the gKdV nonlinearity divided by 3.

mod constants;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use constants::{embedding_constants, fourier_sin_coeff};

use crate::deformations::{modulate, translate};
use crate::error::{invalid, Error, Result};
use crate::evolutions::{airy_propagate, from_raw, gkdv_solve, gkdv_stable_dt, nls_solve, raw_coefficients, Padded, SolveConfig};
use crate::norms::{exponents_y, lhat_norm, mixed_norm, x_norm, Preset};
use crate::spectral_core::{GridFunction, Side, SpaceTimeField};

/// Sharp Fourier cutoff to `|ξ| ≤ a`.
pub fn low_pass(f: &GridFunction, a: f64) -> GridFunction {
    f.multiplier(|xi| if xi.abs() <= a { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) })
}

fn carrier_branch(v: &GridFunction, xi: f64, t: f64) -> GridFunction {
    let w = translate(v, -3.0 * xi * xi * t);
    modulate(&w, xi).scale(Complex64::from_polar(1.0, -t * xi.powi(3))).re()
}

fn check_carrier(v: &SpaceTimeField, xi: f64, big_t: f64) -> Result<()> {
    if !(xi > 0.0) || !v.grid().on_lattice(xi) {
        return invalid(format!("carrier ξ = {xi} must be positive and on the frequency lattice (spacing {})", v.grid().dxi()));
    }
    if !(big_t > 0.0) {
        return invalid(format!("handoff time T = {big_t} must be positive"));
    }
    Ok(())
}

/// `ũ(t)` for a carrier `ξ` and handoff time `T`; `v` must cover `[−T, T]`.
pub fn build_approx_solution(v: &SpaceTimeField, xi: f64, big_t: f64, t: f64) -> Result<GridFunction> {
    check_carrier(v, xi, big_t)?;
    let seam = big_t / (3.0 * xi);
    if t.abs() <= seam {
        return Ok(carrier_branch(&v.at(-3.0 * xi * t)?, xi, t));
    }
    let (s, tau) = if t > 0.0 { (seam, -big_t) } else { (-seam, big_t) };
    Ok(airy_propagate(&carrier_branch(&v.at(tau)?, xi, s), t - s))
}

/// `ũ` at the times `−τ/(3ξ)` of every stored NLS frame, in increasing order; no
/// time interpolation is involved.
pub fn approx_field(v: &SpaceTimeField, xi: f64, big_t: f64) -> Result<SpaceTimeField> {
    check_carrier(v, xi, big_t)?;
    let seam = big_t / (3.0 * xi);
    let mut pairs: Vec<(f64, &GridFunction)> =
        v.times().iter().zip(v.frames()).map(|(tau, f)| (-tau / (3.0 * xi), f)).filter(|(t, _)| t.abs() <= seam * (1.0 + 1e-12)).collect();
    pairs.reverse();
    let times: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let frames: Vec<GridFunction> = pairs.par_iter().map(|(t, f)| carrier_branch(f, xi, *t)).collect();
    SpaceTimeField::new(*v.grid(), times, frames)
}

/// `(∂ₜ + ∂ₓ³)ũ − μ∂ₓ(|ũ|^{2α}ũ)`.
///
/// The linear part is computed as `A(t) ∂ₜ[A(−t)ũ]`, which is the same operator
/// but differentiates a slowly varying quantity; `∂ₜ` is the second-order
/// three-point difference on the (possibly nonuniform) frame times. The
/// nonlinearity is evaluated on a grid zero-padded by two. `mu = 0` drops it.
pub fn residual_field(u: &SpaceTimeField, alpha: f64, mu: f64) -> Result<SpaceTimeField> {
    let m = u.len();
    if m < 3 {
        return invalid("residual needs at least three frames");
    }
    let g = *u.grid();
    let n = g.n();
    let ts = u.times();
    let interaction: Vec<GridFunction> = u.frames().par_iter().zip(ts).map(|(f, &t)| airy_propagate(f, -t).fourier()).collect();
    let frames: Vec<GridFunction> = (0..m)
        .into_par_iter()
        .map(|i| {
            let (idx, w) = three_point(ts, i);
            let (fa, fb, fc) = (interaction[idx[0]].values(), interaction[idx[1]].values(), interaction[idx[2]].values());
            let dw: Vec<Complex64> = (0..n).map(|k| fa[k] * w[0] + fb[k] * w[1] + fc[k] * w[2]).collect();
            let lin = airy_propagate(&GridFunction::new(g, dw, Side::Fourier).expect("length"), ts[i]);
            if mu == 0.0 {
                return lin.physical();
            }
            let mut nl = vec![Complex64::new(0.0, 0.0); n];
            Padded::new(n, 2).apply(&raw_coefficients(&u.frames()[i]), &mut nl, |z| z * z.norm().powf(2.0 * alpha));
            let nl = from_raw(g, &nl).multiplier(|xi| Complex64::new(0.0, xi)).fourier();
            let out: Vec<Complex64> = lin.values().iter().zip(nl.values()).map(|(l, q)| l - mu * q).collect();
            GridFunction::new(g, out, Side::Fourier).expect("length").physical()
        })
        .collect();
    SpaceTimeField::new(g, ts.to_vec(), frames)
}

/// Second-order first-derivative stencil at frame `i` (one-sided at the ends).
fn three_point(ts: &[f64], i: usize) -> ([usize; 3], [f64; 3]) {
    let m = ts.len();
    let c = i.clamp(1, m - 2);
    let (h1, h2) = (ts[c] - ts[c - 1], ts[c + 1] - ts[c]);
    let s = h1 + h2;
    let w = if i == 0 {
        [-(2.0 * h1 + h2) / (h1 * s), s / (h1 * h2), -h1 / (h2 * s)]
    } else if i == m - 1 {
        [h2 / (h1 * s), -s / (h1 * h2), (2.0 * h2 + h1) / (h2 * s)]
    } else {
        [-h2 / (h1 * s), (h2 - h1) / (h1 * h2), h1 / (h2 * s)]
    };
    ([c - 1, c, c + 1], w)
}

/// `‖|∂ₓ|^{−1} R‖` in the `Y(s(L), α)` norm.
pub fn residual_y_norm(r: &SpaceTimeField, alpha: f64) -> Result<f64> {
    let s = Preset::L.s(alpha);
    let e = exponents_y(s, alpha);
    if e.degenerate {
        return invalid(format!("Y(s(L), {alpha}) is degenerate"));
    }
    mixed_norm(r, s - 1.0, e.p, e.q)
}

#[derive(Clone, Debug)]
pub struct EmbeddingConfig {
    pub alpha: f64,
    pub mu: f64,
    pub phi: GridFunction,
    pub xi_list: Vec<f64>,
    pub big_t: f64,
    /// NLS step; frames are stored every `nls_store_every` steps.
    pub nls_dt: f64,
    pub nls_store_every: usize,
    /// Upper bound on `ω·dt` for the fastest significant phase `ω` of the gKdV run.
    pub phase_step: f64,
    pub gkdv_frames: usize,
}

impl EmbeddingConfig {
    pub fn new(alpha: f64, phi: GridFunction, xi_list: Vec<f64>, big_t: f64) -> Self {
        EmbeddingConfig {
            alpha,
            mu: 1.0,
            phi,
            xi_list,
            big_t,
            nls_dt: big_t / 1024.0,
            nls_store_every: 4,
            phase_step: 0.5,
            gkdv_frames: 128,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.big_t > 0.0) {
            return invalid("handoff time T must be positive");
        }
        if self.xi_list.is_empty() || self.xi_list.windows(2).any(|w| w[1] <= w[0]) {
            return invalid("ξ list must be nonempty and strictly increasing");
        }
        if !(self.phase_step > 0.0) || self.gkdv_frames == 0 {
            return invalid("phase_step and gkdv_frames must be positive");
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingRow {
    pub xi: f64,
    pub seam_time: f64,
    pub err_lhat_alpha: f64,
    pub norm_s: f64,
    pub norm_l: f64,
    pub residual_y: f64,
}

/// `v` on `[−T, T]` from `P_{|ξ| ≤ ξ^{1/4}} φ` at time 0.
pub fn nls_profile(cfg: &EmbeddingConfig, xi: f64) -> Result<SpaceTimeField> {
    let (c0, _) = embedding_constants(cfg.alpha)?;
    let v0 = low_pass(&cfg.phi, xi.powf(0.25));
    let base = SolveConfig { coupling: c0, store_every: cfg.nls_store_every, ..SolveConfig::new(cfg.alpha, cfg.mu, cfg.big_t, cfg.nls_dt) };
    let fwd = nls_solve(&v0, &base)?;
    let bwd = nls_solve(&v0, &SolveConfig { t_end: -cfg.big_t, ..base })?;
    let mut times = bwd.times().to_vec();
    let mut frames = bwd.frames().to_vec();
    times.pop();
    frames.pop();
    times.extend_from_slice(fwd.times());
    frames.extend_from_slice(fwd.frames());
    SpaceTimeField::new(*v0.grid(), times, frames)
}

/// gKdV step for carrier `ξ`: RK4-stable and resolving the fastest significant
/// phase, `(3ξ)³` or the band edge `ξ_max³` when the third harmonic is cut off.
pub fn embedding_dt(cfg: &EmbeddingConfig, u0: &GridFunction, xi: f64) -> f64 {
    let g = u0.grid();
    let stable = gkdv_stable_dt(cfg.alpha, 1.0, u0.physical().sup_norm(), g.xi_max());
    let omega = (3.0 * xi).min(g.xi_max()).powi(3);
    (0.9 * stable).min(cfg.phase_step / omega)
}

fn embedding_row(cfg: &EmbeddingConfig, xi: f64) -> Result<EmbeddingRow> {
    let seam = cfg.big_t / (3.0 * xi);
    let v = nls_profile(cfg, xi)?;
    let approx = approx_field(&v, xi, cfg.big_t)?;
    let residual_y = residual_y_norm(&residual_field(&approx, cfg.alpha, cfg.mu)?, cfg.alpha)?;
    let u0 = modulate(&cfg.phi, xi).re();
    let dt = embedding_dt(cfg, &u0, xi);
    let steps = (seam / dt).ceil() as usize;
    let gcfg = SolveConfig { store_every: (steps / cfg.gkdv_frames).max(1), ..SolveConfig::new(cfg.alpha, cfg.mu, seam, dt) };
    let u = gkdv_solve(&u0, &gcfg).map_err(|e| match e {
        Error::SolverAbort { t, reason } => Error::SolverAbort { t, reason: format!("carrier ξ = {xi}: {reason}") },
        other => other,
    })?;
    let u_seam = u.frames().last().expect("nonempty");
    let tilde_seam = build_approx_solution(&v, xi, cfg.big_t, seam)?;
    Ok(EmbeddingRow {
        xi,
        seam_time: seam,
        err_lhat_alpha: lhat_norm(&u_seam.sub(&tilde_seam)?, cfg.alpha)?,
        norm_s: x_norm(&u, Preset::S.s(cfg.alpha), cfg.alpha)?,
        norm_l: x_norm(&u, Preset::L.s(cfg.alpha), cfg.alpha)?,
        residual_y,
    })
}

/// One row per carrier: seam error in `L̂^α`, `S`/`L` norms of the gKdV run on
/// `[0, T/(3ξ)]`, and the `Y`-type size of the residual of `ũ`.
pub fn embedding_experiment(cfg: &EmbeddingConfig) -> Result<Vec<EmbeddingRow>> {
    cfg.validate()?;
    for &xi in &cfg.xi_list {
        if !cfg.phi.grid().on_lattice(xi) {
            return invalid(format!("carrier ξ = {xi} is not on the frequency lattice"));
        }
    }
    cfg.xi_list.par_iter().map(|&xi| embedding_row(cfg, xi)).collect()
}
