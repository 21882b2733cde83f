use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::deformations::{modulate, Deformation, TRANSFER_TOL};
use crate::error::{invalid, Result};
use crate::norms::{check_alpha_sigma, morrey_norm, ScaleWindow};
use crate::spectral_core::{Grid, GridFunction};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecouplingRow {
    /// `γ‖P(ξ₀)uₙ‖^σ`.
    pub lhs: f64,
    /// `‖P(ξ₀)Γₙψ‖^σ + ‖P(ξ₀)rₙ‖^σ`.
    pub rhs: f64,
    pub deficit: f64,
    /// `‖P(ξ₀)uₙ‖^σ`, the natural unit for the deficit.
    pub u_sigma: f64,
}

/// Both sides of `γ‖P(ξ₀)uₙ‖^σ ≥ ‖P(ξ₀)Γₙψ‖^σ + ‖P(ξ₀)rₙ‖^σ` in `M̂^α_{2,σ}`,
/// with `rₙ = uₙ − Γₙψ` and `Γₙ` applied on the grid of `uₙ`.
pub fn decoupling_check(
    u: &[GridFunction],
    psi: &GridFunction,
    gammas: &[Deformation],
    gamma: f64,
    xi0: f64,
    alpha: f64,
    sigma: f64,
) -> Result<Vec<DecouplingRow>> {
    check_alpha_sigma(alpha, sigma)?;
    if !(gamma > 1.0) {
        return invalid(format!("γ = {gamma} must exceed 1"));
    }
    if u.len() != gammas.len() {
        return invalid(format!("{} functions but {} deformations", u.len(), gammas.len()));
    }
    let norm = |f: &GridFunction| -> Result<f64> {
        Ok(morrey_norm(&modulate(f, xi0), alpha, 2.0, sigma, ScaleWindow::All)?.powf(sigma))
    };
    u.par_iter()
        .zip(gammas)
        .map(|(un, g)| {
            let piece = g.apply_on_grid(psi, alpha, TRANSFER_TOL)?;
            let r = un.sub(&piece)?;
            let u_sigma = norm(un)?;
            let lhs = gamma * u_sigma;
            let rhs = norm(&piece)? + norm(&r)?;
            Ok(DecouplingRow { lhs, rhs, deficit: lhs - rhs, u_sigma })
        })
        .collect()
}

/// Smooth bump `exp(1 − 1/(1 − u²))` in frequency on `[lo, hi]`, times `amp`.
pub fn spectral_bump(grid: Grid, lo: f64, hi: f64, amp: Complex64) -> GridFunction {
    let (c, w) = (0.5 * (lo + hi), 0.5 * (hi - lo));
    GridFunction::from_spectrum(grid, |xi| {
        let u = (xi - c) / w;
        if u.abs() < 1.0 {
            amp * (1.0 - 1.0 / (1.0 - u * u)).exp()
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
    .physical()
}

/// `uₙ = ψ¹ + Γₙψ²` with `Γₙ = (1, n, 0, 0)`.
#[derive(Clone, Debug)]
pub struct DecouplingBattery {
    pub psi1: GridFunction,
    pub psi2: GridFunction,
    pub ns: Vec<f64>,
    pub u: Vec<GridFunction>,
    pub gammas: Vec<Deformation>,
}

impl DecouplingBattery {
    /// Compact spectra: `ψ̂¹` on `[1/2, 5/2]`, `ψ̂²` on `[1/4, 7/4]`, so for
    /// `n ≥ 2` the two pieces sit on opposite sides of the origin.
    pub fn compact(grid: Grid, ns: &[f64]) -> Result<Self> {
        let psi1 = spectral_bump(grid, 0.5, 2.5, Complex64::new(1.0, 0.0));
        let psi2 = spectral_bump(grid, 0.25, 1.75, Complex64::from_polar(0.8, 0.7));
        Self::build(psi1, psi2, ns)
    }

    /// Gaussian profiles whose spectra overlap for small `n`.
    pub fn gaussian(grid: Grid, ns: &[f64]) -> Result<Self> {
        let psi1 = GridFunction::from_real_fn(grid, |x| (-x * x).exp());
        let psi2 = GridFunction::from_fn(grid, |x| Complex64::from_polar(0.8 * (-0.5 * x * x).exp(), 0.3 * x));
        Self::build(psi1, psi2, ns)
    }

    fn build(psi1: GridFunction, psi2: GridFunction, ns: &[f64]) -> Result<Self> {
        let gammas = ns.iter().map(|&n| Deformation::new(1.0, n, 0.0, 0.0)).collect::<Result<Vec<_>>>()?;
        let u = gammas
            .iter()
            .map(|g| psi1.add(&g.apply_on_grid(&psi2, 1.0, TRANSFER_TOL)?))
            .collect::<Result<Vec<_>>>()?;
        Ok(DecouplingBattery { psi1, psi2, ns: ns.to_vec(), u, gammas })
    }

    pub fn check(&self, gamma: f64, xi0: f64, alpha: f64, sigma: f64) -> Result<Vec<DecouplingRow>> {
        decoupling_check(&self.u, &self.psi2, &self.gammas, gamma, xi0, alpha, sigma)
    }
}
