//! The deformation family `D(h)A(s)T(y)P(ξ)`, relative parameters and gap functionals.
//!
//! Dilation is realised as a change of grid: `D(h)` maps samples on
//! `(n, L, x0)` to the same samples on `(n, L/h, x0/h)` times `h^{1/p}`, which
//! is exact for every `h > 0`. [`transfer`] moves a result back onto a
//! prescribed grid when the spacings differ by a power of two.

mod relative;
mod transfer;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};
use crate::evolutions::{airy_propagate, schrodinger_propagate};
use crate::norms::{morrey_norm, ScaleWindow};
use crate::spectral_core::{GridFunction, Side};

pub use relative::{measure_phase, RelativeParameters};
pub use transfer::{transfer, TRANSFER_TOL};

/// `T(y)f = f(· − y)`.
pub fn translate(f: &GridFunction, y: f64) -> GridFunction {
    if y == 0.0 {
        return f.clone();
    }
    f.multiplier(|xi| Complex64::from_polar(1.0, -y * xi))
}

/// `P(ξ)f = e^{−ixξ}f`, applied to the samples. On the frequency lattice this
/// is an exact shift of the coefficient array.
pub fn modulate(f: &GridFunction, xi: f64) -> GridFunction {
    if xi == 0.0 {
        return f.clone();
    }
    let p = f.physical();
    let g = *p.grid();
    let values = p.values().iter().enumerate().map(|(j, v)| v * Complex64::from_polar(1.0, -g.x(j) * xi)).collect();
    GridFunction::new(g, values, Side::Physical).expect("same length").on_side(f.side())
}

/// `D_p(h)f = h^{1/p} f(h·)`, landing on the dilated grid.
pub fn dilate(f: &GridFunction, h: f64, p: f64) -> Result<GridFunction> {
    if !(h > 0.0 && h.is_finite()) {
        return invalid(format!("dilation factor {h} must be positive and finite"));
    }
    if !(p > 0.0) {
        return invalid(format!("dilation normalisation exponent {p} must be positive"));
    }
    if h == 1.0 {
        return Ok(f.clone());
    }
    let phys = f.physical();
    let g = phys.grid().dilated(h);
    phys.scale_real(h.powf(1.0 / p)).with_grid(g).map(|d| d.on_side(f.side()))
}

/// A group element `e^{iφ} D(h) A(s) T(y) P(ξ)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Deformation {
    pub h: f64,
    pub xi: f64,
    pub s: f64,
    pub y: f64,
    #[serde(default)]
    pub phase: f64,
}

impl Default for Deformation {
    fn default() -> Self {
        Self::IDENTITY
    }
}

impl Deformation {
    pub const IDENTITY: Deformation = Deformation { h: 1.0, xi: 0.0, s: 0.0, y: 0.0, phase: 0.0 };

    pub fn new(h: f64, xi: f64, s: f64, y: f64) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return invalid(format!("deformation scale h = {h} must be positive and finite"));
        }
        if !(xi.is_finite() && s.is_finite() && y.is_finite()) {
            return invalid("deformation parameters must be finite");
        }
        Ok(Deformation { h, xi, s, y, phase: 0.0 })
    }

    /// `h = 2^k`.
    pub fn dyadic(k: i32, xi: f64, s: f64, y: f64) -> Result<Self> {
        Self::new(f64::from(k).exp2(), xi, s, y)
    }

    pub fn with_phase(mut self, phase: f64) -> Self {
        self.phase = phase;
        self
    }

    /// `log₂ h` when `h` is an exact power of two.
    pub fn log2_h(&self) -> Option<i32> {
        let k = self.h.log2().round();
        (k.abs() < 1024.0 && f64::from(k as i32).exp2() == self.h).then_some(k as i32)
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::IDENTITY
    }

    /// Applies `e^{iφ}D_p(h)A(s)T(y)P(ξ)`; the result lives on the dilated grid.
    pub fn apply(&self, f: &GridFunction, p: f64) -> Result<GridFunction> {
        let g = modulate(f, self.xi);
        let g = translate(&g, self.y);
        let g = airy_propagate(&g, self.s);
        let g = dilate(&g, self.h, p)?;
        Ok(if self.phase == 0.0 { g } else { g.scale(Complex64::from_polar(1.0, self.phase)) })
    }

    /// Applies the inverse `e^{−iφ}P(−ξ)T(−y)A(−s)D_p(1/h)`.
    pub fn apply_inverse(&self, f: &GridFunction, p: f64) -> Result<GridFunction> {
        let g = dilate(f, 1.0 / self.h, p)?;
        let g = airy_propagate(&g, -self.s);
        let g = translate(&g, -self.y);
        let g = modulate(&g, -self.xi);
        Ok(if self.phase == 0.0 { g } else { g.scale(Complex64::from_polar(1.0, -self.phase)) })
    }

    /// [`apply`](Self::apply) followed by a transfer back onto the input grid.
    pub fn apply_on_grid(&self, f: &GridFunction, p: f64, tol: f64) -> Result<GridFunction> {
        if self.h != 1.0 && self.log2_h().is_none() {
            return invalid(format!("same-grid dilation needs a dyadic h, got {}", self.h));
        }
        transfer(&self.apply(f, p)?, f.grid(), tol)
    }

    /// Inverse of [`apply_on_grid`](Self::apply_on_grid).
    pub fn apply_inverse_on_grid(&self, f: &GridFunction, p: f64, tol: f64) -> Result<GridFunction> {
        if self.h != 1.0 && self.log2_h().is_none() {
            return invalid(format!("same-grid dilation needs a dyadic h, got {}", self.h));
        }
        transfer(&self.apply_inverse(f, p)?, f.grid(), tol)
    }

    /// Parameters of `Γ̃⁻¹Γ`, where `self = Γ`.
    pub fn relative(&self, other: &Deformation) -> RelativeParameters {
        RelativeParameters::between(self, other)
    }

    /// The sum whose divergence defines orthogonality of two families.
    pub fn orthogonality_gap(&self, other: &Deformation) -> f64 {
        let hr = self.h / other.h;
        self.gap_tail(other) + (self.xi - other.xi / hr).abs()
    }

    /// As [`orthogonality_gap`](Self::orthogonality_gap) with `|ξ|` in the modulation term.
    pub fn nonresonance_gap(&self, other: &Deformation) -> f64 {
        let hr = self.h / other.h;
        self.gap_tail(other) + (self.xi.abs() - other.xi.abs() / hr).abs()
    }

    fn gap_tail(&self, other: &Deformation) -> f64 {
        let hr = self.h / other.h;
        let ds = self.s - hr.powi(3) * other.s;
        hr.ln().abs() + ds.abs() * (1.0 + self.xi.abs()) + (self.y - hr * other.y - 3.0 * ds * self.xi * self.xi).abs()
    }
}

impl fmt::Display for Deformation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.log2_h() {
            Some(k) => write!(f, "h=2^{k}")?,
            None => write!(f, "h={}", self.h)?,
        }
        write!(f, ",xi={},s={},y={}", self.xi, self.s, self.y)?;
        if self.phase != 0.0 {
            write!(f, ",phase={}", self.phase)?;
        }
        Ok(())
    }
}

impl FromStr for Deformation {
    type Err = Error;

    /// `h=<2^k|real>,xi=<real>,s=<real>,y=<real>[,phase=<real>]`; omitted keys default to the identity.
    fn from_str(text: &str) -> Result<Self> {
        let mut d = Deformation::IDENTITY;
        let num = |k: &str, v: &str| -> Result<f64> {
            v.trim().parse::<f64>().or_else(|_| invalid(format!("deformation {k}: cannot parse '{v}'")))
        };
        for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let Some((k, v)) = item.split_once('=') else {
                return invalid(format!("deformation: expected key=value, got '{item}'"));
            };
            let k = k.trim();
            match k {
                "h" => {
                    d.h = match v.trim().strip_prefix("2^") {
                        Some(e) => num(k, e)?.exp2(),
                        None => num(k, v)?,
                    }
                }
                "xi" => d.xi = num(k, v)?,
                "s" => d.s = num(k, v)?,
                "y" => d.y = num(k, v)?,
                "phase" => d.phase = num(k, v)?,
                _ => return invalid(format!("deformation: unknown key '{k}'")),
            }
        }
        Deformation::new(d.h, d.xi, d.s, d.y).map(|n| n.with_phase(d.phase))
    }
}

/// Sup norm of `A(t)P(ξ₀)f − e^{−itξ₀³}P(ξ₀)T(−3ξ₀²t)S(3ξ₀t)A(t)f`.
pub fn galilean_residual(f: &GridFunction, xi0: f64, t: f64) -> Result<f64> {
    if !f.grid().on_lattice(xi0) {
        return invalid(format!("ξ₀ = {xi0} is not on the frequency lattice (spacing {})", f.grid().dxi()));
    }
    let lhs = airy_propagate(&modulate(f, xi0), t);
    let rhs = airy_propagate(f, t);
    let rhs = schrodinger_propagate(&rhs, 3.0 * xi0 * t);
    let rhs = translate(&rhs, -3.0 * xi0 * xi0 * t);
    let rhs = modulate(&rhs, xi0).scale(Complex64::from_polar(1.0, -t * xi0.powi(3)));
    Ok(lhs.sub(&rhs)?.physical().sup_norm())
}

/// `‖Γf‖ / ‖f‖` in `M̂^p_{q,r}` with the `D_p` normalisation.
pub fn scale_invariance_ratio(f: &GridFunction, g: &Deformation, p: f64, q: f64, r: f64, window: ScaleWindow) -> Result<f64> {
    let base = morrey_norm(f, p, q, r, window)?;
    if base == 0.0 {
        return invalid("scale ratio of the zero function");
    }
    Ok(morrey_norm(&g.apply(f, p)?, p, q, r, window)? / base)
}
