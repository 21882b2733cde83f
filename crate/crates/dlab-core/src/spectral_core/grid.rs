use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{invalid, Result};

/// Uniform periodic grid: nodes `x_j = x0 + j L / n`, frequencies `2πk/L`.
///
/// Fourier coefficients are stored in DFT order: slot `k < n/2` holds
/// frequency `k·dξ`, slot `k ≥ n/2` holds `(k − n)·dξ`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    n: usize,
    length: f64,
    x0: f64,
}

impl Grid {
    pub fn new(n: usize, length: f64, x0: f64) -> Result<Self> {
        if n < 2 || !n.is_power_of_two() {
            return invalid(format!("grid size {n} is not a power of two >= 2"));
        }
        if !(length > 0.0 && length.is_finite()) {
            return invalid(format!("grid length {length} must be positive and finite"));
        }
        if !x0.is_finite() {
            return invalid("grid origin must be finite");
        }
        Ok(Grid { n, length, x0 })
    }

    /// Grid on `[−L/2, L/2)`.
    pub fn centered(n: usize, length: f64) -> Result<Self> {
        Self::new(n, length, -0.5 * length)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn dx(&self) -> f64 {
        self.length / self.n as f64
    }

    pub fn dxi(&self) -> f64 {
        2.0 * PI / self.length
    }

    pub fn x(&self, j: usize) -> f64 {
        self.x0 + j as f64 * self.dx()
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.x(j)).collect()
    }

    /// Signed frequency index of storage slot `k`.
    pub fn freq_index(&self, k: usize) -> i64 {
        if k < self.n / 2 {
            k as i64
        } else {
            k as i64 - self.n as i64
        }
    }

    /// Storage slot of signed frequency index `m`, if representable.
    pub fn slot(&self, m: i64) -> Option<usize> {
        let half = (self.n / 2) as i64;
        if m >= -half && m < half {
            Some(m.rem_euclid(self.n as i64) as usize)
        } else {
            None
        }
    }

    pub fn xi(&self, k: usize) -> f64 {
        self.freq_index(k) as f64 * self.dxi()
    }

    pub fn xis(&self) -> Vec<f64> {
        (0..self.n).map(|k| self.xi(k)).collect()
    }

    /// Largest representable |ξ| (the Nyquist frequency).
    pub fn xi_max(&self) -> f64 {
        (self.n / 2) as f64 * self.dxi()
    }

    /// Grid of `f(h·)`: same sample count, length and origin divided by `h`.
    pub fn dilated(&self, h: f64) -> Grid {
        Grid { n: self.n, length: self.length / h, x0: self.x0 / h }
    }

    /// True when two grids describe the same nodes up to rounding.
    pub fn same_as(&self, other: &Grid) -> bool {
        let tol = 1e-12 * self.length.max(other.length);
        self.n == other.n
            && (self.length - other.length).abs() <= tol
            && (self.x0 - other.x0).abs() <= tol
    }

    /// True when `xi` is an integer multiple of the frequency spacing.
    pub fn on_lattice(&self, xi: f64) -> bool {
        let m = xi / self.dxi();
        (m - m.round()).abs() <= 1e-9 * m.abs().max(1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_power_of_two() {
        assert!(Grid::new(12, 1.0, 0.0).is_err());
        assert!(Grid::new(16, -1.0, 0.0).is_err());
        assert!(Grid::new(16, 1.0, 0.0).is_ok());
    }

    #[test]
    fn frequency_order() {
        let g = Grid::new(8, 2.0 * PI, 0.0).unwrap();
        let m: Vec<i64> = (0..8).map(|k| g.freq_index(k)).collect();
        assert_eq!(m, vec![0, 1, 2, 3, -4, -3, -2, -1]);
        for k in 0..8 {
            assert_eq!(g.slot(g.freq_index(k)), Some(k));
        }
        assert_eq!(g.slot(4), None);
        assert_eq!(g.xi_max(), 4.0);
    }

    #[test]
    fn dyadic_dilation_is_exact() {
        let g = Grid::centered(64, 40.0).unwrap();
        let d = g.dilated(4.0).dilated(0.25);
        assert_eq!(d, g);
        assert_eq!(g.dilated(2.0).dxi(), 2.0 * g.dxi());
    }
}
