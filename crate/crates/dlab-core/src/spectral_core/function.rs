use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};
use serde::{Deserialize, Serialize};
use std::cell::RefCell;
use std::f64::consts::PI;

use super::grid::Grid;
use crate::error::{invalid, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Physical,
    Fourier,
}

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// In-place unnormalized DFT.
pub(crate) fn fft_in_place(buf: &mut [Complex64], dir: FftDirection) {
    let plan = PLANNER.with(|p| p.borrow_mut().plan_fft(buf.len(), dir));
    plan.process(buf);
}

/// Samples on a grid, either physical values or unitary Fourier coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction {
    grid: Grid,
    values: Vec<Complex64>,
    side: Side,
}

impl GridFunction {
    pub fn new(grid: Grid, values: Vec<Complex64>, side: Side) -> Result<Self> {
        if values.len() != grid.n() {
            return invalid(format!("{} values for a grid of {} nodes", values.len(), grid.n()));
        }
        Ok(GridFunction { grid, values, side })
    }

    pub fn zeros(grid: Grid, side: Side) -> Self {
        GridFunction { grid, values: vec![Complex64::new(0.0, 0.0); grid.n()], side }
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> Complex64) -> Self {
        let values = (0..grid.n()).map(|j| f(grid.x(j))).collect();
        GridFunction { grid, values, side: Side::Physical }
    }

    pub fn from_real_fn(grid: Grid, f: impl Fn(f64) -> f64) -> Self {
        Self::from_fn(grid, |x| Complex64::new(f(x), 0.0))
    }

    /// Builds a function from its Fourier transform sampled at the grid frequencies.
    pub fn from_spectrum(grid: Grid, f: impl Fn(f64) -> Complex64) -> Self {
        let values = (0..grid.n()).map(|k| f(grid.xi(k))).collect();
        GridFunction { grid, values, side: Side::Fourier }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// Same values reinterpreted on another grid with the same node count.
    pub fn with_grid(mut self, grid: Grid) -> Result<Self> {
        if grid.n() != self.grid.n() {
            return invalid("regridding requires equal node counts");
        }
        self.grid = grid;
        Ok(self)
    }

    /// Forward unitary transform; the input must be physical.
    pub fn forward(&self) -> Result<Self> {
        if self.side != Side::Physical {
            return Err(Error::Contract("forward transform of a Fourier-side function".into()));
        }
        let g = self.grid;
        let mut buf = self.values.clone();
        fft_in_place(&mut buf, FftDirection::Forward);
        let scale = g.length() / (g.n() as f64 * (2.0 * PI).sqrt());
        for (k, c) in buf.iter_mut().enumerate() {
            let phase = -g.x0() * g.xi(k);
            *c *= Complex64::from_polar(scale, phase);
        }
        Ok(GridFunction { grid: g, values: buf, side: Side::Fourier })
    }

    /// Inverse unitary transform; the input must be Fourier-side.
    pub fn inverse(&self) -> Result<Self> {
        if self.side != Side::Fourier {
            return Err(Error::Contract("inverse transform of a physical-side function".into()));
        }
        let g = self.grid;
        let scale = (2.0 * PI).sqrt() / g.length();
        let mut buf: Vec<Complex64> = self
            .values
            .iter()
            .enumerate()
            .map(|(k, c)| c * Complex64::from_polar(scale, g.x0() * g.xi(k)))
            .collect();
        fft_in_place(&mut buf, FftDirection::Inverse);
        Ok(GridFunction { grid: g, values: buf, side: Side::Physical })
    }

    /// This function on the Fourier side, transforming if needed.
    pub fn fourier(&self) -> Self {
        match self.side {
            Side::Fourier => self.clone(),
            Side::Physical => self.forward().expect("side checked"),
        }
    }

    /// This function on the physical side, transforming if needed.
    pub fn physical(&self) -> Self {
        match self.side {
            Side::Physical => self.clone(),
            Side::Fourier => self.inverse().expect("side checked"),
        }
    }

    pub fn on_side(&self, side: Side) -> Self {
        match side {
            Side::Physical => self.physical(),
            Side::Fourier => self.fourier(),
        }
    }

    /// Applies the Fourier multiplier `m(ξ)`; the result is on the input's side.
    pub fn multiplier(&self, m: impl Fn(f64) -> Complex64) -> Self {
        let mut hat = self.fourier();
        let g = hat.grid;
        for (k, c) in hat.values.iter_mut().enumerate() {
            *c *= m(g.xi(k));
        }
        hat.on_side(self.side)
    }

    pub fn scale(&self, a: Complex64) -> Self {
        let values = self.values.iter().map(|v| v * a).collect();
        GridFunction { grid: self.grid, values, side: self.side }
    }

    pub fn scale_real(&self, a: f64) -> Self {
        self.scale(Complex64::new(a, 0.0))
    }

    fn zip(&self, other: &Self, op: impl Fn(Complex64, Complex64) -> Complex64) -> Result<Self> {
        if !self.grid.same_as(&other.grid) {
            return invalid("grid mismatch");
        }
        let b = other.on_side(self.side);
        let values = self.values.iter().zip(&b.values).map(|(x, y)| op(*x, *y)).collect();
        Ok(GridFunction { grid: self.grid, values, side: self.side })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip(other, |a, b| a - b)
    }

    pub fn conj(&self) -> Self {
        let p = self.physical();
        let values = p.values.iter().map(|v| v.conj()).collect();
        GridFunction { grid: self.grid, values, side: Side::Physical }.on_side(self.side)
    }

    /// Physical real part.
    pub fn re(&self) -> Self {
        let p = self.physical();
        let values = p.values.iter().map(|v| Complex64::new(v.re, 0.0)).collect();
        GridFunction { grid: self.grid, values, side: Side::Physical }.on_side(self.side)
    }

    /// Largest |Im| of the physical samples.
    pub fn max_imag(&self) -> f64 {
        self.physical().values.iter().fold(0.0, |m, v| m.max(v.im.abs()))
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    /// L² norm by the quadrature rule of the stored side.
    pub fn l2_norm(&self) -> f64 {
        let w = match self.side {
            Side::Physical => self.grid.dx(),
            Side::Fourier => self.grid.dxi(),
        };
        (w * self.values.iter().map(|v| v.norm_sqr()).sum::<f64>()).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    /// Evaluates the trigonometric interpolant at an arbitrary point.
    pub fn eval(&self, x: f64) -> Complex64 {
        let hat = self.fourier();
        let g = hat.grid;
        let scale = (2.0 * PI).sqrt() / g.length();
        let half = g.n() / 2;
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, c) in hat.values.iter().enumerate() {
            if k == half {
                // Nyquist mode split symmetrically so real data interpolates to real values.
                acc += c * (g.xi(k) * x).cos();
            } else {
                acc += c * Complex64::from_polar(1.0, g.xi(k) * x);
            }
        }
        acc * scale
    }
}

/// Fourier multiplier `|ξ|^s`; the zero mode maps to 0 whenever `s ≠ 0`.
pub fn fractional_derivative(f: &GridFunction, s: f64) -> Result<GridFunction> {
    if s <= -1.0 || !s.is_finite() {
        return invalid(format!("fractional order {s} must exceed -1"));
    }
    if s == 0.0 {
        return Ok(f.clone());
    }
    Ok(f.multiplier(|xi| {
        if xi == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(xi.abs().powf(s), 0.0)
        }
    }))
}

/// Spectral derivative `∂_x^m`.
pub fn derivative(f: &GridFunction, m: u32) -> GridFunction {
    let n = f.grid().n();
    let g = *f.grid();
    let mut hat = f.fourier();
    for (k, c) in hat.values_mut().iter_mut().enumerate() {
        if m % 2 == 1 && k == n / 2 {
            *c = Complex64::new(0.0, 0.0);
        } else {
            *c *= Complex64::new(0.0, g.xi(k)).powu(m);
        }
    }
    hat.on_side(f.side())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn gaussian(n: usize, l: f64) -> GridFunction {
        GridFunction::from_real_fn(Grid::centered(n, l).unwrap(), |x| (-0.5 * x * x).exp())
    }

    #[test]
    fn zero_transforms_to_zero() {
        let g = Grid::centered(32, 10.0).unwrap();
        let f = GridFunction::zeros(g, Side::Physical).forward().unwrap();
        assert!(f.values().iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn exact_mode_is_a_single_coefficient() {
        let g = Grid::new(64, 2.0 * PI * 4.0, -3.0).unwrap();
        let k = 5.0 * g.dxi();
        let f = GridFunction::from_fn(g, |x| Complex64::from_polar(1.0, k * x)).forward().unwrap();
        for (slot, c) in f.values().iter().enumerate() {
            if g.freq_index(slot) == 5 {
                let expect = g.length() / (2.0 * PI).sqrt();
                assert!((c.norm() - expect).abs() < 1e-12 * expect);
            } else {
                assert!(c.norm() < 1e-12);
            }
        }
    }

    #[test]
    fn gaussian_is_self_dual() {
        let f = gaussian(1024, 40.0 * PI).forward().unwrap();
        let g = *f.grid();
        for (k, c) in f.values().iter().enumerate() {
            let xi = g.xi(k);
            assert!((c - Complex64::new((-0.5 * xi * xi).exp(), 0.0)).norm() < 1e-10);
        }
    }

    #[test]
    fn wrong_side_is_a_contract_violation() {
        let f = gaussian(16, 10.0);
        assert!(matches!(f.inverse(), Err(Error::Contract(_))));
        assert!(matches!(f.fourier().forward(), Err(Error::Contract(_))));
    }

    #[test]
    fn round_trip_and_plancherel() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = Grid::new(256, 17.0, -4.0).unwrap();
        let vals = (0..256).map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)).collect();
        let f = GridFunction::new(g, vals, Side::Physical).unwrap();
        let hat = f.forward().unwrap();
        let back = hat.inverse().unwrap();
        let err = f.sub(&back).unwrap().l2_norm() / f.l2_norm();
        assert!(err < 1e-12, "{err}");
        assert!((hat.l2_norm() - f.l2_norm()).abs() < 1e-12 * f.l2_norm());
    }

    #[test]
    fn fractional_derivative_identities() {
        let f = gaussian(256, 30.0);
        assert_eq!(fractional_derivative(&f, 0.0).unwrap(), f);
        assert!(fractional_derivative(&f, -1.0).is_err());
        let a = fractional_derivative(&fractional_derivative(&f, 0.3).unwrap(), 0.9).unwrap();
        let b = fractional_derivative(&f, 1.2).unwrap();
        assert!(a.sub(&b).unwrap().sup_norm() < 1e-10);
    }

    #[test]
    fn second_order_symbol_on_a_mode() {
        let g = Grid::centered(32, 2.0 * PI).unwrap();
        let f = GridFunction::from_fn(g, |x| Complex64::from_polar(1.0, 3.0 * x));
        let d = fractional_derivative(&f, 2.0).unwrap();
        assert!(d.sub(&f.scale_real(9.0)).unwrap().sup_norm() < 1e-11);
    }

    #[test]
    fn interpolant_reproduces_nodes() {
        let f = gaussian(64, 20.0);
        for j in [0, 7, 31, 40] {
            let x = f.grid().x(j);
            assert!((f.eval(x) - f.values()[j]).norm() < 1e-12);
        }
    }
}
