use super::function::{GridFunction, Side};
use super::grid::Grid;
use crate::error::{invalid, Result};

/// Time-stamped frames on a common grid, stored physical-side.
#[derive(Clone, Debug, PartialEq)]
pub struct SpaceTimeField {
    grid: Grid,
    times: Vec<f64>,
    frames: Vec<GridFunction>,
}

impl SpaceTimeField {
    pub fn new(grid: Grid, times: Vec<f64>, frames: Vec<GridFunction>) -> Result<Self> {
        if times.len() != frames.len() {
            return invalid(format!("{} times for {} frames", times.len(), frames.len()));
        }
        if times.windows(2).any(|w| !(w[1] > w[0])) {
            return invalid("frame times must be strictly increasing");
        }
        let mut out = Vec::with_capacity(frames.len());
        for f in frames {
            if !f.grid().same_as(&grid) {
                return invalid("all frames must share the field grid");
            }
            out.push(f.physical().with_grid(grid)?);
        }
        Ok(SpaceTimeField { grid, times, frames: out })
    }

    /// Samples `f(t)` at the given times.
    pub fn sample(grid: Grid, times: &[f64], f: impl Fn(f64) -> GridFunction) -> Result<Self> {
        let frames = times.iter().map(|&t| f(t)).collect();
        Self::new(grid, times.to_vec(), frames)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn frames(&self) -> &[GridFunction] {
        &self.frames
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    /// Linear interpolation in time between stored frames.
    pub fn at(&self, t: f64) -> Result<GridFunction> {
        let ts = &self.times;
        if ts.is_empty() {
            return invalid("empty field");
        }
        let (lo, hi) = (ts[0], ts[ts.len() - 1]);
        let tol = 1e-12 * (hi - lo).abs().max(1.0);
        if t < lo - tol || t > hi + tol {
            return invalid(format!("time {t} outside stored range [{lo}, {hi}]"));
        }
        let i = match ts.binary_search_by(|v| v.partial_cmp(&t).unwrap()) {
            Ok(i) => return Ok(self.frames[i].clone()),
            Err(i) => i,
        };
        if i == 0 {
            return Ok(self.frames[0].clone());
        }
        if i == ts.len() {
            return Ok(self.frames[ts.len() - 1].clone());
        }
        let w = (t - ts[i - 1]) / (ts[i] - ts[i - 1]);
        let a = self.frames[i - 1].values();
        let b = self.frames[i].values();
        let vals = a.iter().zip(b).map(|(x, y)| x * (1.0 - w) + y * w).collect();
        GridFunction::new(self.grid, vals, Side::Physical)
    }

    pub fn map(&self, f: impl Fn(f64, &GridFunction) -> GridFunction) -> Result<Self> {
        let frames = self.times.iter().zip(&self.frames).map(|(&t, u)| f(t, u)).collect();
        Self::new(self.grid, self.times.clone(), frames)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.times.len() != other.times.len()
            || self.times.iter().zip(&other.times).any(|(a, b)| (a - b).abs() > 1e-12 * a.abs().max(1.0))
        {
            return invalid("time samples differ");
        }
        let frames = self.frames.iter().zip(&other.frames).map(|(a, b)| a.sub(b)).collect::<Result<Vec<_>>>()?;
        Self::new(self.grid, self.times.clone(), frames)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn rejects_unsorted_times() {
        let g = Grid::centered(8, 1.0).unwrap();
        let f = GridFunction::zeros(g, Side::Physical);
        assert!(SpaceTimeField::new(g, vec![0.0, 0.0], vec![f.clone(), f.clone()]).is_err());
        assert!(SpaceTimeField::new(g, vec![0.0], vec![f.clone(), f]).is_err());
    }

    #[test]
    fn linear_interpolation() {
        let g = Grid::centered(8, 1.0).unwrap();
        let field = SpaceTimeField::sample(g, &[0.0, 1.0, 3.0], |t| {
            GridFunction::from_fn(g, |_| Complex64::new(t, 0.0))
        })
        .unwrap();
        assert!((field.at(2.0).unwrap().values()[3].re - 2.0).abs() < 1e-15);
        assert!(field.at(3.5).is_err());
    }
}
