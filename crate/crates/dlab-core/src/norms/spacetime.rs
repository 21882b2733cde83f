use super::exponents::{exponents_x, exponents_y};
use crate::error::{invalid, Result};
use crate::spectral_core::{fractional_derivative, SpaceTimeField};

/// `‖ |∂_x|^s F ‖_{L^p_x L^q_t}`: trapezoid rule in `t` inside, grid sum in `x` outside.
pub fn mixed_norm(field: &SpaceTimeField, s: f64, p: f64, q: f64) -> Result<f64> {
    if field.is_empty() {
        return invalid("empty space-time field");
    }
    if !(p > 0.0 && q > 0.0) {
        return invalid(format!("mixed-norm exponents must be positive, got p = {p}, q = {q}"));
    }
    if field.len() == 1 && q.is_finite() {
        return invalid("a single frame carries no time measure for q < ∞");
    }
    let n = field.grid().n();
    let dx = field.grid().dx();
    let times = field.times();
    let mut inner = vec![0.0f64; n];
    for (i, frame) in field.frames().iter().enumerate() {
        let d = fractional_derivative(frame, s)?.physical();
        let w = if q.is_infinite() {
            0.0
        } else {
            let left = if i > 0 { times[i] - times[i - 1] } else { 0.0 };
            let right = if i + 1 < times.len() { times[i + 1] - times[i] } else { 0.0 };
            0.5 * (left + right)
        };
        for (acc, v) in inner.iter_mut().zip(d.values()) {
            let a = v.norm();
            if q.is_infinite() {
                *acc = acc.max(a);
            } else {
                *acc += w * a.powf(q);
            }
        }
    }
    let per_x = |x: f64| if q.is_infinite() { x } else { x.powf(1.0 / q) };
    if p.is_infinite() {
        return Ok(inner.iter().map(|&v| per_x(v)).fold(0.0, f64::max));
    }
    let total: f64 = inner.iter().map(|&v| per_x(v).powf(p)).sum::<f64>() * dx;
    Ok(total.powf(1.0 / p))
}

/// `‖F‖_{X(I; s, r)}`.
pub fn x_norm(field: &SpaceTimeField, s: f64, r: f64) -> Result<f64> {
    let e = exponents_x(s, r);
    if e.degenerate {
        return invalid(format!("X({s}, {r}) has degenerate exponents ({}, {})", e.p, e.q));
    }
    mixed_norm(field, s, e.p, e.q)
}

/// `‖F‖_{Y(I; s, r)}`.
pub fn y_norm(field: &SpaceTimeField, s: f64, r: f64) -> Result<f64> {
    let e = exponents_y(s, r);
    if e.degenerate {
        return invalid(format!("Y({s}, {r}) has degenerate exponents ({}, {})", e.p, e.q));
    }
    mixed_norm(field, s, e.p, e.q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral_core::{Grid, GridFunction, Side};
    use num_complex::Complex64;
    use std::f64::consts::PI;

    #[test]
    fn separable_mode() {
        let g = Grid::centered(64, 2.0 * PI).unwrap();
        let k = 3.0;
        let times: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
        let field = SpaceTimeField::sample(g, &times, |_| GridFunction::from_fn(g, |x| Complex64::from_polar(1.0, k * x))).unwrap();
        let (s, p, q) = (0.5, 3.0, 4.0);
        let want = k.powf(s) * (2.0 * PI).powf(1.0 / p);
        assert!((mixed_norm(&field, s, p, q).unwrap() - want).abs() < 1e-11);
    }

    #[test]
    fn zero_and_single_frame() {
        let g = Grid::centered(16, 5.0).unwrap();
        let z = GridFunction::zeros(g, Side::Physical);
        let two = SpaceTimeField::new(g, vec![0.0, 1.0], vec![z.clone(), z.clone()]).unwrap();
        assert_eq!(mixed_norm(&two, 0.2, 3.0, 3.0).unwrap(), 0.0);
        let one = SpaceTimeField::new(g, vec![0.0], vec![z]).unwrap();
        assert!(mixed_norm(&one, 0.0, 2.0, 2.0).is_err());
        assert!(mixed_norm(&one, 0.0, 2.0, f64::INFINITY).is_ok());
    }
}
