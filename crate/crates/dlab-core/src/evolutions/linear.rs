use num_complex::Complex64;

use crate::spectral_core::GridFunction;

/// Airy flow `A(t) = e^{−t∂³}`, symbol `e^{itξ³}`.
pub fn airy_propagate(f: &GridFunction, t: f64) -> GridFunction {
    if t == 0.0 {
        return f.clone();
    }
    f.multiplier(|xi| Complex64::from_polar(1.0, t * xi * xi * xi))
}

/// Schrödinger flow `S(t) = e^{it∂²}`, symbol `e^{−itξ²}`.
pub fn schrodinger_propagate(f: &GridFunction, t: f64) -> GridFunction {
    if t == 0.0 {
        return f.clone();
    }
    f.multiplier(|xi| Complex64::from_polar(1.0, -t * xi * xi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norms::lhat_norm;
    use crate::spectral_core::Grid;
    use std::f64::consts::PI;

    fn gauss(g: Grid) -> GridFunction {
        GridFunction::from_real_fn(g, |x| (-x * x).exp() * (1.0 + 0.3 * x))
    }

    #[test]
    fn single_modes() {
        let g = Grid::centered(64, 2.0 * PI).unwrap();
        let k = 3.0;
        let t = 0.37;
        let f = GridFunction::from_fn(g, |x| Complex64::from_polar(1.0, k * x));
        let a = airy_propagate(&f, t).physical();
        let s = schrodinger_propagate(&f, t).physical();
        for (j, x) in g.xs().into_iter().enumerate() {
            assert!((a.values()[j] - Complex64::from_polar(1.0, k * k * k * t + k * x)).norm() < 1e-12);
            assert!((s.values()[j] - Complex64::from_polar(1.0, -k * k * t + k * x)).norm() < 1e-12);
        }
    }

    #[test]
    fn group_law_and_isometry() {
        let g = Grid::centered(256, 40.0).unwrap();
        let f = gauss(g);
        let two = airy_propagate(&airy_propagate(&f, 0.3), 0.45);
        let one = airy_propagate(&f, 0.75);
        assert!(two.sub(&one).unwrap().sup_norm() < 1e-12);
        assert_eq!(airy_propagate(&f, 0.0).values(), f.values());
        for r in [1.5, 1.8, 2.0, 4.0] {
            let a = lhat_norm(&f, r).unwrap();
            assert!((lhat_norm(&airy_propagate(&f, 1.3), r).unwrap() - a).abs() < 1e-12 * a);
            assert!((lhat_norm(&schrodinger_propagate(&f, 1.3), r).unwrap() - a).abs() < 1e-12 * a);
        }
    }
}
