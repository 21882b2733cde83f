use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{dilate, modulate, translate, Deformation};
use crate::error::{invalid, Result};
use crate::evolutions::{airy_propagate, schrodinger_propagate};
use crate::spectral_core::GridFunction;

/// `Γ̃⁻¹Γ = e^{iγ} D(h) P(ξ) S(schro) A(s) T(y)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelativeParameters {
    pub h: f64,
    pub xi: f64,
    pub s: f64,
    pub schro: f64,
    pub y: f64,
    pub gamma: f64,
}

impl RelativeParameters {
    /// Closed form obtained by commuting `D` to the left and then `P(ξ)` through
    /// `T` and `A` (the latter via the Galilean identity).
    pub fn between(g: &Deformation, tilde: &Deformation) -> Self {
        let h = g.h / tilde.h;
        let s = g.s - h.powi(3) * tilde.s;
        let a = g.y - h * tilde.y;
        RelativeParameters {
            h,
            xi: g.xi - tilde.xi / h,
            s,
            schro: 3.0 * s * g.xi,
            y: a - 3.0 * s * g.xi * g.xi,
            gamma: g.phase - tilde.phase + a * g.xi - s * g.xi.powi(3),
        }
    }

    /// Applies the composite operator with the `D_p` normalisation.
    pub fn apply(&self, f: &GridFunction, p: f64) -> Result<GridFunction> {
        let g = translate(f, self.y);
        let g = airy_propagate(&g, self.s);
        let g = schrodinger_propagate(&g, self.schro);
        let g = modulate(&g, self.xi);
        let g = dilate(&g, self.h, p)?;
        Ok(g.scale(Complex64::from_polar(1.0, self.gamma)))
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        [self.h - 1.0, self.xi, self.s, self.schro, self.y, self.gamma].iter().all(|v| v.abs() <= tol)
    }
}

/// Phase of `Γ̃⁻¹Γ f` against the phase-free composite, read off a probe.
pub fn measure_phase(g: &Deformation, tilde: &Deformation, probe: &GridFunction, p: f64) -> Result<f64> {
    let lhs = tilde.apply_inverse(&g.apply(probe, p)?, p)?.physical();
    let rel = RelativeParameters { gamma: 0.0, ..RelativeParameters::between(g, tilde) };
    let rhs = rel.apply(probe, p)?.physical();
    let inner: Complex64 = lhs.values().iter().zip(rhs.values()).map(|(a, b)| a * b.conj()).sum();
    if inner.norm() == 0.0 {
        return invalid("probe is orthogonal to its image; phase undefined");
    }
    Ok(inner.arg())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral_core::Grid;
    use std::f64::consts::PI;

    fn probe(g: Grid) -> GridFunction {
        GridFunction::from_fn(g, |x| Complex64::new((-0.6 * x * x).exp() * (1.0 + 0.2 * x), 0.3 * (-x * x).exp()))
    }

    fn wrap(a: f64) -> f64 {
        (a + PI).rem_euclid(2.0 * PI) - PI
    }

    #[test]
    fn reproduces_the_composite() {
        let g = Grid::centered(512, 32.0 * PI).unwrap();
        let f = probe(g);
        let cases = [
            (Deformation::dyadic(1, 2.0, 0.05, 0.7).unwrap(), Deformation::dyadic(0, 1.5, -0.03, 0.2).unwrap()),
            (Deformation::dyadic(0, -1.0, 0.02, -0.4).unwrap().with_phase(0.3), Deformation::dyadic(-1, 0.5, 0.01, 1.0).unwrap()),
            (Deformation::dyadic(2, 0.25, 0.0, 0.0).unwrap(), Deformation::IDENTITY),
        ];
        for (a, b) in cases {
            let rel = a.relative(&b);
            let lhs = b.apply_inverse(&a.apply(&f, 1.8).unwrap(), 1.8).unwrap();
            let rhs = rel.apply(&f, 1.8).unwrap();
            assert!(lhs.grid().same_as(rhs.grid()));
            let err = lhs.sub(&rhs).unwrap().physical().sup_norm();
            assert!(err < 1e-10, "{a} vs {b}: {err}");
            let measured = measure_phase(&a, &b, &f, 1.8).unwrap();
            assert!(wrap(measured - rel.gamma).abs() < 1e-10);
        }
    }

    #[test]
    fn special_cases() {
        let g = Deformation::new(2.0, 1.5, 0.4, -1.0).unwrap();
        let r = g.relative(&Deformation::IDENTITY);
        assert_eq!((r.h, r.xi, r.s), (2.0, 1.5, 0.4));
        assert!((r.schro - 3.0 * 0.4 * 1.5).abs() < 1e-15);
        assert!((r.y - (-1.0 - 3.0 * 0.4 * 1.5 * 1.5)).abs() < 1e-15);
        assert!(g.relative(&g).is_identity(1e-12));
        let d = Deformation::new(2.0, 0.0, 0.0, 0.0).unwrap().relative(&Deformation::IDENTITY);
        assert!(d.h == 2.0 && d.xi == 0.0 && d.s == 0.0 && d.schro == 0.0 && d.y == 0.0 && d.gamma == 0.0);
    }
}
