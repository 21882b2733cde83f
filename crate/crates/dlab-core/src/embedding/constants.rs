use std::f64::consts::PI;

use crate::error::{invalid, Result};
use crate::special::{gamma, integrate};

const QUAD_TOL: f64 = 1e-14;

/// `(1/π)∫_{−π}^{π} |cos θ|^{2α} sin θ sin kθ dθ` by quadrature, split at the
/// kinks `±π/2` and folded onto `[0, π]` by evenness.
fn sin_coefficient_quadrature(alpha: f64, k: u32) -> f64 {
    let kf = f64::from(k);
    let f = |t: f64| t.cos().abs().powf(2.0 * alpha) * t.sin() * (kf * t).sin();
    let h = 0.5 * PI;
    2.0 / PI * (integrate(f, 0.0, h, QUAD_TOL) + integrate(f, h, PI, QUAD_TOL))
}

/// `k`-th Fourier-sine coefficient of `|cos θ|^{2α} sin θ`; zero for even `k`.
pub fn fourier_sin_coeff(alpha: f64, k: u32) -> Result<f64> {
    if !(alpha > 0.0) || k == 0 {
        return invalid(format!("need alpha > 0 and k >= 1, got alpha = {alpha}, k = {k}"));
    }
    if k % 2 == 0 {
        // the integrand is odd about θ = π/2 on [0, π]
        return Ok(0.0);
    }
    Ok(sin_coefficient_quadrature(alpha, k))
}

/// `C₀ = 2Γ(α+3/2) / (3√π Γ(α+2))` and `C₁ = 3C₀/(2α+1)`.
pub fn embedding_constants(alpha: f64) -> Result<(f64, f64)> {
    if !(alpha > 0.0) {
        return invalid(format!("alpha = {alpha} must be positive"));
    }
    let c0 = 2.0 * gamma(alpha + 1.5) / (3.0 * PI.sqrt() * gamma(alpha + 2.0));
    let c1 = 3.0 * c0 / (2.0 * alpha + 1.0);
    debug_assert!((c1 - sin_coefficient_quadrature(alpha, 1)).abs() < 1e-10);
    Ok((c0, c1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubic_case() {
        let (c0, c1) = embedding_constants(1.0).unwrap();
        assert!((c0 - 0.25).abs() < 1e-12 && (c1 - 0.25).abs() < 1e-12);
        for k in 1..=12 {
            let want = if k == 1 || k == 3 { 0.25 } else { 0.0 };
            assert!((fourier_sin_coeff(1.0, k).unwrap() - want).abs() < 1e-10, "k = {k}");
        }
    }

    #[test]
    fn closed_form_matches_quadrature() {
        assert!((fourier_sin_coeff(1.5, 1).unwrap() - 8.0 / (15.0 * PI)).abs() < 1e-12);
        for alpha in [1.0, 1.25, 1.5, 1.85, 1.95, 2.0] {
            let (c0, c1) = embedding_constants(alpha).unwrap();
            assert!((c1 - 3.0 * c0 / (2.0 * alpha + 1.0)).abs() < 1e-15);
            assert!((c1 - fourier_sin_coeff(alpha, 1).unwrap()).abs() < 1e-10);
        }
    }

    #[test]
    fn even_coefficients_vanish() {
        for alpha in [0.7, 1.3, 1.9] {
            for k in [2, 4, 10] {
                assert!(sin_coefficient_quadrature(alpha, k).abs() < 1e-14);
            }
        }
        assert!(fourier_sin_coeff(1.0, 0).is_err());
    }

    #[test]
    fn partial_sums_converge() {
        let alpha = 1.3;
        let coeffs: Vec<f64> = (1..=15).map(|k| fourier_sin_coeff(alpha, k).unwrap()).collect();
        let tail = |kmax: usize| {
            integrate(
                |t| {
                    let s: f64 = coeffs[..kmax].iter().enumerate().map(|(i, c)| c * ((i + 1) as f64 * t).sin()).sum();
                    (t.cos().abs().powf(2.0 * alpha) * t.sin() - s).powi(2)
                },
                -PI,
                PI,
                1e-12,
            )
        };
        let errs: Vec<f64> = [1, 3, 5, 9, 15].iter().map(|&k| tail(k)).collect();
        assert!(errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");
    }
}
