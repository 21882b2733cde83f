use dlab_core::norms::{ell, exponents_x, exponents_y, morrey_norm, ScaleWindow};
use dlab_core::profiles::spectral_bump;
use dlab_core::spectral_core::{Grid, GridFunction};
use num_complex::Complex64;
use proptest::prelude::*;

fn grid() -> Grid {
    Grid::centered(256, 32.0).unwrap()
}

/// Two spectral bumps: `(centre, half-width, modulus, phase)` each.
fn member() -> impl Strategy<Value = GridFunction> {
    let bump = (-3.0..3.0f64, 0.2..1.5f64, 0.1..2.0f64, 0.0..6.3f64);
    (bump.clone(), bump).prop_map(|(a, b)| {
        let g = grid();
        let f = |(c, w, m, ph): (f64, f64, f64, f64)| spectral_bump(g, c - w, c + w, Complex64::from_polar(m, ph));
        f(a).add(&f(b)).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn homogeneous(f in member(), m in 0.01..50.0f64, ph in 0.0..6.3f64) {
        let c = Complex64::from_polar(m, ph);
        for (p, q, r) in [(1.8, 2.0, 3.0), (1.5, 1.5, f64::INFINITY), (1.7, 4.0, 2.5)] {
            let a = morrey_norm(&f.scale(c), p, q, r, ScaleWindow::All).unwrap();
            let b = m * morrey_norm(&f, p, q, r, ScaleWindow::All).unwrap();
            prop_assert!((a - b).abs() <= 1e-12 * b, "({p}, {q}, {r}): {a} vs {b}");
        }
    }

    #[test]
    fn decreasing_in_r(f in member(), r1 in 2.3..6.0f64, dr in 0.0..10.0f64) {
        let (p, q) = (1.8, 2.0);
        let a = morrey_norm(&f, p, q, r1, ScaleWindow::All).unwrap();
        let b = morrey_norm(&f, p, q, r1 + dr, ScaleWindow::All).unwrap();
        let sup = morrey_norm(&f, p, q, f64::INFINITY, ScaleWindow::All).unwrap();
        prop_assert!(b <= a * (1.0 + 1e-12) && sup <= b * (1.0 + 1e-12), "{a} {b} {sup}");
    }

    #[test]
    fn exponents_solve_their_system(sn in -20i32..20, rn in 1i32..40) {
        let s = f64::from(sn) / 40.0;
        let r = 40.0 / f64::from(rn);
        let x = exponents_x(s, r);
        if !x.degenerate {
            prop_assert!((2.0 / x.p + 1.0 / x.q - 1.0 / r).abs() < 1e-14);
            prop_assert!((-1.0 / x.p + 2.0 / x.q - s).abs() < 1e-14);
        }
        let y = exponents_y(s, r);
        if !y.degenerate {
            prop_assert!((2.0 / y.p + 1.0 / y.q - 2.0 - 1.0 / r).abs() < 1e-14);
            prop_assert!((-1.0 / y.p + 2.0 / y.q - s).abs() < 1e-14);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn ell_is_within_a_factor_two(f in member()) {
        let (alpha, sigma) = (1.8, 3.0);
        let full = morrey_norm(&f, alpha, 2.0, sigma, ScaleWindow::All).unwrap();
        let l = ell(&f, alpha, sigma, ScaleWindow::All).unwrap().value;
        prop_assert!(l <= full * (1.0 + 1e-12) && l >= 0.5 * full, "ℓ = {l}, norm = {full}");
    }
}
