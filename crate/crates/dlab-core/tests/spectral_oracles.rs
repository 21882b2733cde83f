use std::f64::consts::PI;

use dlab_core::deformations::{modulate, translate};
use dlab_core::norms::{ell, lhat_norm, morrey_norm, ScaleWindow};
use dlab_core::spectral_core::io::{read_field, read_grid_function, write_field, write_grid_function};
use dlab_core::spectral_core::{fractional_derivative, Grid, GridFunction, SpaceTimeField};
use num_complex::Complex64;

fn gaussian(g: Grid) -> GridFunction {
    GridFunction::from_real_fn(g, |x| (-x * x).exp())
}

#[test]
fn gaussian_transform_matches_closed_form() {
    // unitary transform of e^{−x²} is e^{−ξ²/4}/√2
    for (n, len, x0) in [(256, 40.0, -20.0), (512, 40.0, -13.0), (1024, 80.0 * PI, -100.0)] {
        let g = Grid::new(n, len, x0).unwrap();
        let hat = gaussian(g).fourier();
        let err = (0..n)
            .map(|k| (hat.values()[k] - Complex64::new((-g.xi(k).powi(2) / 4.0).exp() / 2f64.sqrt(), 0.0)).norm())
            .fold(0.0, f64::max);
        assert!(err < 1e-13, "grid ({n}, {len}, {x0}): {err}");
    }
}

#[test]
fn lhat_two_is_l_two_and_lhat_infinity_is_the_mass_of_the_spectrum() {
    let g = Grid::centered(1024, 60.0).unwrap();
    let f = gaussian(g);
    assert!((lhat_norm(&f, 2.0).unwrap() - (PI / 2.0).powf(0.25)).abs() < 1e-12);
    // ‖f̂‖_{L¹} = ∫ e^{−ξ²/4}/√2 dξ = √(2π)
    assert!((lhat_norm(&f, f64::INFINITY).unwrap() - (2.0 * PI).sqrt()).abs() < 1e-10);
}

#[test]
fn fractional_derivatives_compose() {
    let g = Grid::centered(512, 40.0).unwrap();
    let f = GridFunction::from_real_fn(g, |x| (-x * x).exp() * (2.0 * x).cos());
    let once = fractional_derivative(&fractional_derivative(&f, 0.3).unwrap(), 0.7).unwrap();
    let direct = fractional_derivative(&f, 1.0).unwrap();
    assert!(once.sub(&direct).unwrap().sup_norm() < 1e-12);
    assert!(fractional_derivative(&f, -1.0).is_err());
}

#[test]
fn norms_ignore_translation_and_lattice_modulation() {
    let g = Grid::centered(512, 32.0 * PI).unwrap();
    let f = GridFunction::from_fn(g, |x| Complex64::from_polar((-x * x / 4.0).exp(), 0.4 * x));
    let base = morrey_norm(&f, 1.8, 2.0, 3.0, ScaleWindow::All).unwrap();
    let moved = morrey_norm(&translate(&f, 2.75), 1.8, 2.0, 3.0, ScaleWindow::All).unwrap();
    assert!((moved - base).abs() < 1e-12 * base);
    let l = ell(&f, 1.8, 3.0, ScaleWindow::All).unwrap().value;
    let lm = ell(&modulate(&f, 37.0 * g.dxi()), 1.8, 3.0, ScaleWindow::All).unwrap().value;
    assert!((l - lm).abs() < 1e-9 * l, "{l} vs {lm}");
}

#[test]
fn files_round_trip_bit_for_bit() {
    let dir = tempfile::tempdir().unwrap();
    let g = Grid::new(64, 12.5, -3.25).unwrap();
    let f = GridFunction::from_fn(g, |x| Complex64::new(x.sin(), (-x * x).exp()));
    let p = dir.path().join("f.gf");
    write_grid_function(&f, &p).unwrap();
    assert_eq!(std::fs::metadata(&p).unwrap().len(), 29 + 16 * 64);
    assert_eq!(read_grid_function(&p).unwrap(), f);
    let field = SpaceTimeField::sample(g, &[0.0, 0.5, 1.25], |t| f.scale_real(1.0 + t)).unwrap();
    let q = dir.path().join("u.stf");
    write_field(&field, &q).unwrap();
    let back = read_field(&q).unwrap();
    assert_eq!(back.times(), field.times());
    assert_eq!(back.frames(), field.frames());
}
