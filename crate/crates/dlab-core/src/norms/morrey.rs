use super::cells::{lebesgue, morrey, Cells, MorreyExponents, MorreyValue, ScaleWindow};
use super::dyadic::scale_length;
use crate::error::{invalid, Result};
use crate::spectral_core::{Grid, GridFunction};

/// Hölder conjugate, with `1 ↔ ∞`.
pub fn conj(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}

/// `|f̂|` as a piecewise-constant function of frequency, cells `[ξ_k, ξ_k + dξ)`.
pub fn spectrum_cells(f: &GridFunction) -> Cells {
    let hat = f.fourier();
    let g = *hat.grid();
    let n = g.n();
    let vals = hat.values();
    let ordered: Vec<f64> = (0..n).map(|i| vals[(i + n / 2) % n].norm()).collect();
    Cells::new(-((n / 2) as f64) * g.dxi(), g.dxi(), ordered)
}

/// `|f|` as a piecewise-constant function of position, cells `[x_j, x_j + dx)`.
pub fn sample_cells(f: &GridFunction) -> Cells {
    let p = f.physical();
    let g = *p.grid();
    Cells::new(g.x0(), g.dx(), p.values().iter().map(|v| v.norm()).collect())
}

/// Window `j_min` with `2^{−j_min}` covering the whole band and `2^{−j_max} ≥ 4 dξ`.
pub fn default_window(grid: &Grid) -> ScaleWindow {
    let band = grid.n() as f64 * grid.dxi();
    let j_min = -(band.log2().ceil() as i32);
    let j_max = (-(4.0 * grid.dxi()).log2()).floor() as i32;
    ScaleWindow::Range { j_min, j_max: j_max.max(j_min) }
}

/// `‖f̂‖_{L^{r′}}`.
pub fn lhat_norm(f: &GridFunction, r: f64) -> Result<f64> {
    if !(r >= 1.0) {
        return invalid(format!("L̂^r needs r ≥ 1, got {r}"));
    }
    Ok(lebesgue(&spectrum_cells(f), conj(r)))
}

fn check_hat(p: f64, q: f64, r: f64) -> Result<()> {
    if !(p >= 1.0 && q >= p) {
        return invalid(format!("M̂^p_(q,r) needs 1 ≤ p ≤ q, got p = {p}, q = {q}"));
    }
    if !(r > 0.0) {
        return invalid(format!("M̂^p_(q,r) needs r > 0, got {r}"));
    }
    Ok(())
}

/// `‖f‖_{M̂^p_{q,r}} = ‖f̂‖_{M^{p′}_{q′,r}}`.
pub fn morrey_norm(f: &GridFunction, p: f64, q: f64, r: f64, window: ScaleWindow) -> Result<f64> {
    Ok(morrey_hat(f, p, q, r, window)?.value)
}

/// As [`morrey_norm`], also returning the maximizing interval when `r = ∞`.
pub fn morrey_hat(f: &GridFunction, p: f64, q: f64, r: f64, window: ScaleWindow) -> Result<MorreyValue> {
    check_hat(p, q, r)?;
    morrey(&spectrum_cells(f), MorreyExponents { p: conj(p), q: conj(q), r }, window)
}

/// Physical-side `‖f‖_{M^p_{q,r}}` of the sample function.
pub fn morrey_physical(f: &GridFunction, p: f64, q: f64, r: f64, window: ScaleWindow) -> Result<f64> {
    Ok(morrey(&sample_cells(f), MorreyExponents { p, q, r }, window)?.value)
}

/// `ℓ_σ` search result.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EllValue {
    pub value: f64,
    /// Minimizing modulation `ξ` (`‖P(ξ)f‖` is minimal).
    pub argmin: f64,
    /// Width of the final golden-section bracket.
    pub bracket: f64,
}

/// Admissible `σ` range `(α′, 6α/(3α−2)]` for `4/3 < α < 2`.
pub fn check_alpha_sigma(alpha: f64, sigma: f64) -> Result<()> {
    if !(alpha > 4.0 / 3.0 && alpha < 2.0) {
        return invalid(format!("α = {alpha} outside (4/3, 2)"));
    }
    let lo = conj(alpha);
    let hi = 6.0 * alpha / (3.0 * alpha - 2.0);
    if !(sigma > lo && sigma <= hi * (1.0 + 1e-14)) {
        return invalid(format!("σ = {sigma} outside (α′, 6α/(3α−2)] = ({lo}, {hi}]"));
    }
    Ok(())
}

/// `ℓ_σ(f) = inf_ξ ‖P(ξ)f‖_{M̂^α_{2,σ}}`.
///
/// The objective depends only on where the spectrum's support starts, so the
/// search runs over that start position `a`: every frequency-lattice placement
/// in a range covering all coarse alignments, then golden-section refinement
/// around the best one.
pub fn ell(f: &GridFunction, alpha: f64, sigma: f64, window: ScaleWindow) -> Result<EllValue> {
    check_alpha_sigma(alpha, sigma)?;
    window.validate()?;
    let cells = spectrum_cells(f);
    if cells.is_zero() {
        return Ok(EllValue { value: 0.0, argmin: 0.0, bracket: 0.0 });
    }
    let ex = MorreyExponents { p: conj(alpha), q: 2.0, r: sigma };
    let objective = |a: f64| -> Result<f64> { Ok(morrey(&cells.placed_at(a), ex, window)?.value) };
    let d = cells.width();
    let w = cells.extent();
    let reach = {
        let mut m = w.log2().ceil() as i32;
        while scale_length(-m) < w {
            m += 1;
        }
        scale_length(-m)
    };
    let base = cells.start();
    // lattice positions a = i·d with a ∈ [−reach − w, reach], plus the unmodulated placement
    let i_base = (base / d).round();
    let i_lo = ((-reach - w) / d).floor() as i64;
    let i_hi = (reach / d).ceil() as i64;
    let mut best = (objective(i_base * d)?, i_base * d);
    for i in i_lo..=i_hi {
        let a = i as f64 * d;
        let v = objective(a)?;
        if v < best.0 {
            best = (v, a);
        }
    }
    let (mut lo, mut hi) = (best.1 - d, best.1 + d);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let mut f1 = objective(x1)?;
    let mut f2 = objective(x2)?;
    let tol = 1e-6 * d.max(1e-300);
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = objective(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = objective(x2)?;
        }
    }
    for (v, a) in [(f1, x1), (f2, x2)] {
        if v < best.0 {
            best = (v, a);
        }
    }
    // P(ξ) moves the spectrum by −ξ
    Ok(EllValue { value: best.0, argmin: i_base * d - best.1, bracket: hi - lo })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral_core::Side;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    fn gaussian(n: usize, l: f64) -> GridFunction {
        GridFunction::from_real_fn(Grid::centered(n, l).unwrap(), |x| (-0.5 * x * x).exp())
    }

    #[test]
    fn conjugates() {
        assert_eq!(conj(2.0), 2.0);
        assert_eq!(conj(1.0), f64::INFINITY);
        assert_eq!(conj(f64::INFINITY), 1.0);
        assert!((conj(1.6) - 1.6 / 0.6).abs() < 1e-15);
    }

    #[test]
    fn gaussian_lhat_two() {
        let f = gaussian(1024, 40.0 * PI);
        assert!((lhat_norm(&f, 2.0).unwrap() - PI.powf(0.25)).abs() < 1e-6);
        assert!(lhat_norm(&f, 0.5).is_err());
        let z = GridFunction::zeros(*f.grid(), Side::Physical);
        assert_eq!(lhat_norm(&z, 1.8).unwrap(), 0.0);
    }

    #[test]
    fn lhat_lattice_modulation_invariance() {
        let f = gaussian(512, 16.0 * PI);
        let xi = 10.0 * f.grid().dxi();
        let g = GridFunction::from_fn(*f.grid(), |x| Complex64::from_polar((-0.5 * x * x).exp(), -xi * x));
        for r in [1.0, 1.5, 1.8, 2.0, 3.0] {
            let a = lhat_norm(&f, r).unwrap();
            let b = lhat_norm(&g, r).unwrap();
            assert!((a - b).abs() < 1e-12 * a, "r={r}");
        }
    }

    #[test]
    fn zero_function_norms() {
        let g = Grid::centered(64, 20.0).unwrap();
        let z = GridFunction::zeros(g, Side::Physical);
        assert_eq!(morrey_norm(&z, 1.6, 2.0, 3.0, ScaleWindow::All).unwrap(), 0.0);
        let e = ell(&z, 1.6, 3.0, ScaleWindow::All).unwrap();
        assert_eq!((e.value, e.argmin), (0.0, 0.0));
    }

    #[test]
    fn exponent_validation() {
        let f = gaussian(64, 20.0);
        assert!(morrey_norm(&f, 2.0, 1.5, 3.0, ScaleWindow::All).is_err());
        assert!(morrey_norm(&f, 0.5, 2.0, 3.0, ScaleWindow::All).is_err());
        assert!(ell(&f, 2.5, 3.0, ScaleWindow::All).is_err());
        assert!(ell(&f, 1.6, 2.0, ScaleWindow::All).is_err());
    }

    #[test]
    fn default_window_bounds() {
        let g = Grid::centered(1024, 40.0 * PI).unwrap();
        let ScaleWindow::Range { j_min, j_max } = default_window(&g) else { panic!() };
        assert!(scale_length(j_min) >= 1024.0 * g.dxi());
        assert!(scale_length(j_max) >= 4.0 * g.dxi());
        assert!(scale_length(j_max + 1) < 4.0 * g.dxi());
    }
}
