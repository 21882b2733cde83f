use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::spectral_core::{Grid, GridFunction, Side};

/// Default relative loss allowed by [`transfer`].
pub const TRANSFER_TOL: f64 = 1e-8;

/// Moves `f` onto `target` when the spacings differ by a power of two and the
/// nodes align: the spectrum is zero-padded or truncated to the target spacing,
/// then the period is windowed (zero outside the source period).
///
/// Fails with [`Error::Budget`] when the truncated spectrum or the windowed-out
/// mass exceeds `tol` in relative L², or when the source does not decay to
/// `tol·sup` at its edges but the target window extends past them.
pub fn transfer(f: &GridFunction, target: &Grid, tol: f64) -> Result<GridFunction> {
    let src = *f.grid();
    if src.same_as(target) {
        return Ok(f.clone());
    }
    let ratio = src.dx() / target.dx();
    let a = ratio.log2().round();
    if (ratio / a.exp2() - 1.0).abs() > 1e-9 {
        return invalid(format!("spacing ratio {ratio} is not a power of two"));
    }
    let m_f = src.n() as f64 * a.exp2();
    if m_f < 2.0 {
        return Err(Error::Budget(format!("source period holds fewer than two target nodes; lengthen the source beyond {}", src.length())));
    }
    let m = m_f.round() as usize;
    let hat = f.fourier();
    let total: f64 = hat.values().iter().map(|c| c.norm_sqr()).sum();
    if total == 0.0 {
        return Ok(GridFunction::zeros(*target, f.side()));
    }
    let mid = Grid::new(m, src.length(), src.x0())?;
    let mut coeffs = vec![Complex64::new(0.0, 0.0); m];
    let mut lost = 0.0;
    let half = (m / 2) as i64;
    for (k, c) in hat.values().iter().enumerate() {
        let idx = src.freq_index(k);
        if m > src.n() && idx == -(src.n() as i64 / 2) {
            // the source Nyquist mode is split between ±N/2
            coeffs[mid.slot(idx).unwrap()] += 0.5 * c;
            coeffs[mid.slot(-idx).unwrap()] += 0.5 * c;
        } else if idx.abs() < half || idx == -half {
            coeffs[mid.slot(idx).unwrap()] += c;
        } else if idx == half {
            coeffs[mid.slot(-half).unwrap()] += c;
        } else {
            lost += c.norm_sqr();
        }
    }
    if lost > tol * tol * total {
        return Err(Error::Budget(format!(
            "relative spectral loss {:.2e} exceeds {tol:.1e}; the target grid needs n >= {} at this length",
            (lost / total).sqrt(),
            target.n() * 2
        )));
    }
    let fine = GridFunction::new(mid, coeffs, Side::Fourier)?.physical();
    let offset_f = (src.x0() - target.x0()) / target.dx();
    let offset = offset_f.round();
    if (offset_f - offset).abs() > 1e-6 {
        return invalid("source and target nodes are not aligned");
    }
    let offset = offset as i64;
    let vals = fine.values();
    let sup = fine.sup_norm();
    let mass: f64 = vals.iter().map(|v| v.norm_sqr()).sum();
    let mut out = vec![Complex64::new(0.0, 0.0); target.n()];
    let mut kept = 0.0;
    let mut uncovered = false;
    for (i, o) in out.iter_mut().enumerate() {
        let j = i as i64 - offset;
        if (0..m as i64).contains(&j) {
            *o = vals[j as usize];
            kept += o.norm_sqr();
        } else {
            uncovered = true;
        }
    }
    if mass - kept > tol * tol * mass {
        return Err(Error::Budget(format!(
            "relative mass {:.2e} falls outside the target window; the target needs length >= {}",
            ((mass - kept).max(0.0) / mass).sqrt(),
            src.length().max(target.length())
        )));
    }
    if uncovered && vals[0].norm().max(vals[m - 1].norm()) > tol * sup {
        return Err(Error::Budget("source does not decay at its period edges; it cannot be zero-extended".into()));
    }
    Ok(GridFunction::new(*target, out, Side::Physical)?.on_side(f.side()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deformations::Deformation;

    fn bump(g: Grid) -> GridFunction {
        GridFunction::from_real_fn(g, |x| (-x * x).exp() * (1.0 + 0.5 * x))
    }

    #[test]
    fn same_grid_dilations_match_samples() {
        let g = Grid::centered(2048, 64.0).unwrap();
        let f = bump(g);
        for k in [-2, -1, 1, 2] {
            let h = f64::from(k).exp2();
            let d = Deformation::new(h, 0.0, 0.0, 0.0).unwrap().apply_on_grid(&f, 2.0, TRANSFER_TOL).unwrap().physical();
            assert!(d.grid().same_as(&g));
            for (j, x) in g.xs().into_iter().enumerate() {
                let want = h.sqrt() * (-(h * x) * (h * x)).exp() * (1.0 + 0.5 * h * x);
                assert!((d.values()[j].re - want).abs() < 1e-8, "h = {h}, x = {x}");
            }
        }
    }

    #[test]
    fn budget_errors_carry_hints() {
        let g = Grid::centered(64, 64.0).unwrap();
        let f = bump(g);
        let e = Deformation::new(16.0, 0.0, 0.0, 0.0).unwrap().apply_on_grid(&f, 2.0, TRANSFER_TOL).unwrap_err();
        assert!(matches!(e, Error::Budget(ref m) if m.contains("n >=")), "{e}");
        let wide = GridFunction::from_real_fn(g, |x| (-(x / 6.0).powi(2)).exp());
        let e = Deformation::new(0.25, 0.0, 0.0, 0.0).unwrap().apply_on_grid(&wide, 2.0, TRANSFER_TOL).unwrap_err();
        assert!(matches!(e, Error::Budget(ref m) if m.contains("length >=")), "{e}");
        assert!(Deformation::new(3.0, 0.0, 0.0, 0.0).unwrap().apply_on_grid(&f, 2.0, TRANSFER_TOL).is_err());
    }
}
