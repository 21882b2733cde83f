use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::deformations::{transfer, Deformation};
use crate::error::{invalid, Result};
use crate::norms::{check_alpha_sigma, conj, ell, lhat_norm, morrey_hat, DyadicInterval, ScaleWindow};
use crate::spectral_core::{Grid, GridFunction, Side};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtractConfig {
    pub alpha: f64,
    pub sigma: f64,
    /// `C_ε` in the clip level `C_ε ‖uₙ‖_{L̂^α} |Iₙ|^{−1/α′}`.
    pub clip: f64,
    /// Half-width of the time scan; `None` uses `|Iₙ|^{−3}`.
    pub t_scan: Option<f64>,
    pub scan_samples: usize,
    /// Number of largest-selector indices averaged into `ψ`.
    pub average_top: usize,
    /// Loss allowed when a piece must be moved between grids.
    pub transfer_tol: f64,
}

impl ExtractConfig {
    pub fn new(alpha: f64, sigma: f64) -> Self {
        ExtractConfig { alpha, sigma, clip: 4.0, t_scan: None, scan_samples: 257, average_top: 3, transfer_tol: 1e-8 }
    }

    fn validate(&self) -> Result<()> {
        check_alpha_sigma(self.alpha, self.sigma)?;
        if !(self.clip > 0.0) || self.scan_samples < 3 || self.average_top == 0 {
            return invalid("clip must be positive, scan_samples ≥ 3 and average_top ≥ 1");
        }
        if matches!(self.t_scan, Some(t) if !(t > 0.0)) {
            return invalid("t_scan must be positive");
        }
        Ok(())
    }
}

/// Concentration data for one input.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Concentration {
    /// `|I|^{−1/(3α)} ‖ûₙ‖_{L^{(3α/2)′}(I)}` at the maximizing interval.
    pub selector: f64,
    pub interval: DyadicInterval,
    /// Space-time peak `(t, x)` of `|∂ₓ|^{1/(3α)} e^{−t∂ₓ³}` of the clipped band piece.
    pub peak_t: f64,
    pub peak_x: f64,
    pub gamma: Deformation,
}

/// One greedy step: `ψ`, its deformations (`None` where the input is inactive)
/// and the residuals `rₙ = uₙ − Γₙψ`.
#[derive(Clone, Debug)]
pub struct Extraction {
    pub psi: GridFunction,
    pub gammas: Vec<Option<Deformation>>,
    pub residuals: Vec<GridFunction>,
    pub concentrations: Vec<Option<Concentration>>,
    /// Indices averaged into `ψ`.
    pub averaged: Vec<usize>,
}

impl Extraction {
    pub fn is_degenerate(&self) -> bool {
        self.gammas.iter().all(Option::is_none)
    }

    pub fn max_selector(&self) -> f64 {
        self.concentrations.iter().flatten().map(|c| c.selector).fold(0.0, f64::max)
    }
}

fn band(f: &GridFunction, lo: f64, hi: f64) -> GridFunction {
    let half = 0.5 * f.grid().dxi();
    f.multiplier(|xi| if xi >= lo - half && xi < hi - half { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) })
}

pub(crate) fn on_grid(f: GridFunction, g: &Grid, tol: f64) -> Result<GridFunction> {
    if f.grid().same_as(g) {
        Ok(f.with_grid(*g)?)
    } else {
        transfer(&f, g, tol)
    }
}

fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, iters: usize) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..iters {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f(x1);
        }
    }
    if f1 > f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Selector interval, clip and space-time peak for one input.
pub fn concentrate(u: &GridFunction, cfg: &ExtractConfig) -> Result<Option<Concentration>> {
    let alpha = cfg.alpha;
    let sel = morrey_hat(u, alpha, 1.5 * alpha, f64::INFINITY, ScaleWindow::All)?;
    let interval = match sel.argmax {
        Some(i) if sel.value > 0.0 => i,
        _ => return Ok(None),
    };
    let h = interval.length();
    let level = cfg.clip * lhat_norm(u, alpha)? * h.powf(-1.0 / conj(alpha));
    let mut piece = band(u, interval.left(), interval.right()).fourier();
    let g = *piece.grid();
    let s = 1.0 / (3.0 * alpha);
    for (k, c) in piece.values_mut().iter_mut().enumerate() {
        let a = c.norm();
        if a > level {
            *c *= level / a;
        }
        *c *= g.xi(k).abs().powf(s);
    }
    let xis = g.xis();
    let at = |t: f64| -> GridFunction {
        let vals = piece.values().iter().zip(&xis).map(|(c, x)| c * Complex64::from_polar(1.0, t * x * x * x)).collect();
        GridFunction::new(g, vals, Side::Fourier).expect("length")
    };
    let grid_peak = |f: &GridFunction| -> (usize, f64) {
        f.physical().values().iter().enumerate().fold((0, -1.0), |b, (j, v)| if v.norm() > b.1 { (j, v.norm()) } else { b })
    };
    let refine_x = |f: &GridFunction| -> (f64, f64) {
        let (j, _) = grid_peak(f);
        let x = g.x(j);
        golden_max(|y| f.eval(y).norm(), x - g.dx(), x + g.dx(), 40)
    };
    let t_half = cfg.t_scan.unwrap_or(h.powi(-3));
    let m = cfg.scan_samples;
    let ts: Vec<f64> = (0..m).map(|i| -t_half + 2.0 * t_half * i as f64 / (m - 1) as f64).collect();
    let scan: Vec<f64> = ts.par_iter().map(|&t| grid_peak(&at(t)).1).collect();
    let i_best = scan.iter().enumerate().fold(0, |b, (i, v)| if *v > scan[b] { i } else { b });
    let (lo, hi) = (ts[i_best.saturating_sub(1)], ts[(i_best + 1).min(m - 1)]);
    let (peak_t, _) = golden_max(|t| refine_x(&at(t)).1, lo, hi, 40);
    let (peak_x, _) = refine_x(&at(peak_t));
    let gamma = Deformation::new(h, -interval.k as f64, -h.powi(3) * peak_t, h * peak_x)?;
    Ok(Some(Concentration { selector: sel.value, interval, peak_t, peak_x, gamma }))
}

/// Greedy extraction of one profile from the sequence `u`.
///
/// Each input is concentrated independently; `ψ` is the band `[0, 1)` of
/// `Γₙ⁻¹uₙ` averaged over the `average_top` largest selectors sharing the
/// leading scale. Inputs at another scale are left inactive for this profile.
pub fn extract_profile(u: &[GridFunction], cfg: &ExtractConfig) -> Result<Extraction> {
    cfg.validate()?;
    if u.is_empty() {
        return invalid("empty input sequence");
    }
    let grid = *u[0].grid();
    if u.iter().any(|f| !f.grid().same_as(&grid)) {
        return invalid("all inputs must share one grid");
    }
    let conc: Vec<Option<Concentration>> = u.par_iter().map(|f| concentrate(f, cfg)).collect::<Result<_>>()?;
    let mut order: Vec<usize> = (0..u.len()).filter(|&i| conc[i].is_some()).collect();
    if order.is_empty() {
        return Ok(Extraction {
            psi: GridFunction::zeros(grid, Side::Physical),
            gammas: vec![None; u.len()],
            residuals: u.to_vec(),
            concentrations: conc,
            averaged: Vec::new(),
        });
    }
    let sel = |i: usize| conc[i].as_ref().unwrap().selector;
    order.sort_by(|&a, &b| sel(b).total_cmp(&sel(a)).then(a.cmp(&b)));
    let h_top = conc[order[0]].unwrap().gamma.h;
    let gammas: Vec<Option<Deformation>> = conc.iter().map(|c| c.map(|c| c.gamma).filter(|g| g.h == h_top)).collect();
    let averaged: Vec<usize> = order.into_iter().filter(|&i| gammas[i].is_some()).take(cfg.average_top).collect();
    let frames = averaged
        .iter()
        .map(|&i| Ok(band(&gammas[i].unwrap().apply_inverse(&u[i], cfg.alpha)?, 0.0, 1.0).physical()))
        .collect::<Result<Vec<_>>>()?;
    let pg = *frames[0].grid();
    let mut acc = vec![Complex64::new(0.0, 0.0); pg.n()];
    for f in &frames {
        for (a, v) in acc.iter_mut().zip(f.values()) {
            *a += v;
        }
    }
    let w = 1.0 / frames.len() as f64;
    let psi = GridFunction::new(pg, acc.into_iter().map(|a| a * w).collect(), Side::Physical)?;
    let residuals = u
        .par_iter()
        .zip(&gammas)
        .map(|(f, g)| match g {
            Some(g) => f.sub(&on_grid(g.apply(&psi, cfg.alpha)?, &grid, cfg.transfer_tol)?),
            None => Ok(f.clone()),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Extraction { psi, gammas, residuals, concentrations: conc, averaged })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecomposeConfig {
    pub extract: ExtractConfig,
    pub j_max: usize,
    /// Stop once the largest residual selector drops below this fraction of the input's.
    pub eps_stop: f64,
    /// Extractions whose orthogonality gap stays below this are merged.
    pub merge_gap: f64,
    /// Relative L² mismatch below which two pieces count as complex conjugates.
    pub pair_tol: f64,
}

impl DecomposeConfig {
    pub fn new(alpha: f64, sigma: f64) -> Self {
        DecomposeConfig { extract: ExtractConfig::new(alpha, sigma), j_max: 8, eps_stop: 0.1, merge_gap: 10.0, pair_tol: 0.1 }
    }
}

/// A profile contributes `Γₙψ` (`c = 1`) or `Re Γₙψ` for a conjugate pair (`c = 2`).
#[derive(Clone, Debug)]
pub struct Profile {
    pub psi: GridFunction,
    pub gammas: Vec<Option<Deformation>>,
    pub c: f64,
    pub ell: f64,
    /// Extraction steps folded into this profile.
    pub members: Vec<usize>,
}

impl Profile {
    pub fn contribution(&self, n: usize, grid: &Grid, alpha: f64, tol: f64) -> Result<Option<GridFunction>> {
        let g = match self.gammas[n] {
            Some(g) => g,
            None => return Ok(None),
        };
        let piece = on_grid(g.apply(&self.psi, alpha)?, grid, tol)?;
        Ok(Some(if self.c == 2.0 { piece.re() } else { piece }))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ledger {
    /// Input index the ledger is evaluated at (the last one).
    pub index: usize,
    pub u_ell_sigma: f64,
    /// `c_j^{1−σ} ℓ(ψ_j)^σ` per profile.
    pub profile_terms: Vec<f64>,
    pub residual_ell_sigma: f64,
    /// `ℓ(uₙ)^σ ≥ Σ_j c_j^{1−σ}ℓ(ψ_j)^σ` within 5%.
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapRow {
    pub a: usize,
    pub b: usize,
    pub orthogonality: Vec<Option<f64>>,
    pub nonresonance: Vec<Option<f64>>,
}

#[derive(Clone, Debug)]
pub struct ProfileDecomposition {
    pub profiles: Vec<Profile>,
    pub residuals: Vec<GridFunction>,
    pub extractions: usize,
    /// Largest selector of the input and after each extraction.
    pub selector_history: Vec<f64>,
    pub ledger: Ledger,
    pub gaps: Vec<GapRow>,
}

impl ProfileDecomposition {
    /// `max_n ‖uₙ − Σ_j contribution_j(n) − rₙ‖_∞`.
    pub fn reconstruction_error(&self, u: &[GridFunction], alpha: f64, tol: f64) -> Result<f64> {
        let mut worst = 0.0f64;
        for (n, f) in u.iter().enumerate() {
            let mut acc = self.residuals[n].clone();
            for p in &self.profiles {
                if let Some(c) = p.contribution(n, f.grid(), alpha, tol)? {
                    acc = acc.add(&c)?;
                }
            }
            worst = worst.max(f.sub(&acc)?.physical().sup_norm());
        }
        Ok(worst)
    }
}

fn max_gap(a: &[Option<Deformation>], b: &[Option<Deformation>], f: impl Fn(&Deformation, &Deformation) -> f64) -> Option<f64> {
    a.iter().zip(b).filter_map(|(x, y)| Some(f(x.as_ref()?, y.as_ref()?))).reduce(f64::max)
}

/// Iterated extraction with merging of non-orthogonal steps, detection of
/// conjugate pairs, and the Pythagorean ledger.
pub fn profile_decompose(u: &[GridFunction], cfg: &DecomposeConfig) -> Result<ProfileDecomposition> {
    if cfg.j_max == 0 {
        return invalid("j_max must be at least 1");
    }
    let ec = &cfg.extract;
    let (alpha, sigma, tol) = (ec.alpha, ec.sigma, ec.transfer_tol);
    let first = extract_profile(u, ec)?;
    let reference = first.max_selector();
    let mut history = vec![reference];
    let mut steps: Vec<Extraction> = Vec::new();
    let mut current = first;
    while !current.is_degenerate() && steps.len() < cfg.j_max {
        let next_input = current.residuals.clone();
        steps.push(current);
        let probe = extract_profile(&next_input, ec)?;
        history.push(probe.max_selector());
        if probe.max_selector() < cfg.eps_stop * reference {
            break;
        }
        current = probe;
    }
    let grid = *u[0].grid();

    // merge steps that stay non-orthogonal to an earlier group leader
    let mut groups: Vec<(GridFunction, Vec<Option<Deformation>>, Vec<usize>, Vec<usize>)> = Vec::new();
    for (j, st) in steps.iter().enumerate() {
        let target = groups.iter().position(|(_, gs, _, _)| {
            max_gap(gs, &st.gammas, |a, b| a.orthogonality_gap(b)).is_some_and(|gap| gap < cfg.merge_gap)
        });
        match target {
            None => groups.push((st.psi.clone(), st.gammas.clone(), vec![j], st.averaged.clone())),
            Some(gi) => {
                let (psi, gs, members, avg) = &mut groups[gi];
                let idx: Vec<usize> = avg.iter().copied().filter(|&n| st.gammas[n].is_some()).collect();
                let mut extra = Vec::new();
                for &n in &idx {
                    let piece = on_grid(st.gammas[n].unwrap().apply(&st.psi, alpha)?, &grid, tol)?;
                    extra.push(on_grid(gs[n].unwrap().apply_inverse(&piece, alpha)?, psi.grid(), tol)?);
                }
                if !extra.is_empty() {
                    let w = 1.0 / extra.len() as f64;
                    let mut sum = psi.physical();
                    for e in &extra {
                        sum = sum.add(&e.scale_real(w))?;
                    }
                    *psi = sum;
                    members.push(j);
                } else {
                    groups.push((st.psi.clone(), st.gammas.clone(), vec![j], st.averaged.clone()));
                }
            }
        }
    }

    // conjugate pairs: the deformed pieces are complex conjugates of each other
    let piece_at = |psi: &GridFunction, gs: &[Option<Deformation>], n: usize| -> Result<Option<GridFunction>> {
        gs[n].map(|g| on_grid(g.apply(psi, alpha)?, &grid, tol)).transpose()
    };
    let mut profiles: Vec<Profile> = Vec::new();
    let mut used = vec![false; groups.len()];
    for a in 0..groups.len() {
        if used[a] {
            continue;
        }
        used[a] = true;
        let (psi_a, gs_a, mem_a, avg_a) = &groups[a];
        let mut partner = None;
        if let Some(&n) = avg_a.first() {
            if let Some(xa) = piece_at(psi_a, gs_a, n)? {
                let scale = xa.l2_norm();
                for b in a + 1..groups.len() {
                    if used[b] {
                        continue;
                    }
                    if let Some(xb) = piece_at(&groups[b].0, &groups[b].1, n)? {
                        if scale > 0.0 && xa.conj().sub(&xb)?.l2_norm() < cfg.pair_tol * scale {
                            partner = Some(b);
                            break;
                        }
                    }
                }
            }
        }
        let (psi, c, members) = match partner {
            Some(b) => {
                used[b] = true;
                let mut m = mem_a.clone();
                m.extend(&groups[b].2);
                (psi_a.scale_real(2.0), 2.0, m)
            }
            None => (psi_a.clone(), 1.0, mem_a.clone()),
        };
        let l = ell(&psi, alpha, sigma, ScaleWindow::All)?.value;
        profiles.push(Profile { psi, gammas: gs_a.clone(), c, ell: l, members });
    }

    let residuals = u
        .par_iter()
        .enumerate()
        .map(|(n, f)| {
            let mut r = f.clone();
            for p in &profiles {
                if let Some(c) = p.contribution(n, &grid, alpha, tol)? {
                    r = r.sub(&c)?;
                }
            }
            Ok(r)
        })
        .collect::<Result<Vec<_>>>()?;

    let last = u.len() - 1;
    let u_ell_sigma = ell(&u[last], alpha, sigma, ScaleWindow::All)?.value.powf(sigma);
    let residual_ell_sigma = ell(&residuals[last], alpha, sigma, ScaleWindow::All)?.value.powf(sigma);
    let profile_terms: Vec<f64> = profiles.iter().map(|p| p.c.powf(1.0 - sigma) * p.ell.powf(sigma)).collect();
    let holds = 1.05 * u_ell_sigma >= profile_terms.iter().sum::<f64>();
    let ledger = Ledger { index: last, u_ell_sigma, profile_terms, residual_ell_sigma, holds };

    let mut gaps = Vec::new();
    for a in 0..profiles.len() {
        for b in a + 1..profiles.len() {
            let per = |f: fn(&Deformation, &Deformation) -> f64| -> Vec<Option<f64>> {
                profiles[a].gammas.iter().zip(&profiles[b].gammas).map(|(x, y)| Some(f(x.as_ref()?, y.as_ref()?))).collect()
            };
            gaps.push(GapRow {
                a,
                b,
                orthogonality: per(|x, y| x.orthogonality_gap(y)),
                nonresonance: per(|x, y| x.nonresonance_gap(y)),
            });
        }
    }
    Ok(ProfileDecomposition { profiles, residuals, extractions: steps.len(), selector_history: history, ledger, gaps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::spectral_bump;
    use std::f64::consts::PI;

    fn psi_star(g: Grid) -> GridFunction {
        spectral_bump(g, 0.1, 0.9, Complex64::new(1.0, 0.0))
    }

    #[test]
    fn zero_input_is_degenerate() {
        let g = Grid::centered(256, 16.0 * PI).unwrap();
        let z = GridFunction::zeros(g, Side::Physical);
        let e = extract_profile(&[z.clone(), z], &ExtractConfig::new(1.8, 3.0)).unwrap();
        assert!(e.is_degenerate());
        assert_eq!(e.psi.sup_norm(), 0.0);
    }

    #[test]
    fn planted_profile_is_recovered() {
        let g = Grid::centered(2048, 32.0 * PI).unwrap();
        let star = psi_star(g);
        let cfg = ExtractConfig::new(1.8, 3.0);
        let ns = [4.0, 8.0, 12.0, 16.0];
        let u: Vec<GridFunction> =
            ns.iter().map(|&n| Deformation::new(2.0, n, 0.1, 1.0).unwrap().apply(&star, cfg.alpha).unwrap()).collect();
        let e = extract_profile(&u, &cfg).unwrap();
        for (n, g) in ns.iter().zip(&e.gammas) {
            let g = g.unwrap();
            assert_eq!(g.log2_h(), Some(1));
            assert_eq!(g.xi, *n);
            // scan step in s: h³ · 2T/256 with T = h⁻³
            assert!((g.s - 0.1).abs() < 2.0 / 256.0, "{g:?}");
            assert!((g.y - 1.0).abs() < 2.0 * u[0].grid().dx(), "{g:?}");
        }
        assert!(e.psi.sub(&star).unwrap().l2_norm() < 1e-3 * star.l2_norm());
        for (r, f) in e.residuals.iter().zip(&u) {
            let fr = ell(r, 1.8, 3.0, ScaleWindow::All).unwrap().value / ell(f, 1.8, 3.0, ScaleWindow::All).unwrap().value;
            assert!(fr < 0.1, "{fr}");
        }
    }

    #[test]
    fn single_profile_stops_after_one_step() {
        let g = Grid::centered(1024, 32.0 * PI).unwrap();
        let star = psi_star(g);
        let cfg = DecomposeConfig::new(1.8, 3.0);
        let u: Vec<GridFunction> =
            [4.0, 8.0].iter().map(|&n| Deformation::new(1.0, n, 0.0, 0.5).unwrap().apply(&star, 1.8).unwrap()).collect();
        let d = profile_decompose(&u, &cfg).unwrap();
        assert_eq!(d.extractions, 1);
        assert_eq!(d.profiles.len(), 1);
        assert!(d.ledger.residual_ell_sigma < 1e-3 * d.ledger.u_ell_sigma);
        assert!(d.ledger.holds, "{:?}", d.ledger);
        assert!(d.reconstruction_error(&u, 1.8, 1e-8).unwrap() < 1e-10);
    }

    #[test]
    fn two_profiles_come_out_in_ell_order() {
        let g = Grid::centered(2048, 32.0 * PI).unwrap();
        let big = psi_star(g);
        let small = spectral_bump(g, 0.2, 0.8, Complex64::from_polar(0.5, 1.0));
        let cfg = DecomposeConfig::new(1.8, 3.0);
        let ns = [4.0, 8.0, 16.0];
        let u: Vec<GridFunction> = ns
            .iter()
            .map(|&n| {
                let a = Deformation::new(1.0, n, 0.0, 0.0).unwrap().apply(&big, 1.8).unwrap();
                let b = Deformation::new(1.0, -2.0 * n, 0.02, 5.0).unwrap().apply(&small, 1.8).unwrap();
                a.add(&b).unwrap()
            })
            .collect();
        let d = profile_decompose(&u, &cfg).unwrap();
        assert_eq!(d.profiles.len(), 2, "{:?}", d.selector_history);
        assert!(d.profiles[0].ell > d.profiles[1].ell);
        assert_eq!(d.profiles[0].gammas[2].unwrap().xi, 16.0);
        assert_eq!(d.profiles[1].gammas[2].unwrap().xi, -32.0);
        let gap = d.gaps[0].nonresonance.iter().map(|g| g.unwrap()).collect::<Vec<_>>();
        assert!(gap.windows(2).all(|w| w[1] > w[0]), "{gap:?}");
        assert!(d.reconstruction_error(&u, 1.8, 1e-8).unwrap() < 1e-10);
    }

    #[test]
    fn real_input_yields_a_conjugate_pair() {
        let g = Grid::centered(4096, 32.0 * PI).unwrap();
        let phi = GridFunction::from_real_fn(g, |x| (-x * x / 64.0).exp());
        let u: Vec<GridFunction> =
            [8.5, 16.5, 32.5].iter().map(|&xi| crate::deformations::modulate(&phi, xi).re()).collect();
        let d = profile_decompose(&u, &DecomposeConfig::new(1.8, 3.0)).unwrap();
        assert_eq!(d.profiles.len(), 1, "{:?}", d.selector_history);
        assert_eq!(d.profiles[0].c, 2.0);
        assert!(d.ledger.holds, "{:?}", d.ledger);
        assert!(d.reconstruction_error(&u, 1.8, 1e-8).unwrap() < 1e-10);
    }
}
