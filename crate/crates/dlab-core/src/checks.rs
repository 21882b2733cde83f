//! Verification suites: each returns a report whose `measured` map holds every
//! number it compared and whose `failures` list names the rows that missed.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::deformations::{galilean_residual, modulate, scale_invariance_ratio, translate, Deformation};
use crate::embedding::{embedding_constants, embedding_experiment, fourier_sin_coeff, EmbeddingConfig};
use crate::error::{invalid, Error, Result};
use crate::evolutions::{
    airy_propagate, c_alpha, energy, gkdv_solve, gkdv_stable_dt, nls_solve, soliton_q, soliton_wave, SolveConfig,
};
use crate::norms::{
    conj, ell, exponents_x, is_acceptable, is_conjugate_acceptable, morrey_interpolation_check, morrey_norm,
    ScaleWindow,
};
use crate::profiles::{
    extract_profile, partition_check, profile_decompose, spectral_bump, stein_tomas_ratio, DecomposeConfig,
    DecouplingBattery, ExtractConfig, TimeWindow, WhitneyWindow,
};
use crate::spectral_core::{derivative, Grid, GridFunction};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CheckKind {
    Exponents,
    Constants,
    Soliton,
    CAlpha,
    Galilean,
    ScaleLemma,
    Morrey,
    Decoupling,
    Whitney,
    SteinTomas,
    Embedding,
    Profiles,
    Solvers,
    Interpolation,
}

impl CheckKind {
    pub const ALL: [CheckKind; 14] = [
        CheckKind::Exponents,
        CheckKind::Constants,
        CheckKind::Soliton,
        CheckKind::CAlpha,
        CheckKind::Galilean,
        CheckKind::ScaleLemma,
        CheckKind::Morrey,
        CheckKind::Decoupling,
        CheckKind::Whitney,
        CheckKind::SteinTomas,
        CheckKind::Embedding,
        CheckKind::Profiles,
        CheckKind::Solvers,
        CheckKind::Interpolation,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            CheckKind::Exponents => "exponents",
            CheckKind::Constants => "constants",
            CheckKind::Soliton => "soliton",
            CheckKind::CAlpha => "c-alpha",
            CheckKind::Galilean => "galilean",
            CheckKind::ScaleLemma => "scale-lemma",
            CheckKind::Morrey => "morrey",
            CheckKind::Decoupling => "decoupling",
            CheckKind::Whitney => "whitney",
            CheckKind::SteinTomas => "stein-tomas",
            CheckKind::Embedding => "embedding",
            CheckKind::Profiles => "profiles",
            CheckKind::Solvers => "solvers",
            CheckKind::Interpolation => "interpolation",
        }
    }

    /// Position in the acceptance list; the interpolation suite is extra.
    pub fn criterion(&self) -> Option<u8> {
        CheckKind::ALL[..13].iter().position(|k| k == self).map(|i| i as u8 + 1)
    }
}

impl fmt::Display for CheckKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CheckKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CheckKind::ALL
            .iter()
            .copied()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = CheckKind::ALL.iter().map(|k| k.name()).collect();
                Error::InvalidArgument(format!("unknown check '{s}'; expected one of {}", names.join(", ")))
            })
    }
}

/// Optional overrides; `None` selects each suite's own battery.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CheckParams {
    pub alpha: Option<f64>,
    pub sigma: Option<f64>,
    pub xi: Option<f64>,
    pub t: Option<f64>,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub kind: CheckKind,
    pub criterion: Option<u8>,
    pub passed: bool,
    pub measured: BTreeMap<String, f64>,
    pub failures: Vec<String>,
}

impl CheckReport {
    /// One line: `[criterion] name: PASS|FAIL (first failure)`.
    pub fn summary(&self) -> String {
        let tag = self.criterion.map(|c| format!("{c:>2}")).unwrap_or_else(|| " -".into());
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        match self.failures.first() {
            Some(first) if !self.passed => format!("[{tag}] {}: {verdict} ({first})", self.kind),
            _ => format!("[{tag}] {}: {verdict}", self.kind),
        }
    }
}

#[derive(Default)]
struct Recorder {
    measured: BTreeMap<String, f64>,
    failures: Vec<String>,
}

impl Recorder {
    fn value(&mut self, key: impl Into<String>, v: f64) {
        self.measured.insert(key.into(), v);
    }

    fn expect(&mut self, key: impl Into<String>, v: f64, ok: bool, want: &str) {
        let key = key.into();
        if !ok {
            self.failures.push(format!("{key} = {v:.6e}, want {want}"));
        }
        self.value(key, v);
    }

    fn require(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.failures.push(what.into());
        }
    }

    fn finish(self, kind: CheckKind) -> CheckReport {
        CheckReport {
            kind,
            criterion: kind.criterion(),
            passed: self.failures.is_empty(),
            measured: self.measured,
            failures: self.failures,
        }
    }
}

pub fn run_check(kind: CheckKind, params: &CheckParams) -> Result<CheckReport> {
    let mut rec = Recorder::default();
    match kind {
        CheckKind::Exponents => exponents(&mut rec, params),
        CheckKind::Constants => constants(&mut rec),
        CheckKind::Soliton => soliton(&mut rec)?,
        CheckKind::CAlpha => c_alpha_check(&mut rec)?,
        CheckKind::Galilean => galilean(&mut rec, params)?,
        CheckKind::ScaleLemma => scale_lemma(&mut rec, params)?,
        CheckKind::Morrey => morrey_closed_form(&mut rec)?,
        CheckKind::Decoupling => decoupling(&mut rec, params)?,
        CheckKind::Whitney => whitney(&mut rec, params),
        CheckKind::SteinTomas => stein_tomas(&mut rec, params)?,
        CheckKind::Embedding => embedding(&mut rec, params)?,
        CheckKind::Profiles => profiles(&mut rec, params)?,
        CheckKind::Solvers => solvers(&mut rec)?,
        CheckKind::Interpolation => interpolation(&mut rec, params)?,
    }
    Ok(rec.finish(kind))
}

/// Sum of three smooth spectral bumps with random centres in `[−2, 2]`,
/// half-widths in `[1/4, 3/4]` and complex amplitudes of modulus ≤ 1.
pub fn random_band_limited(grid: Grid, rng: &mut impl Rng) -> GridFunction {
    bumps(grid, rng, |rng| rng.gen_range(-2.0..2.0))
}

/// As [`random_band_limited`] with centres `±[1, 2]`, so the spectrum avoids
/// `|ξ| < 1/4`, where Airy decay is slowest.
pub fn random_annular(grid: Grid, rng: &mut impl Rng) -> GridFunction {
    bumps(grid, rng, |rng| {
        let c: f64 = rng.gen_range(1.0..2.0);
        if rng.gen_bool(0.5) {
            c
        } else {
            -c
        }
    })
}

fn bumps<R: Rng>(grid: Grid, rng: &mut R, centre: impl Fn(&mut R) -> f64) -> GridFunction {
    let mut f = GridFunction::zeros(grid, crate::spectral_core::Side::Physical);
    for _ in 0..3 {
        let c = centre(rng);
        let w = rng.gen_range(0.25..0.75);
        let amp = Complex64::from_polar(rng.gen_range(0.2..1.0), rng.gen_range(0.0..2.0 * PI));
        f = f.add(&spectral_bump(grid, c - w, c + w, amp)).expect("same grid");
    }
    f
}

fn alpha_sigma(params: &CheckParams) -> (f64, f64) {
    (params.alpha.unwrap_or(1.8), params.sigma.unwrap_or(3.0))
}

fn exponents(rec: &mut Recorder, params: &CheckParams) {
    let alphas = params.alpha.map(|a| vec![a]).unwrap_or_else(|| vec![1.7, 1.8, 1.9]);
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * b.abs();
    for a in alphas {
        let s = exponents_x(0.0, a);
        let l = exponents_x(1.0 / (3.0 * a), a);
        rec.expect(format!("p_S@{a}"), s.p, close(s.p, 2.5 * a), "5α/2");
        rec.expect(format!("q_S@{a}"), s.q, close(s.q, 5.0 * a), "5α");
        rec.expect(format!("p_L@{a}"), l.p, close(l.p, 3.0 * a), "3α");
        rec.expect(format!("q_L@{a}"), l.q, close(l.q, 3.0 * a), "3α");
    }
    let mut flips = 0.0;
    for d in [1e-9, 1e-6, 1e-3, 0.05] {
        let ok = !is_acceptable(0.0, 1.6 - d) && !is_acceptable(0.0, 1.6) && is_acceptable(0.0, 1.6 + d);
        rec.require(ok, format!("(0, α) acceptability does not flip at 8/5 ± {d}"));
        flips += f64::from(u8::from(ok));
    }
    rec.value("boundary_8_5_flips", flips);
    // 18 uniform samples across the band plus both endpoints
    let mut samples: Vec<f64> = (0..18).map(|i| 1.5 + 0.9 * f64::from(i) / 17.0).collect();
    samples.extend([5.0 / 3.0, 20.0 / 9.0]);
    let mut mismatches = 0.0;
    for a in samples {
        let s = 1.0 / (3.0 * a);
        let got = is_acceptable(s, a) && is_conjugate_acceptable(s, a);
        let want = a >= 5.0 / 3.0 && a < 20.0 / 9.0;
        if got != want {
            mismatches += 1.0;
            rec.require(false, format!("(s(L), {a}) acceptable∧conjugate is {got}, want {want}"));
        }
    }
    rec.value("band_5_3_to_20_9_mismatches", mismatches);
}

fn constants(rec: &mut Recorder) {
    let checked = |rec: &mut Recorder, key: String, r: Result<f64>| -> f64 {
        match r {
            Ok(v) => v,
            Err(e) => {
                rec.require(false, format!("{key}: {e}"));
                f64::NAN
            }
        }
    };
    let (c0, c1) = embedding_constants(1.0).unwrap_or((f64::NAN, f64::NAN));
    rec.expect("C0@1", c0, (c0 - 0.25).abs() < 1e-12, "1/4 ± 1e-12");
    rec.expect("C1@1", c1, (c1 - 0.25).abs() < 1e-12, "1/4 ± 1e-12");
    let q1 = checked(rec, "quadrature C1@1".into(), fourier_sin_coeff(1.0, 1));
    rec.expect("C1_quadrature@1", q1, (q1 - 0.25).abs() < 1e-10, "1/4 ± 1e-10");
    let (mut rel_max, mut quad_max) = (0.0f64, 0.0f64);
    for i in 0..=20 {
        let a = 1.0 + 0.05 * f64::from(i);
        let (c0, c1) = embedding_constants(a).unwrap_or((f64::NAN, f64::NAN));
        rel_max = rel_max.max((c1 - 3.0 * c0 / (2.0 * a + 1.0)).abs());
        let q = checked(rec, format!("quadrature C1@{a}"), fourier_sin_coeff(a, 1));
        quad_max = quad_max.max((q - c1).abs());
    }
    rec.expect("max|C1 - 3C0/(2a+1)|", rel_max, rel_max < 1e-12, "< 1e-12");
    rec.expect("max|C1 - quadrature|", quad_max, quad_max < 1e-10, "< 1e-10");
    let mut spec_max = 0.0f64;
    for k in 1..=16 {
        let want = if k == 1 || k == 3 { 0.25 } else { 0.0 };
        let v = checked(rec, format!("sin coefficient {k}"), fourier_sin_coeff(1.0, k));
        spec_max = spec_max.max((v - want).abs());
    }
    rec.expect("sin_spectrum_error@1", spec_max, spec_max < 1e-10, "< 1e-10");
}

fn ode_residual(alpha: f64, grid: Grid) -> f64 {
    let q = soliton_q(alpha, grid);
    let qxx = derivative(&q, 2).physical();
    q.values()
        .iter()
        .zip(qxx.values())
        .map(|(q, d)| (-d.re + q.re - q.re.powf(2.0 * alpha + 1.0)).abs())
        .fold(0.0, f64::max)
}

/// Start at the stability bound and halve `dt` until two successive runs
/// agree at `t_end` to `tol` relative in `L²`.
fn converged_dt(u0: &GridFunction, base: &SolveConfig, tol: f64) -> Result<(f64, usize)> {
    let g = u0.grid();
    let stable = gkdv_stable_dt(base.alpha, base.coupling, u0.physical().sup_norm(), g.xi_max());
    let mut dt = (0.9 * stable).min(base.t_end.abs());
    let end = |dt: f64| -> Result<GridFunction> {
        let cfg = SolveConfig { dt, store_every: usize::MAX, ..*base };
        Ok(gkdv_solve(u0, &cfg)?.frames().last().expect("nonempty").clone())
    };
    let mut prev = end(dt)?;
    for halvings in 1..=12 {
        let next = end(dt / 2.0)?;
        let change = next.sub(&prev)?.l2_norm() / next.l2_norm();
        dt /= 2.0;
        if change < tol {
            return Ok((dt, halvings));
        }
        prev = next;
    }
    Err(Error::Budget(format!("dt did not converge to {tol:e} after 12 halvings")))
}

fn soliton(rec: &mut Recorder) -> Result<()> {
    let gq = Grid::centered(1024, 80.0)?;
    for alpha in [1.0, 1.5, 1.85] {
        let r = ode_residual(alpha, gq);
        rec.expect(format!("ode_residual@{alpha}"), r, r < 1e-6, "< 1e-6");
    }
    let g = Grid::centered(512, 40.0 * PI)?;
    let u0 = soliton_wave(1.0, 1.0, 0.0, g);
    let base = SolveConfig::new(1.0, -1.0, 0.5, 1.0);
    let (dt, halvings) = converged_dt(&u0, &base, 1e-7)?;
    rec.value("dt", dt);
    rec.value("dt_halvings", halvings as f64);
    let steps = (0.5 / dt).round() as usize;
    let out = gkdv_solve(&u0, &SolveConfig { dt, store_every: (steps / 20).max(1), ..base })?;
    let mut worst = 0.0f64;
    for (t, f) in out.times().iter().zip(out.frames()) {
        let q = soliton_wave(1.0, 1.0, *t, g);
        worst = worst.max(f.sub(&q)?.l2_norm() / q.l2_norm());
    }
    rec.expect("max_shape_error", worst, worst < 1e-5, "< 1e-5");
    Ok(())
}

fn c_alpha_check(rec: &mut Recorder) -> Result<()> {
    let c1 = c_alpha(1.0)?;
    rec.expect("c_1", c1, (c1 - 0.5f64.sqrt()).abs() < 1e-8, "√½ ± 1e-8");
    let g = Grid::centered(2048, 80.0)?;
    for alpha in [1.0, 1.85, 1.95] {
        let c = c_alpha(alpha)?;
        let e = energy(&soliton_q(alpha, g).scale_real(c), alpha, -1.0);
        rec.expect(format!("E[c Q]@{alpha}"), e, e.abs() < 1e-8, "|E| < 1e-8");
    }
    let mut worst = 0.0f64;
    for i in 0..20 {
        worst = worst.max(c_alpha(1.0 + 0.05 * f64::from(i))?);
    }
    rec.expect("max c_alpha on [1, 2)", worst, worst < 1.0, "< 1");
    Ok(())
}

fn galilean(rec: &mut Recorder, params: &CheckParams) -> Result<()> {
    let g = Grid::centered(512, 16.0 * PI)?;
    let f = GridFunction::from_real_fn(g, |x| (-x * x).exp());
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut pairs: Vec<(f64, f64)> = Vec::new();
    if params.xi.is_some() || params.t.is_some() {
        pairs.push((params.xi.unwrap_or(2.0), params.t.unwrap_or(0.1)));
    }
    while pairs.len() < 10 {
        pairs.push((g.dxi() * f64::from(rng.gen_range(-64..=64)), rng.gen_range(-0.2..0.2)));
    }
    let mut worst = 0.0f64;
    for (xi, t) in pairs {
        worst = worst.max(galilean_residual(&f, xi, t)?);
    }
    rec.expect("max_residual", worst, worst < 1e-10, "< 1e-10");
    Ok(())
}

fn scale_lemma(rec: &mut Recorder, params: &CheckParams) -> Result<()> {
    let (alpha, sigma) = alpha_sigma(params);
    let g = Grid::centered(512, 32.0 * PI)?;
    let f = GridFunction::from_real_fn(g, |x| (-0.5 * x * x).exp() * (1.0 + x));
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let battery: Vec<Deformation> = (0..200)
        .map(|_| {
            Deformation::dyadic(
                rng.gen_range(-2..=2),
                g.dxi() * f64::from(rng.gen_range(-60..=60)),
                rng.gen_range(-0.5..0.5),
                rng.gen_range(-5.0..5.0),
            )
        })
        .collect::<Result<_>>()?;
    let unmodulated: Vec<Deformation> = (0..40)
        .map(|_| Deformation::dyadic(rng.gen_range(-3..=3), 0.0, rng.gen_range(-0.5..0.5), rng.gen_range(-5.0..5.0)))
        .collect::<Result<_>>()?;
    let ratio = |d: &Deformation| scale_invariance_ratio(&f, d, alpha, 2.0, sigma, ScaleWindow::All);
    let ratios: Vec<f64> = battery.par_iter().map(ratio).collect::<Result<_>>()?;
    let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().copied().fold(0.0, f64::max);
    rec.expect("min_ratio", lo, lo >= 0.5, "≥ 0.5");
    rec.expect("max_ratio", hi, hi <= 2.0, "≤ 2");
    let dev = unmodulated.par_iter().map(|d| Ok((ratio(d)? - 1.0).abs())).collect::<Result<Vec<f64>>>()?;
    let dev = dev.into_iter().fold(0.0, f64::max);
    rec.expect("max|ratio-1| at xi=0, dyadic h", dev, dev < 1e-10, "< 1e-10");
    Ok(())
}

/// `‖1_{[0,1)}‖_{M^{p}_{q,r}}`: geometric series over coarse and fine scales.
fn indicator_oracle(p: f64, q: f64, r: f64) -> f64 {
    let coarse = 1.0 / (1.0 - (r * (1.0 / p - 1.0 / q)).exp2());
    let fine = (1.0 - r / p).exp2() / (1.0 - (1.0 - r / p).exp2());
    (coarse + fine).powf(1.0 / r)
}

fn morrey_closed_form(rec: &mut Recorder) -> Result<()> {
    let (alpha, sigma) = (1.6, 3.0);
    let want = indicator_oracle(conj(alpha), 2.0, sigma);
    rec.value("oracle", want);
    // exact spectrum on the lattice: the cell engine has nothing to approximate
    let g = Grid::centered(1024, 64.0 * PI)?;
    let exact = GridFunction::from_spectrum(g, |xi| Complex64::new(if (0.0..1.0).contains(&xi) { 1.0 } else { 0.0 }, 0.0));
    let e = (morrey_norm(&exact, alpha, 2.0, sigma, ScaleWindow::All)? - want).abs() / want;
    rec.expect("rel_error_lattice_spectrum", e, e < 1e-12, "< 1e-12");
    // sampled physical function f(x) = (e^{ix} − 1)/(ix√(2π)): torus truncation
    // and aliasing are the only errors; the half-valued cells at the two jumps
    // make the error first order in dξ = 2π/L
    let mut errs = Vec::new();
    for k in 0..5 {
        let g = Grid::centered(512 << k, 32.0 * PI * f64::from(1u32 << k))?;
        let f = GridFunction::from_fn(g, |x| {
            if x.abs() < 1e-12 {
                Complex64::new(1.0, 0.0)
            } else {
                (Complex64::from_polar(1.0, x) - 1.0) / Complex64::new(0.0, x)
            }
            .unscale((2.0 * PI).sqrt())
        });
        let err = (morrey_norm(&f, alpha, 2.0, sigma, ScaleWindow::All)? - want).abs() / want;
        rec.value(format!("rel_error_sampled@dxi={}", g.dxi()), err);
        errs.push(err);
    }
    let last = *errs.last().expect("five levels");
    rec.expect("rel_error_finest", last, last < 1e-3, "< 1e-3");
    rec.require(errs.windows(2).all(|w| w[1] < w[0]), format!("error does not shrink under refinement: {errs:?}"));
    Ok(())
}

fn decoupling(rec: &mut Recorder, params: &CheckParams) -> Result<()> {
    let (alpha, sigma) = alpha_sigma(params);
    let g = Grid::centered(2048, 16.0 * PI)?;
    let ns = [8.0, 16.0, 32.0, 64.0];
    let rows = DecouplingBattery::compact(g, &ns)?.check(1.1, params.xi.unwrap_or(0.0), alpha, sigma)?;
    for (n, r) in ns.iter().zip(&rows) {
        rec.value(format!("deficit/u_sigma@n={n}"), r.deficit / r.u_sigma);
    }
    let last = rows.last().expect("four rows");
    rec.expect("deficit@n=64", last.deficit, last.deficit >= 0.0, "≥ 0");
    for (w, n) in rows.windows(2).zip(&ns[1..]) {
        let ok = w[1].deficit >= w[0].deficit - 1e-9 * w[0].u_sigma;
        rec.require(ok, format!("deficit decreases into n = {n}: {} < {}", w[1].deficit, w[0].deficit));
    }
    Ok(())
}

fn whitney(rec: &mut Recorder, params: &CheckParams) {
    let w = WhitneyWindow { j_min: 0, j_max: 5 };
    let rep = partition_check(&w, 10_000, params.seed);
    for (count, intervals) in &rep.partner_counts {
        rec.value(format!("intervals_with_{count}_partners"), *intervals as f64);
    }
    let bad_counts = rep.partner_counts.keys().filter(|c| !matches!(c, 2 | 4 | 6)).count();
    rec.expect("partner_counts_outside_2_4_6", bad_counts as f64, bad_counts == 0, "0");
    rec.expect("distance_violations", rep.distance_violations as f64, rep.distance_violations == 0, "0");
    rec.value("samples", rep.samples as f64);
    rec.expect("partition_failures", rep.partition_failures as f64, rep.partition_failures == 0, "0");
    rec.expect("diagonal_max", rep.diagonal_max as f64, rep.diagonal_max == 0, "0");
}

fn stein_tomas(rec: &mut Recorder, params: &CheckParams) -> Result<()> {
    let (alpha, sigma) = alpha_sigma(params);
    let g = Grid::centered(16384, 4096.0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let battery: Vec<GridFunction> = (0..50).map(|_| random_annular(g, &mut rng)).collect();
    let results: Vec<Result<(f64, u32)>> = battery.par_iter().map(|f| extended_ratio(f, alpha, sigma)).collect();
    let mut ratios = Vec::new();
    let mut extensions = 0;
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok((v, ext)) if v.is_finite() && v > 0.0 => {
                ratios.push(v);
                extensions += ext;
            }
            Ok((v, _)) => rec.require(false, format!("battery member {i}: ratio {v}")),
            Err(e) => rec.require(false, format!("battery member {i}: {e}")),
        }
    }
    rec.value("finite_ratios", ratios.len() as f64);
    rec.value("window_extensions", f64::from(extensions));
    rec.value("min_ratio", ratios.iter().copied().fold(f64::INFINITY, f64::min));
    rec.value("max_ratio", ratios.iter().copied().fold(0.0, f64::max));

    let f = &battery[0];
    let w = TimeWindow::auto(f);
    let base = stein_tomas_ratio(f, alpha, sigma, &w)?.ratio;
    let rel = |v: f64| (v / base - 1.0).abs();
    let moved = stein_tomas_ratio(&translate(f, 3.7), alpha, sigma, &w)?.ratio;
    rec.expect("translation_change", rel(moved), rel(moved) < 0.01, "< 1%");
    let evolved = stein_tomas_ratio(&airy_propagate(f, 0.05), alpha, sigma, &w)?.ratio;
    rec.expect("airy_change", rel(evolved), rel(evolved) < 0.01, "< 1%");
    let dil = Deformation::dyadic(1, 0.0, 0.0, 0.0)?.apply(f, alpha)?;
    let dilated = stein_tomas_ratio(&dil, alpha, sigma, &TimeWindow::auto(&dil))?.ratio;
    rec.expect("dilation_change", rel(dilated), rel(dilated) < 0.01, "< 1%");
    let doubled = stein_tomas_ratio(f, alpha, sigma, &w.with_half_width(2.0 * w.half_width))?.ratio;
    rec.expect("window_doubling_change", rel(doubled), rel(doubled) < 0.05, "< 5%");
    Ok(())
}

/// Ratio on the auto window, lengthened fourfold (as the tail check
/// suggests) at most three times; also returns the number of extensions.
fn extended_ratio(f: &GridFunction, alpha: f64, sigma: f64) -> Result<(f64, u32)> {
    let mut w = TimeWindow::auto(f);
    for ext in 0.. {
        match stein_tomas_ratio(f, alpha, sigma, &w) {
            Ok(r) => return Ok((r.ratio, ext)),
            Err(Error::Budget(_)) if ext < 3 => w = w.with_half_width(4.0 * w.half_width),
            Err(e) => return Err(e),
        }
    }
    unreachable!()
}

fn embedding(rec: &mut Recorder, params: &CheckParams) -> Result<()> {
    let alpha = params.alpha.unwrap_or(1.9);
    let g = Grid::centered(1024, 8.0 * PI)?;
    let phi = GridFunction::from_real_fn(g, |x| (-x * x).exp());
    let cfg = EmbeddingConfig::new(alpha, phi, vec![8.0, 16.0, 32.0, 64.0], 1.0);
    let rows = embedding_experiment(&cfg)?;
    let mut sl = Vec::new();
    for r in &rows {
        rec.value(format!("err_lhat@xi={}", r.xi), r.err_lhat_alpha);
        rec.value(format!("norm_S@xi={}", r.xi), r.norm_s);
        rec.value(format!("norm_L@xi={}", r.xi), r.norm_l);
        rec.value(format!("residual_Y@xi={}", r.xi), r.residual_y);
        sl.push(r.norm_s + r.norm_l);
    }
    for w in rows.windows(2) {
        rec.require(
            w[1].err_lhat_alpha < w[0].err_lhat_alpha,
            format!("seam error does not decrease from ξ = {} to ξ = {}", w[0].xi, w[1].xi),
        );
    }
    let lo = sl.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = sl.iter().copied().fold(0.0, f64::max);
    let spread = hi / lo - 1.0;
    rec.expect("S+L_spread", spread, spread < 0.25, "< 25%");
    Ok(())
}

fn profiles(rec: &mut Recorder, params: &CheckParams) -> Result<()> {
    let (alpha, sigma) = alpha_sigma(params);
    let star = |g: Grid| spectral_bump(g, 0.1, 0.9, Complex64::new(1.0, 0.0));

    // single planted profile, no noise
    let g = Grid::centered(2048, 32.0 * PI)?;
    let psi = star(g);
    let ns = [4.0, 8.0, 12.0, 16.0];
    let u: Vec<GridFunction> =
        ns.iter().map(|&n| Deformation::new(2.0, n, 0.1, 1.0)?.apply(&psi, alpha)).collect::<Result<_>>()?;
    let e = extract_profile(&u, &ExtractConfig::new(alpha, sigma))?;
    let finest = u.iter().map(|f| f.grid().dxi()).fold(f64::INFINITY, f64::min);
    let (mut h_misses, mut xi_err, mut frac) = (0.0, 0.0f64, 0.0f64);
    for ((n, gamma), (res, un)) in ns.iter().zip(&e.gammas).zip(e.residuals.iter().zip(&u)) {
        match gamma {
            Some(gm) => {
                h_misses += f64::from(u8::from(gm.log2_h() != Some(1)));
                xi_err = xi_err.max((gm.xi - n).abs());
            }
            None => h_misses += 1.0,
        }
        frac = frac.max(ell(res, alpha, sigma, ScaleWindow::All)?.value / ell(un, alpha, sigma, ScaleWindow::All)?.value);
    }
    rec.expect("single.log2h_misses", h_misses, h_misses == 0.0, "0");
    rec.expect("single.max_xi_error", xi_err, xi_err <= finest, "≤ one finest-interval width");
    rec.expect("single.residual_ell_fraction", frac, frac < 0.1, "< 0.1");

    // two space-time nonresonant profiles of different size
    let big = star(g);
    let small = spectral_bump(g, 0.2, 0.8, Complex64::from_polar(0.5, 1.0));
    let ns = [4.0, 8.0, 16.0];
    let u: Vec<GridFunction> = ns
        .iter()
        .map(|&n| {
            let a = Deformation::new(1.0, n, 0.0, 0.0)?.apply(&big, alpha)?;
            a.add(&Deformation::new(1.0, -2.0 * n, 0.02, 5.0)?.apply(&small, alpha)?)
        })
        .collect::<Result<_>>()?;
    let d = profile_decompose(&u, &DecomposeConfig::new(alpha, sigma))?;
    rec.expect("two.profiles", d.profiles.len() as f64, d.profiles.len() == 2, "2");
    let ells: Vec<f64> = d.profiles.iter().map(|p| p.ell).collect();
    for (i, l) in ells.iter().enumerate() {
        rec.value(format!("two.ell[{i}]"), *l);
    }
    rec.require(ells.windows(2).all(|w| w[0] > w[1]), format!("profiles not in ℓ-descending order: {ells:?}"));
    let carriers: Vec<Option<f64>> = d.profiles.iter().map(|p| p.gammas[2].map(|g| g.xi)).collect();
    rec.require(
        carriers.first() == Some(&Some(16.0)) && carriers.get(1) == Some(&Some(-32.0)),
        format!("carriers at the last index are {carriers:?}, want [16, −32]"),
    );
    let rebuilt = d.reconstruction_error(&u, alpha, 1e-8)?;
    rec.expect("two.reconstruction_error", rebuilt, rebuilt < 1e-10, "< 1e-10");

    // real-valued data: one conjugate pair
    let g = Grid::centered(4096, 32.0 * PI)?;
    let phi = GridFunction::from_real_fn(g, |x| (-x * x / 64.0).exp());
    let u: Vec<GridFunction> = [8.5, 16.5, 32.5].iter().map(|&xi| modulate(&phi, xi).re()).collect();
    let d = profile_decompose(&u, &DecomposeConfig::new(alpha, sigma))?;
    rec.expect("real.profiles", d.profiles.len() as f64, d.profiles.len() == 1, "1");
    let c = d.profiles.first().map_or(f64::NAN, |p| p.c);
    rec.expect("real.c", c, c == 2.0, "2");
    rec.value("real.ledger_u", d.ledger.u_ell_sigma);
    rec.value("real.ledger_profiles", d.ledger.profile_terms.iter().sum());
    rec.require(d.ledger.holds, format!("ledger fails: {:?}", d.ledger));
    let rebuilt = d.reconstruction_error(&u, alpha, 1e-8)?;
    rec.expect("real.reconstruction_error", rebuilt, rebuilt < 1e-10, "< 1e-10");
    Ok(())
}

fn solvers(rec: &mut Recorder) -> Result<()> {
    let g = Grid::centered(256, 16.0 * PI)?;
    let v0 = GridFunction::from_fn(g, |x| Complex64::new((-x * x).exp(), 0.3 * x * (-x * x).exp()));
    let m0 = v0.l2_norm();
    let out = nls_solve(&v0, &SolveConfig::new(1.8, 1.0, 1.0, 0.005))?;
    let drift = out.frames().iter().map(|f| (f.l2_norm() - m0).abs() / m0).fold(0.0, f64::max);
    rec.expect("nls_mass_drift_per_unit_time", drift, drift < 1e-10, "< 1e-10");
    let run = |dt: f64| -> Result<GridFunction> {
        Ok(nls_solve(&v0, &SolveConfig::new(1.8, -1.0, 0.5, dt))?.frames().last().expect("nonempty").clone())
    };
    let (a, b, c) = (run(0.02)?, run(0.01)?, run(0.005)?);
    let ratio = a.sub(&b)?.l2_norm() / b.sub(&c)?.l2_norm();
    rec.expect("nls_halving_ratio", ratio, (3.5..=4.5).contains(&ratio), "in [3.5, 4.5]");
    let u0 = GridFunction::from_real_fn(g, |x| (-x * x).exp());
    let cfg = SolveConfig { coupling: 0.0, store_every: 5, ..SolveConfig::new(1.8, 1.0, 0.5, 0.01) };
    let out = gkdv_solve(&u0, &cfg)?;
    let mut worst = 0.0f64;
    for (t, f) in out.times().iter().zip(out.frames()) {
        worst = worst.max(f.sub(&airy_propagate(&u0, *t))?.sup_norm());
    }
    rec.expect("gkdv_linear_vs_airy", worst, worst < 1e-10, "< 1e-10");
    Ok(())
}

fn interpolation(rec: &mut Recorder, params: &CheckParams) -> Result<()> {
    let (p, q, r, s) = (2.0, 1.5, 4.0, 1.8);
    let g = Grid::centered(512, 40.0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let battery: Vec<GridFunction> = (0..100).map(|_| random_band_limited(g, &mut rng)).collect();
    let ratios: Vec<f64> =
        battery.par_iter().map(|f| morrey_interpolation_check(f, p, q, r, s)).collect::<Result<_>>()?;
    let hi = ratios.iter().copied().fold(0.0, f64::max);
    rec.expect("max_ratio", hi, hi.is_finite() && hi > 0.0, "finite");
    let base = ratios[0];
    let mut worst = 0.0f64;
    for h in [0.25, 2.0, 8.0] {
        let v = morrey_interpolation_check(&battery[0].clone().with_grid(g.dilated(h))?, p, q, r, s)?;
        worst = worst.max((v / base - 1.0).abs());
    }
    rec.expect("dyadic_dilation_change", worst, worst < 1e-6, "< 1e-6");
    if morrey_interpolation_check(&battery[0], p, 2.5, r, s).is_ok() {
        return invalid("q ≥ p was accepted");
    }
    Ok(())
}
