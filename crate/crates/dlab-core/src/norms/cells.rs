//! Exact dyadic Morrey sums of piecewise-constant functions on ℝ.
//!
//! A sampled function is read as `g = Σ_i c_i 1_{[a + i d, a + (i+1) d)}`.
//! For this `g` every dyadic quantity has a closed form: coarse scales are
//! enumerated until `[−2^m, 2^m)` covers the support and then summed as a
//! geometric tail, and scales finer than the cell width split into whole-cell
//! interiors (counted arithmetically) plus the finitely many intervals that
//! straddle a cell boundary. Once every boundary is dyadic at some scale the
//! remaining fine tail is geometric again.

use super::dyadic::{scale_length, DyadicInterval};
use crate::error::{invalid, Error, Result};

/// Largest number of scales examined below the cell width before the fine
/// tail is summed in closed form.
const MAX_FINE_SCALES: i32 = 1100;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ScaleWindow {
    /// Every dyadic scale `j ∈ ℤ`.
    All,
    /// Scales `j_min ..= j_max` only.
    Range { j_min: i32, j_max: i32 },
}

impl ScaleWindow {
    pub fn validate(&self) -> Result<()> {
        if let ScaleWindow::Range { j_min, j_max } = *self {
            if j_min > j_max {
                return invalid(format!("empty scale window {j_min}:{j_max}"));
            }
        }
        Ok(())
    }
}

/// Nonnegative piecewise-constant function on uniform cells.
#[derive(Clone, Debug, PartialEq)]
pub struct Cells {
    start: f64,
    width: f64,
    values: Vec<f64>,
}

impl Cells {
    /// Leading and trailing cells below `1e-15·max` are dropped.
    pub fn new(start: f64, width: f64, values: Vec<f64>) -> Self {
        let max = values.iter().fold(0.0f64, |m, v| m.max(*v));
        let cut = 1e-15 * max;
        let first = values.iter().position(|v| *v > cut);
        match first {
            None => Cells { start, width, values: Vec::new() },
            Some(lo) => {
                let hi = values.iter().rposition(|v| *v > cut).unwrap();
                Cells { start: start + lo as f64 * width, width, values: values[lo..=hi].to_vec() }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Length of the (trimmed) support.
    pub fn extent(&self) -> f64 {
        self.values.len() as f64 * self.width
    }

    /// Same cell values with the support starting at `start`.
    pub fn placed_at(&self, start: f64) -> Self {
        Cells { start, width: self.width, values: self.values.clone() }
    }

    fn boundary(&self, i: usize) -> f64 {
        self.start + i as f64 * self.width
    }
}

/// Weight `|I|^{1/p − 1/q}·‖g‖_{L^q(I)}`, aggregated in `ℓ^r` over dyadic `I`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MorreyExponents {
    pub p: f64,
    pub q: f64,
    pub r: f64,
}

impl MorreyExponents {
    fn validate(&self) -> Result<()> {
        let MorreyExponents { p, q, r } = *self;
        if p.is_nan() || q.is_nan() || r.is_nan() || !(q > 0.0) || !(r > 0.0) {
            return invalid(format!("Morrey exponents ({p}, {q}, {r}) must be positive"));
        }
        if q > p {
            return invalid(format!("Morrey exponents need q ≤ p, got q = {q}, p = {p}"));
        }
        Ok(())
    }

    fn weight(&self) -> f64 {
        1.0 / self.p - 1.0 / self.q
    }
}

/// Result of a Morrey evaluation; `argmax` is set for `r = ∞`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MorreyValue {
    pub value: f64,
    pub argmax: Option<DyadicInterval>,
}

struct Engine<'a> {
    cells: &'a Cells,
    e: MorreyExponents,
    w: f64,
    /// `c^q` (or `c` when `q = ∞`).
    cq: Vec<f64>,
    /// `c^r` when `r < ∞`.
    cr: Vec<f64>,
    /// Prefix integrals of `c^q` over whole cells.
    prefix: Vec<f64>,
    /// Sparse max table when `q = ∞`.
    sparse: Vec<Vec<f64>>,
    /// Exponent applied to the local mass in a term.
    mass_exp: f64,
    /// Boundaries that separate cells not both zero.
    live: Vec<usize>,
}

/// Accumulates `Σ a(I)^r`, or `sup a(I)` with its argmax when `r = ∞`.
struct Acc {
    sum: f64,
    best: f64,
    arg: Option<DyadicInterval>,
}

impl Acc {
    fn new() -> Self {
        Acc { sum: 0.0, best: f64::NEG_INFINITY, arg: None }
    }

    fn push_max(&mut self, v: f64, j: i32, k: i64) {
        if v > self.best {
            self.best = v;
            self.arg = Some(DyadicInterval::new(j, k));
        }
    }
}

impl<'a> Engine<'a> {
    fn new(cells: &'a Cells, e: MorreyExponents) -> Self {
        let m = cells.values.len();
        let d = cells.width;
        let qinf = e.q.is_infinite();
        let cq: Vec<f64> = cells.values.iter().map(|c| if qinf { *c } else { c.powf(e.q) }).collect();
        let cr = if e.r.is_finite() { cells.values.iter().map(|c| c.powf(e.r)).collect() } else { Vec::new() };
        let mut prefix = vec![0.0; m + 1];
        if !qinf {
            for i in 0..m {
                prefix[i + 1] = prefix[i] + cq[i] * d;
            }
        }
        let mut sparse = Vec::new();
        if qinf {
            sparse.push(cq.clone());
            let mut span = 1;
            while 2 * span <= m {
                let prev = sparse.last().unwrap();
                let next: Vec<f64> = (0..=m - 2 * span).map(|i| prev[i].max(prev[i + span])).collect();
                sparse.push(next);
                span *= 2;
            }
        }
        let mass_exp = match (qinf, e.r.is_finite()) {
            (true, true) => e.r,
            (true, false) => 1.0,
            (false, true) => e.r / e.q,
            (false, false) => 1.0 / e.q,
        };
        let live = (0..=m)
            .filter(|&i| {
                let l = if i > 0 { cells.values[i - 1] } else { 0.0 };
                let r = if i < m { cells.values[i] } else { 0.0 };
                l > 0.0 || r > 0.0
            })
            .collect();
        Engine { cells, e, w: e.weight(), cq, cr, prefix, sparse, mass_exp, live }
    }

    fn qinf(&self) -> bool {
        self.e.q.is_infinite()
    }

    fn rinf(&self) -> bool {
        self.e.r.is_infinite()
    }

    fn range_max(&self, lo: usize, hi: usize) -> f64 {
        // inclusive cell range
        let len = hi - lo + 1;
        let lvl = (usize::BITS - 1 - len.leading_zeros()) as usize;
        let span = 1usize << lvl;
        self.sparse[lvl][lo].max(self.sparse[lvl][hi + 1 - span])
    }

    /// `∫_u^v g^q` (or `sup_{[u,v)} g` when `q = ∞`) for `start ≤ u < v ≤ end`.
    fn mass(&self, u: f64, v: f64) -> f64 {
        let c = self.cells;
        let m = c.values.len();
        let d = c.width;
        let cell = |x: f64| (((x - c.start) / d).floor().max(0.0) as usize).min(m - 1);
        let iu = cell(u);
        // the cell containing v⁻
        let mut iv = cell(v);
        if iv > iu && c.boundary(iv) >= v {
            iv -= 1;
        }
        if self.qinf() {
            return self.range_max(iu, iv);
        }
        if iu == iv {
            return self.cq[iu] * (v - u);
        }
        self.cq[iu] * (c.boundary(iu + 1) - u) + (self.prefix[iv] - self.prefix[iu + 1]) + self.cq[iv] * (v - c.boundary(iv))
    }

    fn term(&self, scale: f64, mass: f64) -> f64 {
        if mass <= 0.0 {
            0.0
        } else {
            scale * mass.powf(self.mass_exp)
        }
    }

    fn scale_factor(&self, ell: f64) -> f64 {
        if self.rinf() {
            ell.powf(self.w)
        } else {
            ell.powf(self.w * self.e.r)
        }
    }

    /// Scale with intervals longer than a cell: enumerate every interval meeting the support.
    fn direct_scale(&self, j: i32, acc: &mut Acc) {
        let c = self.cells;
        let ell = scale_length(j);
        let inv = scale_length(-j);
        let a = c.start;
        let b = c.boundary(c.values.len());
        let k0 = (a * inv).floor() as i64;
        let k1 = (b * inv).ceil() as i64;
        let s = self.scale_factor(ell);
        for k in k0..k1 {
            let u = (k as f64 * ell).max(a);
            let v = ((k + 1) as f64 * ell).min(b);
            if v <= u {
                continue;
            }
            let t = self.term(s, self.mass(u, v));
            if self.rinf() {
                acc.push_max(t, j, k);
            } else {
                acc.sum += t;
            }
        }
    }

    /// Scale with intervals no longer than a cell. `pending` holds the live
    /// boundaries that were non-dyadic at the previous scale and is pruned.
    fn cell_scale(&self, j: i32, pending: &mut Vec<usize>, acc: &mut Acc) {
        let c = self.cells;
        let m = c.values.len();
        let ell = scale_length(j);
        let inv = scale_length(-j);
        let s = self.scale_factor(ell);
        let val = |i: isize| -> (f64, f64) {
            if i < 0 || i as usize >= m {
                (0.0, 0.0)
            } else {
                (self.cq[i as usize], if self.rinf() { 0.0 } else { self.cr[i as usize] })
            }
        };
        pending.retain(|&i| {
            let b = c.boundary(i);
            (b * inv).floor() != b * inv
        });
        if self.rinf() {
            for i in 0..m {
                let u = c.boundary(i);
                let v = c.boundary(i + 1);
                let lo = (u * inv).ceil();
                if (v * inv).floor() - lo >= 1.0 {
                    acc.push_max(c.values[i] * ell.powf(1.0 / self.e.p), j, lo as i64);
                }
            }
        } else {
            let total: f64 = self.cr.iter().sum();
            let mut bulk = total * c.width * inv;
            for &i in pending.iter() {
                let b = c.boundary(i);
                let lam = (b - (b * inv).floor() * ell) * inv;
                let (_, left_r) = val(i as isize - 1);
                let (_, right_r) = val(i as isize);
                bulk -= left_r * lam + right_r * (1.0 - lam);
            }
            acc.sum += ell.powf(self.e.r / self.e.p) * bulk.max(0.0);
        }
        for &i in pending.iter() {
            let b = c.boundary(i);
            let k = (b * inv).floor();
            let lam = b - k * ell;
            let (lq, _) = val(i as isize - 1);
            let (rq, _) = val(i as isize);
            let mass = if self.qinf() { lq.max(rq) } else { lq * lam + rq * (ell - lam) };
            let t = self.term(s, mass);
            if self.rinf() {
                acc.push_max(t, j, k as i64);
            } else {
                acc.sum += t;
            }
        }
    }

    fn single_scale(&self, j: i32, acc: &mut Acc) {
        if scale_length(j) > self.cells.width {
            self.direct_scale(j, acc);
        } else {
            let mut pending = self.live.clone();
            self.cell_scale(j, &mut pending, acc);
        }
    }

    fn evaluate(&self, window: ScaleWindow) -> Result<MorreyValue> {
        let mut acc = Acc::new();
        match window {
            ScaleWindow::Range { j_min, j_max } => {
                for j in j_min..=j_max {
                    self.single_scale(j, &mut acc);
                }
            }
            ScaleWindow::All => self.all_scales(&mut acc)?,
        }
        Ok(self.finish(acc))
    }

    fn finish(&self, acc: Acc) -> MorreyValue {
        if self.rinf() {
            MorreyValue { value: acc.best.max(0.0), argmax: acc.arg }
        } else {
            MorreyValue { value: acc.sum.powf(1.0 / self.e.r), argmax: None }
        }
    }

    fn all_scales(&self, acc: &mut Acc) -> Result<()> {
        let c = self.cells;
        let d = c.width;
        let a = c.start;
        let b = c.boundary(c.values.len());
        let reach = a.abs().max(b.abs());
        // smallest m with 2^m ≥ reach
        let mut m_top = reach.log2().ceil() as i32;
        while scale_length(-m_top) < reach {
            m_top += 1;
        }
        while scale_length(-(m_top - 1)) >= reach {
            m_top -= 1;
        }
        // coarse tail over j < −m_top: only [−2^m, 0) and [0, 2^m) meet the support
        let neg = if a < 0.0 { self.mass(a, b.min(0.0)) } else { 0.0 };
        let pos = if b > 0.0 { self.mass(a.max(0.0), b) } else { 0.0 };
        if self.rinf() {
            // the weight is nonincreasing in |I| (q ≤ p), so the first coarse term dominates the tail
        } else {
            let ratio = (self.w * self.e.r).exp2();
            if self.w >= 0.0 {
                return Err(Error::Divergent(format!(
                    "coarse-scale sum diverges for q = p = {} with r = {} < ∞",
                    self.e.p, self.e.r
                )));
            }
            let first = self.scale_factor(scale_length(-(m_top + 1)));
            let masses = self.term(1.0, neg) + self.term(1.0, pos);
            acc.sum += first * masses / (1.0 - ratio);
        }
        let j_top = -m_top;
        let mut j = j_top;
        while scale_length(j) > d {
            self.direct_scale(j, acc);
            j += 1;
        }
        if !self.rinf() && self.e.r <= self.e.p {
            return Err(Error::Divergent(format!(
                "fine-scale sum diverges: r = {} must exceed p = {}",
                self.e.r, self.e.p
            )));
        }
        let mut pending = self.live.clone();
        let maxc = c.values.iter().fold(0.0f64, |x, y| x.max(*y));
        let j_fine0 = j;
        loop {
            self.cell_scale(j, &mut pending, acc);
            if self.rinf() {
                let bound = maxc * scale_length(j + 1).powf(1.0 / self.e.p);
                if pending.is_empty() || bound < acc.best || j - j_fine0 > MAX_FINE_SCALES {
                    break;
                }
            } else if pending.is_empty() || j - j_fine0 > MAX_FINE_SCALES {
                break;
            }
            j += 1;
        }
        if !self.rinf() {
            // every boundary is dyadic from here on: each cell holds exactly d·2^j intervals
            let total: f64 = self.cr.iter().sum();
            let expo = self.e.r / self.e.p - 1.0;
            let ratio = (-expo).exp2();
            let first = d * total * scale_length(j + 1).powf(expo);
            acc.sum += first / (1.0 - ratio);
        }
        Ok(())
    }
}

/// `(Σ_{j,k} (|τ|^{1/p−1/q}‖g‖_{L^q(τ)})^r)^{1/r}` over the window, or the supremum when `r = ∞`.
pub fn morrey(cells: &Cells, e: MorreyExponents, window: ScaleWindow) -> Result<MorreyValue> {
    e.validate()?;
    window.validate()?;
    if cells.is_zero() {
        return Ok(MorreyValue { value: 0.0, argmax: None });
    }
    Engine::new(cells, e).evaluate(window)
}

/// `‖g‖_{L^q(ℝ)}` of the cell function.
pub fn lebesgue(cells: &Cells, q: f64) -> f64 {
    if cells.is_zero() {
        return 0.0;
    }
    if q.is_infinite() {
        return cells.values.iter().fold(0.0, |m, v| m.max(*v));
    }
    let s: f64 = cells.values.iter().map(|v| v.powf(q)).sum();
    (s * cells.width).powf(1.0 / q)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(p: f64, q: f64, r: f64) -> MorreyExponents {
        MorreyExponents { p, q, r }
    }

    /// Brute-force window sum by direct quadrature of every interval.
    fn brute(cells: &Cells, ex: MorreyExponents, j_min: i32, j_max: i32) -> f64 {
        let fine = 64;
        let mut total = 0.0;
        let mut best: f64 = 0.0;
        let a = cells.start;
        let b = a + cells.extent();
        let val = |x: f64| {
            let i = ((x - a) / cells.width).floor();
            if i < 0.0 || i as usize >= cells.values.len() {
                0.0
            } else {
                cells.values[i as usize]
            }
        };
        for j in j_min..=j_max {
            let ell = scale_length(j);
            let k0 = (a / ell).floor() as i64 - 1;
            let k1 = (b / ell).ceil() as i64 + 1;
            for k in k0..k1 {
                let h = ell / fine as f64;
                let mut mass: f64 = 0.0;
                for t in 0..fine {
                    let x = k as f64 * ell + (t as f64 + 0.5) * h;
                    if ex.q.is_infinite() {
                        mass = mass.max(val(x));
                    } else {
                        mass += val(x).powf(ex.q) * h;
                    }
                }
                let norm = if ex.q.is_infinite() { mass } else { mass.powf(1.0 / ex.q) };
                let a_i = ell.powf(1.0 / ex.p - 1.0 / ex.q) * norm;
                if ex.r.is_infinite() {
                    best = best.max(a_i);
                } else {
                    total += a_i.powf(ex.r);
                }
            }
        }
        if ex.r.is_infinite() {
            best
        } else {
            total.powf(1.0 / ex.r)
        }
    }

    fn sample() -> Cells {
        // boundaries at multiples of 1/8 so the midpoint rule on 64 points is exact
        Cells::new(-0.375, 0.125, vec![0.5, 1.0, 0.0, 2.0, 1.5, 0.25])
    }

    #[test]
    fn window_matches_brute_force() {
        let c = sample();
        for ex in [e(2.5, 2.0, 3.0), e(3.0, 1.5, 4.0), e(2.0, f64::INFINITY, 2.0), e(2.2, 2.0, f64::INFINITY)] {
            if ex.q > ex.p {
                continue;
            }
            let got = morrey(&c, ex, ScaleWindow::Range { j_min: -3, j_max: 5 }).unwrap().value;
            let want = brute(&c, ex, -3, 5);
            assert!((got - want).abs() < 1e-12 * want, "{ex:?}: {got} vs {want}");
        }
    }

    #[test]
    fn infinite_q_with_finite_p() {
        let c = sample();
        let ex = e(f64::INFINITY, f64::INFINITY, 3.0);
        let got = morrey(&c, ex, ScaleWindow::Range { j_min: -2, j_max: 4 }).unwrap().value;
        let want = brute(&c, ex, -2, 4);
        assert!((got - want).abs() < 1e-12 * want);
    }

    #[test]
    fn full_sum_equals_long_window() {
        let c = Cells::new(0.3, 0.1, vec![1.0, 0.7, 0.2, 0.9]);
        let ex = e(2.4, 2.0, 3.0);
        let full = morrey(&c, ex, ScaleWindow::All).unwrap().value;
        let long = morrey(&c, ex, ScaleWindow::Range { j_min: -400, j_max: 1000 }).unwrap().value;
        assert!((full - long).abs() < 1e-12 * full, "{full} vs {long}");
    }

    #[test]
    fn indicator_closed_form() {
        // 1_[0,1): Σ_{m≥0} 2^{m r(1/p−1/q)} + Σ_{j≥1} 2^{j(1 − r/p)}
        let (p, q, r): (f64, f64, f64) = (2.5, 2.0, 3.0);
        let c = Cells::new(0.0, 1.0, vec![1.0]);
        let w = 1.0 / p - 1.0 / q;
        let coarse = 1.0 / (1.0 - (w * r).exp2());
        let fine = (1.0 - r / p).exp2() / (1.0 - (1.0 - r / p).exp2());
        let want = (coarse + fine).powf(1.0 / r);
        let got = morrey(&c, e(p, q, r), ScaleWindow::All).unwrap().value;
        assert!((got - want).abs() < 1e-13 * want, "{got} vs {want}");
    }

    #[test]
    fn divergence_is_reported() {
        let c = Cells::new(0.0, 1.0, vec![1.0]);
        assert!(matches!(morrey(&c, e(2.0, 2.0, 3.0), ScaleWindow::All), Err(Error::Divergent(_))));
        assert!(matches!(morrey(&c, e(3.0, 2.0, 2.0), ScaleWindow::All), Err(Error::Divergent(_))));
        assert!(morrey(&c, e(2.0, 3.0, 3.0), ScaleWindow::All).is_err());
        assert!(morrey(&c, e(3.0, 2.0, 4.0), ScaleWindow::Range { j_min: 2, j_max: 1 }).is_err());
    }

    #[test]
    fn equal_exponents_sup_is_lebesgue() {
        let c = sample().placed_at(0.125);
        let v = morrey(&c, e(2.0, 2.0, f64::INFINITY), ScaleWindow::All).unwrap();
        assert!((v.value - lebesgue(&c, 2.0)).abs() < 1e-14);
    }

    #[test]
    fn argmax_of_a_bump() {
        let c = Cells::new(0.0, 0.25, vec![1.0, 1.0, 1.0, 1.0]);
        let v = morrey(&c, e(2.0, 1.5, f64::INFINITY), ScaleWindow::All).unwrap();
        assert_eq!(v.argmax, Some(DyadicInterval::new(0, 0)));
    }

    #[test]
    fn shifted_placement_is_a_translation() {
        // translating by a multiple of the coarsest relevant scale leaves fine structure and
        // coarse containment unchanged
        let c = Cells::new(0.0, 0.125, vec![1.0, 2.0, 0.5]);
        let ex = e(2.5, 2.0, 3.0);
        let v0 = morrey(&c, ex, ScaleWindow::All).unwrap().value;
        let v1 = morrey(&c.placed_at(8.0), ex, ScaleWindow::All).unwrap().value;
        assert!((v1 - v0).abs() < 1e-12 * v0, "{v0} vs {v1}");
    }
}
