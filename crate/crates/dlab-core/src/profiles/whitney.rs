use std::collections::{BTreeMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::norms::{scale_length, DyadicInterval};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WhitneyPair {
    pub i: DyadicInterval,
    pub i_prime: DyadicInterval,
}

/// `I ∼ I′`: same scale, `I` adjacent to neither `I′` nor `−I′`, and the parent
/// of `I` adjacent to the parent of `I′` or of `−I′`.
pub fn whitney_related(i: &DyadicInterval, ip: &DyadicInterval) -> bool {
    if i.j != ip.j {
        return false;
    }
    let r = ip.reflect();
    if i.neighbors(ip) || i.neighbors(&r) {
        return false;
    }
    let p = i.parent();
    p.neighbors(&ip.parent()) || p.neighbors(&r.parent())
}

/// Every `J` with `I ∼ J`; at most six.
pub fn whitney_partners(i: &DyadicInterval) -> Vec<DyadicInterval> {
    let p = i.parent();
    let mut out: Vec<DyadicInterval> = (-1..=1)
        .flat_map(|d| DyadicInterval::new(p.j, p.k + d).children())
        .flat_map(|c| [c, c.reflect()])
        .filter(|c| whitney_related(i, c))
        .collect();
    out.sort();
    out.dedup();
    out
}

/// Scales `j_min ..= j_max` over the square `[−R, R)²`, `R = 2^{1−j_min}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WhitneyWindow {
    pub j_min: i32,
    pub j_max: i32,
}

impl WhitneyWindow {
    pub fn new(j_min: i32, j_max: i32) -> Result<Self> {
        if j_min > j_max || j_max - j_min > 20 {
            return invalid(format!("Whitney window {j_min}:{j_max} must be nonempty and at most 21 scales"));
        }
        Ok(WhitneyWindow { j_min, j_max })
    }

    pub fn radius(&self) -> f64 {
        scale_length(self.j_min - 1)
    }

    fn intervals(&self, j: i32) -> impl Iterator<Item = DyadicInterval> {
        let m = (self.radius() / scale_length(j)) as i64;
        (-m..m).map(move |k| DyadicInterval::new(j, k))
    }

    /// All of `I`'s partners lie in the square.
    fn interior(&self, i: &DyadicInterval) -> bool {
        let r = self.radius();
        whitney_partners(i).iter().chain(std::iter::once(i)).all(|c| c.left() >= -r && c.right() <= r)
    }

    /// Samples whose pair is decided inside the window: both points in the
    /// square and at least two finest widths away from both diagonals.
    pub fn covers(&self, xi: f64, eta: f64) -> bool {
        let r = self.radius();
        let margin = 2.0 * scale_length(self.j_max);
        xi.abs() < r && eta.abs() < r && (xi - eta).abs() >= margin && (xi + eta).abs() >= margin
    }
}

/// All related pairs with both intervals in the window's square.
pub fn whitney_pairs(w: &WhitneyWindow) -> Vec<WhitneyPair> {
    let r = w.radius();
    let mut out = Vec::new();
    for j in w.j_min..=w.j_max {
        for i in w.intervals(j) {
            for ip in whitney_partners(&i) {
                if ip.left() >= -r && ip.right() <= r {
                    out.push(WhitneyPair { i, i_prime: ip });
                }
            }
        }
    }
    out
}

/// `Σ_{(I,I′)} 1_I(ξ)1_{I′}(η)` over a pair set.
pub fn indicator_sum(pairs: &HashSet<WhitneyPair>, w: &WhitneyWindow, xi: f64, eta: f64) -> usize {
    (w.j_min..=w.j_max)
        .filter(|&j| pairs.contains(&WhitneyPair { i: DyadicInterval::containing(j, xi), i_prime: DyadicInterval::containing(j, eta) }))
        .count()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WhitneyReport {
    pub pairs: usize,
    /// Histogram of partner counts over interior intervals.
    pub partner_counts: BTreeMap<usize, usize>,
    /// Pairs violating `|I| ≤ min(dist(I,I′), dist(I,−I′)) ≤ 2|I|`.
    pub distance_violations: usize,
    pub samples: usize,
    /// Covered samples whose indicator sum is not 1.
    pub partition_failures: usize,
    /// Indicator sum at diagonal points (expected 0).
    pub diagonal_max: usize,
}

impl WhitneyReport {
    pub fn passed(&self) -> bool {
        self.partner_counts.keys().all(|c| matches!(c, 2 | 4 | 6))
            && self.distance_violations == 0
            && self.partition_failures == 0
            && self.diagonal_max == 0
    }
}

/// Partner counts, distance bounds and the partition of unity at `samples`
/// random covered points.
pub fn partition_check(w: &WhitneyWindow, samples: usize, seed: u64) -> WhitneyReport {
    let list = whitney_pairs(w);
    let set: HashSet<WhitneyPair> = list.iter().copied().collect();
    let mut partner_counts = BTreeMap::new();
    for j in w.j_min..=w.j_max {
        for i in w.intervals(j).filter(|i| w.interior(i)) {
            *partner_counts.entry(whitney_partners(&i).len()).or_insert(0) += 1;
        }
    }
    let distance_violations = list
        .iter()
        .filter(|p| {
            let d = p.i.distance(&p.i_prime).min(p.i.distance(&p.i_prime.reflect()));
            let len = p.i.length();
            !(len <= d && d <= 2.0 * len)
        })
        .count();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r = w.radius();
    let mut failures = 0;
    let mut taken = 0;
    while taken < samples {
        let (xi, eta) = (rng.gen_range(-r..r), rng.gen_range(-r..r));
        if !w.covers(xi, eta) {
            continue;
        }
        taken += 1;
        if indicator_sum(&set, w, xi, eta) != 1 {
            failures += 1;
        }
    }
    let diagonal_max = (0..100)
        .map(|_| {
            let x = rng.gen_range(-r..r);
            indicator_sum(&set, w, x, x).max(indicator_sum(&set, w, x, -x))
        })
        .max()
        .unwrap_or(0);
    WhitneyReport { pairs: list.len(), partner_counts, distance_violations, samples, partition_failures: failures, diagonal_max }
}
