use serde::{Deserialize, Serialize};

/// `τ_k^j = [k·2^{−j}, (k+1)·2^{−j})`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DyadicInterval {
    pub j: i32,
    pub k: i64,
}

/// `2^{−j}` computed exactly.
pub fn scale_length(j: i32) -> f64 {
    (-(j as f64)).exp2()
}

impl DyadicInterval {
    pub fn new(j: i32, k: i64) -> Self {
        DyadicInterval { j, k }
    }

    /// The interval of scale `j` containing `x`.
    pub fn containing(j: i32, x: f64) -> Self {
        DyadicInterval { j, k: (x * scale_length(-j)).floor() as i64 }
    }

    pub fn length(&self) -> f64 {
        scale_length(self.j)
    }

    pub fn left(&self) -> f64 {
        self.k as f64 * self.length()
    }

    pub fn right(&self) -> f64 {
        (self.k + 1) as f64 * self.length()
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.left() && x < self.right()
    }

    pub fn parent(&self) -> Self {
        DyadicInterval { j: self.j - 1, k: self.k.div_euclid(2) }
    }

    pub fn children(&self) -> [Self; 2] {
        [DyadicInterval { j: self.j + 1, k: 2 * self.k }, DyadicInterval { j: self.j + 1, k: 2 * self.k + 1 }]
    }

    /// The reflection `−I`, identified with the dyadic interval sharing its closure.
    pub fn reflect(&self) -> Self {
        DyadicInterval { j: self.j, k: -self.k - 1 }
    }

    /// Same scale and closures intersect (equal or adjacent).
    pub fn neighbors(&self, other: &Self) -> bool {
        self.j == other.j && (self.k - other.k).abs() <= 1
    }

    /// Distance between the two intervals as sets.
    pub fn distance(&self, other: &Self) -> f64 {
        (other.left() - self.right()).max(self.left() - other.right()).max(0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_geometry() {
        let i = DyadicInterval::new(2, -3);
        assert_eq!(i.length(), 0.25);
        assert_eq!(i.left(), -0.75);
        assert_eq!(i.right(), -0.5);
        assert_eq!(i.parent(), DyadicInterval::new(1, -2));
        assert_eq!(i.reflect(), DyadicInterval::new(2, 2));
        assert_eq!(DyadicInterval::containing(2, -0.6), i);
        for c in i.children() {
            assert_eq!(c.parent(), i);
        }
    }

    #[test]
    fn tiles_the_line() {
        for j in -3..4 {
            for t in 0..50 {
                let x = -7.0 + 0.291 * t as f64;
                let i = DyadicInterval::containing(j, x);
                assert!(i.contains(x));
                assert!(!DyadicInterval::new(j, i.k + 1).contains(x));
            }
        }
    }
}
