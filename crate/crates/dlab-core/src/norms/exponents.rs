use serde::{Deserialize, Serialize};

/// Small parameter in the `Z` and `K` presets.
pub const PRESET_EPS: f64 = 1e-3;

/// Mixed-norm exponents `L^p_x L^q_t` with a derivative order `s`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentPair {
    pub s: f64,
    pub r: f64,
    pub p: f64,
    pub q: f64,
    /// Set when a solved exponent is nonpositive or infinite.
    pub degenerate: bool,
}

fn solve(s: f64, rhs: f64) -> (f64, f64) {
    // [2 1; −1 2]·(1/p, 1/q) = (rhs, s), inverse (1/5)[2 −1; 1 2]
    let ip = (2.0 * rhs - s) / 5.0;
    let iq = (rhs + 2.0 * s) / 5.0;
    (1.0 / ip, 1.0 / iq)
}

fn pair(s: f64, r: f64, rhs: f64) -> ExponentPair {
    let (p, q) = solve(s, rhs);
    let bad = |x: f64| !(x > 0.0) || !x.is_finite();
    ExponentPair { s, r, p, q, degenerate: bad(p) || bad(q) }
}

/// `2/p + 1/q = 1/r`, `−1/p + 2/q = s`.
pub fn exponents_x(s: f64, r: f64) -> ExponentPair {
    pair(s, r, 1.0 / r)
}

/// `2/p̃ + 1/q̃ = 2 + 1/r`, `−1/p̃ + 2/q̃ = s`.
pub fn exponents_y(s: f64, r: f64) -> ExponentPair {
    pair(s, r, 2.0 + 1.0 / r)
}

pub fn is_acceptable(s: f64, r: f64) -> bool {
    let ir = 1.0 / r;
    if !(ir >= 0.0 && ir < 0.75) {
        return false;
    }
    if ir <= 0.5 {
        s >= -0.5 * ir && s <= 2.0 * ir
    } else {
        s > 2.0 * ir - 1.25 && s < 2.5 - 3.0 * ir
    }
}

/// `(1 − s, r′)` is acceptable.
pub fn is_conjugate_acceptable(s: f64, r: f64) -> bool {
    let ir = 1.0 / r;
    let r_conj = 1.0 / (1.0 - ir);
    is_acceptable(1.0 - s, r_conj)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Preset {
    S,
    L,
    Z,
    K,
    N,
}

impl Preset {
    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "S" => Some(Preset::S),
            "L" => Some(Preset::L),
            "Z" => Some(Preset::Z),
            "K" => Some(Preset::K),
            "N" => Some(Preset::N),
            _ => None,
        }
    }

    /// Derivative order `s(·, α)`.
    pub fn s(&self, alpha: f64) -> f64 {
        match self {
            Preset::S => 0.0,
            Preset::L | Preset::N => 1.0 / (3.0 * alpha),
            Preset::Z => 2.5 - 3.0 / alpha - PRESET_EPS,
            Preset::K => 2.0 / alpha - 1.25 + PRESET_EPS,
        }
    }

    /// `X(s, α)` for `S, L, Z, K`; `N = Y(s(L), α)`.
    pub fn exponents(&self, alpha: f64) -> ExponentPair {
        match self {
            Preset::N => exponents_y(self.s(alpha), alpha),
            _ => exponents_x(self.s(alpha), alpha),
        }
    }
}
