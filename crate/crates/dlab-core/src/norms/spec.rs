use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use super::cells::ScaleWindow;
use super::exponents::Preset;
use super::morrey::{check_alpha_sigma, ell, lhat_norm, morrey_norm};
use super::spacetime::{x_norm, y_norm};
use crate::error::{invalid, Result};
use crate::spectral_core::{GridFunction, SpaceTimeField};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormKind {
    Lhat,
    MorreyHat,
    Ell,
    SpacetimeX,
    SpacetimeY,
}

impl NormKind {
    fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "lhat" => NormKind::Lhat,
            "morrey_hat" => NormKind::MorreyHat,
            "ell" => NormKind::Ell,
            "spacetime_X" | "spacetime_x" => NormKind::SpacetimeX,
            "spacetime_Y" | "spacetime_y" => NormKind::SpacetimeY,
            _ => return None,
        })
    }

    fn name(&self) -> &'static str {
        match self {
            NormKind::Lhat => "lhat",
            NormKind::MorreyHat => "morrey_hat",
            NormKind::Ell => "ell",
            NormKind::SpacetimeX => "spacetime_X",
            NormKind::SpacetimeY => "spacetime_Y",
        }
    }
}

/// Which norm to evaluate, with its exponents and dyadic window.
///
/// Text form is one `key=value` per line (or comma separated); keys are
/// `kind, p, q, r, s, sigma, alpha, j_min, j_max, preset`, and `inf` spells ∞.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormSpec {
    pub kind: NormKind,
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub r: Option<f64>,
    pub s: Option<f64>,
    pub sigma: Option<f64>,
    pub alpha: Option<f64>,
    pub j_min: Option<i32>,
    pub j_max: Option<i32>,
    pub preset: Option<Preset>,
}

fn parse_real(key: &str, v: &str) -> Result<f64> {
    match v {
        "inf" | "∞" | "infinity" => Ok(f64::INFINITY),
        _ => v.parse::<f64>().or_else(|_| invalid(format!("{key}: cannot parse '{v}' as a number"))),
    }
}

fn fmt_real(v: f64) -> String {
    if v.is_infinite() {
        "inf".into()
    } else {
        format!("{v}")
    }
}

impl NormSpec {
    pub fn new(kind: NormKind) -> Self {
        NormSpec { kind, p: None, q: None, r: None, s: None, sigma: None, alpha: None, j_min: None, j_max: None, preset: None }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut kv = BTreeMap::new();
        for item in text.split(['\n', ',', ';']) {
            let item = item.trim();
            if item.is_empty() || item.starts_with('#') {
                continue;
            }
            let Some((k, v)) = item.split_once('=') else {
                return invalid(format!("expected key=value, got '{item}'"));
            };
            if kv.insert(k.trim().to_string(), v.trim().to_string()).is_some() {
                return invalid(format!("duplicate key '{}'", k.trim()));
            }
        }
        let kind = match kv.remove("kind") {
            Some(k) => NormKind::parse(&k).ok_or_else(|| crate::Error::InvalidArgument(format!("unknown norm kind '{k}'")))?,
            None => return invalid("missing 'kind'"),
        };
        let mut spec = NormSpec::new(kind);
        for (k, v) in kv {
            match k.as_str() {
                "p" => spec.p = Some(parse_real(&k, &v)?),
                "q" => spec.q = Some(parse_real(&k, &v)?),
                "r" => spec.r = Some(parse_real(&k, &v)?),
                "s" => spec.s = Some(parse_real(&k, &v)?),
                "sigma" => spec.sigma = Some(parse_real(&k, &v)?),
                "alpha" => spec.alpha = Some(parse_real(&k, &v)?),
                "j_min" => spec.j_min = Some(v.parse().or_else(|_| invalid(format!("j_min: bad integer '{v}'")))?),
                "j_max" => spec.j_max = Some(v.parse().or_else(|_| invalid(format!("j_max: bad integer '{v}'")))?),
                "preset" => {
                    spec.preset = Some(Preset::parse(&v).ok_or_else(|| crate::Error::InvalidArgument(format!("unknown preset '{v}'")))?)
                }
                _ => return invalid(format!("unknown key '{k}'")),
            }
        }
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_text(&self) -> String {
        let mut out = vec![format!("kind={}", self.kind.name())];
        let mut push = |k: &str, v: Option<f64>| {
            if let Some(v) = v {
                out.push(format!("{k}={}", fmt_real(v)));
            }
        };
        push("p", self.p);
        push("q", self.q);
        push("r", self.r);
        push("s", self.s);
        push("sigma", self.sigma);
        push("alpha", self.alpha);
        if let Some(j) = self.j_min {
            out.push(format!("j_min={j}"));
        }
        if let Some(j) = self.j_max {
            out.push(format!("j_max={j}"));
        }
        if let Some(p) = self.preset {
            out.push(format!("preset={p:?}"));
        }
        out.join("\n") + "\n"
    }

    pub fn window(&self) -> Result<ScaleWindow> {
        match (self.j_min, self.j_max) {
            (None, None) => Ok(ScaleWindow::All),
            (Some(j_min), Some(j_max)) => {
                let w = ScaleWindow::Range { j_min, j_max };
                w.validate()?;
                Ok(w)
            }
            _ => invalid("give both j_min and j_max, or neither"),
        }
    }

    fn need(v: Option<f64>, name: &str, kind: NormKind) -> Result<f64> {
        v.ok_or_else(|| crate::Error::InvalidArgument(format!("{} needs '{name}'", kind.name())))
    }

    /// `(s, r)` of a space-time norm, expanding presets.
    pub fn spacetime_indices(&self) -> Result<(f64, f64)> {
        if let Some(p) = self.preset {
            let a = Self::need(self.alpha, "alpha", self.kind)?;
            return Ok((p.s(a), a));
        }
        Ok((Self::need(self.s, "s", self.kind)?, Self::need(self.r, "r", self.kind)?))
    }

    pub fn validate(&self) -> Result<()> {
        self.window()?;
        match self.kind {
            NormKind::Lhat => {
                Self::need(self.r, "r", self.kind)?;
            }
            NormKind::MorreyHat => {
                let p = Self::need(self.p, "p", self.kind)?;
                let q = Self::need(self.q, "q", self.kind)?;
                let r = Self::need(self.r, "r", self.kind)?;
                if !(1.0 <= p && p <= q && r > 0.0) {
                    return invalid(format!("morrey_hat needs 1 ≤ p ≤ q and r > 0, got ({p}, {q}, {r})"));
                }
                if q == 2.0 && p > 4.0 / 3.0 && p < 2.0 {
                    check_alpha_sigma(p, r)?;
                }
            }
            NormKind::Ell => {
                check_alpha_sigma(Self::need(self.alpha, "alpha", self.kind)?, Self::need(self.sigma, "sigma", self.kind)?)?;
            }
            NormKind::SpacetimeX | NormKind::SpacetimeY => {
                self.spacetime_indices()?;
                if self.preset == Some(Preset::N) && self.kind == NormKind::SpacetimeX {
                    return invalid("preset N is a Y-type norm");
                }
            }
        }
        Ok(())
    }

    /// Evaluates a function-space norm.
    pub fn eval_function(&self, f: &GridFunction) -> Result<f64> {
        self.validate()?;
        let w = self.window()?;
        match self.kind {
            NormKind::Lhat => lhat_norm(f, self.r.unwrap()),
            NormKind::MorreyHat => morrey_norm(f, self.p.unwrap(), self.q.unwrap(), self.r.unwrap(), w),
            NormKind::Ell => Ok(ell(f, self.alpha.unwrap(), self.sigma.unwrap(), w)?.value),
            _ => invalid(format!("{} is a space-time norm", self.kind.name())),
        }
    }

    /// Evaluates a space-time norm.
    pub fn eval_field(&self, f: &SpaceTimeField) -> Result<f64> {
        self.validate()?;
        let (s, r) = self.spacetime_indices()?;
        match self.kind {
            NormKind::SpacetimeX => x_norm(f, s, r),
            NormKind::SpacetimeY => y_norm(f, s, r),
            _ => invalid(format!("{} is not a space-time norm", self.kind.name())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        let s = NormSpec::parse("kind=morrey_hat\np=1.6\nq=2\nr=3\nj_min=-5\nj_max=4\n").unwrap();
        assert_eq!(s.window().unwrap(), ScaleWindow::Range { j_min: -5, j_max: 4 });
        assert_eq!(NormSpec::parse(&s.to_text()).unwrap(), s);
        let l = NormSpec::parse("kind=spacetime_X, preset=L, alpha=1.8").unwrap();
        let (s_l, r) = l.spacetime_indices().unwrap();
        assert!((s_l - 1.0 / 5.4).abs() < 1e-15 && r == 1.8);
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(NormSpec::parse("p=2").is_err());
        assert!(NormSpec::parse("kind=lhat").is_err());
        assert!(NormSpec::parse("kind=lhat,r=2,bogus=1").is_err());
        assert!(NormSpec::parse("kind=morrey_hat,p=1.6,q=2,r=2").is_err());
        assert!(NormSpec::parse("kind=ell,alpha=1.6,sigma=3,j_min=3").is_err());
        assert!(NormSpec::parse("kind=lhat,r=inf").unwrap().r.unwrap().is_infinite());
    }
}
