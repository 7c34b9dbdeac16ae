//! JSON problem files.
//!
//! A distribution is `{"probs": [...]}`, a joint is `{"joint": [[...], ...]}`
//! (rows over the first system) and a Hamiltonian is
//! `{"energies": [...], "beta": b}` with `beta` defaulting to 1. Entries may
//! be numbers or `"a/b"` strings; the latter stay exact under the rational
//! backend.
//!
//! A problem file is one object. Single-distribution commands read its
//! top-level `probs`; two-state commands read `p` and `q`. The Hamiltonian
//! is either top-level (`energies`, `beta`) or nested under `ctx`.

use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use corrcat_core::{BipartiteDist, Dist, Rational, Scalar, ThermalContext};
use serde::Deserialize;

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Num {
    Float(f64),
    Text(String),
}

impl Num {
    fn parts(&self) -> Result<Option<(i64, i64)>> {
        match self {
            Num::Float(x) if x.fract() == 0.0 && x.abs() < 1e15 => Ok(Some((*x as i64, 1))),
            Num::Float(_) => Ok(None),
            Num::Text(s) => {
                let s = s.trim();
                let (a, b) = s.split_once('/').unwrap_or((s, "1"));
                match (a.trim().parse::<i64>(), b.trim().parse::<i64>()) {
                    (Ok(a), Ok(b)) if b != 0 => Ok(Some((a, b))),
                    (Ok(_), Ok(_)) => bail!("zero denominator in '{s}'"),
                    _ => {
                        // decimal text is accepted but is not exact
                        s.parse::<f64>().map_err(|_| anyhow!("bad number '{s}'"))?;
                        Ok(None)
                    }
                }
            }
        }
    }

    pub fn to_f64(&self) -> Result<f64> {
        match self {
            Num::Float(x) => Ok(*x),
            Num::Text(s) => match self.parts()? {
                Some((a, b)) => Ok(a as f64 / b as f64),
                None => Ok(s.trim().parse::<f64>()?),
            },
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
pub struct DistJson {
    pub probs: Vec<Num>,
}

impl DistJson {
    pub fn to_f64(&self) -> Result<Dist> {
        let v = self.probs.iter().map(Num::to_f64).collect::<Result<Vec<_>>>()?;
        Ok(Dist::new(v)?)
    }

    /// Exact when every entry is an integer or a fraction string; otherwise
    /// the float values are taken literally and the last entry absorbs the
    /// rounding residue.
    pub fn to_rational(&self) -> Result<Dist<Rational>> {
        let parts = self.probs.iter().map(Num::parts).collect::<Result<Vec<_>>>()?;
        if parts.iter().all(Option::is_some) {
            let v: Vec<Rational> = parts.into_iter().map(|p| p.unwrap()).map(|(a, b)| Rational::from_ratio(a, b)).collect();
            return Ok(Dist::new(v)?);
        }
        Ok(self.to_f64()?.to_rational())
    }
}

#[derive(Debug, Clone, Deserialize)]
pub struct CtxJson {
    pub energies: Vec<Num>,
    #[serde(default = "one")]
    pub beta: f64,
}

fn one() -> f64 {
    1.0
}

impl CtxJson {
    pub fn build(&self) -> Result<ThermalContext> {
        let e = self.energies.iter().map(Num::to_f64).collect::<Result<Vec<_>>>()?;
        Ok(ThermalContext::new(e, self.beta)?)
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Problem {
    pub probs: Option<Vec<Num>>,
    pub p: Option<DistJson>,
    pub q: Option<DistJson>,
    pub energies: Option<Vec<Num>>,
    pub beta: Option<f64>,
    pub ctx: Option<CtxJson>,
    pub joint: Option<Vec<Vec<Num>>>,
    pub sigma_m: Option<DistJson>,
}

impl Problem {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).context("parsing problem JSON")
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&text)
    }

    pub fn single(&self) -> Result<DistJson> {
        match (&self.probs, &self.p) {
            (Some(v), _) => Ok(DistJson { probs: v.clone() }),
            (None, Some(p)) => Ok(p.clone()),
            _ => bail!("input needs \"probs\""),
        }
    }

    pub fn pair(&self) -> Result<(DistJson, DistJson)> {
        match (&self.p, &self.q) {
            (Some(p), Some(q)) => Ok((p.clone(), q.clone())),
            _ => bail!("input needs \"p\" and \"q\""),
        }
    }

    /// The Hamiltonian if one is given.
    pub fn context(&self) -> Result<Option<ThermalContext>> {
        if self.ctx.is_some() && self.energies.is_some() {
            bail!("give the Hamiltonian either at top level or under \"ctx\", not both");
        }
        if let Some(c) = &self.ctx {
            return Ok(Some(c.build()?));
        }
        if let Some(e) = &self.energies {
            let c = CtxJson {
                energies: e.clone(),
                beta: self.beta.unwrap_or(1.0),
            };
            return Ok(Some(c.build()?));
        }
        if self.beta.is_some() {
            bail!("\"beta\" given without \"energies\"");
        }
        Ok(None)
    }

    /// The Hamiltonian, or the trivial one on `dim` levels.
    pub fn context_or_trivial(&self, dim: usize) -> Result<ThermalContext> {
        Ok(self.context()?.unwrap_or_else(|| ThermalContext::trivial(dim)))
    }

    pub fn joint(&self) -> Result<Option<BipartiteDist>> {
        let Some(rows) = &self.joint else { return Ok(None) };
        let rows = rows
            .iter()
            .map(|r| r.iter().map(Num::to_f64).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Ok(Some(BipartiteDist::new(rows)?))
    }
}
