//! Sample sets of α values.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::entropy::Alpha;
use crate::error::{Error, Result};
use crate::math::{exp, ln};

#[derive(Debug, Clone, PartialEq)]
pub struct AlphaGrid {
    points: Vec<Alpha>,
    description: String,
}

impl AlphaGrid {
    /// Geometric grids on `±[1e-3, 1e3]` (200 points each side), a linear
    /// grid on `[0.01, 3]` with step 0.01, a finer step of 0.005 on
    /// `[0.8, 1.2]`, plus `α = 1`, `±∞` and Burg.
    pub fn standard() -> Self {
        let mut xs = Vec::new();
        for x in geomspace(1e-3, 1e3, 200) {
            xs.push(x);
            xs.push(-x);
        }
        xs.extend(linspace(0.01, 3.0, 300));
        xs.extend(linspace(0.8, 1.2, 81));
        xs.push(1.0);
        let mut g = Self::from_values(xs, true);
        g.description = "standard: +-geom[1e-3,1e3]x200, lin[0.01,3]/0.01, lin[0.8,1.2]/0.005, +-inf, burg".into();
        g
    }

    /// Builds a grid from finite values. Values are sorted and deduplicated;
    /// `limits` appends `-∞`, `+∞` and Burg.
    pub fn from_values(mut xs: Vec<f64>, limits: bool) -> Self {
        xs.retain(|x| !x.is_nan());
        for x in xs.iter_mut() {
            // grid arithmetic lands next to the closed-form orders
            if (*x - 1.0).abs() < 1e-12 {
                *x = 1.0;
            } else if x.abs() < 1e-15 {
                *x = 0.0;
            }
        }
        xs.sort_by(f64::total_cmp);
        xs.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs().max(1e-300));
        let mut points: Vec<Alpha> = Vec::with_capacity(xs.len() + 3);
        if limits {
            points.push(Alpha::MinusInf);
        }
        points.extend(xs.iter().map(|&x| Alpha::from_f64(x).expect("not NaN")));
        if limits {
            points.push(Alpha::PlusInf);
            points.push(Alpha::Burg);
        }
        AlphaGrid {
            description: alloc::format!("{} points", points.len()),
            points,
        }
    }

    pub fn from_alphas(points: Vec<Alpha>) -> Self {
        AlphaGrid {
            description: alloc::format!("{} points", points.len()),
            points,
        }
    }

    /// Parses a `+`-separated list of parts:
    ///
    /// * `standard`
    /// * `lin:a:b:n` and `geom:a:b:n` (both inclusive, `n >= 2`)
    /// * plain numbers, `inf`, `-inf`, `burg`
    pub fn parse(spec: &str) -> Result<Self> {
        let mut xs = Vec::new();
        let mut extra = Vec::new();
        for part in spec.split(['+', ',']) {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            if part == "standard" {
                for a in Self::standard().points {
                    match a {
                        Alpha::Burg | Alpha::MinusInf | Alpha::PlusInf => extra.push(a),
                        other => xs.push(other.value().expect("numeric")),
                    }
                }
            } else if let Some(rest) = part.strip_prefix("lin:") {
                let (a, b, n) = range_args(rest)?;
                xs.extend(linspace(a, b, n));
            } else if let Some(rest) = part.strip_prefix("geom:") {
                let (a, b, n) = range_args(rest)?;
                if a <= 0.0 || b <= 0.0 {
                    return Err(Error::BadShape("geom range must be positive".into()));
                }
                xs.extend(geomspace(a, b, n));
            } else {
                match part {
                    "burg" => extra.push(Alpha::Burg),
                    "inf" | "+inf" => extra.push(Alpha::PlusInf),
                    "-inf" => extra.push(Alpha::MinusInf),
                    num => xs.push(
                        num.parse::<f64>()
                            .map_err(|_| Error::BadShape(alloc::format!("bad alpha '{num}'")))?,
                    ),
                }
            }
        }
        let mut g = Self::from_values(xs, false);
        let has_minus = extra.contains(&Alpha::MinusInf);
        if has_minus {
            g.points.insert(0, Alpha::MinusInf);
        }
        for special in [Alpha::PlusInf, Alpha::Burg] {
            if extra.contains(&special) {
                g.points.push(special);
            }
        }
        if g.points.is_empty() {
            return Err(Error::BadShape("empty alpha grid".into()));
        }
        g.description = spec.to_string();
        Ok(g)
    }

    pub fn points(&self) -> &[Alpha] {
        &self.points
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

impl Default for AlphaGrid {
    fn default() -> Self {
        Self::standard()
    }
}

fn range_args(s: &str) -> Result<(f64, f64, usize)> {
    let parts: Vec<&str> = s.split(':').collect();
    let bad = || Error::BadShape(alloc::format!("bad range '{s}'"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let a: f64 = parts[0].parse().map_err(|_| bad())?;
    let b: f64 = parts[1].parse().map_err(|_| bad())?;
    let n: usize = parts[2].parse().map_err(|_| bad())?;
    if n < 2 || !(a < b) {
        return Err(bad());
    }
    Ok((a, b, n))
}

pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return alloc::vec![a];
    }
    (0..n)
        .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
        .collect()
}

pub fn geomspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    let (la, lb) = (ln(a), ln(b));
    linspace(la, lb, n).into_iter().map(exp).collect()
}
