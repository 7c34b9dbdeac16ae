//! Rényi entropies and divergences, Burg entropy, α-free energies and
//! mutual information. Natural logarithms throughout.
//!
//! Sign conventions. For α < 0 the entropy carries the factor `sgn(α) = -1`,
//! so `H_α(uniform(m)) = -log m` there and `H_{-∞}(p) = log min p_i`. A zero
//! entry makes every negative-order entropy `-∞`. Divergences use `sgn⁺`,
//! which is `+1` on `[0, ∞]` and `-1` on `[-∞, 0)`.

use alloc::vec::Vec;
use core::fmt;

use crate::dist::{BipartiteDist, Dist};
use crate::error::{Error, Result};
use crate::extended::ExtendedReal;
use crate::math::{exp, ln, logsumexp};

/// The order of an entropy, or the Burg marker.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Alpha {
    MinusInf,
    /// Any real order other than 0 and 1.
    Finite(f64),
    Zero,
    One,
    PlusInf,
    Burg,
}

impl Alpha {
    /// Normalizes `0`, `1` and `±inf` onto their dedicated tags.
    pub fn from_f64(x: f64) -> Result<Self> {
        if x.is_nan() {
            Err(Error::UnsupportedAlpha("NaN"))
        } else if x == f64::INFINITY {
            Ok(Alpha::PlusInf)
        } else if x == f64::NEG_INFINITY {
            Ok(Alpha::MinusInf)
        } else if x == 0.0 {
            Ok(Alpha::Zero)
        } else if x == 1.0 {
            Ok(Alpha::One)
        } else {
            Ok(Alpha::Finite(x))
        }
    }

    /// Numeric value; `None` for Burg.
    pub fn value(self) -> Option<f64> {
        match self {
            Alpha::MinusInf => Some(f64::NEG_INFINITY),
            Alpha::Finite(a) => Some(a),
            Alpha::Zero => Some(0.0),
            Alpha::One => Some(1.0),
            Alpha::PlusInf => Some(f64::INFINITY),
            Alpha::Burg => None,
        }
    }

    /// `Finite` values that are really `0`, `1` or infinite moved onto their
    /// tags.
    pub fn canonical(self) -> Self {
        match self {
            Alpha::Finite(x) => Alpha::from_f64(x).unwrap_or(self),
            a => a,
        }
    }

    pub fn is_negative(self) -> bool {
        matches!(self.value(), Some(a) if a < 0.0)
    }
}

impl fmt::Display for Alpha {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Alpha::MinusInf => write!(f, "-inf"),
            Alpha::Finite(a) => write!(f, "{a}"),
            Alpha::Zero => write!(f, "0"),
            Alpha::One => write!(f, "1"),
            Alpha::PlusInf => write!(f, "inf"),
            Alpha::Burg => write!(f, "burg"),
        }
    }
}

/// Energy levels at a fixed inverse temperature, with the Gibbs state.
#[derive(Debug, Clone, PartialEq)]
pub struct ThermalContext {
    energies: Vec<f64>,
    beta: f64,
    gibbs: Dist,
    log_z: f64,
}

impl ThermalContext {
    pub fn new(energies: Vec<f64>, beta: f64) -> Result<Self> {
        if energies.is_empty() {
            return Err(Error::EmptyInput);
        }
        if !(beta > 0.0) || !beta.is_finite() {
            return Err(Error::OutOfRange {
                what: "beta",
                value: beta,
            });
        }
        if energies.iter().any(|e| !e.is_finite()) {
            return Err(Error::NonFinite);
        }
        let logs: Vec<f64> = energies.iter().map(|e| -beta * e).collect();
        let log_z = logsumexp(&logs);
        let gibbs = Dist::new(logs.iter().map(|l| exp(l - log_z)).collect())?;
        Ok(ThermalContext {
            energies,
            beta,
            gibbs,
            log_z,
        })
    }

    /// All energies zero; the Gibbs state is uniform.
    pub fn trivial(m: usize) -> Self {
        Self::new(alloc::vec![0.0; m], 1.0).expect("trivial Hamiltonian is valid")
    }

    /// The Hamiltonian of two non-interacting systems, `H_A ⊗ 1 + 1 ⊗ H_B`,
    /// flattened row-major.
    pub fn compose(&self, other: &ThermalContext) -> Result<Self> {
        if self.beta != other.beta {
            return Err(Error::OutOfRange {
                what: "beta mismatch",
                value: other.beta,
            });
        }
        let mut e = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.energies {
            for b in &other.energies {
                e.push(a + b);
            }
        }
        Self::new(e, self.beta)
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// `k_B T = 1/β`.
    pub fn kt(&self) -> f64 {
        1.0 / self.beta
    }

    pub fn gibbs(&self) -> &Dist {
        &self.gibbs
    }

    pub fn log_z(&self) -> f64 {
        self.log_z
    }

    pub fn dim(&self) -> usize {
        self.energies.len()
    }
}

/// Rényi entropy `H_α(p)`; Burg is forwarded to [`burg_entropy`].
pub fn renyi_entropy(p: &Dist, alpha: Alpha) -> ExtendedReal {
    let probs = p.probs();
    let has_zero = probs.contains(&0.0);
    match alpha.canonical() {
        Alpha::Burg => burg_entropy(p),
        Alpha::Zero => ExtendedReal::Finite(ln(p.support_size() as f64)),
        Alpha::One => ExtendedReal::Finite(shannon(probs)),
        Alpha::PlusInf => {
            let max = probs.iter().copied().fold(0.0, f64::max);
            ExtendedReal::Finite(-ln(max))
        }
        Alpha::MinusInf => {
            if has_zero {
                ExtendedReal::NegInf
            } else {
                let min = probs.iter().copied().fold(f64::INFINITY, f64::min);
                ExtendedReal::Finite(ln(min))
            }
        }
        Alpha::Finite(a) => {
            if a < 0.0 && has_zero {
                return ExtendedReal::NegInf;
            }
            let terms: Vec<f64> = probs
                .iter()
                .filter(|&&x| x > 0.0)
                .map(|&x| a * ln(x))
                .collect();
            let sgn = if a > 0.0 { 1.0 } else { -1.0 };
            ExtendedReal::Finite(sgn * logsumexp(&terms) / (1.0 - a))
        }
    }
}

/// Shannon entropy with `0 log 0 = 0`.
pub fn shannon(probs: &[f64]) -> f64 {
    probs
        .iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| -x * ln(x))
        .sum()
}

/// `H_Burg(p) = (1/m) Σ log p_i`, `-∞` when some entry vanishes.
pub fn burg_entropy(p: &Dist) -> ExtendedReal {
    if !p.is_full_rank() {
        return ExtendedReal::NegInf;
    }
    let s: f64 = p.probs().iter().map(|&x| ln(x)).sum();
    ExtendedReal::Finite(s / p.dim() as f64)
}

/// Rényi divergence `S_α(p‖q)` with the limit cases at `α ∈ {-∞, 0, 1, ∞}`.
pub fn renyi_divergence(p: &Dist, q: &Dist, alpha: Alpha) -> Result<ExtendedReal> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            found: q.dim(),
        });
    }
    let (pp, qq) = (p.probs(), q.probs());
    Ok(match alpha.canonical() {
        Alpha::Burg => return Err(Error::UnsupportedAlpha("Burg has no divergence")),
        Alpha::Zero => {
            let s: f64 = pp
                .iter()
                .zip(qq)
                .filter(|(&a, _)| a > 0.0)
                .map(|(_, &b)| b)
                .sum();
            if s == 0.0 {
                ExtendedReal::PosInf
            } else {
                ExtendedReal::Finite(-ln(s))
            }
        }
        Alpha::One => {
            let mut s = 0.0;
            for (&a, &b) in pp.iter().zip(qq) {
                if a > 0.0 {
                    if b == 0.0 {
                        return Ok(ExtendedReal::PosInf);
                    }
                    s += a * (ln(a) - ln(b));
                }
            }
            ExtendedReal::Finite(s)
        }
        Alpha::PlusInf => max_log_ratio(pp, qq),
        Alpha::MinusInf => max_log_ratio(qq, pp),
        Alpha::Finite(a) => {
            let mut terms = Vec::with_capacity(pp.len());
            for (&x, &y) in pp.iter().zip(qq) {
                match (x > 0.0, y > 0.0) {
                    (true, true) => terms.push(a * ln(x) + (1.0 - a) * ln(y)),
                    // 0^(1-α) with α > 1 blows up
                    (true, false) if a > 1.0 => return Ok(ExtendedReal::PosInf),
                    // 0^α with α < 0 blows up
                    (false, true) if a < 0.0 => return Ok(ExtendedReal::PosInf),
                    _ => {}
                }
            }
            let lse = logsumexp(&terms);
            if lse == f64::NEG_INFINITY {
                // disjoint supports, only possible for 0 < α < 1 or α < 0
                return Ok(ExtendedReal::PosInf);
            }
            let sgn_plus = if a >= 0.0 { 1.0 } else { -1.0 };
            ExtendedReal::Finite(sgn_plus * lse / (a - 1.0))
        }
    })
}

fn max_log_ratio(p: &[f64], q: &[f64]) -> ExtendedReal {
    let mut best = f64::NEG_INFINITY;
    for (&a, &b) in p.iter().zip(q) {
        if a > 0.0 {
            if b == 0.0 {
                return ExtendedReal::PosInf;
            }
            best = best.max(ln(a) - ln(b));
        }
    }
    ExtendedReal::Finite(best)
}

/// `F_α(p) = -kT log Z + kT S_α(p‖γ)` in the units of the context's energies.
pub fn free_energy_alpha(p: &Dist, ctx: &ThermalContext, alpha: Alpha) -> Result<ExtendedReal> {
    let s = renyi_divergence(p, ctx.gibbs(), alpha)?;
    let kt = ctx.kt();
    Ok(s.scale(kt)
        .checked_add(ExtendedReal::Finite(-kt * ctx.log_z()))
        .expect("finite offset"))
}

/// Helmholtz free energy `F = F_1`.
pub fn helmholtz(p: &Dist, ctx: &ThermalContext) -> Result<f64> {
    Ok(free_energy_alpha(p, ctx, Alpha::One)?.to_f64())
}

/// `ΔF_α / kT` for heating a qubit with gap `log 2` (in units of kT) from
/// its Gibbs state `(2/3, 1/3)` to `(1/2, 1/2)` while a work bit of gap
/// `delta` (also in kT) drops from excited to ground.
pub fn delta_f_alpha_example(alpha: Alpha, delta: f64) -> Result<f64> {
    let l2 = core::f64::consts::LN_2;
    let l3 = ln(3.0);
    let base = match alpha.canonical() {
        Alpha::One => l3 - 1.5 * l2,
        Alpha::PlusInf => ln(1.5),
        Alpha::Zero => 0.0,
        Alpha::Finite(a) if a > 0.0 => {
            let num = ln(exp((1.0 - a) * l2) + 1.0) - a * l2 + (a - 1.0) * l3;
            num / (a - 1.0)
        }
        _ => return Err(Error::UnsupportedAlpha("example defined for alpha >= 0")),
    };
    Ok(base - delta)
}

/// `I(A:B) = S(joint ‖ marginal_A ⊗ marginal_B)`.
pub fn mutual_information(j: &BipartiteDist) -> f64 {
    let a = j.marginal_a();
    let b = j.marginal_b();
    let (rows, cols) = j.dims();
    let mut s = 0.0;
    for i in 0..rows {
        for k in 0..cols {
            let x = *j.entry(i, k);
            if x > 0.0 {
                s += x * (ln(x) - ln(a.probs()[i]) - ln(b.probs()[k]));
            }
        }
    }
    s.max(0.0)
}
