//! Correlated catalysis.
//!
//! For a full-rank `q ∈ R^m`, `0 < δ < ½ min q_i` and `n ≥ 1` the extension
//! `q_AB` is the `m × (n² + n + 1)` matrix whose row `i` is
//!
//! ```text
//! δ | δ/n² (n² times) | (q_i - 2δ)/n (n times)
//! ```
//!
//! Its A-marginal is `q`; its B-marginal is `(mδ, mδ/n² ×n², (1-2mδ)/n ×n)`.
//! The entropy balance `Δ_n^(α) = H_α(q_AB) - H_α(p) - H_α(q_B)` has a
//! closed form that only involves `log n`, so parameters with `n` up to
//! `10^18` can be assessed without building the matrix.

use alloc::string::String;
use alloc::vec::Vec;

use crate::dist::{tensor, BipartiteDist, Dist};
use crate::entropy::{mutual_information, renyi_entropy, shannon, Alpha};
use crate::error::{Error, Result};
use crate::extended::ExtendedReal;
use crate::grid::AlphaGrid;
use crate::majorization::{catalyst_search, majorizes_slices, sort_perm_desc, trumping_conditions};
use crate::math::{ln, logsumexp};
use crate::scalar::{Rational, Scalar};
use crate::tolerance::Tolerances;

/// Largest `n` accepted by [`ExtensionParams`].
pub const MAX_N: u64 = 1_000_000_000_000_000_000;

/// Largest matrix (in entries) that [`build_extension`] will allocate.
pub const MATERIALIZE_CAP: u128 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtensionParams {
    pub delta: f64,
    pub n: u64,
}

impl ExtensionParams {
    pub fn new(delta: f64, n: u64) -> Result<Self> {
        if !(delta > 0.0) || !delta.is_finite() {
            return Err(Error::DeltaOutOfRange { delta, bound: f64::NAN });
        }
        if n == 0 || n > MAX_N {
            return Err(Error::OutOfRange {
                what: "extension size n",
                value: n as f64,
            });
        }
        Ok(ExtensionParams { delta, n })
    }

    /// `n² + n + 1`, the dimension of B.
    pub fn b_dim(&self) -> u128 {
        let n = self.n as u128;
        n * n + n + 1
    }

    fn check_against(&self, q: &Dist) -> Result<()> {
        if !q.is_full_rank() {
            return Err(Error::RankDeficient);
        }
        let bound = delta_bound(q);
        if !(self.delta < bound) {
            return Err(Error::DeltaOutOfRange {
                delta: self.delta,
                bound,
            });
        }
        Ok(())
    }
}

/// `½ min q_i`, the exclusive upper bound on δ.
pub fn delta_bound(q: &Dist) -> f64 {
    0.5 * q.probs().iter().copied().fold(f64::INFINITY, f64::min)
}

/// Materializes `q_AB` for full-rank `q`.
pub fn build_extension(q: &Dist, params: &ExtensionParams) -> Result<BipartiteDist> {
    params.check_against(q)?;
    let delta = params.delta;
    build_extension_generic(q, delta, params.n)
}

/// Exact version of [`build_extension`]; marginals are exact.
pub fn build_extension_exact(q: &Dist<Rational>, delta: &Rational, n: u64) -> Result<BipartiteDist<Rational>> {
    if !q.is_full_rank() {
        return Err(Error::RankDeficient);
    }
    let min = q
        .probs()
        .iter()
        .cloned()
        .fold(None::<Rational>, |a, b| Some(a.map_or(b.clone(), |a| Rational::min_of(a, b))))
        .expect("non-empty");
    let two = Rational::from_u64(2);
    if *delta <= Rational::from_u64(0) || delta.clone() * two >= min {
        return Err(Error::DeltaOutOfRange {
            delta: delta.to_f64(),
            bound: min.to_f64() / 2.0,
        });
    }
    if n == 0 {
        return Err(Error::OutOfRange {
            what: "extension size n",
            value: 0.0,
        });
    }
    build_extension_generic(q, delta.clone(), n)
}

pub(crate) fn build_extension_generic<T: Scalar>(q: &Dist<T>, delta: T, n: u64) -> Result<BipartiteDist<T>> {
    let m = q.dim() as u128;
    let nn = n as u128;
    let cols = nn * nn + nn + 1;
    let size = m * cols;
    if size > MATERIALIZE_CAP {
        return Err(Error::TooLargeToMaterialize {
            size,
            cap: MATERIALIZE_CAP,
        });
    }
    let cols = cols as usize;
    let n_t = T::from_u64(n);
    let small = delta.clone() / (n_t.clone() * n_t.clone());
    let two_delta = delta.clone() + delta.clone();
    let mut joint = Vec::with_capacity(size as usize);
    for qi in q.probs() {
        joint.push(delta.clone());
        for _ in 0..n * n {
            joint.push(small.clone());
        }
        let big = (qi.clone() - two_delta.clone()) / n_t.clone();
        for _ in 0..n {
            joint.push(big.clone());
        }
    }
    Ok(BipartiteDist::from_flat_unchecked(joint, q.dim(), cols))
}

/// Closed form of `I(A:B)` in `q_AB`; independent of `n`.
pub fn extension_mutual_information(q: &Dist, delta: f64) -> Result<f64> {
    ExtensionParams::new(delta, 1)?.check_against(q)?;
    let m = q.dim() as f64;
    let md = 2.0 * m * delta;
    let mut s = 0.0;
    for &qi in q.probs() {
        let r = qi - 2.0 * delta;
        s += r * ln(r) - qi * ln(qi);
    }
    s -= md * ln(m);
    s -= (1.0 - md) * ln(1.0 - md);
    Ok(s.max(0.0))
}

/// Closed-form entropy balance `Δ_n^(α)`; `Alpha::Burg` gives `Δ_n^Burg`.
pub fn entropy_balance(p: &Dist, q: &Dist, params: &ExtensionParams, alpha: Alpha) -> Result<ExtendedReal> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch {
            expected: q.dim(),
            found: p.dim(),
        });
    }
    if !p.is_full_rank() {
        return Err(Error::RankDeficient);
    }
    params.check_against(q)?;
    let m = q.dim() as f64;
    let lm = ln(m);
    let d = params.delta;
    let ld = ln(d);
    let ln_n = ln(params.n as f64);
    let rest: Vec<f64> = q.probs().iter().map(|&qi| qi - 2.0 * d).collect();
    let l_tail = ln(1.0 - 2.0 * m * d);
    let fin = ExtendedReal::Finite;
    let hp = renyi_entropy(p, alpha).finite().expect("full rank");
    Ok(match alpha.canonical() {
        Alpha::Zero => fin(0.0),
        Alpha::One => {
            let v = shannon(&rest) + 2.0 * m * d * lm + (1.0 - 2.0 * m * d) * l_tail;
            fin(v - hp)
        }
        Alpha::PlusInf => {
            let r_max = rest.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            // H_∞ = -log of the largest entry
            let ab = ld.max(ln(r_max) - ln_n).max(ld - 2.0 * ln_n);
            let b = (lm + ld).max(l_tail - ln_n).max(lm + ld - 2.0 * ln_n);
            fin(-ab - hp + b)
        }
        Alpha::MinusInf => {
            let r_min = rest.iter().copied().fold(f64::INFINITY, f64::min);
            let ab = ld.min(ln(r_min) - ln_n).min(ld - 2.0 * ln_n);
            let b = (lm + ld).min(l_tail - ln_n).min(lm + ld - 2.0 * ln_n);
            fin(ab - hp - b)
        }
        Alpha::Burg => {
            let n = params.n as f64;
            let big_n = n * n + n + 1.0;
            let s_rest: f64 = rest.iter().map(|&r| ln(r)).sum();
            let v = (n / m) * s_rest / big_n - ((n * n + 1.0) / big_n) * lm - (n / big_n) * l_tail;
            fin(v - hp)
        }
        Alpha::Finite(a) => {
            let lse_rest = logsumexp(&rest.iter().map(|&r| a * ln(r)).collect::<Vec<_>>());
            let num = logsumexp(&[
                lm + a * ld,
                lm + a * ld + 2.0 * (1.0 - a) * ln_n,
                (1.0 - a) * ln_n + lse_rest,
            ]);
            let den = logsumexp(&[
                a * (lm + ld),
                a * (lm + ld) + 2.0 * (1.0 - a) * ln_n,
                a * l_tail + (1.0 - a) * ln_n,
            ]);
            let sgn = if a > 0.0 { 1.0 } else { -1.0 };
            fin(sgn / (1.0 - a) * (num - den) - hp)
        }
    })
}

/// The `n → ∞` limit of the balance: `sgn(α) log m - H_α(p)` for α ≠ 0,
/// `log m - H(p)` at α = 1 only in the `δ → 0` sense, and
/// `-log m - H_Burg(p)` for Burg.
pub fn balance_limit(p: &Dist, alpha: Alpha) -> ExtendedReal {
    let lm = ln(p.dim() as f64);
    let h = renyi_entropy(p, alpha);
    let base = match alpha.canonical() {
        Alpha::Zero => return ExtendedReal::Finite(0.0),
        Alpha::Burg | Alpha::MinusInf => -lm,
        a if a.is_negative() => -lm,
        _ => lm,
    };
    ExtendedReal::Finite(base)
        .checked_sub(h)
        .unwrap_or(ExtendedReal::Finite(f64::NAN))
}

#[derive(Debug, Clone, PartialEq)]
pub struct BalanceCurve {
    pub params: ExtensionParams,
    /// `(α, Δ_n^(α))` for every grid point other than Burg.
    pub samples: Vec<(Alpha, ExtendedReal)>,
    pub burg_value: ExtendedReal,
    /// `(α, n → ∞ limit)` on the same points, for overlays.
    pub limit: Vec<(Alpha, ExtendedReal)>,
    pub grid: String,
}

impl BalanceCurve {
    /// Smallest sampled value, Burg included, with the forced zero at α = 0
    /// left out.
    pub fn min_value(&self) -> f64 {
        self.samples
            .iter()
            .filter(|(a, _)| *a != Alpha::Zero)
            .map(|(_, v)| v.to_f64())
            .chain(core::iter::once(self.burg_value.to_f64()))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn value_at(&self, alpha: Alpha) -> Option<ExtendedReal> {
        if alpha == Alpha::Burg {
            return Some(self.burg_value);
        }
        self.samples.iter().find(|(a, _)| *a == alpha).map(|s| s.1)
    }
}

pub fn balance_curve(p: &Dist, q: &Dist, params: &ExtensionParams, grid: &AlphaGrid) -> Result<BalanceCurve> {
    let mut samples = Vec::with_capacity(grid.len());
    let mut limit = Vec::with_capacity(grid.len());
    for &a in grid.points() {
        if a == Alpha::Burg {
            continue;
        }
        samples.push((a, entropy_balance(p, q, params, a)?));
        limit.push((a, balance_limit(p, a)));
    }
    Ok(BalanceCurve {
        params: *params,
        samples,
        burg_value: entropy_balance(p, q, params, Alpha::Burg)?,
        limit,
        grid: String::from(grid.description()),
    })
}

/// Budget for [`find_extension_params`]: δ-halvings × n-squarings.
pub const PARAM_SEARCH_STEPS: usize = 60;

/// Finds `(δ, n)` with `I(A:B) < eps_corr` and a strictly positive balance
/// at every grid point (α = 0 excluded), at `±∞` and for Burg.
///
/// δ starts at `½ · ½ min q_i` and is halved until the α = 1 balance is
/// positive and the mutual information is below the cap. Then `n` is
/// squared from 2 (clamped at `10^18`) until every balance passes. If the
/// clamp is reached first, δ is halved again.
pub fn find_extension_params(p: &Dist, q: &Dist, eps_corr: f64, grid: &AlphaGrid) -> Result<ExtensionParams> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch {
            expected: q.dim(),
            found: p.dim(),
        });
    }
    if !p.is_full_rank() || !q.is_full_rank() {
        return Err(Error::RankDeficient);
    }
    let h_p = shannon(p.probs());
    let h_q = shannon(q.probs());
    if !(h_p < h_q) {
        return Err(Error::EntropyConditionViolated { h_p, h_q });
    }
    let mut alphas: Vec<Alpha> = grid
        .points()
        .iter()
        .copied()
        .filter(|a| *a != Alpha::Zero && *a != Alpha::One)
        .collect();
    for limit in [Alpha::MinusInf, Alpha::PlusInf, Alpha::Burg] {
        if !alphas.contains(&limit) {
            alphas.push(limit);
        }
    }
    let mut delta = 0.5 * delta_bound(q);
    for _ in 0..PARAM_SEARCH_STEPS {
        let probe = ExtensionParams::new(delta, 1)?;
        let b1 = entropy_balance(p, q, &probe, Alpha::One)?.to_f64();
        let mi = extension_mutual_information(q, delta)?;
        if b1 > 0.0 && mi < eps_corr {
            let mut n: u64 = 2;
            for _ in 0..PARAM_SEARCH_STEPS {
                let params = ExtensionParams::new(delta, n)?;
                let mut ok = true;
                for &a in &alphas {
                    if !(entropy_balance(p, q, &params, a)?.to_f64() > 0.0) {
                        ok = false;
                        break;
                    }
                }
                if ok {
                    return Ok(params);
                }
                if n == MAX_N {
                    break;
                }
                n = n.checked_mul(n).map_or(MAX_N, |v| v.min(MAX_N));
            }
        }
        delta *= 0.5;
    }
    Err(Error::BudgetExceeded("extension parameter search"))
}

/// Mixes `p` toward uniform, `(1-κ) p + κ/m`, halving κ from ½ until the
/// Shannon entropy stays below `H(q)`. Full-rank `p` is returned as is.
pub fn full_rank_lift(p: &Dist, q: &Dist) -> Result<(Dist, f64)> {
    let h_p = shannon(p.probs());
    let h_q = shannon(q.probs());
    if !(h_p < h_q) {
        return Err(Error::EntropyConditionViolated { h_p, h_q });
    }
    if p.is_full_rank() {
        return Ok((p.clone(), 0.0));
    }
    let u = Dist::uniform(p.dim());
    let mut kappa = 0.5;
    for _ in 0..200 {
        let lifted = crate::dist::mix(p, &u, kappa)?;
        if lifted.is_full_rank() && shannon(lifted.probs()) < h_q {
            return Ok((lifted, kappa));
        }
        kappa *= 0.5;
    }
    Err(Error::BudgetExceeded("full-rank lift"))
}

/// Sorts both vectors non-increasingly and keeps the first `|supp q|`
/// entries, so that the reduced `q` has full rank.
pub fn zero_split(p: &Dist, q: &Dist) -> Result<(Dist, Dist)> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch {
            expected: q.dim(),
            found: p.dim(),
        });
    }
    let (sp, sq) = (p.support_size(), q.support_size());
    if sp > sq {
        return Err(Error::RankCondition {
            h0_p: ln(sp as f64),
            h0_q: ln(sq as f64),
        });
    }
    let mut ps = p.sorted_desc();
    let mut qs = q.sorted_desc();
    ps.truncate(sq);
    qs.truncate(sq);
    Ok((Dist::from_vec_unchecked(ps), Dist::from_vec_unchecked(qs)))
}

/// Limits for the search of a materialized extension with an explicit
/// catalyst.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExplicitSearch {
    /// Cap on `dim(p ⊗ q_B ⊗ c)`.
    pub max_entries: usize,
    pub max_n: u64,
    pub delta_steps: usize,
    pub max_catalyst_dim: usize,
    /// Gap evaluations per `catalyst_search` call.
    pub budget: usize,
    pub seed: u64,
}

impl Default for ExplicitSearch {
    fn default() -> Self {
        ExplicitSearch {
            max_entries: 2_000,
            max_n: 6,
            delta_steps: 4,
            max_catalyst_dim: 3,
            budget: 4_000,
            seed: 0,
        }
    }
}

/// An extension small enough to write down, together with the catalyst
/// that turns trumping into plain majorization.
///
/// `joint` already includes the catalyst: its B system is `B ⊗ C` and
/// `p ⊗ joint.marginal_b() ≻ joint` holds.
#[derive(Debug, Clone, PartialEq)]
pub struct ExplicitExtension {
    pub params: ExtensionParams,
    pub catalyst: Dist,
    pub joint: BipartiteDist,
    pub mutual_information: f64,
}

/// Tries small `(δ, n)` and seeded catalyst searches until
/// `p ⊗ q_B ⊗ c ≻ q_AB ⊗ c` holds for a materialized `q_AB`. `q` must have
/// full rank; `p` may contain zeros. `Ok(None)` means the limits ran out.
pub fn explicit_extension(p: &Dist, q: &Dist, eps_corr: f64, opts: &ExplicitSearch) -> Result<Option<ExplicitExtension>> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch {
            expected: q.dim(),
            found: p.dim(),
        });
    }
    if !q.is_full_rank() {
        return Err(Error::RankDeficient);
    }
    let m = q.dim();
    let coarse = AlphaGrid::parse("geom:0.01:100:25+-0.01+-0.1+-0.5+-1+-2+-10+-inf+inf+burg")?;
    let mut delta = 0.5 * delta_bound(q);
    for _ in 0..opts.delta_steps {
        if extension_mutual_information(q, delta)? < eps_corr {
            for n in 1..=opts.max_n {
                let params = ExtensionParams::new(delta, n)?;
                let cols = params.b_dim() as usize;
                if m * cols > opts.max_entries {
                    break;
                }
                let ext = build_extension(q, &params)?;
                let lhs = tensor(p, &ext.marginal_b());
                let rhs = ext.flatten();
                if majorizes_slices(lhs.probs(), rhs.probs(), &Tolerances::DEFAULT) {
                    return Ok(Some(finish(params, Dist::uniform(1), &ext)));
                }
                let passes = match trumping_conditions(&lhs, &rhs, &coarse) {
                    Ok(v) => v.violated.is_empty(),
                    Err(_) => false,
                };
                if !passes {
                    continue;
                }
                let max_k = opts.max_catalyst_dim.min(opts.max_entries / (m * cols)).max(1);
                if max_k < 2 {
                    continue;
                }
                if let Some(c) = catalyst_search(&lhs, &rhs, max_k, opts.budget, opts.seed ^ n) {
                    return Ok(Some(finish(params, c, &ext)));
                }
            }
        }
        delta *= 0.5;
    }
    Ok(None)
}

fn finish(params: ExtensionParams, catalyst: Dist, ext: &BipartiteDist) -> ExplicitExtension {
    let (rows, cols) = ext.dims();
    let k = catalyst.dim();
    let mut joint = Vec::with_capacity(rows * cols * k);
    for i in 0..rows {
        for x in ext.row(i) {
            for c in catalyst.probs() {
                joint.push(x * c);
            }
        }
    }
    let joint = BipartiteDist::from_flat_unchecked(joint, rows, cols * k);
    ExplicitExtension {
        params,
        mutual_information: mutual_information(ext),
        catalyst,
        joint,
    }
}

/// Outcome of the correlated-catalysis test.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelatedReport {
    /// Both necessary conditions hold and a certificate was produced.
    pub feasible: bool,
    pub h0_p: f64,
    pub h0_q: f64,
    pub h_p: f64,
    pub h_q: f64,
    pub rank_condition: bool,
    pub shannon_condition: bool,
    /// Dimension left after splitting off common zeros.
    pub reduced_dim: usize,
    /// Mixing weight used to make the reduced `p` full rank (0 if unused).
    pub lift_kappa: f64,
    pub params: Option<ExtensionParams>,
    pub mutual_information: Option<f64>,
    /// Balance of `p ⊗ q_B` against `q_AB`: positive values are exactly the
    /// trumping margins of the pair.
    pub balance: Option<BalanceCurve>,
    pub explicit: Option<ExplicitExtension>,
}

/// Decides `p ⊗ q_B ≻ q_AB` for some extension with `I(A:B) < eps_corr`:
/// necessary and sufficient are `H_0(p) ≤ H_0(q)` and `H(p) < H(q)`. When
/// both hold, the certificate consists of extension parameters whose
/// closed-form balance is positive on `grid`; `explicit` additionally
/// attempts a materialized witness.
pub fn main_theorem_check(
    p: &Dist,
    q: &Dist,
    eps_corr: f64,
    grid: &AlphaGrid,
    explicit: Option<&ExplicitSearch>,
) -> Result<CorrelatedReport> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch {
            expected: q.dim(),
            found: p.dim(),
        });
    }
    let ps = p.sorted_desc();
    let qs = q.sorted_desc();
    if ps.iter().zip(&qs).all(|(a, b)| (a - b).abs() <= 1e-15) {
        return Err(Error::EqualUpToPermutation);
    }
    let h0_p = ln(p.support_size() as f64);
    let h0_q = ln(q.support_size() as f64);
    let h_p = shannon(p.probs());
    let h_q = shannon(q.probs());
    let rank_condition = p.support_size() <= q.support_size();
    let shannon_condition = h_p < h_q;
    let mut report = CorrelatedReport {
        feasible: false,
        h0_p,
        h0_q,
        h_p,
        h_q,
        rank_condition,
        shannon_condition,
        reduced_dim: q.support_size(),
        lift_kappa: 0.0,
        params: None,
        mutual_information: None,
        balance: None,
        explicit: None,
    };
    if !(rank_condition && shannon_condition) {
        return Ok(report);
    }
    let (pr, qr) = zero_split(p, q)?;
    if qr.dim() == 1 {
        // q is pure, so p is the same pure state up to permutation
        return Err(Error::EqualUpToPermutation);
    }
    let (pl, kappa) = full_rank_lift(&pr, &qr)?;
    report.lift_kappa = kappa;
    let params = find_extension_params(&pl, &qr, eps_corr, grid)?;
    report.mutual_information = Some(extension_mutual_information(&qr, params.delta)?);
    report.balance = Some(balance_curve(&pl, &qr, &params, grid)?);
    report.params = Some(params);
    report.feasible = true;
    if let Some(opts) = explicit {
        report.explicit = explicit_extension(&pr, &qr, eps_corr, opts)?;
    }
    Ok(report)
}

/// Two uncorrelated-marginal catalysts: returns `r_BC` with
/// `p ⊗ r_B ⊗ r_C ≻ q ⊗ r_BC`, where B is a copy of A and `r_BC` is the
/// materialized extension of `q` (catalyst included). Indices of `p` and
/// `q` are used as given; zeros of `q` become zero rows of `r_BC`.
pub fn two_catalyst_construction(p: &Dist, q: &Dist, opts: &ExplicitSearch, eps_corr: f64) -> Result<BipartiteDist> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch {
            expected: q.dim(),
            found: p.dim(),
        });
    }
    if crate::majorization::majorizes(p, q) {
        return Ok(BipartiteDist::product(&Dist::uniform(1), &Dist::uniform(1)));
    }
    let report = main_theorem_check(p, q, eps_corr, &AlphaGrid::parse("geom:0.01:100:40+-inf+inf+burg")?, None)?;
    if !report.feasible {
        return Err(if !report.rank_condition {
            Error::RankCondition {
                h0_p: report.h0_p,
                h0_q: report.h0_q,
            }
        } else {
            Error::EntropyConditionViolated {
                h_p: report.h_p,
                h_q: report.h_q,
            }
        });
    }
    let (pr, qr) = zero_split(p, q)?;
    let ext = explicit_extension(&pr, &qr, eps_corr, opts)?.ok_or(Error::BudgetExceeded("explicit extension"))?;
    // rows of ext.joint follow q sorted non-increasingly; map them back
    let order = sort_perm_desc(q.probs());
    let (_, cols) = ext.joint.dims();
    let mut flat = alloc::vec![0.0; q.dim() * cols];
    for (k, &orig) in order.iter().take(qr.dim()).enumerate() {
        flat[orig * cols..(orig + 1) * cols].copy_from_slice(ext.joint.row(k));
    }
    let r_bc = BipartiteDist::from_flat_unchecked(flat, q.dim(), cols);
    let lhs = tensor(&tensor(p, &r_bc.marginal_a()), &r_bc.marginal_b());
    let rhs = tensor(q, &r_bc.flatten());
    if lhs.dim() as u128 > MATERIALIZE_CAP {
        return Err(Error::TooLargeToMaterialize {
            size: lhs.dim() as u128,
            cap: MATERIALIZE_CAP,
        });
    }
    if !majorizes_slices(lhs.probs(), rhs.probs(), &Tolerances::DEFAULT) {
        return Err(Error::NotMajorized);
    }
    Ok(r_bc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn d(v: &[f64]) -> Dist {
        Dist::new(v.to_vec()).unwrap()
    }

    #[test]
    fn small_extension_shape_and_marginals() {
        let q = d(&[0.5, 0.5]);
        let e = build_extension(&q, &ExtensionParams::new(0.1, 2).unwrap()).unwrap();
        assert_eq!(e.dims(), (2, 7));
        let ma = e.marginal_a();
        assert!((ma.probs()[0] - 0.5).abs() < 1e-15);
        for i in 0..2 {
            assert_eq!(*e.entry(i, 0), 0.1);
        }
        let mb = e.marginal_b();
        assert!((mb.probs()[0] - 0.2).abs() < 1e-15);
        assert!((mb.probs()[1] - 0.05).abs() < 1e-15);
        assert!((mb.probs()[5] - 0.3).abs() < 1e-15);
    }

    #[test]
    fn extension_errors() {
        let q = d(&[0.5, 0.5]);
        assert!(matches!(
            build_extension(&q, &ExtensionParams::new(0.25, 2).unwrap()),
            Err(Error::DeltaOutOfRange { .. })
        ));
        assert_eq!(
            build_extension(&d(&[1.0, 0.0]), &ExtensionParams::new(0.1, 2).unwrap()),
            Err(Error::RankDeficient)
        );
        assert!(matches!(
            build_extension(&q, &ExtensionParams::new(0.1, 1000).unwrap()),
            Err(Error::TooLargeToMaterialize { .. })
        ));
    }

    #[test]
    fn exact_extension_marginals() {
        let q = Dist::from_fractions(&[(17, 20), (7, 50), (1, 100)]).unwrap();
        let e = build_extension_exact(&q, &Rational::from_ratio(1, 1000), 3).unwrap();
        assert_eq!(e.marginal_a(), q);
        let mb = e.marginal_b();
        assert_eq!(mb.probs()[0], Rational::from_ratio(3, 1000));
        assert_eq!(mb.probs()[1], Rational::from_ratio(3, 9000));
    }

    #[test]
    fn alpha_zero_and_one() {
        let p = d(&[0.91, 0.05, 0.04]);
        let q = d(&[0.85, 0.14, 0.01]);
        let a = ExtensionParams::new(1e-3, 1_000_000).unwrap();
        let b = ExtensionParams::new(1e-3, 1_000_000_000_000_000).unwrap();
        assert_eq!(entropy_balance(&p, &q, &a, Alpha::Zero).unwrap(), ExtendedReal::Finite(0.0));
        let v1 = entropy_balance(&p, &q, &a, Alpha::One).unwrap().to_f64();
        let v2 = entropy_balance(&p, &q, &b, Alpha::One).unwrap().to_f64();
        assert_eq!(v1, v2);
        assert!(v1 > 0.0);
    }

    #[test]
    fn zero_split_examples() {
        let (a, b) = zero_split(&d(&[1.0, 0.0, 0.0]), &d(&[0.5, 0.5, 0.0])).unwrap();
        assert_eq!(a.probs(), &[1.0, 0.0]);
        assert_eq!(b.probs(), &[0.5, 0.5]);
        assert!(matches!(
            zero_split(&d(&[0.5, 0.5, 0.0]), &d(&[1.0, 0.0, 0.0])),
            Err(Error::RankCondition { .. })
        ));
        let p = d(&[0.2, 0.3, 0.5]);
        let (a, _) = zero_split(&p, &d(&[0.3, 0.3, 0.4])).unwrap();
        assert_eq!(a.probs(), &[0.5, 0.3, 0.2]);
    }

    #[test]
    fn lift_examples() {
        let p = d(&[0.3, 0.7]);
        assert_eq!(full_rank_lift(&p, &d(&[0.5, 0.5])).unwrap(), (p.clone(), 0.0));
        let (l, k) = full_rank_lift(&d(&[1.0, 0.0, 0.0]), &Dist::uniform(3)).unwrap();
        assert!(k > 0.0 && l.is_full_rank());
        assert!(shannon(l.probs()) < 3f64.ln());
        assert!(full_rank_lift(&Dist::uniform(2), &p).is_err());
    }

    #[test]
    fn correlated_check_verdicts() {
        let grid = AlphaGrid::parse("geom:0.01:100:30+-0.5+-2+-inf+inf+burg").unwrap();
        let r = main_theorem_check(&d(&[0.91, 0.05, 0.04]), &d(&[0.85, 0.14, 0.01]), 0.1, &grid, None).unwrap();
        assert!(r.feasible);
        assert!(r.balance.as_ref().unwrap().min_value() > 0.0);
        let r = main_theorem_check(&d(&[0.5, 0.5, 0.0]), &d(&[0.9, 0.05, 0.05]), 0.1, &grid, None).unwrap();
        assert!(!r.shannon_condition && !r.feasible);
        let r = main_theorem_check(&d(&[0.4, 0.3, 0.3]), &d(&[0.9, 0.1, 0.0]), 0.1, &grid, None).unwrap();
        assert!(!r.rank_condition && !r.feasible);
        assert!(main_theorem_check(&d(&[0.2, 0.8]), &d(&[0.8, 0.2]), 0.1, &grid, None).is_err());
    }

    #[test]
    fn two_catalysts_trivial_when_majorized() {
        let r = two_catalyst_construction(&d(&[1.0, 0.0]), &d(&[0.5, 0.5]), &ExplicitSearch::default(), 0.1).unwrap();
        assert_eq!(r.dims(), (1, 1));
        let _ = vec![0];
    }
}
