//! Majorization, bistochastic witnesses and the trumping conditions.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dist::{tensor, Dist};
use crate::entropy::{renyi_entropy, Alpha};
use crate::error::{Error, Result};
use crate::extended::ExtendedReal;
use crate::grid::AlphaGrid;
use crate::math::ln;
use crate::scalar::Scalar;
use crate::stochastic::{StochasticMatrix, TTransform, TTransformChain};
use crate::tolerance::Tolerances;

/// Indices that sort `x` non-increasingly; equal entries keep index order.
pub fn sort_perm_desc<T: Scalar>(x: &[T]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&a, &b| x[b].partial_cmp(&x[a]).unwrap_or(Ordering::Equal));
    idx
}

/// `p ≻ q`: every prefix sum of `p↓` dominates that of `q↓`, up to
/// `1e-12·k` on the k-th prefix (no slack for exact scalars). The shorter
/// vector is padded with zeros.
pub fn majorizes<T: Scalar>(p: &Dist<T>, q: &Dist<T>) -> bool {
    majorizes_slices(p.probs(), q.probs(), &Tolerances::DEFAULT)
}

pub fn majorizes_slices<T: Scalar>(p: &[T], q: &[T], tol: &Tolerances) -> bool {
    let d = p.len().max(q.len());
    let ps = sorted_padded(p, d);
    let qs = sorted_padded(q, d);
    let (mut sp, mut sq) = (T::zero(), T::zero());
    for k in 0..d {
        sp = sp + ps[k].clone();
        sq = sq + qs[k].clone();
        if sp.clone() < sq.clone() - T::slack(tol.maj_at(k + 1)) {
            return false;
        }
    }
    true
}

fn sorted_padded<T: Scalar>(x: &[T], d: usize) -> Vec<T> {
    let mut v = x.to_vec();
    v.resize(d, T::zero());
    v.sort_by(|a, b| b.partial_cmp(a).unwrap_or(Ordering::Equal));
    v
}

/// Smallest prefix-sum gap `min_k (Σ_{i≤k} a↓_i - Σ_{i≤k} b↓_i)` over the
/// proper prefixes `k < d`. Non-negative iff `a ≻ b` (the full prefix is
/// always zero and is left out). Both slices must have equal length.
pub fn majorization_margin(a: &[f64], b: &[f64]) -> f64 {
    let d = a.len().max(b.len());
    let av = sorted_padded(a, d);
    let bv = sorted_padded(b, d);
    let (mut sa, mut sb) = (0.0, 0.0);
    let mut best = f64::INFINITY;
    for k in 0..d.saturating_sub(1) {
        sa += av[k];
        sb += bv[k];
        best = best.min(sa - sb);
    }
    if d <= 1 {
        0.0
    } else {
        best
    }
}

/// Sequence of T-transforms carrying `p` to `q`, at most `d - 1` steps.
///
/// Works on the sorted vectors `x = p↓`, `y = q↓`: take the last index `j`
/// with `x_j > y_j` and the first `k > j` with `x_k < y_k`, and move
/// `min(x_j - y_j, y_k - x_k)` from `j` to `k`. Each step makes one more
/// coordinate agree with `y`.
pub fn t_transform_chain<T: Scalar>(p: &Dist<T>, q: &Dist<T>) -> Result<TTransformChain<T>> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            found: q.dim(),
        });
    }
    if !majorizes(p, q) {
        return Err(Error::NotMajorized);
    }
    let d = p.dim();
    let pre = sort_perm_desc(p.probs());
    let post = sort_perm_desc(q.probs());
    let mut x: Vec<T> = pre.iter().map(|&i| p.probs()[i].clone()).collect();
    let y: Vec<T> = post.iter().map(|&i| q.probs()[i].clone()).collect();
    let eps = T::slack(1e-15);
    let mut steps = Vec::new();
    // indices with a surplus (x > y) and a deficit (x < y); everything
    // strictly between the last surplus and the next deficit already agrees
    let surplus_at = |x: &[T], i: usize| x[i] > y[i].clone() + eps.clone();
    let deficit_at = |x: &[T], i: usize| x[i] < y[i].clone() - eps.clone();
    let mut surplus: BTreeSet<usize> = (0..d).filter(|&i| surplus_at(&x, i)).collect();
    let mut deficit: BTreeSet<usize> = (0..d).filter(|&i| deficit_at(&x, i)).collect();
    for _ in 0..2 * d {
        let Some(&j) = surplus.iter().next_back() else {
            break;
        };
        let Some(&k) = deficit.range(j + 1..).next() else {
            break;
        };
        let d1 = x[j].clone() - y[j].clone();
        let d2 = y[k].clone() - x[k].clone();
        let first_closes = d1 <= d2;
        let delta = if first_closes { d1 } else { d2 };
        let gap = x[j].clone() - x[k].clone();
        let t = T::one() - delta.clone() / gap;
        steps.push(TTransform { i: j, j: k, t });
        x[j] = x[j].clone() - delta.clone();
        x[k] = x[k].clone() + delta;
        if first_closes {
            x[j] = y[j].clone();
        } else {
            x[k] = y[k].clone();
        }
        for i in [j, k] {
            surplus.remove(&i);
            deficit.remove(&i);
            if surplus_at(&x, i) {
                surplus.insert(i);
            } else if deficit_at(&x, i) {
                deficit.insert(i);
            }
        }
    }
    Ok(TTransformChain {
        dim: d,
        pre,
        steps,
        post,
    })
}

/// Bistochastic `Λ` with `Λp = q`, as a dense matrix.
pub fn bistochastic_witness<T: Scalar>(p: &Dist<T>, q: &Dist<T>) -> Result<StochasticMatrix<T>> {
    Ok(t_transform_chain(p, q)?.to_matrix())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Feasibility {
    Yes,
    No,
    Boundary,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrumpingVerdict {
    pub feasible: Feasibility,
    /// `(α, H_α(q) - H_α(p))` for every failed condition.
    pub violated: Vec<(Alpha, f64)>,
    /// `(α, H_α(q) - H_α(p))` at every sampled α; the Burg entry compares
    /// Burg entropies.
    pub margins: Vec<(Alpha, f64)>,
    pub grid: String,
}

impl TrumpingVerdict {
    pub fn min_margin(&self) -> f64 {
        self.margins
            .iter()
            .map(|m| m.1)
            .fold(f64::INFINITY, f64::min)
    }
}

/// Standard (uncorrelated) catalytic conditions: `H_α(p) < H_α(q)` for all
/// α ≠ 0 and `H_Burg(p) < H_Burg(q)`, sampled on `grid` with the limits
/// `α = ±∞` and Burg always evaluated.
pub fn trumping_conditions(p: &Dist, q: &Dist, grid: &AlphaGrid) -> Result<TrumpingVerdict> {
    trumping_conditions_with(p, q, grid, &Tolerances::DEFAULT)
}

pub fn trumping_conditions_with(
    p: &Dist,
    q: &Dist,
    grid: &AlphaGrid,
    tol: &Tolerances,
) -> Result<TrumpingVerdict> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            found: q.dim(),
        });
    }
    let ps = p.sorted_desc();
    let qs = q.sorted_desc();
    if ps.iter().zip(&qs).all(|(a, b)| (a - b).abs() <= 1e-15) {
        return Err(Error::EqualUpToPermutation);
    }
    if !p.is_full_rank() && !q.is_full_rank() {
        return Err(Error::BothRankDeficient);
    }
    let mut alphas: Vec<Alpha> = grid
        .points()
        .iter()
        .copied()
        .filter(|a| *a != Alpha::Zero)
        .collect();
    for limit in [Alpha::MinusInf, Alpha::PlusInf, Alpha::Burg] {
        if !alphas.contains(&limit) {
            alphas.push(limit);
        }
    }
    let mut margins = Vec::with_capacity(alphas.len());
    let mut violated = Vec::new();
    for a in alphas {
        let m = margin(renyi_entropy(q, a), renyi_entropy(p, a));
        if !(m > 0.0) {
            violated.push((a, m));
        }
        margins.push((a, m));
    }
    let min = margins.iter().map(|m| m.1).fold(f64::INFINITY, f64::min);
    let feasible = if !violated.is_empty() {
        Feasibility::No
    } else if min < tol.boundary {
        Feasibility::Boundary
    } else {
        Feasibility::Yes
    };
    Ok(TrumpingVerdict {
        feasible,
        violated,
        margins,
        grid: String::from(grid.description()),
    })
}

fn margin(hq: ExtendedReal, hp: ExtendedReal) -> f64 {
    match (hq, hp) {
        (ExtendedReal::Finite(a), ExtendedReal::Finite(b)) => a - b,
        (ExtendedReal::NegInf, ExtendedReal::NegInf) | (ExtendedReal::PosInf, ExtendedReal::PosInf) => 0.0,
        (ExtendedReal::NegInf, _) | (_, ExtendedReal::PosInf) => f64::NEG_INFINITY,
        _ => f64::INFINITY,
    }
}

/// Prefix-sum gap the catalyst search keeps climbing to, so that the
/// result survives conversion to exact rationals.
pub const CATALYST_MARGIN: f64 = 1e-9;

/// Numeric search for a catalyst `c` with `p ⊗ c ≻ q ⊗ c`.
///
/// Tries catalyst dimensions `2..=max_dim`, each with seeded random
/// restarts followed by pairwise coordinate moves that raise the smallest
/// prefix-sum gap. `budget` caps the total number of gap evaluations.
/// `None` means the budget ran out, not that no catalyst exists.
pub fn catalyst_search(
    p: &Dist,
    q: &Dist,
    max_dim: usize,
    budget: usize,
    seed: u64,
) -> Option<Dist> {
    if p.dim() != q.dim() {
        return None;
    }
    if majorizes(p, q) {
        return Some(Dist::uniform(1));
    }
    let tol = Tolerances::DEFAULT;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut evals = 0usize;
    let dims: Vec<usize> = (2..=max_dim).collect();
    if dims.is_empty() {
        return None;
    }
    let per_dim = budget / dims.len();
    for &k in &dims {
        let mut spent = 0usize;
        while spent < per_dim && evals < budget {
            let mut c = random_simplex(&mut rng, k);
            let mut best = catalyst_margin(p, q, &c);
            spent += 1;
            evals += 1;
            let mut step: f64 = 0.25;
            while step > 1e-12 && spent < per_dim {
                let mut improved = false;
                for i in 0..k {
                    for j in 0..k {
                        if i == j || c[j] <= 0.0 {
                            continue;
                        }
                        let s = step.min(c[j]);
                        c[i] += s;
                        c[j] -= s;
                        let m = catalyst_margin(p, q, &c);
                        spent += 1;
                        evals += 1;
                        if m > best {
                            best = m;
                            improved = true;
                        } else {
                            c[i] -= s;
                            c[j] += s;
                        }
                    }
                }
                if best > CATALYST_MARGIN {
                    break;
                }
                if !improved {
                    step *= 0.5;
                }
            }
            if best >= 0.0 {
                let s: f64 = c.iter().sum();
                let c = Dist::new(c.iter().map(|x| x / s).collect()).ok()?;
                let lhs = tensor(p, &c);
                let rhs = tensor(q, &c);
                if majorizes_slices(lhs.probs(), rhs.probs(), &tol) {
                    return Some(c);
                }
            }
        }
    }
    None
}

fn catalyst_margin(p: &Dist, q: &Dist, c: &[f64]) -> f64 {
    let mut a = Vec::with_capacity(p.dim() * c.len());
    let mut b = Vec::with_capacity(p.dim() * c.len());
    for (x, y) in p.probs().iter().zip(q.probs()) {
        for z in c {
            a.push(x * z);
            b.push(y * z);
        }
    }
    majorization_margin(&a, &b)
}

pub(crate) fn random_simplex<R: Rng>(rng: &mut R, k: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..k)
        .map(|_| -ln(1.0 - rng.gen::<f64>()))
        .collect();
    let s: f64 = v.iter().sum();
    for x in v.iter_mut() {
        *x /= s;
    }
    v
}
