//! Protocol pipelines: embeddings, the shrinking map, rational Gibbs
//! approximations, work bits and the max-entropy sink.
//!
//! Composite vectors are ordered `A ⊗ W ⊗ S ⊗ M` with `M` fastest: `A` the
//! system, `W` an optional work bit, `S` an optional sink and `M` the
//! correlated catalyst. The embedding `Γ` acts on `A ⊗ W` jointly. Absent
//! systems have dimension 1.
//!
//! Every pipeline has five stages `Φ̄_A ∘ Γ̄ ∘ Λ ∘ Γ ∘ Φ_A`, where `Λ` is a
//! bistochastic T-transform chain on `Γ(A ⊗ W) ⊗ S ⊗ M`.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::catalysis::{
    build_extension_generic, explicit_extension, main_theorem_check, zero_split, BalanceCurve, ExplicitSearch,
    ExtensionParams, MATERIALIZE_CAP,
};
use crate::dist::{half_l1, mix, tensor, trace_distance, BipartiteDist, Dist};
use crate::entropy::{helmholtz, mutual_information, renyi_divergence, shannon, Alpha, ThermalContext};
use crate::error::{Error, Result};
use crate::extended::ExtendedReal;
use crate::grid::AlphaGrid;
use crate::majorization::{majorizes, sort_perm_desc, t_transform_chain};
use crate::math::{ceil, eta_bin, exp, floor, ln};
use crate::scalar::{Rational, Scalar};
use crate::stochastic::{StochasticMatrix, TTransformChain};
use crate::thermo::WorkDirection;

pub const DEFAULT_D_MAX: u64 = 100_000;
/// Largest composite dimension for which pipelines are assembled.
pub const PIPELINE_CAP: usize = 10_000;
pub const DEFAULT_GAP_DENOMINATOR: u64 = 10_000;

const CERTIFICATE_GRID: &str = "geom:0.01:100:30+-0.01+-0.1+-0.5+-1+-2+-10+-inf+inf+burg";

/// Multiplicities `d_i` of the embedding `Γ_d`; the rational Gibbs state
/// is `d / D` with `D = Σ d_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmbeddingSpec {
    d: Vec<u64>,
    total: u64,
}

impl EmbeddingSpec {
    pub fn new(d: Vec<u64>) -> Result<Self> {
        if d.is_empty() {
            return Err(Error::EmptyInput);
        }
        let mut total: u64 = 0;
        for &x in &d {
            if x == 0 {
                return Err(Error::BadShape("embedding multiplicities must be positive".to_string()));
            }
            total = total
                .checked_add(x)
                .ok_or_else(|| Error::BadShape("embedding dimension overflows".to_string()))?;
        }
        Ok(EmbeddingSpec { d, total })
    }

    pub fn d(&self) -> &[u64] {
        &self.d
    }

    /// `D`.
    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn len(&self) -> usize {
        self.d.len()
    }

    pub fn is_empty(&self) -> bool {
        self.d.is_empty()
    }

    pub fn gibbs<T: Scalar>(&self) -> Dist<T> {
        let total = T::from_u64(self.total);
        Dist::from_vec_unchecked(self.d.iter().map(|&x| T::from_u64(x) / total.clone()).collect())
    }

    /// Multiplicities of the product Gibbs state, row-major.
    pub fn tensor(&self, other: &EmbeddingSpec) -> Result<Self> {
        let mut d = Vec::with_capacity(self.len() * other.len());
        for &a in &self.d {
            for &b in &other.d {
                d.push(
                    a.checked_mul(b)
                        .ok_or_else(|| Error::BadShape("embedding dimension overflows".to_string()))?,
                );
            }
        }
        Self::new(d)
    }

    /// `(max_j (1 - γ'_j/γ_j), max_j (1 - γ_j/γ'_j))` with `γ' = d/D`.
    pub fn ratio_bounds(&self, gamma: &Dist) -> Result<(f64, f64)> {
        check_len(gamma.dim(), self)?;
        let t = self.total as f64;
        let mut a = f64::NEG_INFINITY;
        let mut b = f64::NEG_INFINITY;
        for (&g, &d) in gamma.probs().iter().zip(&self.d) {
            let r = d as f64 / t;
            a = a.max(1.0 - r / g);
            b = b.max(1.0 - g / r);
        }
        Ok((a.max(0.0), b.max(0.0)))
    }
}

fn check_len(dim: usize, spec: &EmbeddingSpec) -> Result<()> {
    if dim != spec.len() {
        return Err(Error::DimensionMismatch {
            expected: spec.len(),
            found: dim,
        });
    }
    Ok(())
}

/// Smallest `D ≤ 10^5` whose largest-remainder rounding of `D γ` meets
/// both ratio bounds strictly.
pub fn rational_gibbs_approx(ctx: &ThermalContext, delta_approx: f64) -> Result<EmbeddingSpec> {
    rational_gibbs_approx_with(ctx.gibbs(), delta_approx, DEFAULT_D_MAX)
}

pub fn rational_gibbs_approx_with(gamma: &Dist, delta_approx: f64, d_max: u64) -> Result<EmbeddingSpec> {
    if !(delta_approx > 0.0 && delta_approx < 1.0) {
        return Err(Error::OutOfRange {
            what: "Gibbs approximation accuracy",
            value: delta_approx,
        });
    }
    if !gamma.is_full_rank() {
        return Err(Error::RankDeficient);
    }
    let n = gamma.dim();
    let mut order: Vec<usize> = (0..n).collect();
    for total in (n as u64)..=d_max {
        let t = total as f64;
        let raw: Vec<f64> = gamma.probs().iter().map(|g| g * t).collect();
        let mut d: Vec<u64> = raw.iter().map(|&x| floor(x) as u64).collect();
        let assigned: u64 = d.iter().sum();
        if assigned > total {
            continue;
        }
        let frac = |i: usize| raw[i] - floor(raw[i]);
        order.sort_by(|&i, &j| frac(j).partial_cmp(&frac(i)).unwrap_or(core::cmp::Ordering::Equal).then(i.cmp(&j)));
        let missing = (total - assigned) as usize;
        if missing > n {
            continue;
        }
        for &i in order.iter().take(missing) {
            d[i] += 1;
        }
        if d.contains(&0) {
            continue;
        }
        let spec = EmbeddingSpec::new(d)?;
        let (a, b) = spec.ratio_bounds(gamma)?;
        if a < delta_approx && b < delta_approx {
            return Ok(spec);
        }
    }
    Err(Error::CapExceeded { cap: d_max })
}

/// `Γ_d(p)`: outcome `i` split into `d_i` equiprobable outcomes.
pub fn embed<T: Scalar>(p: &Dist<T>, spec: &EmbeddingSpec) -> Result<Dist<T>> {
    check_len(p.dim(), spec)?;
    if spec.total as u128 > MATERIALIZE_CAP {
        return Err(Error::TooLargeToMaterialize {
            size: spec.total as u128,
            cap: MATERIALIZE_CAP,
        });
    }
    Ok(Dist::from_vec_unchecked(embed_slice(p.probs(), spec, 1)))
}

/// Block sums, the left inverse of [`embed`].
pub fn unembed<T: Scalar>(x: &Dist<T>, spec: &EmbeddingSpec) -> Result<Dist<T>> {
    if x.dim() as u64 != spec.total {
        return Err(Error::DimensionMismatch {
            expected: spec.total as usize,
            found: x.dim(),
        });
    }
    Ok(Dist::from_vec_unchecked(unembed_slice(x.probs(), spec, 1)))
}

fn embed_slice<T: Scalar>(x: &[T], spec: &EmbeddingSpec, right: usize) -> Vec<T> {
    let mut out = Vec::with_capacity(spec.total as usize * right);
    for (i, &di) in spec.d.iter().enumerate() {
        let div = T::from_u64(di);
        let row: Vec<T> = x[i * right..(i + 1) * right]
            .iter()
            .map(|v| v.clone() / div.clone())
            .collect();
        for _ in 0..di {
            out.extend(row.iter().cloned());
        }
    }
    out
}

fn unembed_slice<T: Scalar>(x: &[T], spec: &EmbeddingSpec, right: usize) -> Vec<T> {
    let mut out = vec![T::zero(); spec.len() * right];
    let mut k = 0;
    for (i, &di) in spec.d.iter().enumerate() {
        for _ in 0..di {
            for r in 0..right {
                out[i * right + r] = out[i * right + r].clone() + x[k * right + r].clone();
            }
            k += 1;
        }
    }
    out
}

/// `H_α(Γ_d(p))` without materializing: `sgn⁺(α) log D - S_α(p ‖ d/D)`.
pub fn embedded_entropy(p: &Dist, spec: &EmbeddingSpec, alpha: Alpha) -> Result<ExtendedReal> {
    check_len(p.dim(), spec)?;
    let ld = ln(spec.total as f64);
    if alpha == Alpha::Burg {
        if !p.is_full_rank() {
            return Ok(ExtendedReal::NegInf);
        }
        let s: f64 = p
            .probs()
            .iter()
            .zip(&spec.d)
            .map(|(&x, &d)| d as f64 * (ln(x) - ln(d as f64)))
            .sum();
        return Ok(ExtendedReal::Finite(s / spec.total as f64));
    }
    let s = renyi_divergence(p, &spec.gibbs::<f64>(), alpha)?;
    let base = if alpha.is_negative() { -ld } else { ld };
    ExtendedReal::Finite(base).checked_sub(s)
}

/// `Φ(x) = λ x + (r' - λ r) Σ x` with `λ = min_j r'_j / r_j`, so that
/// `Φ(r) = r'` and `‖Φ(p) - p‖ ≤ 1 - λ`.
pub fn shrink_map<T: Scalar>(r: &Dist<T>, r_target: &Dist<T>) -> Result<StochasticMatrix<T>> {
    if r.dim() != r_target.dim() {
        return Err(Error::DimensionMismatch {
            expected: r.dim(),
            found: r_target.dim(),
        });
    }
    if !r.is_full_rank() || !r_target.is_full_rank() {
        return Err(Error::RankDeficient);
    }
    let d = r.dim();
    let lambda = r
        .probs()
        .iter()
        .zip(r_target.probs())
        .map(|(a, b)| b.clone() / a.clone())
        .reduce(T::min_of)
        .expect("non-empty");
    let lambda = T::min_of(lambda, T::one());
    let shift: Vec<T> = r
        .probs()
        .iter()
        .zip(r_target.probs())
        .map(|(a, b)| {
            let s = b.clone() - lambda.clone() * a.clone();
            if s < T::zero() {
                T::zero()
            } else {
                s
            }
        })
        .collect();
    let mut entries = Vec::with_capacity(d * d);
    for (i, s) in shift.iter().enumerate() {
        for j in 0..d {
            entries.push(if i == j { s.clone() + lambda.clone() } else { s.clone() });
        }
    }
    Ok(StochasticMatrix::from_flat_unchecked(entries, d, d))
}

/// `s^(m,n)` (`eps_smear = 0`) or `s^(m,n,ε)` on a trivial Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SharpState {
    pub m: u64,
    pub n: u64,
    pub eps_smear: f64,
}

impl SharpState {
    pub fn new(m: u64, n: u64, eps_smear: f64) -> Result<Self> {
        let s = SharpState { m, n, eps_smear };
        s.validate()?;
        Ok(s)
    }

    fn validate(&self) -> Result<()> {
        if self.m == 0 || self.m > self.n {
            return Err(Error::BadShape("sharp state needs 1 <= m <= n".to_string()));
        }
        if !(0.0..1.0).contains(&self.eps_smear) {
            return Err(Error::BadShape("smearing must lie in [0, 1)".to_string()));
        }
        if self.eps_smear > 0.0 && self.m == self.n {
            return Err(Error::BadShape("smearing needs n > m".to_string()));
        }
        if self.n as u128 > MATERIALIZE_CAP {
            return Err(Error::TooLargeToMaterialize {
                size: self.n as u128,
                cap: MATERIALIZE_CAP,
            });
        }
        Ok(())
    }

    /// The same sink before smearing.
    pub fn unsmeared(&self) -> SharpState {
        SharpState {
            eps_smear: 0.0,
            ..*self
        }
    }
}

pub fn sharp_state(spec: &SharpState) -> Result<Dist> {
    sharp_generic(spec)
}

fn sharp_generic<T: Scalar>(spec: &SharpState) -> Result<Dist<T>> {
    spec.validate()?;
    let eps = T::from_f64(spec.eps_smear).ok_or(Error::NonFinite)?;
    let head = (T::one() - eps.clone()) / T::from_u64(spec.m);
    let tail = if spec.n > spec.m {
        eps / T::from_u64(spec.n - spec.m)
    } else {
        T::zero()
    };
    let mut v = vec![head; spec.m as usize];
    v.resize(spec.n as usize, tail);
    Ok(Dist::from_vec_unchecked(v))
}

/// `(ΔF, ΔF_0)` of smearing the sink, in energy units. The tail term is
/// absent when `n = m`.
pub fn sink_balance(spec: &SharpState, beta: f64) -> (f64, f64) {
    let (m, n, e) = (spec.m as f64, spec.n as f64, spec.eps_smear);
    let df = if e > 0.0 && spec.n > spec.m {
        (eta_bin(e).unwrap_or(f64::NAN) + e * ln((n - m) / m)) / beta
    } else {
        0.0
    };
    (df, ln(n / m) / beta)
}

/// A work-bit gap with `e^{-βΔ} = num / den`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RationalGap {
    pub gap: f64,
    pub num: u64,
    pub den: u64,
}

/// Finds `Δ ∈ (lo, hi)` with `e^{-βΔ}` rational, sweeping denominators up
/// to `max_den`; the smallest denominator wins. Within it `prefer_low`
/// takes the smallest admissible `Δ`, otherwise the largest.
pub fn rational_gap(lo: f64, hi: f64, beta: f64, max_den: u64, prefer_low: bool) -> Option<RationalGap> {
    if !(lo < hi) || !(lo >= 0.0) {
        return None;
    }
    let x_lo = exp(-beta * hi);
    let x_hi = exp(-beta * lo);
    for den in 1..=max_den {
        let b = den as f64;
        let a_min = (floor(b * x_lo) as u64 + 1).max(1);
        let a_max = (ceil(b * x_hi) as u64).saturating_sub(1).min(den);
        if a_min > a_max {
            continue;
        }
        let candidates: Vec<u64> = if prefer_low {
            (a_min..=a_max).rev().collect()
        } else {
            (a_min..=a_max).collect()
        };
        for num in candidates {
            let gap = ln(b / num as f64) / beta;
            if gap > lo && gap < hi {
                return Some(RationalGap { gap, num, den });
            }
        }
    }
    None
}

/// How a stage acts on the composite vector.
#[derive(Debug, Clone, PartialEq)]
pub enum StageOp<T = f64> {
    /// `1_left ⊗ matrix ⊗ 1_right`.
    Local {
        matrix: StochasticMatrix<T>,
        left: usize,
        right: usize,
    },
    /// `Γ_d ⊗ 1_right`.
    Embed { spec: EmbeddingSpec, right: usize },
    /// `Γ̄_d ⊗ 1_right`.
    Unembed { spec: EmbeddingSpec, right: usize },
    Bistochastic(TTransformChain<T>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineStage<T = f64> {
    pub name: String,
    pub op: StageOp<T>,
}

impl<T: Scalar> PipelineStage<T> {
    pub fn new(name: &str, op: StageOp<T>) -> Self {
        PipelineStage {
            name: name.to_string(),
            op,
        }
    }

    pub fn d_in(&self) -> usize {
        match &self.op {
            StageOp::Local { matrix, left, right } => left * matrix.dims().1 * right,
            StageOp::Embed { spec, right } => spec.len() * right,
            StageOp::Unembed { spec, right } => spec.total as usize * right,
            StageOp::Bistochastic(c) => c.dim,
        }
    }

    pub fn d_out(&self) -> usize {
        match &self.op {
            StageOp::Local { matrix, left, right } => left * matrix.dims().0 * right,
            StageOp::Embed { spec, right } => spec.total as usize * right,
            StageOp::Unembed { spec, right } => spec.len() * right,
            StageOp::Bistochastic(c) => c.dim,
        }
    }

    pub fn apply_slice(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.d_in(), "stage input dimension");
        match &self.op {
            StageOp::Local { matrix, left, right } => {
                let (d_out, d_in) = matrix.dims();
                let mut out = vec![T::zero(); left * d_out * right];
                for l in 0..*left {
                    for i in 0..d_out {
                        for j in 0..d_in {
                            let mij = matrix.get(i, j);
                            if mij.is_zero() {
                                continue;
                            }
                            for r in 0..*right {
                                let o = (l * d_out + i) * right + r;
                                out[o] = out[o].clone() + mij.clone() * x[(l * d_in + j) * right + r].clone();
                            }
                        }
                    }
                }
                out
            }
            StageOp::Embed { spec, right } => embed_slice(x, spec, *right),
            StageOp::Unembed { spec, right } => unembed_slice(x, spec, *right),
            StageOp::Bistochastic(c) => c.apply_slice(x),
        }
    }

    /// Dense matrix of the stage; refuses above `10^6` entries.
    pub fn to_matrix(&self) -> Result<StochasticMatrix<T>> {
        let (o, i) = (self.d_out(), self.d_in());
        let size = o as u128 * i as u128;
        if size > MATERIALIZE_CAP {
            return Err(Error::TooLargeToMaterialize {
                size,
                cap: MATERIALIZE_CAP,
            });
        }
        let mut entries = vec![T::zero(); o * i];
        let mut e = vec![T::zero(); i];
        for j in 0..i {
            e[j] = T::one();
            for (k, v) in self.apply_slice(&e).into_iter().enumerate() {
                entries[k * i + j] = v;
            }
            e[j] = T::zero();
        }
        Ok(StochasticMatrix::from_flat_unchecked(entries, o, i))
    }

    pub fn to_f64(&self) -> PipelineStage<f64> {
        let op = match &self.op {
            StageOp::Local { matrix, left, right } => StageOp::Local {
                matrix: matrix.to_f64(),
                left: *left,
                right: *right,
            },
            StageOp::Embed { spec, right } => StageOp::Embed {
                spec: spec.clone(),
                right: *right,
            },
            StageOp::Unembed { spec, right } => StageOp::Unembed {
                spec: spec.clone(),
                right: *right,
            },
            StageOp::Bistochastic(c) => StageOp::Bistochastic(c.to_f64()),
        };
        PipelineStage {
            name: self.name.clone(),
            op,
        }
    }
}

pub fn run_pipeline<T: Scalar>(stages: &[PipelineStage<T>], x: &[T]) -> Vec<T> {
    stages.iter().fold(x.to_vec(), |acc, s| s.apply_slice(&acc))
}

/// Budgets shared by the protocol runners.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProtocolCaps {
    /// Largest composite dimension `D · |S| · |M|` that is assembled.
    pub max_composite: usize,
    /// Cap on the common denominator of the rational Gibbs state.
    pub d_max: u64,
    pub search: ExplicitSearch,
    /// Assemble and verify in exact rational arithmetic.
    pub exact: bool,
    /// Halvings of the Gibbs approximation accuracy before giving up.
    pub refinements: usize,
    pub max_gap_denominator: u64,
    /// Mutual-information budget for formation and extraction runs.
    pub eps_corr: f64,
}

impl Default for ProtocolCaps {
    fn default() -> Self {
        ProtocolCaps {
            max_composite: PIPELINE_CAP,
            d_max: DEFAULT_D_MAX,
            search: ExplicitSearch::default(),
            exact: false,
            refinements: 6,
            max_gap_denominator: DEFAULT_GAP_DENOMINATOR,
            eps_corr: 0.1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportLevel {
    /// All stages assembled and applied.
    Pipeline,
    /// Too large or no explicit catalyst found: verdict plus extension
    /// certificate only.
    Certificate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolReport {
    pub feasible: bool,
    pub level: ReportLevel,
    /// Stages were assembled in exact rational arithmetic.
    pub exact: bool,
    pub achieved_work: f64,
    /// Trace distance of the output A-marginal to the requested target.
    pub output_error: f64,
    pub requested_epsilon: f64,
    pub marginal_m_exact: bool,
    pub workbit_pure: bool,
    /// Sink marginal equals the smeared sharp state (extraction only).
    pub sink_exact: Option<bool>,
    pub mutual_info_am: f64,
    /// `‖T(γ ⊗ μ) - γ ⊗ μ‖` in trace distance.
    pub gibbs_fixed_point_error: f64,
    pub gap: Option<RationalGap>,
    pub embedding: Option<EmbeddingSpec>,
    pub composite_dim: usize,
    pub sigma_m: Option<Dist>,
    pub extension: Option<ExtensionParams>,
    pub catalyst_dim: usize,
    pub balance: Option<BalanceCurve>,
    pub pipeline: Vec<PipelineStage>,
    /// Named scalars of the entropy ledger.
    pub quantities: Vec<(&'static str, f64)>,
    pub notes: Vec<String>,
}

impl ProtocolReport {
    fn empty(eps: f64) -> Self {
        ProtocolReport {
            feasible: false,
            level: ReportLevel::Certificate,
            exact: false,
            achieved_work: 0.0,
            output_error: f64::NAN,
            requested_epsilon: eps,
            marginal_m_exact: false,
            workbit_pure: false,
            sink_exact: None,
            mutual_info_am: f64::NAN,
            gibbs_fixed_point_error: f64::NAN,
            gap: None,
            embedding: None,
            composite_dim: 0,
            sigma_m: None,
            extension: None,
            catalyst_dim: 1,
            balance: None,
            pipeline: Vec::new(),
            quantities: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn quantity(&self, name: &str) -> Option<f64> {
        self.quantities.iter().find(|(n, _)| *n == name).map(|q| q.1)
    }
}

/// Exact image of a float vector; for rationals the last positive entry
/// absorbs the rounding so the sum is exactly one.
fn lift<T: Scalar>(p: &Dist) -> Result<Dist<T>> {
    let mut v: Vec<T> = p
        .probs()
        .iter()
        .map(|&x| T::from_f64(x).ok_or(Error::NonFinite))
        .collect::<Result<_>>()?;
    if T::EXACT {
        if let Some(last) = v.iter().rposition(|x| *x > T::zero()) {
            let rest = v
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != last)
                .fold(T::zero(), |a, (_, x)| a + x.clone());
            v[last] = T::one() - rest;
        }
    }
    Ok(Dist::from_vec_unchecked(v))
}

#[derive(Debug, Clone)]
struct WorkBit {
    direction: WorkDirection,
    gap: RationalGap,
}

impl WorkBit {
    fn spec(&self) -> EmbeddingSpec {
        EmbeddingSpec {
            d: vec![self.gap.den, self.gap.num],
            total: self.gap.den + self.gap.num,
        }
    }

    fn input<T: Scalar>(&self) -> Dist<T> {
        match self.direction {
            WorkDirection::SpendExcitedToGround => Dist::basis(2, 1),
            WorkDirection::ExtractGroundToExcited => Dist::basis(2, 0),
        }
    }

    fn output<T: Scalar>(&self) -> Dist<T> {
        match self.direction {
            WorkDirection::SpendExcitedToGround => Dist::basis(2, 0),
            WorkDirection::ExtractGroundToExcited => Dist::basis(2, 1),
        }
    }
}

struct Task<'a> {
    p: &'a Dist,
    /// Requested target on A.
    q: &'a Dist,
    /// Target actually embedded (smoothed for formation and main result 1).
    q_hat: Dist,
    gamma: &'a Dist,
    spec_a: EmbeddingSpec,
    work: Option<WorkBit>,
    sink: Option<SharpState>,
}

impl Task<'_> {
    fn spec_x(&self) -> Result<EmbeddingSpec> {
        match &self.work {
            Some(w) => self.spec_a.tensor(&w.spec()),
            None => Ok(self.spec_a.clone()),
        }
    }

    fn w_dim(&self) -> usize {
        if self.work.is_some() {
            2
        } else {
            1
        }
    }

    fn s_dim(&self) -> usize {
        self.sink.map_or(1, |s| s.n as usize)
    }
}

struct Stage1<T> {
    phi: StochasticMatrix<T>,
    phi_bar: StochasticMatrix<T>,
    spec_x: EmbeddingSpec,
    gamma_a: Dist<T>,
    p_in: Dist<T>,
    w_in: Dist<T>,
    w_out: Dist<T>,
    gamma_w: Dist<T>,
    s_in: Dist<T>,
    s_out: Dist<T>,
    /// `Γ(Φ(p) ⊗ w_in) ⊗ s_in`.
    big_p: Dist<T>,
    /// `Γ(q̂ ⊗ w_out) ⊗ s_out`.
    big_q: Dist<T>,
}

fn stage1<T: Scalar>(task: &Task) -> Result<Stage1<T>> {
    let gamma_r = task.spec_a.gibbs::<T>();
    // a Gibbs state that is rational up to float rounding is taken as exact,
    // otherwise Φ would smear every zero of p in exact mode
    let snapped = gamma_r
        .to_f64()
        .probs()
        .iter()
        .zip(task.gamma.probs())
        .all(|(a, b)| (a - b).abs() <= 1e-14);
    let gamma_a = if snapped { gamma_r.clone() } else { lift::<T>(task.gamma)? };
    let phi = shrink_map(&gamma_a, &gamma_r)?;
    let phi_bar = shrink_map(&gamma_r, &gamma_a)?;
    let spec_x = task.spec_x()?;
    let one = Dist::<T>::uniform(1);
    let (w_in, w_out, gamma_w) = match &task.work {
        Some(w) => (w.input(), w.output(), w.spec().gibbs()),
        None => (one.clone(), one.clone(), one.clone()),
    };
    let (s_in, s_out) = match &task.sink {
        Some(s) => (sharp_generic(&s.unsmeared())?, sharp_generic(s)?),
        None => (one.clone(), one),
    };
    let p_in = lift::<T>(task.p)?;
    let pk = phi.apply(&p_in)?;
    let q_hat = lift::<T>(&task.q_hat)?;
    let big_p = tensor(&embed(&tensor(&pk, &w_in), &spec_x)?, &s_in);
    let big_q = tensor(&embed(&tensor(&q_hat, &w_out), &spec_x)?, &s_out);
    Ok(Stage1 {
        phi,
        phi_bar,
        spec_x,
        gamma_a,
        p_in,
        w_in,
        w_out,
        gamma_w,
        s_in,
        s_out,
        big_p,
        big_q,
    })
}

#[derive(Debug, Clone)]
enum Coupling {
    /// `Γ`-level states already majorize; `M` is trivial.
    Trivial,
    Extension { delta: f64, n: u64, catalyst: Dist },
    /// A caller-supplied joint over `(A ⊗ W) × M`.
    Joint(BipartiteDist),
}

struct Built<T> {
    stages: Vec<PipelineStage<T>>,
    input: Vec<T>,
    gibbs: Vec<T>,
    sigma: Dist<T>,
}

fn assemble<T: Scalar>(task: &Task, st: &Stage1<T>, coupling: &Coupling) -> Result<Option<Built<T>>> {
    let ds = st.big_q.dim();
    let r: BipartiteDist<T> = match coupling {
        Coupling::Trivial => BipartiteDist::from_flat_unchecked(st.big_q.probs().to_vec(), ds, 1),
        Coupling::Extension { delta, n, catalyst } => {
            let order = sort_perm_desc(st.big_q.probs());
            let k = st.big_q.support_size();
            let qt = Dist::from_vec_unchecked(order[..k].iter().map(|&i| st.big_q.probs()[i].clone()).collect());
            let d_t = T::from_f64(*delta).ok_or(Error::NonFinite)?;
            let ext = build_extension_generic(&qt, d_t, *n)?;
            let c = lift::<T>(catalyst)?;
            let kc = c.dim();
            let cols = ext.dims().1 * kc;
            let mut flat = vec![T::zero(); ds * cols];
            for (row, &orig) in order[..k].iter().enumerate() {
                for (j, x) in ext.row(row).iter().enumerate() {
                    for (l, y) in c.probs().iter().enumerate() {
                        flat[orig * cols + j * kc + l] = x.clone() * y.clone();
                    }
                }
            }
            BipartiteDist::from_flat_unchecked(flat, ds, cols)
        }
        Coupling::Joint(j) => {
            let m = j.dims().1;
            let lifted = lift::<T>(&j.flatten())?;
            BipartiteDist::from_flat_unchecked(embed_slice(lifted.probs(), &st.spec_x, m), ds, m)
        }
    };
    let sigma = r.marginal_b();
    let lhs = tensor(&st.big_p, &sigma);
    let rhs = r.flatten();
    if !majorizes(&lhs, &rhs) {
        return Ok(None);
    }
    let chain = t_transform_chain(&lhs, &rhs)?;
    let m = sigma.dim();
    let (w, s) = (task.w_dim(), task.s_dim());
    let stages = vec![
        PipelineStage::new(
            "shrink",
            StageOp::Local {
                matrix: st.phi.clone(),
                left: 1,
                right: w * s * m,
            },
        ),
        PipelineStage::new(
            "embed",
            StageOp::Embed {
                spec: st.spec_x.clone(),
                right: s * m,
            },
        ),
        PipelineStage::new("bistochastic", StageOp::Bistochastic(chain)),
        PipelineStage::new(
            "unembed",
            StageOp::Unembed {
                spec: st.spec_x.clone(),
                right: s * m,
            },
        ),
        PipelineStage::new(
            "unshrink",
            StageOp::Local {
                matrix: st.phi_bar.clone(),
                left: 1,
                right: w * s * m,
            },
        ),
    ];
    let input = tensor(&tensor(&tensor(&st.p_in, &st.w_in), &st.s_in), &sigma).into_vec();
    let gibbs = tensor(
        &tensor(&tensor(&st.gamma_a, &st.gamma_w), &Dist::uniform(s)),
        &Dist::uniform(m),
    )
    .into_vec();
    Ok(Some(Built {
        stages,
        input,
        gibbs,
        sigma,
    }))
}

/// Marginal on one of the four axes `A, W, S, M`.
fn marginal<T: Scalar>(x: &[T], dims: [usize; 4], axis: usize) -> Vec<T> {
    let mut out = vec![T::zero(); dims[axis]];
    let mut idx = [0usize; 4];
    for v in x {
        out[idx[axis]] = out[idx[axis]].clone() + v.clone();
        for k in (0..4).rev() {
            idx[k] += 1;
            if idx[k] < dims[k] {
                break;
            }
            idx[k] = 0;
        }
    }
    out
}

fn joint_am(x: &[f64], dims: [usize; 4]) -> BipartiteDist {
    let [a, w, s, m] = dims;
    let mut flat = vec![0.0; a * m];
    for i in 0..a {
        for j in 0..w * s {
            for k in 0..m {
                flat[i * m + k] += x[(i * w * s + j) * m + k];
            }
        }
    }
    BipartiteDist::from_flat_unchecked(flat, a, m)
}

fn same<T: Scalar>(a: &[T], b: &[T]) -> bool {
    a.len() == b.len()
        && if T::EXACT {
            a == b
        } else {
            a.iter().zip(b).all(|(x, y)| (x.clone() - y.clone()).abs().to_f64() <= 1e-12)
        }
}

fn evaluate<T: Scalar>(task: &Task, st: &Stage1<T>, built: &Built<T>, report: &mut ProtocolReport) {
    let dims = [task.p.dim(), task.w_dim(), task.s_dim(), built.sigma.dim()];
    let out = run_pipeline(&built.stages, &built.input);
    let g_out = run_pipeline(&built.stages, &built.gibbs);
    report.gibbs_fixed_point_error = half_l1(&g_out, &built.gibbs).to_f64();
    let out_a: Vec<f64> = marginal(&out, dims, 0).iter().map(Scalar::to_f64).collect();
    report.output_error = half_l1(&out_a, task.q.probs());
    report.marginal_m_exact = same(&marginal(&out, dims, 3), built.sigma.probs());
    report.workbit_pure = task.work.is_none() || same(&marginal(&out, dims, 1), st.w_out.probs());
    if task.sink.is_some() {
        report.sink_exact = Some(same(&marginal(&out, dims, 2), st.s_out.probs()));
    }
    let out_f: Vec<f64> = out.iter().map(Scalar::to_f64).collect();
    report.mutual_info_am = mutual_information(&joint_am(&out_f, dims));
    report.sigma_m = Some(built.sigma.to_f64());
    report.composite_dim = built.gibbs.len().max(built.stages[2].d_in());
    report.pipeline = built.stages.iter().map(PipelineStage::to_f64).collect();
    report.level = ReportLevel::Pipeline;
    report.exact = T::EXACT;
}

/// Searches the coupling at float precision.
fn search_coupling(st: &Stage1<f64>, eps_corr: f64, caps: &ProtocolCaps) -> Result<Option<(Coupling, Option<ExtensionParams>, usize)>> {
    if majorizes(&st.big_p, &st.big_q) {
        return Ok(Some((Coupling::Trivial, None, 1)));
    }
    let ds = st.big_q.dim();
    if ds * 3 > caps.max_composite {
        return Ok(None);
    }
    let (pr, qr) = zero_split(&st.big_p, &st.big_q)?;
    let mut opts = caps.search;
    opts.max_entries = caps.max_composite * qr.dim() / ds;
    Ok(explicit_extension(&pr, &qr, eps_corr, &opts)?.map(|e| {
        (
            Coupling::Extension {
                delta: e.params.delta,
                n: e.params.n,
                catalyst: e.catalyst.clone(),
            },
            Some(e.params),
            e.catalyst.dim(),
        )
    }))
}

fn entropic_conditions(st: &Stage1<f64>) -> (f64, f64, usize, usize) {
    (
        shannon(st.big_p.probs()),
        shannon(st.big_q.probs()),
        st.big_p.support_size(),
        st.big_q.support_size(),
    )
}

/// Builds the task at decreasing Gibbs-approximation accuracy until the
/// embedded pair satisfies `H(P) < H(Q)` and `H_0(P) ≤ H_0(Q)`.
fn prepare<'a>(
    mut make: impl FnMut(EmbeddingSpec) -> Result<Task<'a>>,
    gamma: &Dist,
    eps: f64,
    caps: &ProtocolCaps,
    report: &mut ProtocolReport,
) -> Result<(Task<'a>, Stage1<f64>)> {
    let mut delta_approx = eps / 4.0;
    for _ in 0..=caps.refinements {
        let spec_a = rational_gibbs_approx_with(gamma, delta_approx, caps.d_max)?;
        let task = make(spec_a)?;
        let st = stage1::<f64>(&task)?;
        let (h_p, h_q, s_p, s_q) = entropic_conditions(&st);
        if h_p < h_q && s_p <= s_q {
            report.quantities.push(("delta_approx", delta_approx));
            report.quantities.push(("h_in", h_p));
            report.quantities.push(("h_out", h_q));
            report.quantities.push(("h0_in", ln(s_p as f64)));
            report.quantities.push(("h0_out", ln(s_q as f64)));
            return Ok((task, st));
        }
        delta_approx *= 0.5;
    }
    Err(Error::BudgetExceeded("Gibbs approximation refinement"))
}

fn finish(task: &Task, st: &Stage1<f64>, eps_corr: f64, caps: &ProtocolCaps, report: &mut ProtocolReport) -> Result<()> {
    report.embedding = Some(st.spec_x.clone());
    report.feasible = true;
    let ds = st.big_q.dim();
    report.composite_dim = ds;
    let found = if ds <= caps.max_composite {
        search_coupling(st, eps_corr, caps)?
    } else {
        report.notes.push("embedded dimension above the pipeline cap".to_string());
        None
    };
    let Some((coupling, params, kc)) = found else {
        return certificate(task, st, eps_corr, report);
    };
    report.extension = params;
    report.catalyst_dim = kc;
    if caps.exact {
        let st_r = stage1::<Rational>(task)?;
        if let Some(b) = assemble::<Rational>(task, &st_r, &coupling)? {
            evaluate(task, &st_r, &b, report);
            return Ok(());
        }
        report.notes.push("exact majorization check failed; verified at float precision".to_string());
    }
    match assemble::<f64>(task, st, &coupling)? {
        Some(b) => {
            evaluate(task, st, &b, report);
            Ok(())
        }
        None => certificate(task, st, eps_corr, report),
    }
}

fn certificate(task: &Task, st: &Stage1<f64>, eps_corr: f64, report: &mut ProtocolReport) -> Result<()> {
    report.level = ReportLevel::Certificate;
    report.notes.push("certificate level: no pipeline assembled".to_string());
    if !majorizes(&st.big_p, &st.big_q) {
        let grid = AlphaGrid::parse(CERTIFICATE_GRID)?;
        let mt = main_theorem_check(&st.big_p, &st.big_q, eps_corr, &grid, None)?;
        report.feasible = mt.feasible;
        report.extension = mt.params;
        report.balance = mt.balance;
        report.mutual_info_am = mt.mutual_information.unwrap_or(f64::NAN);
    } else {
        report.mutual_info_am = 0.0;
    }
    // the A ⊗ W marginal of the final state is Γ̄(Γ(q̂ ⊗ w_out)) whatever Λ is
    report.workbit_pure = true;
    report.marginal_m_exact = true;
    report.output_error = trace_distance(&st.phi_bar.apply(&task.q_hat)?, task.q)?;
    if task.sink.is_some() {
        report.sink_exact = Some(true);
    }
    Ok(())
}

fn check_dims(p: &Dist, q: &Dist, ctx: &ThermalContext) -> Result<()> {
    for d in [p.dim(), q.dim()] {
        if d != ctx.dim() {
            return Err(Error::DimensionMismatch {
                expected: ctx.dim(),
                found: d,
            });
        }
    }
    Ok(())
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::OutOfRange {
            what: "accuracy epsilon",
            value: eps,
        });
    }
    Ok(())
}

/// `p_A ⊗ σ_M → q_AM` with `‖q_A - q‖ < ε` and `I(A:M) < ε_corr`, possible
/// iff `F(p) ≥ F(q)`.
pub fn run_main_result_1(
    p: &Dist,
    q: &Dist,
    ctx: &ThermalContext,
    eps: f64,
    eps_corr: f64,
    caps: &ProtocolCaps,
) -> Result<ProtocolReport> {
    check_dims(p, q, ctx)?;
    check_eps(eps)?;
    let f_p = helmholtz(p, ctx)?;
    let f_q = helmholtz(q, ctx)?;
    if f_p < f_q - 1e-12 * ctx.kt() {
        return Err(Error::FreeEnergyViolation { f_p, f_q });
    }
    let mut report = ProtocolReport::empty(eps);
    report.quantities.push(("f_p", f_p));
    report.quantities.push(("f_q", f_q));
    let gamma = ctx.gibbs();
    if trace_distance(q, gamma)? <= 1e-15 {
        report.feasible = true;
        report.level = ReportLevel::Pipeline;
        report.workbit_pure = true;
        report.marginal_m_exact = true;
        report.mutual_info_am = 0.0;
        report.composite_dim = p.dim();
        let stage = PipelineStage::new(
            "thermalize",
            StageOp::Local {
                matrix: StochasticMatrix::replacement(gamma, p.dim()),
                left: 1,
                right: 1,
            },
        );
        let out = stage.apply_slice(p.probs());
        report.output_error = half_l1(&out, q.probs());
        report.gibbs_fixed_point_error = half_l1(&stage.apply_slice(gamma.probs()), gamma.probs());
        report.sigma_m = Some(Dist::uniform(1));
        report.pipeline = vec![stage];
        return Ok(report);
    }
    let q_hat = mix(q, gamma, eps / 2.0)?;
    let (task, st) = prepare(
        |spec_a| {
            Ok(Task {
                p,
                q,
                q_hat: q_hat.clone(),
                gamma,
                spec_a,
                work: None,
                sink: None,
            })
        },
        gamma,
        eps,
        caps,
        &mut report,
    )?;
    finish(&task, &st, eps_corr, caps, &mut report)?;
    Ok(report)
}

/// Main-result pipeline with a caller-supplied joint `q_AM` (rows over A,
/// columns over M, trivial Hamiltonian on M) instead of a searched
/// extension. `feasible` is false when `Γ(Φ(p)) ⊗ σ_M` does not majorize
/// the embedded joint.
pub fn run_main_result_1_with_joint(
    p: &Dist,
    joint: &BipartiteDist,
    ctx: &ThermalContext,
    eps: f64,
    caps: &ProtocolCaps,
) -> Result<ProtocolReport> {
    let q = joint.marginal_a();
    check_dims(p, &q, ctx)?;
    check_eps(eps)?;
    let mut report = ProtocolReport::empty(eps);
    let gamma = ctx.gibbs();
    let spec_a = rational_gibbs_approx_with(gamma, eps / 4.0, caps.d_max)?;
    let task = Task {
        p,
        q: &q,
        q_hat: q.clone(),
        gamma,
        spec_a,
        work: None,
        sink: None,
    };
    report.embedding = Some(task.spec_x()?);
    let coupling = Coupling::Joint(joint.clone());
    let size = task.spec_a.total() as usize * joint.dims().1;
    report.composite_dim = size;
    if size > caps.max_composite {
        return Err(Error::TooLargeToMaterialize {
            size: size as u128,
            cap: caps.max_composite as u128,
        });
    }
    if caps.exact {
        let st = stage1::<Rational>(&task)?;
        if let Some(b) = assemble::<Rational>(&task, &st, &coupling)? {
            report.feasible = true;
            evaluate(&task, &st, &b, &mut report);
            return Ok(report);
        }
    } else {
        let st = stage1::<f64>(&task)?;
        if let Some(b) = assemble::<f64>(&task, &st, &coupling)? {
            report.feasible = true;
            evaluate(&task, &st, &b, &mut report);
            return Ok(report);
        }
    }
    report.notes.push("embedded input does not majorize the embedded joint".to_string());
    Ok(report)
}

/// Forms `q` from `p` by spending `Δ` from a work bit that ends exactly in
/// its ground state; `Δ ∈ (F(q) - F(p), F(q) - F(p) + δ_gap)` with
/// `e^{-βΔ}` rational.
pub fn run_work_formation(
    p: &Dist,
    q: &Dist,
    ctx: &ThermalContext,
    delta_gap: f64,
    eps: f64,
    caps: &ProtocolCaps,
) -> Result<ProtocolReport> {
    check_dims(p, q, ctx)?;
    check_eps(eps)?;
    let f_p = helmholtz(p, ctx)?;
    let f_q = helmholtz(q, ctx)?;
    if f_p > f_q + 1e-12 * ctx.kt() {
        return Err(Error::FreeEnergyViolation { f_p, f_q });
    }
    let lo = (f_q - f_p).max(0.0);
    let gap = rational_gap(lo, lo + delta_gap, ctx.beta(), caps.max_gap_denominator, true)
        .ok_or(Error::BudgetExceeded("rational work gap"))?;
    let mut report = ProtocolReport::empty(eps);
    report.gap = Some(gap);
    report.achieved_work = gap.gap;
    report.quantities.push(("f_p", f_p));
    report.quantities.push(("f_q", f_q));
    // S_0 side condition: F_0(e) - F_0(g) = Δ > 0
    report.quantities.push(("s0_workbit_gain", ctx.beta() * gap.gap));
    let gamma = ctx.gibbs();
    let q_hat = mix(q, gamma, eps / 2.0)?;
    let work = WorkBit {
        direction: WorkDirection::SpendExcitedToGround,
        gap,
    };
    let (task, st) = prepare(
        |spec_a| {
            Ok(Task {
                p,
                q,
                q_hat: q_hat.clone(),
                gamma,
                spec_a,
                work: Some(work.clone()),
                sink: None,
            })
        },
        gamma,
        eps,
        caps,
        &mut report,
    )?;
    finish(&task, &st, caps.eps_corr, caps, &mut report)?;
    Ok(report)
}

/// `log(n/m)` and the right-hand side of the sink condition
/// `log(n/m) > max{log 2, S_0(q‖γ) + β(F(p) - F(q))}`.
pub fn sink_condition(p: &Dist, q: &Dist, ctx: &ThermalContext, sink: &SharpState) -> Result<(f64, f64)> {
    check_dims(p, q, ctx)?;
    let s0 = renyi_divergence(q, ctx.gibbs(), Alpha::Zero)?.to_f64();
    let df = ctx.beta() * (helmholtz(p, ctx)? - helmholtz(q, ctx)?);
    Ok((ln(sink.n as f64 / sink.m as f64), core::f64::consts::LN_2.max(s0 + df)))
}

/// Extracts `Δ ∈ (F(p) - F(q) - δ_gap, F(p) - F(q))` into a work bit that
/// ends exactly excited, dumping a little entropy into the sink.
pub fn run_work_extraction(
    p: &Dist,
    q: &Dist,
    ctx: &ThermalContext,
    delta_gap: f64,
    eps: f64,
    sink: &SharpState,
    caps: &ProtocolCaps,
) -> Result<ProtocolReport> {
    check_dims(p, q, ctx)?;
    check_eps(eps)?;
    sink.validate()?;
    let f_p = helmholtz(p, ctx)?;
    let f_q = helmholtz(q, ctx)?;
    if !(f_p > f_q) {
        return Err(Error::FreeEnergyViolation { f_p, f_q });
    }
    let (log_ratio, required) = sink_condition(p, q, ctx, sink)?;
    // the log 2 branch is decided on integers so equality is exact
    if sink.n <= 2 * sink.m || !(log_ratio > required) {
        return Err(Error::SinkTooSmall { log_ratio, required });
    }
    let hi = f_p - f_q;
    let s0 = renyi_divergence(q, ctx.gibbs(), Alpha::Zero)?.to_f64();
    let hi = hi.min((log_ratio - s0) / ctx.beta());
    let gap = rational_gap((hi - delta_gap).max(0.0), hi, ctx.beta(), caps.max_gap_denominator, false)
        .ok_or(Error::BudgetExceeded("rational work gap"))?;
    let mut report = ProtocolReport::empty(eps);
    report.gap = Some(gap);
    report.achieved_work = gap.gap;
    report.quantities.push(("f_p", f_p));
    report.quantities.push(("f_q", f_q));
    report.quantities.push(("s0_q_plus_beta_gap", s0 + ctx.beta() * gap.gap));
    report.quantities.push(("log_n_over_m", log_ratio));
    let (df, df0) = sink_balance(sink, ctx.beta());
    report.quantities.push(("sink_delta_f", df));
    report.quantities.push(("sink_delta_f0", df0));
    let gamma = ctx.gibbs();
    let work = WorkBit {
        direction: WorkDirection::ExtractGroundToExcited,
        gap,
    };
    let (task, st) = prepare(
        |spec_a| {
            Ok(Task {
                p,
                q,
                q_hat: q.clone(),
                gamma,
                spec_a,
                work: Some(work.clone()),
                sink: Some(*sink),
            })
        },
        gamma,
        eps,
        caps,
        &mut report,
    )?;
    finish(&task, &st, caps.eps_corr, caps, &mut report)?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(v: &[f64]) -> Dist {
        Dist::new(v.to_vec()).unwrap()
    }

    #[test]
    fn gibbs_approx_examples() {
        let ctx = ThermalContext::new(vec![0.0, core::f64::consts::LN_2], 1.0).unwrap();
        let s = rational_gibbs_approx(&ctx, 1e-3).unwrap();
        assert_eq!(s.d(), &[2, 1]);
        assert_eq!(s.total(), 3);
        let s = rational_gibbs_approx(&ThermalContext::trivial(4), 0.5).unwrap();
        assert_eq!(s.d(), &[1, 1, 1, 1]);
        assert_eq!(s.ratio_bounds(&Dist::uniform(4)).unwrap(), (0.0, 0.0));
        let g = d(&[core::f64::consts::FRAC_1_SQRT_2, 1.0 - core::f64::consts::FRAC_1_SQRT_2]);
        let s = rational_gibbs_approx_with(&g, 1e-3, DEFAULT_D_MAX).unwrap();
        assert!(s.total() <= 10_000);
        let (a, b) = s.ratio_bounds(&g).unwrap();
        assert!(a < 1e-3 && b < 1e-3);
        assert_eq!(
            rational_gibbs_approx_with(&g, 1e-9, 100),
            Err(Error::CapExceeded { cap: 100 })
        );
    }

    #[test]
    fn embedding_round_trip() {
        let spec = EmbeddingSpec::new(vec![2, 1]).unwrap();
        let e = embed(&Dist::<Rational>::from_fractions(&[(2, 3), (1, 3)]).unwrap(), &spec).unwrap();
        assert_eq!(e, Dist::uniform(3));
        let p = Dist::<Rational>::from_fractions(&[(1, 7), (6, 7)]).unwrap();
        assert_eq!(unembed(&embed(&p, &spec).unwrap(), &spec).unwrap(), p);
        assert_eq!(unembed(&d(&[1.0, 0.0, 0.0]), &spec).unwrap().probs(), &[1.0, 0.0]);
    }

    #[test]
    fn shrink_map_properties() {
        let r = d(&[2.0 / 3.0, 1.0 / 3.0]);
        let t = d(&[0.66, 0.34]);
        let phi = shrink_map(&r, &t).unwrap();
        assert!(phi.is_stochastic(1e-12));
        let img = phi.apply(&r).unwrap();
        assert!((img.probs()[0] - 0.66).abs() < 1e-12);
        let lambda: f64 = 0.66 / (2.0 / 3.0);
        let p = d(&[0.1, 0.9]);
        let moved = trace_distance(&phi.apply(&p).unwrap(), &p).unwrap();
        assert!(moved <= 1.0 - lambda + 1e-12);
        let id = shrink_map(&r, &r).unwrap();
        assert!((id.get(0, 0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn sharp_states_and_balance() {
        assert_eq!(sharp_state(&SharpState::new(1, 1, 0.0).unwrap()).unwrap().probs(), &[1.0]);
        let s = sharp_state(&SharpState::new(2, 4, 0.1).unwrap()).unwrap();
        for (x, y) in s.probs().iter().zip([0.45, 0.45, 0.05, 0.05]) {
            assert!((x - y).abs() < 1e-15);
        }
        assert!(SharpState::new(3, 2, 0.0).is_err());
        let (df, df0) = sink_balance(&SharpState::new(1, 2, 0.1).unwrap(), 1.0);
        assert!((df - eta_bin(0.1).unwrap()).abs() < 1e-15);
        assert!((df0 - core::f64::consts::LN_2).abs() < 1e-15);
        assert_eq!(sink_balance(&SharpState::new(1, 2, 0.0).unwrap(), 1.0).0, 0.0);
    }

    #[test]
    fn gap_selection() {
        let g = rational_gap(0.0589, 0.0689, 1.0, 10_000, true).unwrap();
        assert_eq!((g.num, g.den), (15, 16));
        assert!(g.gap > 0.0589 && g.gap < 0.0689);
        assert!(rational_gap(0.2, 0.1, 1.0, 100, true).is_none());
    }

    #[test]
    fn thermalizing_is_single_stage() {
        let ctx = ThermalContext::new(vec![0.0, 1.0], 1.0).unwrap();
        let r = run_main_result_1(&d(&[1.0, 0.0]), ctx.gibbs(), &ctx, 0.1, 0.1, &ProtocolCaps::default()).unwrap();
        assert!(r.feasible);
        assert_eq!(r.pipeline.len(), 1);
        assert!(r.output_error < 1e-15);
    }

    #[test]
    fn free_energy_violation() {
        let ctx = ThermalContext::new(vec![0.0, 1.0], 1.0).unwrap();
        assert!(matches!(
            run_main_result_1(ctx.gibbs(), &d(&[1.0, 0.0]), &ctx, 0.1, 0.1, &ProtocolCaps::default()),
            Err(Error::FreeEnergyViolation { .. })
        ));
    }

    #[test]
    fn qubit_extraction_is_exact() {
        let ctx = ThermalContext::new(vec![0.0, core::f64::consts::LN_2], 1.0).unwrap();
        let sink = SharpState::new(1, 3, 0.1).unwrap();
        let caps = ProtocolCaps {
            exact: true,
            ..ProtocolCaps::default()
        };
        let r = run_work_extraction(&d(&[0.5, 0.5]), ctx.gibbs(), &ctx, 0.01, 0.01, &sink, &caps).unwrap();
        assert!(r.feasible && r.exact);
        assert_eq!(r.level, ReportLevel::Pipeline);
        assert_eq!(r.sink_exact, Some(true));
        assert!(r.workbit_pure && r.marginal_m_exact);
        let g = r.gap.unwrap();
        assert_eq!((g.num, g.den), (17, 18));
        assert!(r.output_error == 0.0 && r.gibbs_fixed_point_error == 0.0);
        let small = SharpState::new(1, 2, 0.1).unwrap();
        assert!(matches!(
            run_work_extraction(&d(&[0.5, 0.5]), ctx.gibbs(), &ctx, 0.01, 0.01, &small, &caps),
            Err(Error::SinkTooSmall { .. })
        ));
    }

    #[test]
    fn qubit_formation_levels() {
        let ctx = ThermalContext::new(vec![0.0, core::f64::consts::LN_2], 1.0).unwrap();
        let q = d(&[0.5, 0.5]);
        let caps = ProtocolCaps::default();
        let r = run_work_formation(ctx.gibbs(), &q, &ctx, 0.01, 0.01, &caps).unwrap();
        assert!(r.feasible);
        let g = r.gap.unwrap();
        assert_eq!((g.num, g.den), (15, 16));
        assert!(r.achieved_work > 0.0589 && r.achieved_work < 0.0689);
        assert!(r.output_error < 0.01);
        // at log 1.5 no catalyst is needed
        let r = run_work_formation(ctx.gibbs(), &q, &ctx, 0.5, 0.01, &caps).unwrap();
        assert_eq!(r.level, ReportLevel::Pipeline);
        assert_eq!(r.pipeline.len(), 5);
        assert_eq!(r.mutual_info_am, 0.0);
    }
}
