//! Thermal Lorenz curves, thermomajorization, Gibbs-preserving witnesses and
//! minimal work for state formation.

use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::dist::{tensor, BipartiteDist, Dist};
use crate::entropy::ThermalContext;
use crate::error::{Error, Result};
use crate::lp::feasible_point;
use crate::math::sqrt;
use crate::scalar::Scalar;
use crate::stochastic::StochasticMatrix;
use crate::tolerance::Tolerances;

/// Piecewise-linear curve through `(Σγ, Σp)` after β-ordering.
#[derive(Debug, Clone, PartialEq)]
pub struct LorenzCurve<T = f64> {
    elbows: Vec<(T, T)>,
    order: Vec<usize>,
}

impl<T: Scalar> LorenzCurve<T> {
    /// `dim + 1` points from `(0, 0)` to `(1, 1)`.
    pub fn elbows(&self) -> &[(T, T)] {
        &self.elbows
    }

    /// The β-order: outcome indices by decreasing `p_i / γ_i`.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Height of the curve at `x ∈ [0, 1]` by linear interpolation.
    pub fn eval(&self, x: &T) -> T {
        let e = &self.elbows;
        if *x <= e[0].0 {
            return e[0].1.clone();
        }
        for w in e.windows(2) {
            let (x0, y0) = &w[0];
            let (x1, y1) = &w[1];
            if x <= x1 {
                let span = x1.clone() - x0.clone();
                if span.is_zero() {
                    return y1.clone();
                }
                return y0.clone() + (x.clone() - x0.clone()) * (y1.clone() - y0.clone()) / span;
            }
        }
        e[e.len() - 1].1.clone()
    }

    /// Slopes non-increasing, up to `tol` for floats.
    pub fn is_concave(&self, tol: f64) -> bool {
        let slopes: Vec<Option<T>> = self
            .elbows
            .windows(2)
            .map(|w| {
                let dx = w[1].0.clone() - w[0].0.clone();
                if dx.is_zero() {
                    None
                } else {
                    Some((w[1].1.clone() - w[0].1.clone()) / dx)
                }
            })
            .collect();
        let s: Vec<T> = slopes.into_iter().flatten().collect();
        s.windows(2)
            .all(|w| w[1] <= w[0].clone() + T::slack(tol) * (T::one() + w[0].abs()))
    }

    pub fn to_f64(&self) -> LorenzCurve<f64> {
        LorenzCurve {
            elbows: self
                .elbows
                .iter()
                .map(|(x, y)| (x.to_f64(), y.to_f64()))
                .collect(),
            order: self.order.clone(),
        }
    }
}

pub fn thermal_lorenz(p: &Dist, ctx: &ThermalContext) -> Result<LorenzCurve> {
    thermal_lorenz_with(p, ctx.gibbs())
}

/// Lorenz curve of `p` relative to the Gibbs weights `gibbs`. Equal ratios
/// `p_i/γ_i` are ordered by larger `γ_i` first (lower energy), then index.
pub fn thermal_lorenz_with<T: Scalar>(p: &Dist<T>, gibbs: &Dist<T>) -> Result<LorenzCurve<T>> {
    if p.dim() != gibbs.dim() {
        return Err(Error::DimensionMismatch {
            expected: gibbs.dim(),
            found: p.dim(),
        });
    }
    if gibbs.probs().iter().any(|g| *g <= T::zero()) {
        return Err(Error::RankDeficient);
    }
    let pp = p.probs();
    let gg = gibbs.probs();
    let mut order: Vec<usize> = (0..p.dim()).collect();
    order.sort_by(|&i, &j| {
        // p_i/γ_i > p_j/γ_j  <=>  p_i γ_j > p_j γ_i
        let lhs = pp[i].clone() * gg[j].clone();
        let rhs = pp[j].clone() * gg[i].clone();
        rhs.partial_cmp(&lhs)
            .unwrap_or(Ordering::Equal)
            .then_with(|| gg[j].partial_cmp(&gg[i]).unwrap_or(Ordering::Equal))
            .then(i.cmp(&j))
    });
    let mut elbows = Vec::with_capacity(p.dim() + 1);
    let (mut x, mut y) = (T::zero(), T::zero());
    elbows.push((x.clone(), y.clone()));
    for &i in &order {
        x = x + gg[i].clone();
        y = y + pp[i].clone();
        elbows.push((x.clone(), y.clone()));
    }
    // pin the endpoint against float drift
    let last = elbows.len() - 1;
    elbows[last] = (T::one(), T::one());
    Ok(LorenzCurve { elbows, order })
}

/// `p`'s thermal Lorenz curve lies on or above `q`'s at every elbow of `q`.
pub fn thermomajorizes(p: &Dist, q: &Dist, ctx: &ThermalContext) -> Result<bool> {
    thermomajorizes_with(p, q, ctx.gibbs())
}

pub fn thermomajorizes_with<T: Scalar>(p: &Dist<T>, q: &Dist<T>, gibbs: &Dist<T>) -> Result<bool> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            found: q.dim(),
        });
    }
    let tol = Tolerances::DEFAULT;
    let lp = thermal_lorenz_with(p, gibbs)?;
    let lq = thermal_lorenz_with(q, gibbs)?;
    Ok(lq
        .elbows()
        .iter()
        .enumerate()
        .all(|(k, (x, y))| lp.eval(x) >= y.clone() - T::slack(tol.maj_at(k.max(1)))))
}

/// `min over q's elbows of (p-curve − q-curve)`; non-negative iff `p`
/// thermomajorizes `q`.
pub fn thermo_margin(p: &Dist, q: &Dist, ctx: &ThermalContext) -> Result<f64> {
    let lp = thermal_lorenz(p, ctx)?;
    let lq = thermal_lorenz(q, ctx)?;
    Ok(lq
        .elbows()
        .iter()
        .map(|(x, y)| lp.eval(x) - y)
        .fold(f64::INFINITY, f64::min))
}

/// Stochastic `Λ` with `Λp = q` and `Λγ = γ`, found by alternating
/// projections between the affine constraint set and the non-negative
/// orthant (at most `1e5` rounds).
pub fn gibbs_preserving_witness(p: &Dist, q: &Dist, ctx: &ThermalContext) -> Result<StochasticMatrix> {
    if !thermomajorizes(p, q, ctx)? {
        return Err(Error::NotThermomajorized);
    }
    let d = p.dim();
    let g = ctx.gibbs().probs();
    let (pp, qq) = (p.probs(), q.probs());
    let n = d * d;

    let mut rows: Vec<(Vec<f64>, f64)> = Vec::with_capacity(3 * d);
    for j in 0..d {
        let mut a = alloc::vec![0.0; n];
        for i in 0..d {
            a[i * d + j] = 1.0;
        }
        rows.push((a, 1.0));
    }
    for (i, &qi) in qq.iter().enumerate() {
        let mut a = alloc::vec![0.0; n];
        a[i * d..(i + 1) * d].copy_from_slice(pp);
        rows.push((a, qi));
    }
    for (i, &gi) in g.iter().enumerate() {
        let mut a = alloc::vec![0.0; n];
        a[i * d..(i + 1) * d].copy_from_slice(g);
        rows.push((a, gi));
    }
    let basis = orthonormalize(rows);

    let mut x: Vec<f64> = StochasticMatrix::replacement(q, d).entries().to_vec();
    const MAX_ROUNDS: usize = 100_000;
    let mut residual = f64::INFINITY;
    for round in 0..MAX_ROUNDS {
        for (u, c) in &basis {
            let dot: f64 = u.iter().zip(&x).map(|(a, b)| a * b).sum();
            let r = dot - c;
            for (xi, ui) in x.iter_mut().zip(u) {
                *xi -= r * ui;
            }
        }
        for xi in x.iter_mut() {
            if *xi < 0.0 {
                *xi = 0.0;
            }
        }
        if round % 8 == 7 || round == MAX_ROUNDS - 1 {
            residual = constraint_residual(&x, d, pp, qq, g);
            if residual < 1e-12 {
                break;
            }
        }
    }
    for j in 0..d {
        let s: f64 = (0..d).map(|i| x[i * d + j]).sum();
        if s > 0.0 {
            for i in 0..d {
                x[i * d + j] /= s;
            }
        } else {
            x[j * d + j] = 1.0;
        }
    }
    let m = StochasticMatrix::from_flat_unchecked(x, d, d);
    let ep = crate::dist::half_l1(&m.apply_slice(pp), qq);
    let eg = crate::dist::half_l1(&m.apply_slice(g), g);
    if ep > 1e-8 || eg > 1e-8 {
        return Err(Error::SolverBudgetExceeded {
            iterations: MAX_ROUNDS,
            residual: residual.max(ep).max(eg),
        });
    }
    Ok(m)
}

fn constraint_residual(x: &[f64], d: usize, p: &[f64], q: &[f64], g: &[f64]) -> f64 {
    let mut r: f64 = 0.0;
    for j in 0..d {
        let s: f64 = (0..d).map(|i| x[i * d + j]).sum();
        r = r.max((s - 1.0).abs());
    }
    for i in 0..d {
        let row = &x[i * d..(i + 1) * d];
        let lp: f64 = row.iter().zip(p).map(|(a, b)| a * b).sum();
        let lg: f64 = row.iter().zip(g).map(|(a, b)| a * b).sum();
        r = r.max((lp - q[i]).abs()).max((lg - g[i]).abs());
    }
    r
}

// Modified Gram-Schmidt on constraint rows, carrying the right-hand sides
// along; dependent rows are dropped.
fn orthonormalize(rows: Vec<(Vec<f64>, f64)>) -> Vec<(Vec<f64>, f64)> {
    let mut out: Vec<(Vec<f64>, f64)> = Vec::new();
    for (mut a, mut b) in rows {
        let scale = sqrt(a.iter().map(|v| v * v).sum::<f64>());
        for (u, c) in &out {
            let dot: f64 = a.iter().zip(u).map(|(x, y)| x * y).sum();
            for (ai, ui) in a.iter_mut().zip(u) {
                *ai -= dot * ui;
            }
            b -= dot * c;
        }
        let norm = sqrt(a.iter().map(|v| v * v).sum::<f64>());
        if norm > 1e-10 * scale.max(1e-300) {
            for ai in a.iter_mut() {
                *ai /= norm;
            }
            out.push((a, b / norm));
        }
    }
    out
}

/// Exact Gibbs-preserving witness by a vertex of the feasibility polytope.
/// Limited to dimension 6 (36 unknowns).
pub fn gibbs_preserving_witness_exact<T: Scalar>(
    p: &Dist<T>,
    q: &Dist<T>,
    gibbs: &Dist<T>,
) -> Result<StochasticMatrix<T>> {
    let d = p.dim();
    if q.dim() != d || gibbs.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: q.dim().max(gibbs.dim()),
        });
    }
    if d > 6 {
        return Err(Error::TooLargeToMaterialize {
            size: (d * d) as u128,
            cap: 36,
        });
    }
    let n = d * d;
    let mut a: Vec<Vec<T>> = Vec::with_capacity(3 * d);
    let mut b: Vec<T> = Vec::with_capacity(3 * d);
    for j in 0..d {
        let mut r = alloc::vec![T::zero(); n];
        for i in 0..d {
            r[i * d + j] = T::one();
        }
        a.push(r);
        b.push(T::one());
    }
    for (src, dst) in [(p, q), (gibbs, gibbs)] {
        for i in 0..d {
            let mut r = alloc::vec![T::zero(); n];
            for j in 0..d {
                r[i * d + j] = src.probs()[j].clone();
            }
            a.push(r);
            b.push(dst.probs()[i].clone());
        }
    }
    let x = feasible_point(&a, &b, 50_000).ok_or(Error::NotThermomajorized)?;
    Ok(StochasticMatrix::from_flat_unchecked(x, d, d))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WorkDirection {
    /// Work bit starts excited and ends in the ground state (work is spent).
    SpendExcitedToGround,
    /// Work bit starts in the ground state and ends excited (work is gained).
    ExtractGroundToExcited,
}

/// Two-level battery with energies `(0, gap)`; index 0 is `|g⟩`, 1 is `|e⟩`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WorkBitSpec {
    pub gap: f64,
    pub direction: WorkDirection,
}

impl WorkBitSpec {
    pub fn new(gap: f64, direction: WorkDirection) -> Result<Self> {
        if !(gap >= 0.0) || !gap.is_finite() {
            return Err(Error::OutOfRange {
                what: "work bit gap",
                value: gap,
            });
        }
        Ok(WorkBitSpec { gap, direction })
    }

    pub fn context(&self, beta: f64) -> Result<ThermalContext> {
        ThermalContext::new(alloc::vec![0.0, self.gap], beta)
    }

    pub fn initial<T: Scalar>(&self) -> Dist<T> {
        match self.direction {
            WorkDirection::SpendExcitedToGround => Dist::basis(2, 1),
            WorkDirection::ExtractGroundToExcited => Dist::basis(2, 0),
        }
    }

    pub fn target<T: Scalar>(&self) -> Dist<T> {
        match self.direction {
            WorkDirection::SpendExcitedToGround => Dist::basis(2, 0),
            WorkDirection::ExtractGroundToExcited => Dist::basis(2, 1),
        }
    }
}

/// How the machine enters a formation task.
#[derive(Debug, Clone, PartialEq)]
pub enum FormationMode {
    /// `p ⊗ e_W → q ⊗ g_W`.
    NoCatalyst,
    /// `p ⊗ σ_M ⊗ e_W → q_AM ⊗ g_W` with trivial Hamiltonian on `M`;
    /// `q_AM` must have marginals `q` and `σ_M`.
    WithJoint { joint: BipartiteDist, sigma_m: Dist },
}

/// Composite initial and target states and the composite Hamiltonian for a
/// formation task at work-bit gap `gap`, ordered `A ⊗ M ⊗ W` (W fastest).
pub fn formation_instance(
    p: &Dist,
    q: &Dist,
    ctx: &ThermalContext,
    mode: &FormationMode,
    gap: f64,
) -> Result<(Dist, Dist, ThermalContext)> {
    if p.dim() != ctx.dim() || q.dim() != ctx.dim() {
        return Err(Error::DimensionMismatch {
            expected: ctx.dim(),
            found: if p.dim() != ctx.dim() { p.dim() } else { q.dim() },
        });
    }
    let w = WorkBitSpec::new(gap, WorkDirection::SpendExcitedToGround)?;
    let wctx = w.context(ctx.beta())?;
    let (init, target, sys) = match mode {
        FormationMode::NoCatalyst => (p.clone(), q.clone(), ctx.clone()),
        FormationMode::WithJoint { joint, sigma_m } => {
            check_joint(joint, q, sigma_m)?;
            let mctx = ThermalContext::new(alloc::vec![0.0; sigma_m.dim()], ctx.beta())?;
            (tensor(p, sigma_m), joint.flatten(), ctx.compose(&mctx)?)
        }
    };
    Ok((
        tensor(&init, &w.initial()),
        tensor(&target, &w.target()),
        sys.compose(&wctx)?,
    ))
}

fn check_joint(joint: &BipartiteDist, q: &Dist, sigma: &Dist) -> Result<()> {
    let tol = Tolerances::DEFAULT.norm;
    let ma = joint.marginal_a();
    let mb = joint.marginal_b();
    if ma.dim() != q.dim() {
        return Err(Error::DimensionMismatch {
            expected: q.dim(),
            found: ma.dim(),
        });
    }
    if mb.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: sigma.dim(),
            found: mb.dim(),
        });
    }
    let close = |a: &Dist, b: &Dist| a.probs().iter().zip(b.probs()).all(|(x, y)| (x - y).abs() <= tol);
    if !close(&ma, q) || !close(&mb, sigma) {
        return Err(Error::BadShape("joint marginals do not match q and sigma_M".into()));
    }
    Ok(())
}

pub fn formation_feasible(
    p: &Dist,
    q: &Dist,
    ctx: &ThermalContext,
    mode: &FormationMode,
    gap: f64,
) -> Result<bool> {
    let (a, b, c) = formation_instance(p, q, ctx, mode, gap)?;
    thermomajorizes(&a, &b, &c)
}

/// Default upper end of the work bracket, in units of `kT`.
pub const DEFAULT_WORK_UPPER: f64 = 50.0;

/// Smallest gap (energy units) at which the formation task is feasible,
/// found by bisection on `[0, 50 kT]` to `1e-10 kT`.
pub fn min_work_formation(p: &Dist, q: &Dist, ctx: &ThermalContext, mode: &FormationMode) -> Result<f64> {
    min_work_formation_with(p, q, ctx, mode, DEFAULT_WORK_UPPER * ctx.kt(), 1e-10 * ctx.kt())
}

pub fn min_work_formation_with(
    p: &Dist,
    q: &Dist,
    ctx: &ThermalContext,
    mode: &FormationMode,
    upper: f64,
    tol: f64,
) -> Result<f64> {
    if formation_feasible(p, q, ctx, mode, 0.0)? {
        return Ok(0.0);
    }
    if !formation_feasible(p, q, ctx, mode, upper)? {
        return Err(Error::InfeasibleAtUpperBound { upper });
    }
    let (mut lo, mut hi) = (0.0, upper);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if formation_feasible(p, q, ctx, mode, mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}
