//! Fixed numeric scenarios: the heated qubit with a correlated memory, and
//! the entropy-balance example.

use core::f64::consts::LN_2;

use crate::catalysis::{balance_curve, BalanceCurve, ExtensionParams};
use crate::dist::{tensor, BipartiteDist, Dist};
use crate::entropy::ThermalContext;
use crate::error::Result;
use crate::grid::AlphaGrid;
use crate::math::ln;
use crate::scalar::{Rational, Scalar};
use crate::thermo::{thermal_lorenz, thermomajorizes, LorenzCurve, WorkBitSpec, WorkDirection};

/// Minimal work (units of kT) for heating the qubit without a memory.
pub fn qubit_uncorrelated_threshold() -> f64 {
    ln(1.5)
}

/// Closed form of the minimal work with the correlated memory: the binding
/// elbow of the thermal Lorenz curves gives `e^{-Δ} = 7/9`.
pub fn qubit_correlated_threshold() -> f64 {
    ln(9.0 / 7.0)
}

/// A qubit with gap `kT log 2` heated from `(2/3, 1/3)` to `(1/2, 1/2)`,
/// and a memory `M` that ends up correlated with it.
#[derive(Debug, Clone, PartialEq)]
pub struct QubitScenario {
    pub ctx_a: ThermalContext,
    pub sigma_m: Dist<Rational>,
    /// Rows `g, e` of A, columns `0, 1` of M.
    pub rho_am: BipartiteDist<Rational>,
}

impl QubitScenario {
    pub fn new() -> Self {
        let r = |n, d| <Rational as Scalar>::from_ratio(n, d);
        QubitScenario {
            ctx_a: ThermalContext::new(alloc::vec![0.0, LN_2], 1.0).expect("valid context"),
            sigma_m: Dist::from_fractions(&[(3, 10), (7, 10)]).expect("valid"),
            rho_am: BipartiteDist::new(alloc::vec![alloc::vec![r(1, 10), r(4, 10)], alloc::vec![r(2, 10), r(3, 10)]])
                .expect("valid"),
        }
    }

    pub fn gibbs_a(&self) -> Dist<Rational> {
        Dist::from_fractions(&[(2, 3), (1, 3)]).expect("valid")
    }

    pub fn rho_a(&self) -> Dist<Rational> {
        self.rho_am.marginal_a()
    }
}

impl Default for QubitScenario {
    fn default() -> Self {
        Self::new()
    }
}

/// `p_AMW = γ_A ⊗ σ_M ⊗ |e⟩` and `q_AMW = ρ'_AM ⊗ |g⟩` (W fastest) with
/// energies `(0, Δ, 0, Δ, log 2, log 2 + Δ, log 2, log 2 + Δ)` in units of
/// kT.
pub fn qubit_example_states(delta: f64) -> Result<(Dist<Rational>, Dist<Rational>, ThermalContext)> {
    let s = QubitScenario::new();
    let w = WorkBitSpec::new(delta, WorkDirection::SpendExcitedToGround)?;
    let p = tensor(&tensor(&s.gibbs_a(), &s.sigma_m), &w.initial());
    let q = tensor(&s.rho_am.flatten(), &w.target());
    let ctx = s
        .ctx_a
        .compose(&ThermalContext::trivial(2))?
        .compose(&w.context(1.0)?)?;
    Ok((p, q, ctx))
}

/// Float form of [`qubit_example_states`].
pub fn qubit_example_states_f64(delta: f64) -> Result<(Dist, Dist, ThermalContext)> {
    let (p, q, ctx) = qubit_example_states(delta)?;
    Ok((p.to_f64(), q.to_f64(), ctx))
}

pub fn qubit_correlated_feasible(delta: f64) -> Result<bool> {
    let (p, q, ctx) = qubit_example_states_f64(delta)?;
    thermomajorizes(&p, &q, &ctx)
}

/// Minimal work (units of kT) for the correlated transition, by bisection
/// on the thermomajorization test to `1e-9`.
pub fn qubit_min_work_correlated() -> Result<f64> {
    let (mut lo, mut hi) = (0.0, 1.0);
    while hi - lo > 1e-9 {
        let mid = 0.5 * (lo + hi);
        if qubit_correlated_feasible(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// The heating task as a main-result instance on `A' = A ⊗ W` with the
/// memory as the catalyst: input `γ_A ⊗ |e⟩`, joint target
/// `ρ'_AM ⊗ |g⟩` with rows over `A'` and columns over `M`.
pub fn qubit_heating_instance(delta: f64) -> Result<(Dist, BipartiteDist, ThermalContext)> {
    let s = QubitScenario::new();
    let w = WorkBitSpec::new(delta, WorkDirection::SpendExcitedToGround)?;
    let ctx = s.ctx_a.compose(&w.context(1.0)?)?;
    let p = tensor(&s.gibbs_a(), &w.initial()).to_f64();
    let j = s.rho_am.to_f64();
    let mut rows = alloc::vec::Vec::with_capacity(4);
    for a in 0..2 {
        rows.push(j.row(a).to_vec());
        rows.push(alloc::vec![0.0; 2]);
    }
    Ok((p, BipartiteDist::new(rows)?, ctx))
}

/// Thermal Lorenz curves of `p_AMW` and `q_AMW` at gap `delta`.
pub fn figure5_data(delta: f64) -> Result<(LorenzCurve, LorenzCurve)> {
    let (p, q, ctx) = qubit_example_states_f64(delta)?;
    Ok((thermal_lorenz(&p, &ctx)?, thermal_lorenz(&q, &ctx)?))
}

pub const FIG3_P: [f64; 3] = [0.91, 0.05, 0.04];
pub const FIG3_Q: [f64; 3] = [0.85, 0.14, 0.01];
pub const FIG3_DELTA: f64 = 1e-3;
pub const FIG3_N: u64 = 1_000_000_000_000_000;

pub fn figure3_pair() -> (Dist, Dist) {
    (
        Dist::new(FIG3_P.to_vec()).expect("valid"),
        Dist::new(FIG3_Q.to_vec()).expect("valid"),
    )
}

/// Balance curve of the three-level example at `δ = 10^-3`, `n = 10^15`.
pub fn figure3_data(grid: &AlphaGrid) -> Result<BalanceCurve> {
    let (p, q) = figure3_pair();
    balance_curve(&p, &q, &ExtensionParams::new(FIG3_DELTA, FIG3_N)?, grid)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn qubit_states_match_listing() {
        let (p, q, ctx) = qubit_example_states(0.3).unwrap();
        let expect_p = Dist::from_fractions(&[(0, 1), (1, 5), (0, 1), (7, 15), (0, 1), (1, 10), (0, 1), (7, 30)]).unwrap();
        let expect_q = Dist::from_fractions(&[(1, 10), (0, 1), (2, 5), (0, 1), (1, 5), (0, 1), (3, 10), (0, 1)]).unwrap();
        assert_eq!(p, expect_p);
        assert_eq!(q, expect_q);
        let e = ctx.energies();
        for (a, b) in e.iter().zip([0.0, 0.3, 0.0, 0.3, LN_2, LN_2 + 0.3, LN_2, LN_2 + 0.3]) {
            assert!((a - b).abs() < 1e-15);
        }
        let s = QubitScenario::new();
        assert_eq!(s.rho_a(), Dist::from_fractions(&[(1, 2), (1, 2)]).unwrap());
        assert_eq!(s.rho_am.marginal_b(), s.sigma_m);
    }

    #[test]
    fn correlated_threshold() {
        assert!(qubit_correlated_feasible(0.26).unwrap());
        assert!(!qubit_correlated_feasible(0.10).unwrap());
        let t = qubit_min_work_correlated().unwrap();
        assert!((t - qubit_correlated_threshold()).abs() < 2e-9);
        let mut last = false;
        for k in 0..60 {
            let f = qubit_correlated_feasible(k as f64 * 0.01).unwrap();
            assert!(f || !last);
            last = f;
        }
    }

    #[test]
    fn heating_pipeline() {
        use crate::protocols::{run_main_result_1_with_joint, ProtocolCaps, ReportLevel};
        for exact in [false, true] {
            let caps = ProtocolCaps {
                exact,
                ..ProtocolCaps::default()
            };
            let (p, j, ctx) = qubit_heating_instance(ln(4.0 / 3.0)).unwrap();
            let r = run_main_result_1_with_joint(&p, &j, &ctx, 0.01, &caps).unwrap();
            assert!(r.feasible);
            assert_eq!(r.level, ReportLevel::Pipeline);
            assert!(r.marginal_m_exact && r.workbit_pure);
            assert!(r.output_error < 0.01);
            let (p, j, ctx) = qubit_heating_instance(0.2).unwrap();
            let r = run_main_result_1_with_joint(&p, &j, &ctx, 0.01, &caps).unwrap();
            assert!(!r.feasible);
        }
    }

    #[test]
    fn fig3_curve() {
        let c = figure3_data(&AlphaGrid::parse("0.5+2+5+-2").unwrap()).unwrap();
        for (a, v) in &c.samples {
            let lim = c.limit.iter().find(|(b, _)| b == a).unwrap().1;
            assert!((v.to_f64() - lim.to_f64()).abs() < 1e-4, "{a}");
        }
    }
}
