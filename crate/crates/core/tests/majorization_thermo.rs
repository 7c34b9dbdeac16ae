mod common;

use common::*;
use corrcat_core::majorization::{bistochastic_witness, catalyst_search, majorizes, t_transform_chain, trumping_conditions, Feasibility};
use corrcat_core::thermo::{
    formation_feasible, gibbs_preserving_witness, gibbs_preserving_witness_exact, min_work_formation, thermal_lorenz,
    thermal_lorenz_with, thermomajorizes, thermomajorizes_with, FormationMode,
};
use corrcat_core::{tensor, AlphaGrid, BipartiteDist, Dist, Rational, StochasticMatrix, ThermalContext};
use rand::seq::SliceRandom;
use rand::Rng;

fn rational_dist(rng: &mut impl Rng, d: usize, den: i64) -> Dist<Rational> {
    let mut w: Vec<i64> = (0..d).map(|_| rng.gen_range(0..=den)).collect();
    if w.iter().all(|&x| x == 0) {
        w[0] = 1;
    }
    let s: i64 = w.iter().sum();
    Dist::from_fractions(&w.iter().map(|&x| (x, s)).collect::<Vec<_>>()).unwrap()
}

fn to_f(p: &Dist<Rational>) -> Vec<f64> {
    p.to_f64().into_vec()
}

#[test]
fn majorization_agrees_with_hlp_and_witnesses() {
    let mut r = rng(1);
    let mut disagree = 0;
    let mut yes = 0;
    for k in 0..1000 {
        let d = r.gen_range(1..=6);
        let p = random_dist(&mut r, d);
        let q = if k % 2 == 0 {
            Dist::new(t_mix(&mut r, p.probs(), 3)).unwrap()
        } else {
            random_dist(&mut r, d)
        };
        let m = majorizes(&p, &q);
        if m != majorizes_hlp(p.probs(), q.probs(), 1e-12) {
            disagree += 1;
        }
        match t_transform_chain(&p, &q) {
            Ok(chain) => {
                assert!(m);
                yes += 1;
                assert!(chain.steps.len() < d.max(1));
                let out = chain.apply(&p).unwrap();
                assert!(half_l1(out.probs(), q.probs()) <= 1e-9);
                let lam = bistochastic_witness(&p, &q).unwrap();
                assert!(lam.is_bistochastic(1e-12));
                let u = lam.apply(&Dist::uniform(d)).unwrap();
                assert!(u.probs().iter().all(|x| (x - 1.0 / d as f64).abs() < 1e-12));
            }
            Err(_) => assert!(!m),
        }
    }
    assert_eq!(disagree, 0);
    assert!(yes >= 500);
}

#[test]
fn exact_witnesses_are_exact() {
    let mut r = rng(2);
    for _ in 0..300 {
        let d = r.gen_range(2..=6);
        let p = rational_dist(&mut r, d, 12);
        let q = rational_dist(&mut r, d, 12);
        let m = majorizes(&p, &q);
        assert_eq!(m, majorizes_hlp(&to_f(&p), &to_f(&q), 1e-12));
        if m {
            let chain = t_transform_chain(&p, &q).unwrap();
            assert_eq!(chain.apply(&p).unwrap(), q);
        }
    }
}

#[test]
fn witness_examples() {
    let p = Dist::new(vec![0.3, 0.7]).unwrap();
    let lam = bistochastic_witness(&p, &p).unwrap();
    assert_eq!(lam, StochasticMatrix::identity(2));
    let lam: StochasticMatrix = bistochastic_witness(&Dist::basis(2, 0), &Dist::uniform(2)).unwrap();
    for i in 0..2 {
        for j in 0..2 {
            assert!((lam.get(i, j) - 0.5).abs() < 1e-15);
        }
    }
    assert!(!majorizes(
        &Dist::new(vec![2.0 / 3.0, 1.0 / 3.0]).unwrap(),
        &Dist::new(vec![0.75, 0.25]).unwrap()
    ));
}

#[test]
fn stochastic_maps_contract_trace_norm() {
    let mut r = rng(3);
    for _ in 0..500 {
        let (a, b) = (r.gen_range(1..6), r.gen_range(1..6));
        let cols: Vec<Vec<f64>> = (0..b).map(|_| simplex(&mut r, a)).collect();
        let rows: Vec<Vec<f64>> = (0..a).map(|i| cols.iter().map(|c| c[i]).collect()).collect();
        let lam = StochasticMatrix::new(rows).unwrap();
        let x: Vec<f64> = (0..b).map(|_| r.gen_range(-1.0..1.0)).collect();
        let y = lam.apply_slice(&x);
        let n = |v: &[f64]| v.iter().map(|t| t.abs()).sum::<f64>();
        assert!(n(&y) <= n(&x) + 1e-12);
    }
}

#[test]
fn trumping_is_permutation_invariant() {
    let grid = AlphaGrid::parse("lin:0.05:3:30+-1+-0.3").unwrap();
    let mut r = rng(4);
    for _ in 0..100 {
        let d = r.gen_range(2..=5);
        let p = random_dist(&mut r, d);
        let q = random_dist(&mut r, d);
        let v = trumping_conditions(&p, &q, &grid).unwrap();
        let mut perm: Vec<usize> = (0..d).collect();
        perm.shuffle(&mut r);
        let w = trumping_conditions(&p.permuted(&perm), &q, &grid).unwrap();
        assert_eq!(v.feasible, w.feasible);
        for (a, b) in v.margins.iter().zip(&w.margins) {
            assert!((a.1 - b.1).abs() < 1e-12 || a.1 == b.1);
        }
    }
}

#[test]
fn trumping_examples() {
    let grid = AlphaGrid::standard();
    let p = Dist::new(vec![0.91, 0.05, 0.04]).unwrap();
    let q = Dist::new(vec![0.85, 0.14, 0.01]).unwrap();
    assert_eq!(trumping_conditions(&p, &q, &grid).unwrap().feasible, Feasibility::No);
    // q mixed halfway toward uniform is strictly more disordered
    let qq = corrcat_core::mix(&q, &Dist::uniform(3), 0.5).unwrap();
    assert_eq!(trumping_conditions(&q, &qq, &grid).unwrap().feasible, Feasibility::Yes);
    let v = trumping_conditions(&Dist::basis(3, 0), &q, &grid).unwrap();
    assert!(v.violated.iter().all(|(a, _)| !a.is_negative()));
    assert!(trumping_conditions(&p, &p.permuted(&[2, 0, 1]), &grid).is_err());
}

#[test]
fn catalyst_search_examples() {
    let p = Dist::new(vec![0.5, 0.25, 0.25, 0.0]).unwrap();
    let q = Dist::new(vec![0.4, 0.4, 0.1, 0.1]).unwrap();
    assert!(!majorizes(&p, &q));
    let c = catalyst_search(&p, &q, 2, 20_000, 7).expect("a two-level catalyst exists");
    assert_eq!(c.dim(), 2);
    assert!(majorizes(&tensor(&p, &c), &tensor(&q, &c)));
    let c = catalyst_search(&Dist::basis(2, 0), &Dist::uniform(2), 3, 10, 0).unwrap();
    assert_eq!(c.dim(), 1);
    let fp = Dist::new(vec![0.91, 0.05, 0.04]).unwrap();
    let fq = Dist::new(vec![0.85, 0.14, 0.01]).unwrap();
    assert!(catalyst_search(&fp, &fq, 3, 2_000, 0).is_none());
}

#[test]
fn trivial_hamiltonian_reduces_to_majorization() {
    let mut r = rng(5);
    for _ in 0..1000 {
        let d = r.gen_range(1..=8);
        let ctx = ThermalContext::trivial(d);
        let p = sparse_dist(&mut r, d, 0.2);
        let q = if r.gen::<bool>() {
            Dist::new(t_mix(&mut r, p.probs(), 2)).unwrap()
        } else {
            random_dist(&mut r, d)
        };
        assert_eq!(thermomajorizes(&p, &q, &ctx).unwrap(), majorizes(&p, &q));
    }
}

/// Composite Lorenz dominance against exact linear feasibility of a
/// Gibbs-preserving stochastic map, on products `p ⊗ p'` with product
/// Gibbs weights.
#[test]
fn lorenz_dominance_matches_exact_feasibility() {
    let mut r = rng(6);
    let (mut yes, mut no) = (0, 0);
    for _ in 0..120 {
        let (a, b) = if r.gen::<bool>() { (2, 2) } else { (r.gen_range(2..=5), 1) };
        let ga = rational_dist(&mut r, a, 6);
        let gb = rational_dist(&mut r, b, 6);
        if !ga.is_full_rank() || !gb.is_full_rank() {
            continue;
        }
        let g = tensor(&ga, &gb);
        let p = tensor(&rational_dist(&mut r, a, 5), &rational_dist(&mut r, b, 5));
        let q = tensor(&rational_dist(&mut r, a, 5), &rational_dist(&mut r, b, 5));
        let lorenz = thermomajorizes_with(&p, &q, &g).unwrap();
        let lp = gibbs_preserving_witness_exact(&p, &q, &g);
        assert_eq!(lorenz, lp.is_ok(), "p={p:?} q={q:?} g={g:?}");
        if let Ok(m) = lp {
            assert_eq!(m.apply(&p).unwrap(), q);
            assert_eq!(m.apply(&g).unwrap(), g);
            yes += 1;
        } else {
            no += 1;
        }
    }
    assert!(yes > 10 && no > 10, "{yes} {no}");
}

#[test]
fn float_witness_preserves_gibbs() {
    let mut r = rng(7);
    let mut built = 0;
    for _ in 0..200 {
        let d = r.gen_range(2..=4);
        let e: Vec<f64> = (0..d).map(|_| r.gen_range(0.0..2.0)).collect();
        let ctx = ThermalContext::new(e, 1.0).unwrap();
        let p = random_dist(&mut r, d);
        let q = corrcat_core::mix(&p, ctx.gibbs(), r.gen_range(0.1..0.9)).unwrap();
        assert!(thermomajorizes(&p, &q, &ctx).unwrap());
        let lam = gibbs_preserving_witness(&p, &q, &ctx).unwrap();
        assert!(lam.is_stochastic(1e-9));
        assert!(half_l1(&lam.apply_slice(p.probs()), q.probs()) <= 1e-8);
        assert!(half_l1(&lam.apply_slice(ctx.gibbs().probs()), ctx.gibbs().probs()) <= 1e-8);
        built += 1;
    }
    assert_eq!(built, 200);
}

#[test]
fn lorenz_curves_are_concave() {
    let mut r = rng(8);
    for _ in 0..500 {
        let d = r.gen_range(1..=7);
        let e: Vec<f64> = (0..d).map(|_| r.gen_range(-1.0..3.0)).collect();
        let ctx = ThermalContext::new(e, r.gen_range(0.2..3.0)).unwrap();
        let p = sparse_dist(&mut r, d, 0.3);
        let c = thermal_lorenz(&p, &ctx).unwrap();
        assert!(c.is_concave(1e-9));
        assert_eq!(c.elbows().len(), d + 1);
        let last = c.elbows()[d];
        assert!((last.0 - 1.0).abs() < 1e-12 && (last.1 - 1.0).abs() < 1e-12);
        assert!(thermomajorizes(&p, ctx.gibbs(), &ctx).unwrap());
    }
    let pure = thermal_lorenz_with(&Dist::basis(2, 0), &Dist::uniform(2)).unwrap();
    assert_eq!(pure.elbows(), &[(0.0, 0.0), (0.5, 1.0), (1.0, 1.0)]);
    let ctx = ThermalContext::new(vec![0.0, 1.0, 2.0], 1.0).unwrap();
    let g = thermal_lorenz(ctx.gibbs(), &ctx).unwrap();
    assert!(g.elbows().iter().all(|(x, y)| (x - y).abs() < 1e-12));
}

#[test]
fn min_work_examples() {
    let ctx = ThermalContext::new(vec![0.0, std::f64::consts::LN_2], 1.0).unwrap();
    let rho = Dist::uniform(2);
    let w = min_work_formation(ctx.gibbs(), &rho, &ctx, &FormationMode::NoCatalyst).unwrap();
    assert!((w - 1.5f64.ln()).abs() < 1e-6);
    let w0 = min_work_formation(&rho, &rho, &ctx, &FormationMode::NoCatalyst).unwrap();
    assert_eq!(w0, 0.0);
    let joint = BipartiteDist::new(vec![vec![0.1, 0.4], vec![0.2, 0.3]]).unwrap();
    let mode = FormationMode::WithJoint {
        joint,
        sigma_m: Dist::new(vec![0.3, 0.7]).unwrap(),
    };
    let wj = min_work_formation(ctx.gibbs(), &rho, &ctx, &mode).unwrap();
    assert!(wj <= 0.26 && wj > 0.25);
    let mut last = false;
    for k in 0..=80 {
        let f = formation_feasible(ctx.gibbs(), &rho, &ctx, &mode, k as f64 * 0.01).unwrap();
        assert!(f || !last);
        last = f;
    }
}
