mod common;

use common::*;
use corrcat_core::entropy::{
    burg_entropy, delta_f_alpha_example, free_energy_alpha, mutual_information, renyi_divergence, renyi_entropy,
};
use corrcat_core::math::{eta, eta_bin};
use corrcat_core::{mix, tensor, trace_distance, Alpha, BipartiteDist, Dist, ThermalContext};
use proptest::prelude::*;
use rand::Rng;

const LN2: f64 = std::f64::consts::LN_2;

fn arb_dist(max_dim: usize) -> impl Strategy<Value = Dist> {
    (1..=max_dim)
        .prop_flat_map(|d| prop::collection::vec(0.0f64..1.0, d))
        .prop_filter("non-zero", |v| v.iter().sum::<f64>() > 1e-3)
        .prop_map(|v| {
            let s: f64 = v.iter().sum();
            Dist::new(v.into_iter().map(|x| x / s).collect()).unwrap()
        })
}

fn arb_full_rank(max_dim: usize) -> impl Strategy<Value = Dist> {
    (2..=max_dim)
        .prop_flat_map(|d| prop::collection::vec(0.01f64..1.0, d))
        .prop_map(|v| {
            let s: f64 = v.iter().sum();
            Dist::new(v.into_iter().map(|x| x / s).collect()).unwrap()
        })
}

#[test]
fn dist_examples() {
    assert!(Dist::new(vec![0.5, 0.6]).is_err());
    assert!(Dist::new(vec![1.1, -0.1]).is_err());
    let p = Dist::from_fractions(&[(2, 3), (1, 3)]).unwrap();
    let s = Dist::from_fractions(&[(3, 10), (7, 10)]).unwrap();
    assert_eq!(
        tensor(&p, &s),
        Dist::from_fractions(&[(1, 5), (7, 15), (1, 10), (7, 30)]).unwrap()
    );
    let t = trace_distance(&Dist::new(vec![2.0 / 3.0, 1.0 / 3.0]).unwrap(), &Dist::uniform(2)).unwrap();
    assert!((t - 1.0 / 6.0).abs() < 1e-15);
    let m = mix(&Dist::basis(2, 0), &Dist::uniform(2), 0.5).unwrap();
    assert_eq!(m.probs(), &[0.75, 0.25]);
    assert!(mix(&Dist::basis(2, 0), &Dist::uniform(2), 1.5).is_err());
}

proptest! {
    #[test]
    fn tensor_marginals_recover_factors(p in arb_dist(5), q in arb_dist(5)) {
        let j = BipartiteDist::product(&p, &q);
        prop_assert_eq!(j.flatten(), tensor(&p, &q));
        for (a, b) in j.marginal_a().probs().iter().zip(p.probs()) {
            prop_assert!((a - b).abs() < 1e-14);
        }
        for (a, b) in j.marginal_b().probs().iter().zip(q.probs()) {
            prop_assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn tensor_is_associative(p in arb_dist(3), q in arb_dist(3), r in arb_dist(3)) {
        let a = tensor(&tensor(&p, &q), &r);
        let b = tensor(&p, &tensor(&q, &r));
        for (x, y) in a.probs().iter().zip(b.probs()) {
            prop_assert!((x - y).abs() < 1e-15);
        }
    }

    #[test]
    fn trace_distance_is_a_metric(seed in 0u64..10_000, d in 1usize..6) {
        let mut r = rng(seed);
        let (p, q, s) = (random_dist(&mut r, d), random_dist(&mut r, d), random_dist(&mut r, d));
        let pq = trace_distance(&p, &q).unwrap();
        prop_assert!((pq - trace_distance(&q, &p).unwrap()).abs() < 1e-15);
        prop_assert!(pq <= trace_distance(&p, &s).unwrap() + trace_distance(&s, &q).unwrap() + 1e-15);
        prop_assert!(trace_distance(&p, &p).unwrap() == 0.0);
        prop_assert!((0.0..=1.0 + 1e-15).contains(&pq));
        prop_assert!((pq - half_l1(p.probs(), q.probs())).abs() < 1e-15);
    }

    #[test]
    fn exact_mix_stays_normalized(a in 1i64..50, b in 1i64..50, l in 0i64..=10) {
        let p = Dist::from_fractions(&[(a, a + b), (b, a + b)]).unwrap();
        let q = Dist::from_fractions(&[(1, 3), (2, 3)]).unwrap();
        let lam = corrcat_core::Rational::new(l.into(), 10.into());
        let m = mix(&p, &q, lam).unwrap();
        let s = m.probs().iter().fold(corrcat_core::Rational::from_integer(0.into()), |x, y| x + y);
        prop_assert_eq!(s, corrcat_core::Rational::from_integer(1.into()));
    }

    #[test]
    fn renyi_matches_direct_formula(p in arb_full_rank(6), a in prop::sample::select(vec![-3.0, -0.7, 0.2, 0.5, 2.0, 7.5])) {
        let h = renyi_entropy(&p, Alpha::Finite(a)).to_f64();
        prop_assert!((h - renyi(p.probs(), a)).abs() < 1e-10);
    }

    #[test]
    fn renyi_additive(p in arb_full_rank(4), q in arb_full_rank(4),
                      a in prop::sample::select(vec![-2.0, -0.5, 0.3, 0.5, 2.0, 10.0])) {
        let pq = tensor(&p, &q);
        for alpha in [Alpha::Finite(a), Alpha::Zero, Alpha::One, Alpha::PlusInf, Alpha::MinusInf] {
            let lhs = renyi_entropy(&pq, alpha).to_f64();
            let rhs = renyi_entropy(&p, alpha).to_f64() + renyi_entropy(&q, alpha).to_f64();
            prop_assert!((lhs - rhs).abs() < 1e-9, "{alpha}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn renyi_non_increasing_for_positive_orders(p in arb_dist(6)) {
        let grid = [0.0, 0.01, 0.2, 0.5, 0.9, 1.0, 1.5, 2.0, 5.0, 30.0, f64::INFINITY];
        let hs: Vec<f64> = grid.iter().map(|&a| renyi_entropy(&p, Alpha::from_f64(a).unwrap()).to_f64()).collect();
        for w in hs.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-12, "{:?}", hs);
        }
    }

    #[test]
    fn subadditive_at_zero_and_one(seed in 0u64..10_000) {
        let mut r = rng(seed);
        let j = if seed % 2 == 0 { random_joint(&mut r, 3, 4) } else {
            let flat = sparse_dist(&mut r, 12, 0.4);
            BipartiteDist::from_flat(flat.into_vec(), 3, 4).unwrap()
        };
        for a in [Alpha::Zero, Alpha::One] {
            let hj = renyi_entropy(&j.flatten(), a).to_f64();
            let ha = renyi_entropy(&j.marginal_a(), a).to_f64();
            let hb = renyi_entropy(&j.marginal_b(), a).to_f64();
            prop_assert!(hj <= ha + hb + 1e-12);
        }
    }

    #[test]
    fn divergence_nonnegative(p in arb_dist(5), seed in 0u64..1000,
                              a in prop::sample::select(vec![0.3, 0.5, 2.0, 4.0])) {
        let q = random_dist(&mut rng(seed), p.dim());
        for alpha in [Alpha::Zero, Alpha::Finite(a), Alpha::One, Alpha::PlusInf] {
            prop_assert!(renyi_divergence(&p, &q, alpha).unwrap().to_f64() >= -1e-12);
        }
        prop_assert!(renyi_divergence(&q, &q, Alpha::Finite(a)).unwrap().to_f64().abs() < 1e-12);
        let s1 = renyi_divergence(&p, &q, Alpha::One).unwrap().to_f64();
        prop_assert!((s1 - kl(p.probs(), q.probs())).abs() < 1e-10);
    }

    #[test]
    fn free_energy_minimized_by_gibbs(p in arb_full_rank(4), seed in 0u64..1000) {
        let mut r = rng(seed);
        let e: Vec<f64> = (0..p.dim()).map(|_| r.gen_range(0.0..3.0)).collect();
        let ctx = ThermalContext::new(e, 0.7).unwrap();
        for a in [Alpha::Finite(0.5), Alpha::One, Alpha::Finite(2.0), Alpha::PlusInf] {
            let fp = free_energy_alpha(&p, &ctx, a).unwrap().to_f64();
            let fg = free_energy_alpha(ctx.gibbs(), &ctx, a).unwrap().to_f64();
            prop_assert!(fp >= fg - 1e-12);
            prop_assert!((fg + ctx.kt() * ctx.log_z()).abs() < 1e-12);
        }
    }
}

#[test]
fn renyi_examples() {
    let p = Dist::new(vec![0.91, 0.05, 0.04]).unwrap();
    let q = Dist::new(vec![0.85, 0.14, 0.01]).unwrap();
    // the positive-order violations end near α ≈ 0.3142, just short of 1/3
    for a in [0.01, 0.1, 0.3] {
        assert!(renyi_entropy(&p, Alpha::Finite(a)).to_f64() > renyi_entropy(&q, Alpha::Finite(a)).to_f64());
    }
    for a in [0.32, 1.0 / 3.0, 0.5] {
        assert!(renyi_entropy(&p, Alpha::Finite(a)).to_f64() < renyi_entropy(&q, Alpha::Finite(a)).to_f64());
    }
    for a in [Alpha::Finite(0.5), Alpha::One, Alpha::Finite(3.0), Alpha::PlusInf, Alpha::Zero] {
        assert!((renyi_entropy(&Dist::uniform(5), a).to_f64() - 5f64.ln()).abs() < 1e-12);
    }
    // the sign factor makes negative orders give -log m on uniform states
    assert!((renyi_entropy(&Dist::uniform(5), Alpha::Finite(-2.0)).to_f64() + 5f64.ln()).abs() < 1e-12);
    assert_eq!(renyi_entropy(&Dist::basis(2, 0), Alpha::Zero).to_f64(), 0.0);
    assert_eq!(renyi_entropy(&Dist::new(vec![0.5, 0.5, 0.0]).unwrap(), Alpha::MinusInf).to_f64(), f64::NEG_INFINITY);
    assert_eq!(burg_entropy(&Dist::basis(2, 0)).to_f64(), f64::NEG_INFINITY);
    let b = burg_entropy(&Dist::new(vec![2.0 / 3.0, 1.0 / 3.0]).unwrap()).to_f64();
    assert!((b - 0.5 * ((2.0f64 / 3.0).ln() + (1.0f64 / 3.0).ln())).abs() < 1e-15);
    assert!((burg_entropy(&Dist::uniform(4)).to_f64() + 4f64.ln()).abs() < 1e-15);
}

#[test]
fn divergence_examples() {
    let g = Dist::new(vec![2.0 / 3.0, 1.0 / 3.0]).unwrap();
    let s = renyi_divergence(&Dist::basis(2, 0), &g, Alpha::PlusInf).unwrap().to_f64();
    assert!((s - 1.5f64.ln()).abs() < 1e-15);
    let s0 = renyi_divergence(&Dist::new(vec![0.5, 0.5, 0.0]).unwrap(), &Dist::uniform(3), Alpha::Zero)
        .unwrap()
        .to_f64();
    assert!((s0 + (2.0f64 / 3.0).ln()).abs() < 1e-15);
    let p = Dist::new(vec![0.2, 0.8]).unwrap();
    let a = renyi_divergence(&p, &g, Alpha::MinusInf).unwrap();
    let b = renyi_divergence(&g, &p, Alpha::PlusInf).unwrap();
    assert_eq!(a, b);
}

#[test]
fn qubit_free_energy_differences() {
    let ctx = ThermalContext::new(vec![0.0, LN2], 1.0).unwrap();
    let rho = Dist::uniform(2);
    let d1 = free_energy_alpha(&rho, &ctx, Alpha::One).unwrap().to_f64()
        - free_energy_alpha(ctx.gibbs(), &ctx, Alpha::One).unwrap().to_f64();
    assert!((d1 - (3f64.ln() - 1.5 * LN2)).abs() < 1e-12);
    let dinf = free_energy_alpha(&rho, &ctx, Alpha::PlusInf).unwrap().to_f64()
        - free_energy_alpha(ctx.gibbs(), &ctx, Alpha::PlusInf).unwrap().to_f64();
    assert!((dinf - 1.5f64.ln()).abs() < 1e-12);
}

/// The closed-form example against the free energies of the explicit
/// four-level states `γ_A ⊗ |e⟩` and `ρ'_A ⊗ |g⟩`.
#[test]
fn example_formula_matches_explicit_states() {
    let delta = 0.17;
    let ctx = ThermalContext::new(vec![0.0, delta, LN2, LN2 + delta], 1.0).unwrap();
    let p = Dist::new(vec![0.0, 2.0 / 3.0, 0.0, 1.0 / 3.0]).unwrap();
    let q = Dist::new(vec![0.5, 0.0, 0.5, 0.0]).unwrap();
    let mut last = f64::NEG_INFINITY;
    for a in [0.01, 0.3, 0.5, 2.0, 3.0, 10.0, 50.0] {
        let alpha = Alpha::Finite(a);
        let direct = free_energy_alpha(&q, &ctx, alpha).unwrap().to_f64()
            - free_energy_alpha(&p, &ctx, alpha).unwrap().to_f64();
        let formula = delta_f_alpha_example(alpha, delta).unwrap();
        assert!((direct - formula).abs() < 1e-10, "α={a}: {direct} vs {formula}");
        assert!(formula > last);
        last = formula;
    }
    let a2 = delta_f_alpha_example(Alpha::Finite(2.0), 0.0).unwrap();
    assert!((a2 - (1.5f64.ln() + 3f64.ln() - 2.0 * LN2)).abs() < 1e-12);
    let one = delta_f_alpha_example(Alpha::One, delta).unwrap();
    assert!((one - (3f64.ln() - 1.5 * LN2 - delta)).abs() < 1e-15);
}

#[test]
fn mutual_information_examples() {
    let prod = BipartiteDist::product(&Dist::new(vec![0.3, 0.7]).unwrap(), &Dist::uniform(3));
    assert!(mutual_information(&prod).abs() < 1e-15);
    let corr = BipartiteDist::new(vec![vec![0.5, 0.0], vec![0.0, 0.5]]).unwrap();
    assert!((mutual_information(&corr) - LN2).abs() < 1e-15);
    let mut r = rng(5);
    for _ in 0..200 {
        let j = random_joint(&mut r, 3, 4);
        let rows: Vec<Vec<f64>> = (0..3).map(|i| j.row(i).to_vec()).collect();
        assert!((mutual_information(&j) - mutual_info(&rows)).abs() < 1e-12);
    }
}

#[test]
fn eta_values() {
    assert_eq!(eta(0.0).unwrap(), 0.0);
    assert_eq!(eta(1.0).unwrap(), 0.0);
    assert!((eta(0.5).unwrap() - 0.5 * LN2).abs() < 1e-15);
    assert!(eta(1.5).is_err());
    assert!((eta_bin(0.5).unwrap() - LN2).abs() < 1e-15);
}

#[test]
fn pinsker_on_random_joints() {
    let mut r = rng(11);
    for _ in 0..2000 {
        let (a, b) = (r.gen_range(2..5), r.gen_range(2..5));
        let j = random_joint(&mut r, a, b);
        let prod = tensor(&j.marginal_a(), &j.marginal_b());
        let t = trace_distance(&j.flatten(), &prod).unwrap();
        assert!(t <= (mutual_information(&j) / 2.0).sqrt() + 1e-12);
    }
}
