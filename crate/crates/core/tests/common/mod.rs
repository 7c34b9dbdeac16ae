#![allow(dead_code)]

use corrcat_core::{BipartiteDist, Dist};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform point on the simplex (normalized exponentials).
pub fn simplex(rng: &mut impl Rng, d: usize) -> Vec<f64> {
    let mut v: Vec<f64> = (0..d).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let s: f64 = v.iter().sum();
    v.iter_mut().for_each(|x| *x /= s);
    v
}

pub fn random_dist(rng: &mut impl Rng, d: usize) -> Dist {
    Dist::new(simplex(rng, d)).unwrap()
}

/// Like `random_dist` but each entry is zeroed with probability `zero_p`.
pub fn sparse_dist(rng: &mut impl Rng, d: usize, zero_p: f64) -> Dist {
    let mut v = simplex(rng, d);
    for x in v.iter_mut() {
        if rng.gen::<f64>() < zero_p {
            *x = 0.0;
        }
    }
    if v.iter().all(|&x| x == 0.0) {
        v[0] = 1.0;
    }
    let s: f64 = v.iter().sum();
    Dist::new(v.into_iter().map(|x| x / s).collect()).unwrap()
}

pub fn random_joint(rng: &mut impl Rng, a: usize, b: usize) -> BipartiteDist {
    let flat = simplex(rng, a * b);
    BipartiteDist::new(flat.chunks(b).map(|r| r.to_vec()).collect()).unwrap()
}

/// Random product of T-transforms applied to `p`.
pub fn t_mix(rng: &mut impl Rng, p: &[f64], steps: usize) -> Vec<f64> {
    let mut x = p.to_vec();
    let d = x.len();
    if d < 2 {
        return x;
    }
    for _ in 0..steps {
        let i = rng.gen_range(0..d);
        let mut j = rng.gen_range(0..d - 1);
        if j >= i {
            j += 1;
        }
        let t: f64 = rng.gen();
        let (a, b) = (x[i], x[j]);
        x[i] = t * a + (1.0 - t) * b;
        x[j] = (1.0 - t) * a + t * b;
    }
    let s: f64 = x.iter().sum();
    x.iter().map(|v| v / s).collect()
}

// Independent oracles: plain loops, no log-domain tricks.

pub fn shannon(p: &[f64]) -> f64 {
    p.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.ln()).sum()
}

/// `sgn(α)/(1-α) log Σ p^α` over the support, finite α ∉ {0, 1}.
pub fn renyi(p: &[f64], a: f64) -> f64 {
    let s: f64 = p.iter().filter(|&&x| x > 0.0).map(|&x| x.powf(a)).sum();
    a.signum() / (1.0 - a) * s.ln()
}

pub fn kl(p: &[f64], q: &[f64]) -> f64 {
    p.iter()
        .zip(q)
        .filter(|(&a, _)| a > 0.0)
        .map(|(&a, &b)| a * (a / b).ln())
        .sum()
}

pub fn half_l1(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

/// Hardy–Littlewood–Pólya: `p ≻ q` iff `Σ|p_i - t| ≥ Σ|q_i - t|` for every
/// `t`; the difference is piecewise linear, so breakpoints suffice.
pub fn majorizes_hlp(p: &[f64], q: &[f64], tol: f64) -> bool {
    let f = |v: &[f64], t: f64| v.iter().map(|x| (x - t).abs()).sum::<f64>();
    p.iter()
        .chain(q)
        .all(|&t| f(p, t) >= f(q, t) - tol)
}

pub fn gibbs(energies: &[f64], beta: f64) -> Vec<f64> {
    let w: Vec<f64> = energies.iter().map(|e| (-beta * e).exp()).collect();
    let z: f64 = w.iter().sum();
    w.iter().map(|x| x / z).collect()
}

pub fn mutual_info(j: &[Vec<f64>]) -> f64 {
    let a: Vec<f64> = j.iter().map(|r| r.iter().sum()).collect();
    let b: Vec<f64> = (0..j[0].len()).map(|k| j.iter().map(|r| r[k]).sum()).collect();
    let mut s = 0.0;
    for (i, r) in j.iter().enumerate() {
        for (k, &x) in r.iter().enumerate() {
            if x > 0.0 {
                s += x * (x / (a[i] * b[k])).ln();
            }
        }
    }
    s
}
