//! Probability vectors and joint distributions.
//!
//! Multi-index flattening is row-major throughout: entry `(i, j)` of a
//! `d_a × d_b` object lives at `i * d_b + j`, so in `a ⊗ b ⊗ c` the last
//! factor varies fastest.

use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar};
use crate::tolerance::Tolerances;

#[derive(Debug, Clone, PartialEq)]
pub struct Dist<T = f64> {
    probs: Vec<T>,
}

impl<T: Scalar> Dist<T> {
    /// Validates `values`: entries slightly below zero (within the
    /// normalization tolerance) are clamped to zero, anything else that is
    /// negative or off-normalized is rejected. Exact backends get no slack.
    pub fn new(values: Vec<T>) -> Result<Self> {
        Self::with_tolerance(values, Tolerances::DEFAULT.norm)
    }

    pub fn with_tolerance(mut values: Vec<T>, tol: f64) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInput);
        }
        let slack = T::slack(tol);
        let mut sum = T::zero();
        for (index, v) in values.iter_mut().enumerate() {
            if !T::EXACT && !v.to_f64().is_finite() {
                return Err(Error::NonFinite);
            }
            if *v < T::zero() {
                if -v.clone() > slack {
                    return Err(Error::NegativeEntry {
                        index,
                        value: v.to_f64(),
                    });
                }
                *v = T::zero();
            }
            sum = sum + v.clone();
        }
        if (sum.clone() - T::one()).abs() > slack {
            return Err(Error::NotNormalized { sum: sum.to_f64() });
        }
        Ok(Dist { probs: values })
    }

    /// Skips validation. Callers guarantee the invariants.
    pub(crate) fn from_vec_unchecked(probs: Vec<T>) -> Self {
        Dist { probs }
    }

    pub fn uniform(m: usize) -> Self {
        assert!(m > 0, "uniform distribution needs a positive dimension");
        let v = T::one() / T::from_u64(m as u64);
        Dist {
            probs: alloc::vec![v; m],
        }
    }

    /// The point mass on outcome `i`.
    pub fn basis(m: usize, i: usize) -> Self {
        assert!(i < m, "basis index out of range");
        let mut probs = alloc::vec![T::zero(); m];
        probs[i] = T::one();
        Dist { probs }
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    pub fn into_vec(self) -> Vec<T> {
        self.probs
    }

    pub fn dim(&self) -> usize {
        self.probs.len()
    }

    pub fn support_size(&self) -> usize {
        self.probs.iter().filter(|x| !x.is_zero()).count()
    }

    pub fn is_full_rank(&self) -> bool {
        self.support_size() == self.dim()
    }

    /// Entries sorted non-increasingly.
    pub fn sorted_desc(&self) -> Vec<T> {
        let mut v = self.probs.clone();
        v.sort_by(|a, b| b.partial_cmp(a).unwrap_or(Ordering::Equal));
        v
    }

    pub fn to_f64(&self) -> Dist<f64> {
        Dist {
            probs: self.probs.iter().map(Scalar::to_f64).collect(),
        }
    }

    /// Appends zeros up to dimension `d` (no-op if already that large).
    pub fn padded(&self, d: usize) -> Self {
        let mut probs = self.probs.clone();
        while probs.len() < d {
            probs.push(T::zero());
        }
        Dist { probs }
    }

    pub fn permuted(&self, perm: &[usize]) -> Self {
        Dist {
            probs: perm.iter().map(|&i| self.probs[i].clone()).collect(),
        }
    }
}

impl Dist<f64> {
    /// Exact rational version of a float distribution. Every finite `f64`
    /// converts exactly, so the result may fail exact normalization; in that
    /// case the last entry absorbs the rounding residue.
    pub fn to_rational(&self) -> Dist<Rational> {
        let mut probs: Vec<Rational> = self
            .probs
            .iter()
            .map(|&x| Rational::from_f64(x).unwrap_or_else(|| Rational::from_ratio(0, 1)))
            .collect();
        let sum: Rational = probs.iter().cloned().fold(Rational::from_ratio(0, 1), |a, b| a + b);
        let residue = Rational::from_ratio(1, 1) - sum;
        let last = probs
            .iter()
            .rposition(|x| *x > Rational::from_ratio(0, 1))
            .unwrap_or(probs.len() - 1);
        probs[last] += residue;
        Dist { probs }
    }
}

impl Dist<Rational> {
    /// Builds an exact distribution from `(numerator, denominator)` pairs.
    pub fn from_fractions(fracs: &[(i64, i64)]) -> Result<Self> {
        Dist::new(
            fracs
                .iter()
                .map(|&(n, d)| Rational::from_ratio(n, d))
                .collect(),
        )
    }
}

/// Row-major tensor product: entry `i * q.dim() + j` is `p_i q_j`.
pub fn tensor<T: Scalar>(p: &Dist<T>, q: &Dist<T>) -> Dist<T> {
    let mut out = Vec::with_capacity(p.dim() * q.dim());
    for a in &p.probs {
        for b in &q.probs {
            out.push(a.clone() * b.clone());
        }
    }
    Dist { probs: out }
}

/// `½ Σ |p_i - q_i|`.
pub fn trace_distance<T: Scalar>(p: &Dist<T>, q: &Dist<T>) -> Result<T> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            found: q.dim(),
        });
    }
    Ok(half_l1(p.probs(), q.probs()))
}

pub(crate) fn half_l1<T: Scalar>(a: &[T], b: &[T]) -> T {
    let s = a
        .iter()
        .zip(b)
        .fold(T::zero(), |acc, (x, y)| acc + (x.clone() - y.clone()).abs());
    s / T::from_u64(2)
}

/// `(1 - λ) p + λ q`.
pub fn mix<T: Scalar>(p: &Dist<T>, q: &Dist<T>, lambda: T) -> Result<Dist<T>> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            found: q.dim(),
        });
    }
    if lambda < T::zero() || lambda > T::one() {
        return Err(Error::LambdaOutOfRange(lambda.to_f64()));
    }
    let keep = T::one() - lambda.clone();
    Ok(Dist {
        probs: p
            .probs
            .iter()
            .zip(&q.probs)
            .map(|(a, b)| keep.clone() * a.clone() + lambda.clone() * b.clone())
            .collect(),
    })
}

/// Joint distribution stored row-major; rows index system A, columns B.
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteDist<T = f64> {
    joint: Vec<T>,
    rows: usize,
    cols: usize,
}

impl<T: Scalar> BipartiteDist<T> {
    pub fn new(rows: Vec<Vec<T>>) -> Result<Self> {
        let r = rows.len();
        if r == 0 {
            return Err(Error::EmptyInput);
        }
        let c = rows[0].len();
        if let Some(bad) = rows.iter().find(|row| row.len() != c) {
            return Err(Error::DimensionMismatch {
                expected: c,
                found: bad.len(),
            });
        }
        Self::from_flat(rows.into_iter().flatten().collect(), r, c)
    }

    pub fn from_flat(flat: Vec<T>, rows: usize, cols: usize) -> Result<Self> {
        if flat.len() != rows * cols {
            return Err(Error::BadShape(alloc::format!(
                "{} entries cannot form a {rows}x{cols} matrix",
                flat.len()
            )));
        }
        let d = Dist::new(flat)?;
        Ok(BipartiteDist {
            joint: d.probs,
            rows,
            cols,
        })
    }

    pub(crate) fn from_flat_unchecked(joint: Vec<T>, rows: usize, cols: usize) -> Self {
        BipartiteDist { joint, rows, cols }
    }

    pub fn product(a: &Dist<T>, b: &Dist<T>) -> Self {
        BipartiteDist {
            joint: tensor(a, b).probs,
            rows: a.dim(),
            cols: b.dim(),
        }
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn entry(&self, i: usize, j: usize) -> &T {
        &self.joint[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.joint[i * self.cols..(i + 1) * self.cols]
    }

    pub fn marginal_a(&self) -> Dist<T> {
        Dist {
            probs: (0..self.rows)
                .map(|i| self.row(i).iter().cloned().fold(T::zero(), |a, b| a + b))
                .collect(),
        }
    }

    pub fn marginal_b(&self) -> Dist<T> {
        let mut out = alloc::vec![T::zero(); self.cols];
        for i in 0..self.rows {
            for (o, x) in out.iter_mut().zip(self.row(i)) {
                *o = o.clone() + x.clone();
            }
        }
        Dist { probs: out }
    }

    /// The joint as a single vector, row-major.
    pub fn flatten(&self) -> Dist<T> {
        Dist {
            probs: self.joint.clone(),
        }
    }

    /// Swaps the roles of the two systems.
    pub fn transposed(&self) -> Self {
        let mut out = Vec::with_capacity(self.joint.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                out.push(self.entry(i, j).clone());
            }
        }
        BipartiteDist {
            joint: out,
            rows: self.cols,
            cols: self.rows,
        }
    }

    pub fn to_f64(&self) -> BipartiteDist<f64> {
        BipartiteDist {
            joint: self.joint.iter().map(Scalar::to_f64).collect(),
            rows: self.rows,
            cols: self.cols,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(v: &[f64]) -> Dist {
        Dist::new(v.to_vec()).unwrap()
    }

    #[test]
    fn validation() {
        assert!(Dist::new(alloc::vec![1.0, 0.0]).is_ok());
        assert!(matches!(
            Dist::new(alloc::vec![0.5, 0.6]),
            Err(Error::NotNormalized { .. })
        ));
        assert!(matches!(
            Dist::new(alloc::vec![1.1, -0.1]),
            Err(Error::NegativeEntry { index: 1, .. })
        ));
        let clamped = Dist::new(alloc::vec![1.0, -1e-12]).unwrap();
        assert_eq!(clamped.probs()[1], 0.0);
        assert!(Dist::<f64>::new(alloc::vec![]).is_err());
    }

    #[test]
    fn exact_validation_has_no_slack() {
        let ok = Dist::from_fractions(&[(2, 3), (1, 3)]).unwrap();
        assert_eq!(ok.dim(), 2);
        let off = Dist::new(alloc::vec![
            Rational::from_ratio(1, 2),
            Rational::from_ratio(1, 2) + Rational::from_ratio(1, 1_000_000_000_000_000),
        ]);
        assert!(off.is_err());
    }

    #[test]
    fn tensor_matches_listed_entries() {
        let g = Dist::from_fractions(&[(2, 3), (1, 3)]).unwrap();
        let s = Dist::from_fractions(&[(3, 10), (7, 10)]).unwrap();
        let t = tensor(&g, &s);
        let want = Dist::from_fractions(&[(1, 5), (7, 15), (1, 10), (7, 30)]).unwrap();
        assert_eq!(t, want);
    }

    #[test]
    fn trace_distance_and_mix() {
        assert_eq!(trace_distance(&d(&[1.0, 0.0]), &d(&[0.0, 1.0])).unwrap(), 1.0);
        let t = trace_distance(&d(&[2.0 / 3.0, 1.0 / 3.0]), &d(&[0.5, 0.5])).unwrap();
        assert!((t - 1.0 / 6.0).abs() < 1e-15);
        let m = mix(&d(&[1.0, 0.0]), &Dist::uniform(2), 0.5).unwrap();
        assert_eq!(m.probs(), &[0.75, 0.25]);
        assert!(mix(&d(&[1.0, 0.0]), &Dist::uniform(2), 1.5).is_err());
        assert!(trace_distance(&d(&[1.0]), &Dist::uniform(2)).is_err());
    }

    #[test]
    fn marginals_of_product() {
        let a = Dist::from_fractions(&[(1, 4), (3, 4)]).unwrap();
        let b = Dist::from_fractions(&[(1, 3), (1, 3), (1, 3)]).unwrap();
        let j = BipartiteDist::product(&a, &b);
        assert_eq!(j.marginal_a(), a);
        assert_eq!(j.marginal_b(), b);
        assert_eq!(j.transposed().marginal_a(), b);
    }

    #[test]
    fn to_rational_is_exactly_normalized() {
        let p = d(&[0.1, 0.2, 0.7]);
        let r = p.to_rational();
        let s = r
            .probs()
            .iter()
            .cloned()
            .fold(Rational::from_ratio(0, 1), |a, b| a + b);
        assert_eq!(s, Rational::from_ratio(1, 1));
    }
}
