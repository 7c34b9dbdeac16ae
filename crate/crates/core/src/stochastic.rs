//! Stochastic matrices and T-transform chains.

use alloc::vec::Vec;

use crate::dist::Dist;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::tolerance::Tolerances;

/// Column-stochastic matrix, stored row-major with shape `(d_out, d_in)`.
/// Applying it to a distribution is the matrix-vector product.
#[derive(Debug, Clone, PartialEq)]
pub struct StochasticMatrix<T = f64> {
    entries: Vec<T>,
    d_out: usize,
    d_in: usize,
}

impl<T: Scalar> StochasticMatrix<T> {
    pub fn new(rows: Vec<Vec<T>>) -> Result<Self> {
        let d_out = rows.len();
        if d_out == 0 {
            return Err(Error::EmptyInput);
        }
        let d_in = rows[0].len();
        if let Some(bad) = rows.iter().find(|r| r.len() != d_in) {
            return Err(Error::DimensionMismatch {
                expected: d_in,
                found: bad.len(),
            });
        }
        Self::from_flat(rows.into_iter().flatten().collect(), d_out, d_in)
    }

    pub fn from_flat(entries: Vec<T>, d_out: usize, d_in: usize) -> Result<Self> {
        if entries.len() != d_out * d_in {
            return Err(Error::BadShape(alloc::format!(
                "{} entries for a {d_out}x{d_in} matrix",
                entries.len()
            )));
        }
        let m = StochasticMatrix {
            entries,
            d_out,
            d_in,
        };
        m.validate(Tolerances::DEFAULT.norm)?;
        Ok(m)
    }

    pub(crate) fn from_flat_unchecked(entries: Vec<T>, d_out: usize, d_in: usize) -> Self {
        StochasticMatrix {
            entries,
            d_out,
            d_in,
        }
    }

    fn validate(&self, tol: f64) -> Result<()> {
        let slack = T::slack(tol);
        if self.entries.iter().any(|x| *x < -slack.clone()) {
            return Err(Error::NotStochastic);
        }
        for j in 0..self.d_in {
            let s = (0..self.d_out).fold(T::zero(), |a, i| a + self.get(i, j).clone());
            if (s - T::one()).abs() > slack {
                return Err(Error::NotStochastic);
            }
        }
        Ok(())
    }

    pub fn identity(d: usize) -> Self {
        let mut entries = alloc::vec![T::zero(); d * d];
        for i in 0..d {
            entries[i * d + i] = T::one();
        }
        StochasticMatrix {
            entries,
            d_out: d,
            d_in: d,
        }
    }

    /// The map sending every input to `target`.
    pub fn replacement(target: &Dist<T>, d_in: usize) -> Self {
        let d_out = target.dim();
        let mut entries = Vec::with_capacity(d_out * d_in);
        for t in target.probs() {
            for _ in 0..d_in {
                entries.push(t.clone());
            }
        }
        StochasticMatrix {
            entries,
            d_out,
            d_in,
        }
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.d_out, self.d_in)
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.entries[i * self.d_in + j]
    }

    pub fn entries(&self) -> &[T] {
        &self.entries
    }

    pub fn rows(&self) -> Vec<Vec<T>> {
        self.entries.chunks(self.d_in).map(|r| r.to_vec()).collect()
    }

    pub fn apply_slice(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.d_in, "input dimension");
        (0..self.d_out)
            .map(|i| {
                self.entries[i * self.d_in..(i + 1) * self.d_in]
                    .iter()
                    .zip(x)
                    .fold(T::zero(), |a, (m, v)| a + m.clone() * v.clone())
            })
            .collect()
    }

    pub fn apply(&self, p: &Dist<T>) -> Result<Dist<T>> {
        if p.dim() != self.d_in {
            return Err(Error::DimensionMismatch {
                expected: self.d_in,
                found: p.dim(),
            });
        }
        Ok(Dist::from_vec_unchecked(self.apply_slice(p.probs())))
    }

    /// `self ∘ other`, i.e. apply `other` first.
    pub fn compose(&self, other: &StochasticMatrix<T>) -> Result<Self> {
        if other.d_out != self.d_in {
            return Err(Error::DimensionMismatch {
                expected: self.d_in,
                found: other.d_out,
            });
        }
        let mut entries = alloc::vec![T::zero(); self.d_out * other.d_in];
        for i in 0..self.d_out {
            for k in 0..self.d_in {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.d_in {
                    let e = &mut entries[i * other.d_in + j];
                    *e = e.clone() + a.clone() * other.get(k, j).clone();
                }
            }
        }
        Ok(StochasticMatrix {
            entries,
            d_out: self.d_out,
            d_in: other.d_in,
        })
    }

    /// Kronecker product; `Λ.kron(&identity(k))` acts as `Λ ⊗ 1`.
    pub fn kron(&self, other: &StochasticMatrix<T>) -> Self {
        let d_out = self.d_out * other.d_out;
        let d_in = self.d_in * other.d_in;
        let mut entries = alloc::vec![T::zero(); d_out * d_in];
        for i in 0..self.d_out {
            for j in 0..self.d_in {
                let a = self.get(i, j);
                if a.is_zero() {
                    continue;
                }
                for k in 0..other.d_out {
                    for l in 0..other.d_in {
                        entries[(i * other.d_out + k) * d_in + j * other.d_in + l] =
                            a.clone() * other.get(k, l).clone();
                    }
                }
            }
        }
        StochasticMatrix {
            entries,
            d_out,
            d_in,
        }
    }

    pub fn is_stochastic(&self, tol: f64) -> bool {
        self.validate(tol).is_ok()
    }

    /// Square, column-stochastic and row sums equal to one.
    pub fn is_bistochastic(&self, tol: f64) -> bool {
        if self.d_in != self.d_out || !self.is_stochastic(tol) {
            return false;
        }
        let slack = T::slack(tol);
        (0..self.d_out).all(|i| {
            let s = self.entries[i * self.d_in..(i + 1) * self.d_in]
                .iter()
                .fold(T::zero(), |a, b| a + b.clone());
            (s - T::one()).abs() <= slack
        })
    }

    pub fn to_f64(&self) -> StochasticMatrix<f64> {
        StochasticMatrix {
            entries: self.entries.iter().map(Scalar::to_f64).collect(),
            d_out: self.d_out,
            d_in: self.d_in,
        }
    }
}

/// `x_i ← t x_i + (1-t) x_j`, `x_j ← (1-t) x_i + t x_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct TTransform<T = f64> {
    pub i: usize,
    pub j: usize,
    pub t: T,
}

/// A bistochastic map written as: gather by `pre`, apply the T-transforms
/// in order, scatter by `post`.
///
/// Gathering means `y[k] = x[pre[k]]`; scattering means `out[post[k]] = y[k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct TTransformChain<T = f64> {
    pub dim: usize,
    pub pre: Vec<usize>,
    pub steps: Vec<TTransform<T>>,
    pub post: Vec<usize>,
}

impl<T: Scalar> TTransformChain<T> {
    pub fn identity(dim: usize) -> Self {
        TTransformChain {
            dim,
            pre: (0..dim).collect(),
            steps: Vec::new(),
            post: (0..dim).collect(),
        }
    }

    pub fn apply_slice(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.dim, "input dimension");
        let mut y: Vec<T> = self.pre.iter().map(|&k| x[k].clone()).collect();
        for s in &self.steps {
            let (a, b) = (y[s.i].clone(), y[s.j].clone());
            let u = T::one() - s.t.clone();
            y[s.i] = s.t.clone() * a.clone() + u.clone() * b.clone();
            y[s.j] = u * a + s.t.clone() * b;
        }
        let mut out = alloc::vec![T::zero(); self.dim];
        for (k, v) in y.into_iter().enumerate() {
            out[self.post[k]] = v;
        }
        out
    }

    pub fn apply(&self, p: &Dist<T>) -> Result<Dist<T>> {
        if p.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: p.dim(),
            });
        }
        Ok(Dist::from_vec_unchecked(self.apply_slice(p.probs())))
    }

    pub fn to_f64(&self) -> TTransformChain<f64> {
        TTransformChain {
            dim: self.dim,
            pre: self.pre.clone(),
            steps: self
                .steps
                .iter()
                .map(|s| TTransform {
                    i: s.i,
                    j: s.j,
                    t: s.t.to_f64(),
                })
                .collect(),
            post: self.post.clone(),
        }
    }

    /// Dense matrix of the chain, built column by column.
    pub fn to_matrix(&self) -> StochasticMatrix<T> {
        let d = self.dim;
        let mut entries = alloc::vec![T::zero(); d * d];
        let mut e = alloc::vec![T::zero(); d];
        for j in 0..d {
            e[j] = T::one();
            let col = self.apply_slice(&e);
            for (i, v) in col.into_iter().enumerate() {
                entries[i * d + j] = v;
            }
            e[j] = T::zero();
        }
        StochasticMatrix::from_flat_unchecked(entries, d, d)
    }
}
