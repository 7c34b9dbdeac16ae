//! Phase-one simplex: find `x ≥ 0` with `A x = b`.
//!
//! Dense tableau with Bland's rule, which cannot cycle. Meant for the small
//! exact feasibility problems in [`crate::thermo`]; with rational scalars the
//! returned point satisfies the constraints exactly.

use alloc::vec::Vec;

use crate::scalar::Scalar;

pub(crate) fn feasible_point<T: Scalar>(a: &[Vec<T>], b: &[T], max_pivots: usize) -> Option<Vec<T>> {
    let m = a.len();
    if m == 0 {
        return None;
    }
    let n = a[0].len();
    let width = n + m + 1;
    let eps = T::slack(1e-12);

    let mut t: Vec<Vec<T>> = Vec::with_capacity(m);
    for (i, row) in a.iter().enumerate() {
        let flip = b[i] < T::zero();
        let mut r = Vec::with_capacity(width);
        for v in row {
            r.push(if flip { -v.clone() } else { v.clone() });
        }
        for k in 0..m {
            r.push(if k == i { T::one() } else { T::zero() });
        }
        r.push(if flip { -b[i].clone() } else { b[i].clone() });
        t.push(r);
    }
    // reduced costs of the auxiliary objective Σ artificials
    let mut obj = alloc::vec![T::zero(); width];
    for r in &t {
        for j in 0..n {
            obj[j] = obj[j].clone() - r[j].clone();
        }
        obj[width - 1] = obj[width - 1].clone() - r[width - 1].clone();
    }
    let mut basis: Vec<usize> = (n..n + m).collect();

    for _ in 0..max_pivots {
        let Some(enter) = (0..n + m).find(|&j| obj[j] < -eps.clone()) else {
            break;
        };
        let mut leave: Option<(usize, T)> = None;
        for (i, r) in t.iter().enumerate() {
            if r[enter] > eps {
                let ratio = r[width - 1].clone() / r[enter].clone();
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && basis[i] < basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        // unbounded cannot happen: the auxiliary objective is bounded below by 0
        let (pr, _) = leave?;
        let piv = t[pr][enter].clone();
        for v in t[pr].iter_mut() {
            *v = v.clone() / piv.clone();
        }
        let pivot_row = t[pr].clone();
        for (i, r) in t.iter_mut().enumerate() {
            if i == pr || r[enter].is_zero() {
                continue;
            }
            let f = r[enter].clone();
            for (v, p) in r.iter_mut().zip(&pivot_row) {
                *v = v.clone() - f.clone() * p.clone();
            }
        }
        let f = obj[enter].clone();
        for (v, p) in obj.iter_mut().zip(&pivot_row) {
            *v = v.clone() - f.clone() * p.clone();
        }
        basis[pr] = enter;
    }

    if obj.iter().take(n + m).any(|v| *v < -eps.clone()) {
        return None;
    }
    // -obj[last] is the remaining artificial mass
    if -obj[width - 1].clone() > T::slack(1e-9) {
        return None;
    }
    let mut x = alloc::vec![T::zero(); n];
    for (i, &bv) in basis.iter().enumerate() {
        if bv < n {
            x[bv] = t[i][width - 1].clone();
        }
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;
    use alloc::vec;

    fn r(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    #[test]
    fn finds_exact_point() {
        // x + y = 1, x - y = 1/3
        let a = vec![vec![r(1, 1), r(1, 1)], vec![r(1, 1), r(-1, 1)]];
        let b = vec![r(1, 1), r(1, 3)];
        let x = feasible_point(&a, &b, 100).unwrap();
        assert_eq!(x, vec![r(2, 3), r(1, 3)]);
    }

    #[test]
    fn detects_infeasibility() {
        // x + y = 1, x + y = 2
        let a = vec![vec![r(1, 1), r(1, 1)], vec![r(1, 1), r(1, 1)]];
        let b = vec![r(1, 1), r(2, 1)];
        assert!(feasible_point(&a, &b, 100).is_none());
        // x = -1 with x >= 0
        assert!(feasible_point(&[vec![r(1, 1)]], &[r(-1, 1)], 100).is_none());
    }
}
