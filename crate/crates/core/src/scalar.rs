//! Numeric backends.
//!
//! Algorithms that only need field arithmetic and ordering (prefix sums,
//! T-transforms, embeddings, the shrinking map, tensor products) are written
//! once against [`Scalar`] and run either in `f64` or exactly in [`Rational`].

use core::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};

/// Arbitrary-precision rational number.
pub type Rational = BigRational;

pub trait Scalar: Clone + Debug + PartialOrd + Num + Signed {
    /// `true` when arithmetic is exact and comparisons need no slack.
    const EXACT: bool;

    /// Exact conversion for rationals (every finite `f64` is a dyadic rational).
    fn from_f64(x: f64) -> Option<Self>;

    fn to_f64(&self) -> f64;

    fn from_ratio(num: i64, den: i64) -> Self;

    fn from_u64(n: u64) -> Self;

    /// Comparison slack: `tol` for floating point, zero for exact backends.
    fn slack(tol: f64) -> Self;

    fn max_of(a: Self, b: Self) -> Self {
        if b > a {
            b
        } else {
            a
        }
    }

    fn min_of(a: Self, b: Self) -> Self {
        if b < a {
            b
        } else {
            a
        }
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_f64(x: f64) -> Option<Self> {
        Some(x)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn from_u64(n: u64) -> Self {
        n as f64
    }

    fn slack(tol: f64) -> Self {
        tol
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_f64(x: f64) -> Option<Self> {
        BigRational::from_float(x)
    }

    fn to_f64(&self) -> f64 {
        ratio_to_f64(self)
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn from_u64(n: u64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }

    fn slack(_tol: f64) -> Self {
        BigRational::zero()
    }
}

// Shift both parts down to 64 significant bits before dividing so huge
// numerators and denominators do not overflow to inf/inf.
fn ratio_to_f64(r: &BigRational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    let numer = r.numer();
    let denom = r.denom();
    let nb = numer.bits() as i64;
    let db = denom.bits() as i64;
    let ns = (nb - 64).max(0);
    let ds = (db - 64).max(0);
    let n = (numer >> ns as usize).to_f64().unwrap_or(f64::NAN);
    let d = (denom >> ds as usize).to_f64().unwrap_or(f64::NAN);
    let mut value = n / d;
    let shift = ns - ds;
    // scale by 2^shift in bounded steps
    let mut s = shift;
    while s != 0 {
        let step = s.clamp(-1000, 1000);
        value *= pow2(step as i32);
        s -= step;
    }
    value
}

fn pow2(e: i32) -> f64 {
    let mut v = 1.0;
    let base: f64 = if e >= 0 { 2.0 } else { 0.5 };
    for _ in 0..e.unsigned_abs() {
        v *= base;
    }
    v
}

/// Parses `"3/10"`, `"7"` or a decimal literal such as `"0.25"` exactly.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let negative = int.starts_with('-');
        let digits = alloc::format!("{}{}", int.trim_start_matches(['-', '+']), frac);
        let mut n: BigInt = digits.parse().ok()?;
        if negative {
            n = -n;
        }
        let mut d = BigInt::one();
        for _ in 0..frac.len() {
            d *= 10;
        }
        return Some(BigRational::new(n, d));
    }
    s.parse::<BigInt>().ok().map(BigRational::from_integer)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_round_trip_through_f64() {
        let third = Rational::from_ratio(1, 3);
        assert!((Scalar::to_f64(&third) - 1.0 / 3.0).abs() < 1e-16);
        let x = 0.1_f64;
        assert_eq!(Scalar::to_f64(&Rational::from_f64(x).unwrap()), x);
        let tiny = 1e-300_f64;
        assert_eq!(Scalar::to_f64(&Rational::from_f64(tiny).unwrap()), tiny);
    }

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse_rational("3/10"), Some(Rational::from_ratio(3, 10)));
        assert_eq!(parse_rational("0.3"), Some(Rational::from_ratio(3, 10)));
        assert_eq!(parse_rational("-1.25"), Some(Rational::from_ratio(-5, 4)));
        assert_eq!(parse_rational("2"), Some(Rational::from_ratio(2, 1)));
        assert_eq!(parse_rational("1/0"), None);
    }
}
