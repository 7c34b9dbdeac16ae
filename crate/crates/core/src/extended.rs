//! Reals extended by ±∞.

use core::cmp::Ordering;
use core::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtendedReal {
    NegInf,
    Finite(f64),
    PosInf,
}

impl ExtendedReal {
    /// Maps `f64` infinities onto the corresponding tags. NaN is rejected.
    pub fn from_f64(x: f64) -> Result<Self> {
        if x.is_nan() {
            Err(Error::NonFinite)
        } else if x == f64::INFINITY {
            Ok(ExtendedReal::PosInf)
        } else if x == f64::NEG_INFINITY {
            Ok(ExtendedReal::NegInf)
        } else {
            Ok(ExtendedReal::Finite(x))
        }
    }

    pub fn to_f64(self) -> f64 {
        match self {
            ExtendedReal::NegInf => f64::NEG_INFINITY,
            ExtendedReal::Finite(x) => x,
            ExtendedReal::PosInf => f64::INFINITY,
        }
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            ExtendedReal::Finite(x) => Some(x),
            _ => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, ExtendedReal::Finite(_))
    }

    pub fn checked_add(self, other: Self) -> Result<Self> {
        use ExtendedReal::*;
        match (self, other) {
            (Finite(a), Finite(b)) => Ok(Finite(a + b)),
            (PosInf, NegInf) | (NegInf, PosInf) => Err(Error::IndeterminateForm),
            (PosInf, _) | (_, PosInf) => Ok(PosInf),
            (NegInf, _) | (_, NegInf) => Ok(NegInf),
        }
    }

    pub fn checked_sub(self, other: Self) -> Result<Self> {
        self.checked_add(-other)
    }

    /// Multiplication by a finite non-zero scalar.
    pub fn scale(self, c: f64) -> Self {
        match self {
            ExtendedReal::Finite(x) => ExtendedReal::Finite(c * x),
            inf if c > 0.0 => inf,
            inf => -inf,
        }
    }

    fn rank(self) -> u8 {
        match self {
            ExtendedReal::NegInf => 0,
            ExtendedReal::Finite(_) => 1,
            ExtendedReal::PosInf => 2,
        }
    }
}

impl Eq for ExtendedReal {}

impl PartialOrd for ExtendedReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtendedReal {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (ExtendedReal::Finite(a), ExtendedReal::Finite(b)) => a.total_cmp(b),
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl From<f64> for ExtendedReal {
    /// Panics on NaN; use [`ExtendedReal::from_f64`] for fallible conversion.
    fn from(x: f64) -> Self {
        ExtendedReal::from_f64(x).expect("NaN is not an extended real")
    }
}

impl fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedReal::NegInf => write!(f, "-inf"),
            ExtendedReal::Finite(x) => write!(f, "{x}"),
            ExtendedReal::PosInf => write!(f, "inf"),
        }
    }
}

impl core::ops::Neg for ExtendedReal {
    type Output = Self;

    fn neg(self) -> Self {
        match self {
            ExtendedReal::NegInf => ExtendedReal::PosInf,
            ExtendedReal::Finite(x) => ExtendedReal::Finite(-x),
            ExtendedReal::PosInf => ExtendedReal::NegInf,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::ExtendedReal::*;
    use super::*;

    #[test]
    fn ordering_puts_infinities_at_the_ends() {
        assert!(NegInf < Finite(-1e300));
        assert!(Finite(1e300) < PosInf);
        assert!(Finite(1.0) < Finite(2.0));
        assert_eq!(PosInf.cmp(&PosInf), Ordering::Equal);
    }

    #[test]
    fn addition_rules() {
        assert_eq!(Finite(1.0).checked_add(Finite(2.0)), Ok(Finite(3.0)));
        assert_eq!(Finite(1.0).checked_add(PosInf), Ok(PosInf));
        assert_eq!(NegInf.checked_add(NegInf), Ok(NegInf));
        assert_eq!(PosInf.checked_add(NegInf), Err(Error::IndeterminateForm));
        assert_eq!(PosInf.checked_sub(PosInf), Err(Error::IndeterminateForm));
    }
}
