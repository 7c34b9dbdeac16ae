//! Scalar helpers shared by the entropy code.
//!
//! Transcendentals go through `libm` in every build, so results do not
//! depend on which features of other crates are enabled.

use crate::error::{Error, Result};

/// `log Σ exp(x_i)`, stable for arguments of any magnitude.
///
/// Entries equal to `-inf` contribute nothing; an empty or all-`-inf` input
/// gives `-inf`; any `+inf` gives `+inf`.
pub fn logsumexp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max.is_infinite() {
        return max;
    }
    let s: f64 = xs.iter().map(|&x| libm::exp(x - max)).sum();
    max + libm::log(s)
}

/// `log(exp(a) - exp(b))` for `a >= b`.
pub fn logdiffexp(a: f64, b: f64) -> f64 {
    if b == f64::NEG_INFINITY {
        return a;
    }
    a + libm::log1p(-libm::exp(b - a))
}

/// `η(x) = -x log x` with `η(0) = 0`.
pub fn eta(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::OutOfRange {
            what: "eta argument",
            value: x,
        });
    }
    Ok(xlogx_neg(x))
}

/// Binary entropy `-x log x - (1-x) log(1-x)`.
pub fn eta_bin(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::OutOfRange {
            what: "binary entropy argument",
            value: x,
        });
    }
    Ok(xlogx_neg(x) + xlogx_neg(1.0 - x))
}

fn xlogx_neg(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        -x * libm::log(x)
    }
}

pub(crate) fn ln(x: f64) -> f64 {
    libm::log(x)
}

pub(crate) fn exp(x: f64) -> f64 {
    libm::exp(x)
}

pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

pub(crate) fn floor(x: f64) -> f64 {
    libm::floor(x)
}

pub(crate) fn ceil(x: f64) -> f64 {
    libm::ceil(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn logsumexp_handles_extremes() {
        assert_eq!(logsumexp(&[]), f64::NEG_INFINITY);
        assert_eq!(logsumexp(&[f64::NEG_INFINITY, 0.0]), 0.0);
        let v = logsumexp(&[1000.0, 1000.0]);
        assert!((v - (1000.0 + core::f64::consts::LN_2)).abs() < 1e-12);
        let v = logsumexp(&[-1000.0, -1000.0]);
        assert!((v - (-1000.0 + core::f64::consts::LN_2)).abs() < 1e-12);
    }

    #[test]
    fn eta_values() {
        assert_eq!(eta(0.0), Ok(0.0));
        assert_eq!(eta(1.0), Ok(0.0));
        assert!((eta(0.5).unwrap() - 0.5 * core::f64::consts::LN_2).abs() < 1e-15);
        assert!(eta(1.5).is_err());
        assert!((eta_bin(0.5).unwrap() - core::f64::consts::LN_2).abs() < 1e-15);
    }

    #[test]
    fn logdiffexp_matches_direct() {
        let v = logdiffexp(ln(3.0), ln(1.0));
        assert!((v - ln(2.0)).abs() < 1e-14);
    }
}
