//! Exact rational helpers shared by every module.
//!
//! [`Rational`] is an arbitrary-precision fraction. Its canonical text form is
//! `"numerator/denominator"` (always with a slash, `0/1` for zero), which is the
//! interchange format used by the CLI.

use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{Error, Result};

pub type Rational = BigRational;

pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

/// `1 / base^exponent`.
pub fn inverse_power(base: u64, exponent: u32) -> Rational {
    Rational::new(BigInt::one(), BigInt::from(base).pow(exponent))
}

pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `"a/b"`, `"a"` or a terminating decimal such as `"0.25"`.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let s = text.trim();
    let bad = || Error::Parse(format!("not a rational number: {text:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
        let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        let negative = whole.starts_with('-');
        let digits = format!("{}{}", whole.trim_start_matches(['-', '+']), frac);
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let n = BigInt::from_str(&digits).map_err(|_| bad())?;
        let d = BigInt::from(10u32).pow(frac.len() as u32);
        let r = Rational::new(n, d);
        return Ok(if negative { -r } else { r });
    }
    BigInt::from_str(s)
        .map(Rational::from_integer)
        .map_err(|_| bad())
}

/// Lossy conversion that survives numerators and denominators beyond `f64` range.
pub fn to_f64(r: &Rational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    let (n, d) = (r.numer().abs(), r.denom().clone());
    let shift = |x: &BigInt| x.bits().saturating_sub(60) as i64;
    let (sn, sd) = (shift(&n), shift(&d));
    let nf = (&n >> sn as usize).to_f64().unwrap_or(f64::NAN);
    let df = (&d >> sd as usize).to_f64().unwrap_or(f64::NAN);
    let v = nf / df * 2f64.powi((sn - sd) as i32);
    if r.is_negative() {
        -v
    } else {
        v
    }
}

pub fn to_u128_parts(r: &Rational) -> Option<(u128, u128)> {
    if r.is_negative() {
        return None;
    }
    Some((r.numer().to_u128()?, r.denom().to_u128()?))
}

/// Exact `r^(1/k)` when it exists.
pub fn exact_root(r: &Rational, k: u32) -> Option<Rational> {
    if k == 0 || r.is_negative() {
        return None;
    }
    let root = |x: &BigInt| -> Option<BigInt> {
        let u: BigUint = x.to_biguint()?;
        let c = u.nth_root(k);
        (c.pow(k) == u).then(|| BigInt::from_biguint(Sign::Plus, c))
    };
    Some(Rational::new(root(r.numer())?, root(r.denom())?))
}

/// Running exact sum that defers reduction to the end.
///
/// The running denominator only grows to the lcm of the summands'
/// denominators, and each step needs a gcd against the (usually small)
/// incoming denominator only. The result does not depend on summation order.
#[derive(Debug, Clone)]
pub struct ExactSum {
    numer: BigInt,
    denom: BigInt,
}

impl Default for ExactSum {
    fn default() -> Self {
        Self::new()
    }
}

impl ExactSum {
    pub fn new() -> Self {
        Self {
            numer: BigInt::zero(),
            denom: BigInt::one(),
        }
    }

    pub fn add(&mut self, r: &Rational) {
        if r.is_zero() {
            return;
        }
        let d = r.denom();
        let g = (&self.denom % d).gcd(d);
        let scale_self = d / &g;
        let scale_other = &self.denom / &g;
        if !scale_self.is_one() {
            self.numer *= &scale_self;
            self.denom *= &scale_self;
        }
        self.numer += r.numer() * scale_other;
    }

    pub fn merge(&mut self, other: &ExactSum) {
        self.add(&other.value());
    }

    pub fn value(&self) -> Rational {
        Rational::new(self.numer.clone(), self.denom.clone())
    }
}

impl<'a> std::iter::FromIterator<&'a Rational> for ExactSum {
    fn from_iter<I: IntoIterator<Item = &'a Rational>>(iter: I) -> Self {
        let mut s = ExactSum::new();
        for r in iter {
            s.add(r);
        }
        s
    }
}

impl std::iter::FromIterator<Rational> for ExactSum {
    fn from_iter<I: IntoIterator<Item = Rational>>(iter: I) -> Self {
        let mut s = ExactSum::new();
        for r in iter {
            s.add(&r);
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rational("3/12").unwrap(), rat(1, 4));
        assert_eq!(parse_rational(" 7 ").unwrap(), int(7));
        assert_eq!(parse_rational("0.25").unwrap(), rat(1, 4));
        assert_eq!(parse_rational("-1.5").unwrap(), rat(-3, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert_eq!(format_rational(&int(0)), "0/1");
        assert_eq!(format_rational(&rat(6, 4)), "3/2");
    }

    #[test]
    fn exact_sum_matches_naive() {
        let terms: Vec<Rational> = (1..200).map(|n| rat(n % 7, n * n + 3)).collect();
        let naive = terms.iter().fold(int(0), |a, b| a + b);
        let acc: ExactSum = terms.iter().collect();
        assert_eq!(acc.value(), naive);
    }

    #[test]
    fn roots_and_floats() {
        assert_eq!(exact_root(&rat(4, 9), 2), Some(rat(2, 3)));
        assert_eq!(exact_root(&rat(2, 9), 2), None);
        assert!((to_f64(&rat(1, 3)) - 1.0 / 3.0).abs() < 1e-15);
        let big = BigInt::from(10u32).pow(400);
        let near_one = Rational::new(&big * 3 + 1, big * 2);
        assert!((to_f64(&near_one) - 1.5).abs() < 1e-15);
        assert_eq!(to_f64(&-rat(1, 4)), -0.25);
    }
}
