//! Formal sums of points of ℚ/ℤ and the closed-form decomposition of
//! `F_m × F_n`.
//!
//! `F_n = Σ_{1≤a≤n, (a,n)=1} z^{a/n mod 1}`. With `d = gcd(m, n)` and `d′` the
//! largest divisor of `d` coprime to both `m/d` and `n/d`,
//!
//! ```text
//! F_m × F_n = φ(d) Σ_{e | d′} c(d′, e) F_{mn/(de)},
//! c(d′, e)  = ∏_{q | d′, q ∤ e} (1 − 1/(q − 1)).
//! ```
//!
//! Multiplicities are exact rationals because `c(d′, e)` is fractional; they
//! only become integers once the whole right-hand side is expanded.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::circle::ReducedFraction;
use crate::ntheory::{divisors, euler_phi, factorize, gcd};
use crate::rational::{int, Rational};
use crate::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GroupRingElement {
    terms: BTreeMap<ReducedFraction, Rational>,
}

impl GroupRingElement {
    pub fn zero() -> Self {
        Self::default()
    }

    /// Adds `multiplicity · z^γ`; `γ` is reduced mod 1 first.
    pub fn add_term(&mut self, gamma: ReducedFraction, multiplicity: &Rational) {
        if multiplicity.is_zero() {
            return;
        }
        let key = gamma.fractional_part();
        let slot = self.terms.entry(key).or_insert_with(Rational::zero);
        *slot += multiplicity;
        if slot.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn terms(&self) -> &BTreeMap<ReducedFraction, Rational> {
        &self.terms
    }

    pub fn multiplicity(&self, gamma: &ReducedFraction) -> Rational {
        self.terms
            .get(&gamma.fractional_part())
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn support_size(&self) -> usize {
        self.terms.len()
    }

    pub fn total_mass(&self) -> Rational {
        self.terms.values().fold(Rational::zero(), |acc, m| acc + m)
    }

    pub fn has_integer_multiplicities(&self) -> bool {
        self.terms.values().all(|m| m.is_integer() && !m.is_negative())
    }

    pub fn scaled(&self, c: &Rational) -> Self {
        let mut out = Self::zero();
        for (g, m) in &self.terms {
            out.add_term(*g, &(m * c));
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (g, m) in &other.terms {
            out.add_term(*g, m);
        }
        out
    }
}

/// `F_n`: every reduced `a/n` (mod 1) with multiplicity one.
pub fn f(n: u64) -> Result<GroupRingElement> {
    if n == 0 {
        return Err(Error::ZeroInput);
    }
    let mut out = GroupRingElement::zero();
    let one = Rational::one();
    for a in (1..=n).filter(|&a| gcd(a, n) == 1) {
        out.add_term(ReducedFraction::new(a as i64, n)?, &one);
    }
    Ok(out)
}

/// Direct product in the group ring: exponents add mod 1, multiplicities multiply.
pub fn convolve(e1: &GroupRingElement, e2: &GroupRingElement) -> GroupRingElement {
    // Integer multiplicities are accumulated in machine integers; anything
    // else goes through exact rationals.
    let integral = |e: &GroupRingElement| {
        e.terms
            .iter()
            .map(|(g, m)| Some((*g, i64::try_from(m.to_integer()).ok().filter(|_| m.is_integer())?)))
            .collect::<Option<Vec<_>>>()
    };
    if let (Some(a), Some(b)) = (integral(e1), integral(e2)) {
        let mut acc: HashMap<(i64, u64), i128> = HashMap::new();
        for &(g, x) in &a {
            for &(h, y) in &b {
                let (p, q) = add_mod_one(&g, &h);
                *acc.entry((p, q)).or_insert(0) += x as i128 * y as i128;
            }
        }
        let mut out = GroupRingElement::zero();
        for ((p, q), m) in acc {
            if m != 0 {
                let key = ReducedFraction::new(p, q).expect("non-zero denominator");
                out.terms.insert(key, Rational::from_integer(BigInt::from(m)));
            }
        }
        return out;
    }
    let mut out = GroupRingElement::zero();
    for (g, x) in &e1.terms {
        for (h, y) in &e2.terms {
            let (p, q) = add_mod_one(g, h);
            out.add_term(ReducedFraction::new(p, q).expect("non-zero denominator"), &(x * y));
        }
    }
    out
}

/// `(g + h) mod 1` in lowest terms, as a raw numerator/denominator pair.
fn add_mod_one(g: &ReducedFraction, h: &ReducedFraction) -> (i64, u64) {
    let (a, m) = (g.numerator() as i128, g.denominator() as i128);
    let (b, n) = (h.numerator() as i128, h.denominator() as i128);
    let den = m * n;
    let num = (a * n + b * m).rem_euclid(den);
    let g = gcd(num as u64, den as u64) as i128;
    ((num / g) as i64, (den / g) as u64)
}

/// Largest divisor of `gcd(m, n)` coprime to `(m/d)·(n/d)`.
pub fn d_prime(m: u64, n: u64) -> Result<u64> {
    if m == 0 || n == 0 {
        return Err(Error::ZeroInput);
    }
    let d = gcd(m, n);
    let cofactor = (m / d) as u128 * (n / d) as u128;
    let mut dp = d;
    loop {
        let g = gcd_u128(dp as u128, cofactor) as u64;
        if g == 1 {
            return Ok(dp);
        }
        dp /= g;
    }
}

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `c(d′, e) = ∏_{q | d′, q ∤ e} (q − 2)/(q − 1)`.
pub fn c_coeff(d_prime: u64, e: u64) -> Result<Rational> {
    if d_prime == 0 || e == 0 {
        return Err(Error::ZeroInput);
    }
    if d_prime % e != 0 {
        return Err(Error::NotDivisor { e, d: d_prime });
    }
    let mut c = Rational::one();
    for q in factorize(d_prime)?.primes() {
        if e % q != 0 {
            c *= Rational::new(BigInt::from(q - 2), BigInt::from(q - 1));
        }
    }
    Ok(c)
}

/// `F_m × F_n` as a list of `coefficient · F_index`, one term per `e | d′`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductDecomposition {
    m: u64,
    n: u64,
    d: u64,
    d_prime: u64,
    terms: Vec<(Rational, u64)>,
}

impl ProductDecomposition {
    pub fn m(&self) -> u64 {
        self.m
    }
    pub fn n(&self) -> u64 {
        self.n
    }
    pub fn d(&self) -> u64 {
        self.d
    }
    pub fn d_prime(&self) -> u64 {
        self.d_prime
    }
    /// `(φ(d)·c(d′, e), mn/(de))` for `e | d′` ascending; zero coefficients kept.
    pub fn terms(&self) -> &[(Rational, u64)] {
        &self.terms
    }
    pub fn nonzero_terms(&self) -> impl Iterator<Item = &(Rational, u64)> {
        self.terms.iter().filter(|(c, _)| !c.is_zero())
    }
}

pub fn decompose_product(m: u64, n: u64) -> Result<ProductDecomposition> {
    let dp = d_prime(m, n)?;
    let d = gcd(m, n);
    let phi_d = int(euler_phi(d)? as i64);
    let mn = m as u128 * n as u128;
    let mut terms = Vec::new();
    for e in divisors(dp)? {
        let index = mn / (d as u128 * e as u128);
        let index = u64::try_from(index).map_err(|_| Error::Overflow("indexing a product decomposition"))?;
        terms.push((&phi_d * c_coeff(dp, e)?, index));
    }
    Ok(ProductDecomposition {
        m,
        n,
        d,
        d_prime: dp,
        terms,
    })
}

/// `Σ coefficient · F_index`; multiplicities must come out as non-negative integers.
pub fn expand(dec: &ProductDecomposition) -> Result<GroupRingElement> {
    let mut out = GroupRingElement::zero();
    for (coefficient, index) in dec.nonzero_terms() {
        out = out.add(&f(*index)?.scaled(coefficient));
    }
    if !out.has_integer_multiplicities() {
        return Err(Error::Internal(format!(
            "expansion of F_{} × F_{} has a non-integer multiplicity",
            dec.m, dec.n
        )));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn frac(a: i64, b: u64) -> ReducedFraction {
        ReducedFraction::new(a, b).unwrap()
    }

    #[test]
    fn f_examples() {
        let f1 = f(1).unwrap();
        assert_eq!(f1.terms().len(), 1);
        assert_eq!(f1.multiplicity(&frac(0, 1)), int(1));
        let f2 = f(2).unwrap();
        assert_eq!(f2.terms().keys().copied().collect::<Vec<_>>(), vec![frac(1, 2)]);
        let f6 = f(6).unwrap();
        assert_eq!(f6.terms().keys().copied().collect::<Vec<_>>(), vec![frac(1, 6), frac(5, 6)]);
    }

    #[test]
    fn convolve_examples() {
        assert_eq!(convolve(&f(2).unwrap(), &f(2).unwrap()), f(1).unwrap());
        assert_eq!(convolve(&f(2).unwrap(), &f(3).unwrap()), f(6).unwrap());
        let expected = f(3).unwrap().add(&f(1).unwrap().scaled(&int(2)));
        assert_eq!(convolve(&f(3).unwrap(), &f(3).unwrap()), expected);
    }

    #[test]
    fn convolve_with_fractional_multiplicities() {
        let half = f(4).unwrap().scaled(&rat(1, 2));
        let prod = convolve(&half, &f(3).unwrap());
        assert_eq!(prod, f(12).unwrap().scaled(&rat(1, 2)));
        assert_eq!(convolve(&GroupRingElement::zero(), &f(5).unwrap()), GroupRingElement::zero());
    }

    #[test]
    fn d_prime_examples() {
        assert_eq!(d_prime(2, 3).unwrap(), 1);
        assert_eq!(d_prime(3, 3).unwrap(), 3);
        assert_eq!(d_prime(6, 10).unwrap(), 2);
        assert_eq!(d_prime(12, 18).unwrap(), 1);
        assert_eq!(d_prime(4, 8).unwrap(), 1);
    }

    #[test]
    fn d_prime_matches_divisor_search() {
        for m in 1..=80u64 {
            for n in 1..=80u64 {
                let d = gcd(m, n);
                let brute = divisors(d)
                    .unwrap()
                    .into_iter()
                    .filter(|&e| gcd(e, m / d) == 1 && gcd(e, n / d) == 1)
                    .max()
                    .unwrap();
                assert_eq!(d_prime(m, n).unwrap(), brute, "m = {m}, n = {n}");
            }
        }
    }

    #[test]
    fn c_coeff_examples() {
        assert_eq!(c_coeff(1, 1).unwrap(), int(1));
        assert_eq!(c_coeff(2, 1).unwrap(), int(0));
        assert_eq!(c_coeff(15, 5).unwrap(), rat(1, 2));
        assert_eq!(c_coeff(15, 1).unwrap(), rat(3, 8));
        assert_eq!(c_coeff(15, 4), Err(Error::NotDivisor { e: 4, d: 15 }));
    }

    #[test]
    fn decomposition_examples() {
        let d = decompose_product(2, 3).unwrap();
        assert_eq!(d.terms(), &[(int(1), 6)]);
        let d = decompose_product(3, 3).unwrap();
        assert_eq!(d.terms(), &[(int(1), 3), (int(2), 1)]);
        let d = decompose_product(2, 2).unwrap();
        assert_eq!(d.terms(), &[(int(0), 2), (int(1), 1)]);
        assert_eq!(expand(&d).unwrap(), f(1).unwrap());
        assert_eq!(expand(&decompose_product(2, 3).unwrap()).unwrap(), f(6).unwrap());
        let expected = f(3).unwrap().add(&f(1).unwrap().scaled(&int(2)));
        assert_eq!(expand(&decompose_product(3, 3).unwrap()).unwrap(), expected);
    }

    #[test]
    fn decomposition_properties() {
        for m in 1..=30u64 {
            for n in 1..=30u64 {
                let direct = convolve(&f(m).unwrap(), &f(n).unwrap());
                let dec = decompose_product(m, n).unwrap();
                let expanded = expand(&dec).unwrap();
                assert_eq!(expanded, direct, "m = {m}, n = {n}");
                assert_eq!(expand(&decompose_product(n, m).unwrap()).unwrap(), expanded);
                let mass = int((euler_phi(m).unwrap() * euler_phi(n).unwrap()) as i64);
                assert_eq!(direct.total_mass(), mass);
                let dec_mass = dec
                    .terms()
                    .iter()
                    .fold(int(0), |acc, (c, k)| acc + c * int(euler_phi(*k).unwrap() as i64));
                assert_eq!(dec_mass, mass);
                for (g, mult) in direct.terms() {
                    let mirror = frac(-g.numerator(), g.denominator());
                    assert_eq!(&direct.multiplicity(&mirror), mult);
                }
            }
        }
    }
}
