//! Finite-precision subsets of ℤ_p built from balls of a common radius.
//!
//! A [`PadicSet`] at precision `M` is a set of residues mod `p^M`; residue `r`
//! stands for the ball `{x : |x − r|_p ≤ p^{−M}}`, of Haar measure `p^{−M}`.
//! Two sets of different precision are compared lazily by reducing the finer
//! residues, never by lifting the coarser ones.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::Rng;

use crate::ntheory::{gcd, is_prime, mod_inverse, valuation};
use crate::rational::{inverse_power, Rational};
use crate::{Error, Result};

/// Default bound on `p^M` for a materialized set.
pub const DEFAULT_MODULUS_CAP: u64 = 100_000_000;

/// Hard bound on any modulus handled here; keeps `n · x mod p^M` inside `u128`.
const MODULUS_LIMIT: u64 = 1 << 62;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PadicSet {
    p: u64,
    precision: u32,
    residues: Vec<u64>,
}

fn checked_modulus(p: u64, precision: u32, cap: u64) -> Result<u64> {
    let modulus = p
        .checked_pow(precision)
        .filter(|&q| q <= MODULUS_LIMIT)
        .ok_or_else(|| Error::cap("p^M", format!("{p}^{precision}"), cap))?;
    if modulus > cap {
        return Err(Error::cap("p^M", modulus, cap));
    }
    Ok(modulus)
}

fn check_prime(p: u64) -> Result<()> {
    if !is_prime(p) {
        return Err(Error::precondition(format!("{p} is not prime")));
    }
    Ok(())
}

impl PadicSet {
    pub fn empty(p: u64) -> Self {
        Self {
            p,
            precision: 0,
            residues: Vec::new(),
        }
    }

    pub fn full(p: u64) -> Self {
        Self {
            p,
            precision: 0,
            residues: vec![0],
        }
    }

    /// The single ball `{x : |x − center|_p ≤ p^{−precision}}`.
    pub fn ball(p: u64, precision: u32, center: u64) -> Result<Self> {
        let q = checked_modulus(p, precision, MODULUS_LIMIT)?;
        Ok(Self {
            p,
            precision,
            residues: vec![center % q],
        })
    }

    /// Set from arbitrary residues; values are reduced mod `p^precision`, sorted and deduplicated.
    pub fn from_residues(p: u64, precision: u32, residues: impl IntoIterator<Item = u64>) -> Result<Self> {
        let q = checked_modulus(p, precision, MODULUS_LIMIT)?;
        let mut residues: Vec<u64> = residues.into_iter().map(|r| r % q).collect();
        residues.sort_unstable();
        residues.dedup();
        Ok(Self { p, precision, residues })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    pub fn residues(&self) -> &[u64] {
        &self.residues
    }

    pub fn modulus(&self) -> u64 {
        self.p.pow(self.precision)
    }

    pub fn is_empty(&self) -> bool {
        self.residues.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.residues.len() as u64 == self.modulus()
    }

    pub fn measure(&self) -> Rational {
        Rational::new(BigInt::from(self.residues.len()), BigInt::from(self.modulus()))
    }

    /// Whether the ball of residue `r`, at a precision no coarser than the set's, lies in the set.
    fn contains_residue(&self, r: u64) -> bool {
        self.residues.binary_search(&(r % self.modulus())).is_ok()
    }

    pub fn contains(&self, x: &DigitStream) -> Result<bool> {
        if x.p != self.p {
            return Err(Error::MismatchedPrimes(self.p, x.p));
        }
        let t = x.truncation(self.precision)?;
        Ok(self.residues.binary_search(&t).is_ok())
    }

    pub fn intersect(&self, other: &PadicSet) -> Result<PadicSet> {
        if self.p != other.p {
            return Err(Error::MismatchedPrimes(self.p, other.p));
        }
        let (coarse, fine) = if self.precision <= other.precision {
            (self, other)
        } else {
            (other, self)
        };
        let residues = fine
            .residues
            .iter()
            .copied()
            .filter(|&c| coarse.contains_residue(c))
            .collect();
        Ok(PadicSet {
            p: self.p,
            precision: fine.precision,
            residues,
        })
    }

    /// The same point set at the smallest precision that represents it.
    pub fn coarsened(&self) -> PadicSet {
        if self.residues.is_empty() {
            return PadicSet::empty(self.p);
        }
        let mut current = self.clone();
        while current.precision > 0 {
            let lower = current.p.pow(current.precision - 1);
            let mut counts: HashMap<u64, u64> = HashMap::new();
            for &r in &current.residues {
                *counts.entry(r % lower).or_insert(0) += 1;
            }
            if counts.values().any(|&c| c != current.p) {
                break;
            }
            let mut residues: Vec<u64> = counts.into_keys().collect();
            residues.sort_unstable();
            current = PadicSet {
                p: current.p,
                precision: current.precision - 1,
                residues,
            };
        }
        current
    }

    /// Point-set equality regardless of the stored precision.
    pub fn same_points(&self, other: &PadicSet) -> bool {
        self.p == other.p && self.coarsened() == other.coarsened()
    }
}

/// Digits `b_0, b_1, …` of a p-adic integer, least significant first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DigitStream {
    p: u64,
    digits: Vec<u64>,
}

impl DigitStream {
    pub fn new(p: u64, digits: Vec<u64>) -> Result<Self> {
        if p < 2 {
            return Err(Error::precondition(format!("{p} is not a valid base")));
        }
        if let Some(&d) = digits.iter().find(|&&d| d >= p) {
            return Err(Error::precondition(format!("digit {d} out of range for p = {p}")));
        }
        Ok(Self { p, digits })
    }

    /// The first `len` digits of a non-negative integer.
    pub fn from_value(p: u64, value: u64, len: usize) -> Result<Self> {
        let mut digits = Vec::with_capacity(len);
        let mut v = value;
        for _ in 0..len {
            digits.push(v % p);
            v /= p;
        }
        Self::new(p, digits)
    }

    /// `len` i.i.d. uniform digits.
    pub fn random<R: Rng + ?Sized>(p: u64, len: usize, rng: &mut R) -> Result<Self> {
        let digits = (0..len).map(|_| rng.gen_range(0..p)).collect();
        Self::new(p, digits)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn digits(&self) -> &[u64] {
        &self.digits
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    /// `Σ_{m<M} b_m p^m`.
    pub fn truncation(&self, precision: u32) -> Result<u64> {
        let needed = precision as usize;
        if needed > self.digits.len() {
            return Err(Error::InsufficientDigits {
                needed,
                available: self.digits.len(),
            });
        }
        checked_modulus(self.p, precision, MODULUS_LIMIT)?;
        Ok(self.digits[..needed]
            .iter()
            .rev()
            .fold(0u64, |acc, &d| acc * self.p + d))
    }
}

/// `a` with `|a| ≤ n` and `gcd(a, n) = 1`, ascending. For `n = 1` this
/// includes `0`.
pub fn admissible_numerators(n: u64) -> Vec<i64> {
    let n_i = n as i64;
    (-n_i..=n_i)
        .filter(|&a| gcd(a.unsigned_abs(), n) == 1)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    /// Centers `a/n`, `|a| ≤ n`, `gcd(a, n) = 1`.
    Standard,
    /// Centers `a/n` and `n/a` for every `|a| ≤ n` (`a ≠ 0` for `n/a`).
    JarnikLutz,
    /// Centers `a/n` and `n/a` for admissible `a` (`a ≠ 0` for `n/a`).
    CoprimeJarnikLutz,
}

/// Ball radius restricted to `{0} ∪ {p^{−e} : e ∈ ℤ}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BallRadius {
    Zero,
    /// Radius `p^{−e}`; negative `e` means a radius above 1.
    Exponent(i64),
}

impl BallRadius {
    /// Largest admissible radius not exceeding `r`.
    pub fn from_rational(p: u64, r: &Rational) -> Result<Self> {
        if r.is_negative() {
            return Err(Error::NegativeRadius(crate::rational::format_rational(r)));
        }
        if r.is_zero() {
            return Ok(BallRadius::Zero);
        }
        let pb = BigInt::from(p);
        // Smallest e with p^{-e} ≤ r.
        let mut e: i64 = 0;
        let mut power = Rational::one();
        if &power > r {
            while &power > r {
                power /= &pb;
                e += 1;
            }
        } else {
            loop {
                let next = &power * &pb;
                if &next > r {
                    break;
                }
                power = next;
                e -= 1;
            }
        }
        Ok(BallRadius::Exponent(e))
    }

    pub fn to_rational(&self, p: u64) -> Rational {
        match *self {
            BallRadius::Zero => Rational::zero(),
            BallRadius::Exponent(e) if e >= 0 => inverse_power(p, e as u32),
            BallRadius::Exponent(e) => Rational::from_integer(BigInt::from(p).pow((-e) as u32)),
        }
    }
}

/// Residue mod `p^precision` of the center `u/v` (lowest terms), or `None`
/// when `|u/v|_p > p^{-radius_exponent}` puts the whole ball outside ℤ_p.
/// `Some(None)` means the ball covers ℤ_p.
fn center_residue(p: u64, u: i64, v: u64, radius_exponent: i64, q: u64) -> Option<Option<u64>> {
    let g = gcd(u.unsigned_abs(), v);
    let (u, v) = (u / g as i64, v / g);
    if v % p == 0 {
        let excess = valuation(p, v) as i64;
        // |u/v|_p = p^excess; the ball reaches ℤ_p only if its radius is at least that.
        return (-radius_exponent >= excess).then_some(None);
    }
    if radius_exponent <= 0 {
        return Some(None);
    }
    let inv = mod_inverse((v % q) as i64, q).expect("v is a unit mod p^M");
    let u_mod = (u as i128).rem_euclid(q as i128) as u128;
    Some(Some((u_mod * inv as u128 % q as u128) as u64))
}

fn centers(n: u64, variant: Variant) -> Vec<(i64, u64)> {
    let n_i = n as i64;
    let mut out = Vec::new();
    let coprime = |a: i64| gcd(a.unsigned_abs(), n) == 1;
    for a in -n_i..=n_i {
        let take = match variant {
            Variant::Standard | Variant::CoprimeJarnikLutz => coprime(a),
            Variant::JarnikLutz => true,
        };
        if !take {
            continue;
        }
        out.push((a, n));
        if variant != Variant::Standard && a != 0 {
            out.push((n_i * a.signum(), a.unsigned_abs()));
        }
    }
    out
}

/// `𝓔_n` (or a variant) at radius `p^{−precision}`, with the default modulus cap.
pub fn build_e(n: u64, p: u64, precision: u32, variant: Variant) -> Result<PadicSet> {
    build_e_with_cap(n, p, precision, variant, DEFAULT_MODULUS_CAP)
}

pub fn build_e_with_cap(n: u64, p: u64, precision: u32, variant: Variant, cap: u64) -> Result<PadicSet> {
    build_e_radius_with_cap(n, p, BallRadius::Exponent(precision as i64), variant, cap)
}

pub fn build_e_radius(n: u64, p: u64, radius: BallRadius, variant: Variant) -> Result<PadicSet> {
    build_e_radius_with_cap(n, p, radius, variant, DEFAULT_MODULUS_CAP)
}

pub fn build_e_radius_with_cap(
    n: u64,
    p: u64,
    radius: BallRadius,
    variant: Variant,
    cap: u64,
) -> Result<PadicSet> {
    if n == 0 {
        return Err(Error::ZeroInput);
    }
    check_prime(p)?;
    let e = match radius {
        BallRadius::Zero => return Ok(PadicSet::empty(p)),
        BallRadius::Exponent(e) => e,
    };
    let precision = e.max(0) as u32;
    let q = checked_modulus(p, precision, cap)?;
    let mut residues = Vec::new();
    for (u, v) in centers(n, variant) {
        match center_residue(p, u, v, e, q) {
            None => {}
            Some(None) => return Ok(PadicSet::full(p)),
            Some(Some(r)) => residues.push(r),
        }
    }
    PadicSet::from_residues(p, precision, residues)
}

/// `τ_p`: drop the lowest digit and add one when it was non-zero.
pub fn tau_shift(s: &PadicSet) -> Result<PadicSet> {
    if s.precision == 0 {
        return Err(Error::precondition("tau_shift needs precision at least 1"));
    }
    let p = s.p;
    let q = p.pow(s.precision - 1);
    let image = s.residues.iter().map(|&r| (r / p + u64::from(r % p != 0)) % q);
    PadicSet::from_residues(p, s.precision - 1, image)
}

pub fn measure(s: &PadicSet) -> Rational {
    s.measure()
}

pub fn intersect(s1: &PadicSet, s2: &PadicSet) -> Result<PadicSet> {
    s1.intersect(s2)
}

pub fn contains(s: &PadicSet, x: &DigitStream) -> Result<bool> {
    s.contains(x)
}

/// Number of distinct classes mod `p^precision` hit by admissible numerators
/// of `n`, for `p ∤ n`; equals `p^M · μ_p(𝓔_n)` without materializing the set.
pub fn standard_class_count(n: u64, p: u64, precision: u32) -> Result<u64> {
    if n == 0 {
        return Err(Error::ZeroInput);
    }
    if n % p == 0 {
        return Err(Error::precondition(format!("{p} divides {n}")));
    }
    let q = checked_modulus(p, precision, MODULUS_LIMIT)?;
    let count = admissible_numerators(n).len() as u64;
    if q > 2 * n {
        return Ok(count);
    }
    let mut seen = vec![false; q as usize];
    for a in admissible_numerators(n) {
        seen[a.rem_euclid(q as i64) as usize] = true;
    }
    Ok(seen.iter().filter(|&&b| b).count() as u64)
}

/// Exact `μ_p(𝓔_n)` at the given radius without materializing residues.
pub fn standard_measure(n: u64, p: u64, radius: BallRadius) -> Result<Rational> {
    if n == 0 {
        return Err(Error::ZeroInput);
    }
    let e = match radius {
        BallRadius::Zero => return Ok(Rational::zero()),
        BallRadius::Exponent(e) => e,
    };
    if n % p == 0 {
        let full = -e >= valuation(p, n) as i64;
        return Ok(if full { Rational::one() } else { Rational::zero() });
    }
    if e <= 0 {
        return Ok(Rational::one());
    }
    let precision = e as u32;
    let count = standard_class_count(n, p, precision)?;
    Ok(Rational::new(
        BigInt::from(count),
        BigInt::from(checked_modulus(p, precision, MODULUS_LIMIT)?),
    ))
}

/// Whether the point with truncation `x_mod` (mod `p^precision`) lies in `𝓔_n`
/// at radius `p^{−precision}`, for `p ∤ n`.
fn standard_contains_residue(n: u64, p: u64, precision: u32, x_mod: u64) -> bool {
    let q = p.pow(precision) as u128;
    let t = (n as u128 % q * x_mod as u128 % q) as i128;
    let q = q as i128;
    let n_i = n as i128;
    // Smallest a ≥ −n with a ≡ t (mod q).
    let mut a = -n_i + (t + n_i).rem_euclid(q);
    while a <= n_i {
        if gcd(a.unsigned_abs() as u64, n) == 1 {
            return true;
        }
        a += q;
    }
    false
}

/// Membership of `x` in `𝓔_n` at the given radius, without materializing the set.
pub fn standard_contains(n: u64, p: u64, radius: BallRadius, x: &DigitStream) -> Result<bool> {
    if n == 0 {
        return Err(Error::ZeroInput);
    }
    if x.p != p {
        return Err(Error::MismatchedPrimes(p, x.p));
    }
    let e = match radius {
        BallRadius::Zero => return Ok(false),
        BallRadius::Exponent(e) => e,
    };
    if n % p == 0 {
        return Ok(-e >= valuation(p, n) as i64);
    }
    if e <= 0 {
        return Ok(true);
    }
    let precision = u32::try_from(e).map_err(|_| Error::Overflow("converting a precision"))?;
    let x_mod = x.truncation(precision)?;
    Ok(standard_contains_residue(n, p, precision, x_mod))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ntheory::euler_phi;
    use crate::rational::{int, rat};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Every residue `x` mod `p^M` with `|x − c|_p ≤ p^{−M}` for some center `c`,
    /// found by testing `v·x ≡ u` directly.
    fn brute_e(n: u64, p: u64, m: u32, variant: Variant) -> PadicSet {
        let q = p.pow(m);
        let cs = centers(n, variant);
        let mut residues = Vec::new();
        for x in 0..q {
            let hit = cs.iter().any(|&(u, v)| {
                let g = gcd(u.unsigned_abs(), v);
                let (u, v) = (u / g as i64, v / g);
                if v % p == 0 {
                    return false;
                }
                // |x − u/v|_p = |v·x − u|_p since v is a unit.
                ((v as i128 * x as i128 - u as i128).rem_euclid(q as i128)) == 0
            });
            if hit {
                residues.push(x);
            }
        }
        PadicSet::from_residues(p, m, residues).unwrap()
    }

    #[test]
    fn admissible_examples() {
        assert_eq!(admissible_numerators(3), vec![-2, -1, 1, 2]);
        assert_eq!(admissible_numerators(1), vec![-1, 0, 1]);
        assert_eq!(admissible_numerators(6), vec![-5, -1, 1, 5]);
        for n in 2..200u64 {
            assert_eq!(admissible_numerators(n).len() as u64, 2 * euler_phi(n).unwrap());
        }
    }

    #[test]
    fn build_examples() {
        let s = build_e(3, 5, 2, Variant::Standard).unwrap();
        assert_eq!(s.residues(), &[8, 9, 16, 17]);
        assert_eq!(s.measure(), rat(4, 25));
        for n in [1, 3, 12] {
            assert!(build_e(n, 5, 0, Variant::Standard).unwrap().is_full());
        }
        // |a/10|_5 = 5 exceeds the unit radius.
        assert!(build_e(10, 5, 0, Variant::Standard).unwrap().is_empty());
        for p in [2, 3, 5] {
            let s = build_e(2 * p, p, 1, Variant::CoprimeJarnikLutz).unwrap();
            assert_eq!(s.residues(), &[0]);
            assert_eq!(s.measure(), rat(1, p as i64));
        }
        assert!(build_e(10, 5, 1, Variant::Standard).unwrap().is_empty());
        assert!(matches!(
            build_e(3, 7, 12, Variant::Standard),
            Err(Error::CapExceeded { .. })
        ));
        assert_eq!(
            build_e_with_cap(3, 7, 12, Variant::Standard, 7u64.pow(12)).unwrap().measure(),
            inverse_power(7, 12) * int(4)
        );
    }

    #[test]
    fn radius_above_one_for_non_units() {
        // |a/10|_5 = 5, so the ball needs radius 5 to reach ℤ_5.
        let r = BallRadius::from_rational(5, &int(5)).unwrap();
        assert_eq!(r, BallRadius::Exponent(-1));
        assert!(build_e_radius(10, 5, r, Variant::Standard).unwrap().is_full());
        assert!(build_e_radius(10, 5, BallRadius::Exponent(0), Variant::Standard)
            .unwrap()
            .is_empty());
        assert!(build_e_radius(50, 5, r, Variant::Standard).unwrap().is_empty());
    }

    #[test]
    fn radius_rounding() {
        assert_eq!(BallRadius::from_rational(5, &rat(1, 100)).unwrap(), BallRadius::Exponent(3));
        assert_eq!(BallRadius::from_rational(5, &rat(1, 25)).unwrap(), BallRadius::Exponent(2));
        assert_eq!(BallRadius::from_rational(2, &int(1)).unwrap(), BallRadius::Exponent(0));
        assert_eq!(BallRadius::from_rational(2, &int(7)).unwrap(), BallRadius::Exponent(-2));
        assert_eq!(BallRadius::from_rational(3, &int(0)).unwrap(), BallRadius::Zero);
        assert!(BallRadius::from_rational(3, &rat(-1, 2)).is_err());
        assert_eq!(BallRadius::Exponent(-2).to_rational(2), int(4));
    }

    #[test]
    fn build_matches_brute_force() {
        for p in [2u64, 3, 5, 7] {
            for n in 1..=40u64 {
                for m in 0..=4u32 {
                    if p.pow(m) > 3000 {
                        continue;
                    }
                    for variant in [Variant::Standard, Variant::JarnikLutz, Variant::CoprimeJarnikLutz] {
                        if n % p == 0 && variant == Variant::Standard {
                            continue;
                        }
                        let fast = build_e(n, p, m, variant).unwrap();
                        let brute = brute_e(n, p, m, variant);
                        if m == 0 {
                            assert!(fast.is_full());
                        } else {
                            assert!(fast.same_points(&brute), "n={n} p={p} m={m} {variant:?}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn non_materialized_measure_and_membership() {
        for p in [2u64, 3, 5] {
            for n in (1..=60u64).filter(|n| n % p != 0) {
                for m in 0..=5u32 {
                    let s = build_e(n, p, m, Variant::Standard).unwrap();
                    let r = BallRadius::Exponent(m as i64);
                    assert_eq!(standard_measure(n, p, r).unwrap(), s.measure());
                    for x in 0..p.pow(m).min(300) {
                        let stream = DigitStream::from_value(p, x, m as usize).unwrap();
                        assert_eq!(
                            standard_contains(n, p, r, &stream).unwrap(),
                            s.contains(&stream).unwrap()
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn contains_examples() {
        let s = build_e(3, 5, 2, Variant::Standard).unwrap();
        let nine = DigitStream::from_value(5, 9, 2).unwrap();
        let ten = DigitStream::from_value(5, 10, 3).unwrap();
        assert!(s.contains(&nine).unwrap());
        assert!(!s.contains(&ten).unwrap());
        let zero = DigitStream::from_value(5, 0, 0).unwrap();
        assert!(PadicSet::full(5).contains(&zero).unwrap());
        assert_eq!(
            s.contains(&zero),
            Err(Error::InsufficientDigits { needed: 2, available: 0 })
        );
        let wrong = DigitStream::from_value(3, 0, 4).unwrap();
        assert_eq!(s.contains(&wrong), Err(Error::MismatchedPrimes(5, 3)));
    }

    #[test]
    fn intersect_examples() {
        let s = build_e(3, 5, 2, Variant::Standard).unwrap();
        assert_eq!(s.intersect(&PadicSet::full(5)).unwrap(), s);
        assert!(s.intersect(&PadicSet::empty(5)).unwrap().is_empty());
        let a = build_e(2, 3, 1, Variant::Standard).unwrap();
        let b = build_e(5, 3, 2, Variant::Standard).unwrap();
        let lifted: Vec<u64> = (0..9)
            .filter(|x| a.residues().contains(&(x % 3)) && b.residues().contains(x))
            .collect();
        assert_eq!(a.intersect(&b).unwrap().residues(), lifted.as_slice());
        assert_eq!(
            a.intersect(&build_e(2, 5, 1, Variant::Standard).unwrap()),
            Err(Error::MismatchedPrimes(3, 5))
        );
    }

    #[test]
    fn tau_examples() {
        let s = PadicSet::from_residues(2, 3, [5]).unwrap();
        assert_eq!(tau_shift(&s).unwrap().residues(), &[3]);
        assert_eq!(tau_shift(&s).unwrap().precision(), 2);
        let z = PadicSet::from_residues(3, 4, [0]).unwrap();
        assert_eq!(tau_shift(&z).unwrap().residues(), &[0]);
        assert!(tau_shift(&PadicSet::full(3)).is_err());
    }

    #[test]
    fn coarsening() {
        let s = PadicSet::from_residues(3, 2, [0, 3, 6]).unwrap();
        assert_eq!(s.coarsened(), PadicSet::from_residues(3, 1, [0]).unwrap());
        let all = PadicSet::from_residues(2, 3, 0..8).unwrap();
        assert_eq!(all.coarsened(), PadicSet::full(2));
        assert!(PadicSet::from_residues(2, 3, []).unwrap().same_points(&PadicSet::empty(2)));
    }

    #[test]
    fn random_streams_are_seeded() {
        let mut a = ChaCha8Rng::seed_from_u64(7);
        let mut b = ChaCha8Rng::seed_from_u64(7);
        let x = DigitStream::random(3, 20, &mut a).unwrap();
        assert_eq!(x, DigitStream::random(3, 20, &mut b).unwrap());
        assert!(x.digits().iter().all(|&d| d < 3));
    }

    fn brute_intersect(s1: &PadicSet, s2: &PadicSet) -> PadicSet {
        let m = s1.precision().max(s2.precision());
        let q = s1.p().pow(m);
        let keep = (0..q).filter(|&x| {
            s1.residues().contains(&(x % s1.modulus())) && s2.residues().contains(&(x % s2.modulus()))
        });
        PadicSet::from_residues(s1.p(), m, keep).unwrap()
    }

    fn arb_set() -> impl Strategy<Value = PadicSet> {
        (prop::sample::select(vec![2u64, 3, 5]), 0u32..=3).prop_flat_map(|(p, m)| {
            let q = p.pow(m);
            prop::collection::vec(0..q, 0..=q as usize)
                .prop_map(move |rs| PadicSet::from_residues(p, m, rs).unwrap())
        })
    }

    proptest! {
        #[test]
        fn intersect_matches_enumeration(s1 in arb_set(), seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = s1.p();
            let m = rng.gen_range(0..=3u32);
            let q = p.pow(m);
            let rs: Vec<u64> = (0..q).filter(|_| rng.gen_bool(0.5)).collect();
            let s2 = PadicSet::from_residues(p, m, rs).unwrap();
            let got = s1.intersect(&s2).unwrap();
            prop_assert_eq!(&got, &brute_intersect(&s1, &s2));
            prop_assert_eq!(got, s2.intersect(&s1).unwrap());
        }

        #[test]
        fn balls_nest_or_separate(p in prop::sample::select(vec![2u64, 3, 5, 7]),
                                  m1 in 0u32..6, m2 in 0u32..6,
                                  c1 in any::<u64>(), c2 in any::<u64>()) {
            let b1 = PadicSet::ball(p, m1, c1).unwrap();
            let b2 = PadicSet::ball(p, m2, c2).unwrap();
            let i = b1.intersect(&b2).unwrap();
            let smaller = if m1 >= m2 { &b1 } else { &b2 };
            prop_assert!(i.is_empty() || &i == smaller);
        }

        #[test]
        fn tau_scales_small_sets(p in prop::sample::select(vec![2u64, 3, 5]), m in 1u32..=5, seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let q = p.pow(m);
            let rs: Vec<u64> = (0..q).step_by(p as usize).filter(|_| rng.gen_bool(0.4)).collect();
            let s = PadicSet::from_residues(p, m, rs).unwrap();
            let image = tau_shift(&s).unwrap();
            prop_assert_eq!(image.measure(), s.measure() * int(p as i64));
        }
    }
}
