//! Admissible numerators in residue classes.
//!
//! `count(n, q, b) = #{a : |a| ≤ n, gcd(a, n) = 1, a ≡ b (mod q)}`. The
//! formula path is Möbius inversion over squarefree `d | n`, counting
//! multiples `a = dℓ` in the class exactly with floor differences.

use num_bigint::BigInt;

use super::{BoundCheck, Relation};
use crate::ntheory::{euler_phi, factorize, gcd, mod_inverse, omega, squarefree_divisors};
use crate::rational::{inverse_power, Rational};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CountMethod {
    Formula,
    Brute,
}

/// `#{ℓ ∈ [lo, hi] : ℓ ≡ r (mod q)}`.
fn count_in_class(lo: i64, hi: i64, r: i64, q: i64) -> i64 {
    if hi < lo {
        return 0;
    }
    (hi - r).div_euclid(q) - (lo - 1 - r).div_euclid(q)
}

pub fn coprime_count(n: u64, modulus: u64, b: i64, method: CountMethod) -> Result<u64> {
    if n == 0 || modulus == 0 {
        return Err(Error::ZeroInput);
    }
    let n_i = n as i64;
    let q = modulus as i64;
    match method {
        CountMethod::Brute => Ok((-n_i..=n_i)
            .filter(|&a| gcd(a.unsigned_abs(), n) == 1 && (a - b).rem_euclid(q) == 0)
            .count() as u64),
        CountMethod::Formula => {
            let b = b.rem_euclid(q);
            let mut total: i64 = 0;
            for (d, mu) in squarefree_divisors(&factorize(n)?) {
                let g = gcd(d, modulus);
                if b as u64 % g != 0 {
                    continue;
                }
                let q_g = modulus / g;
                let l0 = ((b as u64 / g) % q_g) as u128 * mod_inverse(((d / g) % q_g) as i64, q_g)? as u128
                    % q_g as u128;
                let reach = (n / d) as i64;
                total += mu as i64 * count_in_class(-reach, reach, l0 as i64, q_g as i64);
            }
            u64::try_from(total).map_err(|_| Error::Internal(format!("negative count for n = {n}")))
        }
    }
}

/// `count(n, q, b)` for every `b ∈ [0, q)`.
pub fn coprime_counts_all(n: u64, modulus: u64, method: CountMethod) -> Result<Vec<u64>> {
    if n == 0 || modulus == 0 {
        return Err(Error::ZeroInput);
    }
    let q = modulus as usize;
    let n_i = n as i64;
    match method {
        CountMethod::Brute => {
            let mut out = vec![0u64; q];
            for a in -n_i..=n_i {
                if gcd(a.unsigned_abs(), n) == 1 {
                    out[a.rem_euclid(q as i64) as usize] += 1;
                }
            }
            Ok(out)
        }
        CountMethod::Formula => {
            let mut acc = vec![0i64; q];
            for (d, mu) in squarefree_divisors(&factorize(n)?) {
                let mu = mu as i64;
                let g = gcd(d, modulus);
                let q_g = modulus / g;
                // a = dℓ runs over |ℓ| ≤ n/d; the classes of ℓ mod q/g biject
                // onto the classes b ≡ 0 (mod g) via b = dℓ mod q.
                let reach = (n / d) as i64;
                let len = 2 * reach + 1;
                let (base, extra) = (len / q_g as i64, len % q_g as i64);
                let d_mod = (d % modulus) as usize;
                if base != 0 {
                    let mut b = 0usize;
                    for _ in 0..q_g {
                        acc[b] += mu * base;
                        b += d_mod;
                        if b >= q {
                            b -= q;
                        }
                    }
                }
                // The first `extra` classes starting at ℓ = −reach get one more.
                for k in 0..extra {
                    let l = (-reach + k).rem_euclid(q_g as i64) as u64;
                    acc[(d_mod as u128 * l as u128 % q as u128) as usize] += mu;
                }
            }
            acc.into_iter()
                .map(|c| u64::try_from(c).map_err(|_| Error::Internal(format!("negative count for n = {n}"))))
                .collect()
        }
    }
}

/// Whether every class mod `p^M` holds an admissible numerator of `n`, under
/// the hypothesis `p^{−M} > 4^{ω(n)}/n`. The check records the smallest class
/// count against 1.
pub fn surjectivity_check(n: u64, p: u64, precision: u32) -> Result<BoundCheck> {
    if n == 0 {
        return Err(Error::ZeroInput);
    }
    if n % p == 0 {
        return Err(Error::precondition(format!("{p} divides {n}")));
    }
    let q = p
        .checked_pow(precision)
        .ok_or(Error::Overflow("computing p^M"))?;
    // p^{−M} > 4^ω / n  ⇔  n > 4^ω · p^M
    let four_omega = 4u128.pow(omega(n)?);
    if n as u128 <= four_omega * q as u128 {
        return Err(Error::precondition(format!(
            "p^-M > 4^omega(n)/n fails for n = {n}, p = {p}, M = {precision}"
        )));
    }
    let counts = coprime_counts_all(n, q, CountMethod::Formula)?;
    let min = counts.iter().copied().min().unwrap_or(0);
    Ok(BoundCheck::new(
        "surjectivity",
        vec![("n", n.to_string()), ("p", p.to_string()), ("M", precision.to_string())],
        Rational::from_integer(BigInt::from(min)),
        Relation::GreaterEq,
        Rational::from_integer(BigInt::from(1)),
    ))
}

/// `A(n) = Σ_ℓ max(0, #{admissible a ≡ ℓ (mod p^M)} − 1)`, by enumeration.
pub fn a_correction(n: u64, p: u64, precision: u32) -> Result<u64> {
    if n < 2 {
        return Err(Error::precondition("A(n) is defined for n ≥ 2"));
    }
    if n % p == 0 {
        return Err(Error::precondition(format!("{p} divides {n}")));
    }
    let q = p
        .checked_pow(precision)
        .ok_or(Error::Overflow("computing p^M"))?;
    if q > 2 * n {
        // Class spacing exceeds the numerator range.
        return Ok(0);
    }
    let counts = coprime_counts_all(n, q, CountMethod::Brute)?;
    Ok(counts.iter().map(|&c| c.saturating_sub(1)).sum())
}

/// `A(n) < 12 φ(n)² p^{−M}`, for `p^{−M} ≥ 1/(2n)`.
pub fn a_correction_bound_check(n: u64, p: u64, precision: u32) -> Result<BoundCheck> {
    if n < 2 {
        return Err(Error::precondition("A(n) is defined for n ≥ 2"));
    }
    let q = p
        .checked_pow(precision)
        .ok_or(Error::Overflow("computing p^M"))?;
    if q > 2 * n {
        return Err(Error::precondition(format!(
            "p^-M >= 1/(2n) fails for n = {n}, p = {p}, M = {precision}"
        )));
    }
    let a = a_correction(n, p, precision)?;
    let phi = euler_phi(n)?;
    let rhs = Rational::from_integer(BigInt::from(12u128 * phi as u128 * phi as u128)) * inverse_power(p, precision);
    Ok(BoundCheck::new(
        "a_correction_bound",
        vec![("n", n.to_string()), ("p", p.to_string()), ("M", precision.to_string())],
        Rational::from_integer(BigInt::from(a)),
        Relation::Less,
        rhs,
    ))
}

/// `#{ℓ : |ℓ| ≤ n/d, dℓ ≡ b (mod q)}`, the per-divisor count of the Möbius expansion.
#[cfg(test)]
fn divisor_count(n: u64, d: u64, q: u64, b: i64) -> i64 {
    let reach = (n / d) as i64;
    (-reach..=reach)
        .filter(|&l| (d as i64 * l - b).rem_euclid(q as i64) == 0)
        .count() as i64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn count_examples() {
        for method in [CountMethod::Formula, CountMethod::Brute] {
            assert_eq!(coprime_count(5, 4, 1, method).unwrap(), 2);
            assert_eq!(coprime_count(1, 1, 0, method).unwrap(), 3);
            assert_eq!(coprime_count(6, 1, 0, method).unwrap(), 4);
            assert_eq!(coprime_count(6, 4, -3, method).unwrap(), coprime_count(6, 4, 1, method).unwrap());
        }
    }

    #[test]
    fn formula_matches_brute_small() {
        for n in 1..=60u64 {
            for q in 1..=4 * n {
                let bulk_f = coprime_counts_all(n, q, CountMethod::Formula).unwrap();
                let bulk_b = coprime_counts_all(n, q, CountMethod::Brute).unwrap();
                assert_eq!(bulk_f, bulk_b, "n = {n}, q = {q}");
                for b in 0..q as i64 {
                    assert_eq!(
                        coprime_count(n, q, b, CountMethod::Formula).unwrap(),
                        bulk_b[b as usize],
                        "n = {n}, q = {q}, b = {b}"
                    );
                }
            }
        }
    }

    #[test]
    fn per_divisor_remainders_are_small() {
        // count_d = 2n/(d q) + k_d with |k_d| ≤ 2 whenever gcd(d, q) = 1.
        for p in [2u64, 3, 5] {
            for n in (1..=120u64).filter(|n| n % p != 0) {
                for m in 0..=4 {
                    let q = p.pow(m);
                    for (d, _) in squarefree_divisors(&factorize(n).unwrap()) {
                        for b in 0..q as i64 {
                            let exact = divisor_count(n, d, q, b);
                            let main = rat(2 * n as i64, (d * q) as i64);
                            let k = Rational::from_integer(BigInt::from(exact)) - main;
                            assert!(k <= rat(2, 1) && k >= rat(-2, 1), "n={n} d={d} q={q} b={b}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn a_correction_examples() {
        assert_eq!(a_correction(3, 5, 1).unwrap(), 0);
        assert_eq!(a_correction(5, 3, 1).unwrap(), 5);
        assert_eq!(a_correction(7, 2, 5).unwrap(), 0);
        let c = a_correction_bound_check(5, 3, 1).unwrap();
        assert_eq!((c.lhs.clone(), c.rhs.clone(), c.holds), (rat(5, 1), rat(64, 1), true));
        let c = a_correction_bound_check(3, 5, 1).unwrap();
        assert_eq!((c.lhs.clone(), c.rhs.clone(), c.holds), (rat(0, 1), rat(48, 5), true));
        let c = a_correction_bound_check(7, 2, 2).unwrap();
        assert_eq!(c.rhs, rat(108, 1));
        assert!(c.holds);
        assert!(a_correction_bound_check(3, 5, 2).is_err());
    }

    #[test]
    fn surjectivity_examples() {
        assert!(matches!(surjectivity_check(3, 5, 1), Err(Error::Precondition(_))));
        assert!(matches!(surjectivity_check(15, 2, 1), Err(Error::Precondition(_))));
        assert!(matches!(surjectivity_check(105, 2, 5), Err(Error::Precondition(_))));
        assert!(surjectivity_check(7, 3, 0).unwrap().holds);
        let c = surjectivity_check(9, 2, 1).unwrap();
        assert!(c.holds, "{c}");
    }
}
