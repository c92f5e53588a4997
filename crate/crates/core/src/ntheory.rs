//! Integer arithmetic kernel: factorization and the multiplicative functions
//! μ, φ and ω, divisor lists, modular inverses and a combined sieve.

use std::sync::OnceLock;

use crate::{Error, Result};

/// Largest prime kept in the trial-division table.
const PRIME_TABLE_LIMIT: u64 = 100_000;

/// Largest argument [`factorize`] accepts: every composite below this has a
/// prime factor inside the table.
pub const FACTOR_CAP: u64 = PRIME_TABLE_LIMIT * PRIME_TABLE_LIMIT;

/// Largest table size [`totient_sieve`] will build.
pub const SIEVE_CAP: usize = 10_000_000;

fn prime_table() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let limit = PRIME_TABLE_LIMIT as usize;
        let mut composite = vec![false; limit + 1];
        let mut primes = Vec::new();
        for i in 2..=limit {
            if !composite[i] {
                primes.push(i as u64);
                let mut j = i * i;
                while j <= limit {
                    composite[j] = true;
                    j += i;
                }
            }
        }
        primes
    })
}

/// Prime factorization `n = ∏ prime^exponent`, primes strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    n: u64,
    factors: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn factors(&self) -> &[(u64, u32)] {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e == 1)
    }
}

pub fn factorize(n: u64) -> Result<Factorization> {
    if n == 0 {
        return Err(Error::ZeroInput);
    }
    if n >= FACTOR_CAP {
        return Err(Error::cap("factorization argument", n, FACTOR_CAP - 1));
    }
    let mut rest = n;
    let mut factors = Vec::new();
    for &p in prime_table() {
        if p * p > rest {
            break;
        }
        if rest % p == 0 {
            let mut e = 0;
            while rest % p == 0 {
                rest /= p;
                e += 1;
            }
            factors.push((p, e));
        }
    }
    if rest > 1 {
        factors.push((rest, 1));
    }
    Ok(Factorization { n, factors })
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn lcm(a: u64, b: u64) -> Option<u64> {
    if a == 0 || b == 0 {
        return Some(0);
    }
    (a / gcd(a, b)).checked_mul(b)
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && factorize(n).map(|f| f.factors == [(n, 1)]).unwrap_or(false)
}

pub fn mobius(n: u64) -> Result<i8> {
    let f = factorize(n)?;
    Ok(if !f.is_squarefree() {
        0
    } else if f.factors.len() % 2 == 0 {
        1
    } else {
        -1
    })
}

pub fn euler_phi(n: u64) -> Result<u64> {
    let f = factorize(n)?;
    Ok(f.factors
        .iter()
        .fold(n, |acc, &(p, _)| acc / p * (p - 1)))
}

pub fn omega(n: u64) -> Result<u32> {
    Ok(factorize(n)?.factors.len() as u32)
}

pub fn divisors(n: u64) -> Result<Vec<u64>> {
    let f = factorize(n)?;
    Ok(divisors_of(&f))
}

pub fn divisors_of(f: &Factorization) -> Vec<u64> {
    let mut out = vec![1u64];
    for &(p, e) in &f.factors {
        let len = out.len();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                out.push(out[i] * pk);
            }
        }
    }
    out.sort_unstable();
    out
}

/// Squarefree divisors of `n` paired with their Möbius value; the only terms
/// that survive a Möbius-weighted divisor sum.
pub fn squarefree_divisors(f: &Factorization) -> Vec<(u64, i8)> {
    let mut out = vec![(1u64, 1i8)];
    for p in f.primes() {
        let len = out.len();
        for i in 0..len {
            let (d, mu) = out[i];
            out.push((d * p, -mu));
        }
    }
    out.sort_unstable();
    out
}

/// Inverse of `a` modulo `m`, in `[0, m)`.
pub fn mod_inverse(a: i64, m: u64) -> Result<u64> {
    if m == 0 {
        return Err(Error::ZeroInput);
    }
    if m == 1 {
        return Ok(0);
    }
    let m_i = m as i128;
    let (mut old_r, mut r) = ((a as i128).rem_euclid(m_i), m_i);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return Err(Error::NotCoprime { a, modulus: m });
    }
    Ok(old_s.rem_euclid(m_i) as u64)
}

/// p-adic valuation of a non-zero integer.
pub fn valuation(p: u64, n: u64) -> u32 {
    debug_assert!(p >= 2 && n > 0);
    let mut v = 0;
    let mut m = n;
    while m % p == 0 {
        m /= p;
        v += 1;
    }
    v
}

/// Tables of φ, μ and ω for `1 ≤ n ≤ limit`, built by a linear sieve.
#[derive(Debug, Clone)]
pub struct SieveTables {
    phi: Vec<u32>,
    mu: Vec<i8>,
    omega: Vec<u8>,
}

impl SieveTables {
    pub fn limit(&self) -> usize {
        self.phi.len() - 1
    }

    /// φ(n); panics when `n` is 0 or beyond the table.
    pub fn phi(&self, n: usize) -> u64 {
        assert!(n >= 1);
        self.phi[n] as u64
    }

    pub fn mu(&self, n: usize) -> i8 {
        assert!(n >= 1);
        self.mu[n]
    }

    pub fn omega(&self, n: usize) -> u32 {
        assert!(n >= 1);
        self.omega[n] as u32
    }

    /// φ(1), …, φ(limit).
    pub fn phi_values(&self) -> &[u32] {
        &self.phi[1..]
    }
}

pub fn totient_sieve(limit: usize) -> Result<SieveTables> {
    if limit > SIEVE_CAP {
        return Err(Error::cap("sieve size", limit, SIEVE_CAP));
    }
    let mut phi = vec![0u32; limit + 1];
    let mut mu = vec![0i8; limit + 1];
    let mut omega = vec![0u8; limit + 1];
    let mut primes: Vec<usize> = Vec::new();
    if limit >= 1 {
        phi[1] = 1;
        mu[1] = 1;
    }
    for i in 2..=limit {
        if phi[i] == 0 {
            primes.push(i);
            phi[i] = (i - 1) as u32;
            mu[i] = -1;
            omega[i] = 1;
        }
        for &p in &primes {
            let ip = i * p;
            if ip > limit {
                break;
            }
            if i % p == 0 {
                phi[ip] = phi[i] * p as u32;
                mu[ip] = 0;
                omega[ip] = omega[i];
                break;
            }
            phi[ip] = phi[i] * (p as u32 - 1);
            mu[ip] = -mu[i];
            omega[ip] = omega[i] + 1;
        }
    }
    Ok(SieveTables { phi, mu, omega })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_phi(n: u64) -> u64 {
        (1..=n).filter(|&a| gcd(a, n) == 1).count() as u64
    }

    #[test]
    fn factorize_examples() {
        assert!(factorize(1).unwrap().factors().is_empty());
        assert_eq!(factorize(12).unwrap().factors(), &[(2, 2), (3, 1)]);
        assert_eq!(factorize(97).unwrap().factors(), &[(97, 1)]);
        assert_eq!(factorize(0), Err(Error::ZeroInput));
        let big = 999_999_937u64 * 2;
        assert_eq!(factorize(big).unwrap().factors(), &[(2, 1), (999_999_937, 1)]);
        assert!(matches!(factorize(FACTOR_CAP), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn multiplicative_function_examples() {
        assert_eq!(mobius(1).unwrap(), 1);
        assert_eq!(mobius(4).unwrap(), 0);
        assert_eq!(mobius(6).unwrap(), 1);
        assert_eq!(mobius(30).unwrap(), -1);
        assert_eq!(euler_phi(1).unwrap(), 1);
        assert_eq!(euler_phi(12).unwrap(), brute_phi(12));
        assert_eq!(euler_phi(12).unwrap(), 4);
        assert_eq!(euler_phi(97).unwrap(), 96);
        assert_eq!(omega(1).unwrap(), 0);
        assert_eq!(omega(12).unwrap(), 2);
        assert_eq!(omega(30).unwrap(), 3);
    }

    #[test]
    fn divisor_examples() {
        assert_eq!(divisors(1).unwrap(), vec![1]);
        assert_eq!(divisors(6).unwrap(), vec![1, 2, 3, 6]);
        assert_eq!(divisors(8).unwrap(), vec![1, 2, 4, 8]);
        let f = factorize(12).unwrap();
        assert_eq!(
            squarefree_divisors(&f),
            vec![(1, 1), (2, -1), (3, -1), (6, 1)]
        );
    }

    #[test]
    fn mod_inverse_examples() {
        assert_eq!(mod_inverse(1, 5).unwrap(), 1);
        assert_eq!(mod_inverse(3, 25).unwrap(), 17);
        assert_eq!(mod_inverse(-3, 25).unwrap(), 8);
        assert_eq!(
            mod_inverse(2, 4),
            Err(Error::NotCoprime { a: 2, modulus: 4 })
        );
    }

    #[test]
    fn divisor_sum_identities() {
        for n in 1..=10_000u64 {
            let ds = divisors(n).unwrap();
            let mu_sum: i64 = ds.iter().map(|&d| mobius(d).unwrap() as i64).sum();
            assert_eq!(mu_sum, (n == 1) as i64, "n = {n}");
            let phi_sum: u64 = ds.iter().map(|&d| euler_phi(d).unwrap()).sum();
            assert_eq!(phi_sum, n, "n = {n}");
        }
    }

    #[test]
    fn sieve_examples() {
        assert_eq!(totient_sieve(1).unwrap().phi_values(), &[1]);
        assert_eq!(totient_sieve(6).unwrap().phi_values(), &[1, 1, 2, 2, 4, 2]);
        assert_eq!(totient_sieve(10).unwrap().mu(10), 1);
        assert!(totient_sieve(SIEVE_CAP + 1).is_err());
    }

    #[test]
    fn sieve_agrees_with_pointwise() {
        let t = totient_sieve(100_000).unwrap();
        for n in 1..=100_000u64 {
            let i = n as usize;
            assert_eq!(t.phi(i), euler_phi(n).unwrap(), "phi({n})");
            assert_eq!(t.mu(i), mobius(n).unwrap(), "mu({n})");
            assert_eq!(t.omega(i), omega(n).unwrap(), "omega({n})");
        }
    }

    #[test]
    fn phi_matches_brute_force_small() {
        for n in 1..=500 {
            assert_eq!(euler_phi(n).unwrap(), brute_phi(n));
        }
    }
}
