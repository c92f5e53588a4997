//! `M(N, x) = #{n ≤ N : x ∈ 𝓔_n(ψ)}` for points of ℤ_p given by digit streams.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::padic::{standard_contains, standard_measure, BallRadius, DigitStream};
use crate::psi::PsiFunction;
use crate::rational::{to_f64, ExactSum, Rational};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HitCount {
    pub x: DigitStream,
    pub n: u64,
    pub count: u64,
}

fn radii(psi: &PsiFunction, p: u64, n: u64) -> Result<Vec<BallRadius>> {
    if n == 0 {
        return Err(Error::ZeroInput);
    }
    (1..=n).map(|k| BallRadius::from_rational(p, &psi.eval(k))).collect()
}

fn digits_for(radii: &[BallRadius], p: u64) -> usize {
    radii
        .iter()
        .enumerate()
        .filter(|(i, _)| (*i as u64 + 1) % p != 0)
        .map(|(_, r)| match r {
            BallRadius::Exponent(e) if *e > 0 => *e as usize,
            _ => 0,
        })
        .max()
        .unwrap_or(0)
}

/// Digits a stream needs so that every `𝓔_n`, `n ≤ N`, can test it.
pub fn required_digits(psi: &PsiFunction, p: u64, n: u64) -> Result<usize> {
    Ok(digits_for(&radii(psi, p, n)?, p))
}

fn count_with(radii: &[BallRadius], p: u64, x: &DigitStream) -> Result<u64> {
    let mut count = 0;
    for (i, r) in radii.iter().enumerate() {
        if standard_contains(i as u64 + 1, p, *r, x)? {
            count += 1;
        }
    }
    Ok(count)
}

pub fn hit_count(psi: &PsiFunction, p: u64, n: u64, x: &DigitStream) -> Result<HitCount> {
    let radii = radii(psi, p, n)?;
    let needed = digits_for(&radii, p);
    if x.len() < needed {
        return Err(Error::InsufficientDigits {
            needed,
            available: x.len(),
        });
    }
    Ok(HitCount {
        x: x.clone(),
        n,
        count: count_with(&radii, p, x)?,
    })
}

/// `E[M(N, x)] = Σ_{n≤N} μ_p(𝓔_n(ψ))` for Haar-random `x`.
pub fn expected_hits(psi: &PsiFunction, p: u64, n: u64) -> Result<Rational> {
    let radii = radii(psi, p, n)?;
    let terms: Vec<Rational> = radii
        .par_iter()
        .enumerate()
        .map(|(i, r)| standard_measure(i as u64 + 1, p, *r))
        .collect::<Result<_>>()?;
    Ok(terms.iter().collect::<ExactSum>().value())
}

#[derive(Debug, Clone, PartialEq)]
pub struct HitSimulation {
    pub p: u64,
    pub n: u64,
    pub seed: u64,
    pub digits: usize,
    pub counts: Vec<u64>,
    pub expected: Rational,
    pub mean: f64,
    /// Sample standard deviation (n − 1 denominator); 0 for a single sample.
    pub std_dev: f64,
}

impl HitSimulation {
    /// `|mean − E| / √E`, the deviation in units of the Poisson-scale spread.
    pub fn z_score(&self) -> f64 {
        let e = to_f64(&self.expected);
        if e == 0.0 {
            return if self.mean == 0.0 { 0.0 } else { f64::INFINITY };
        }
        (self.mean - e).abs() / e.sqrt()
    }
}

/// Draws `samples` uniform digit streams from ChaCha8 seeded with `seed`, in
/// order, and counts hits for each. Results do not depend on the thread count.
pub fn simulate_hits(psi: &PsiFunction, p: u64, n: u64, samples: usize, seed: u64) -> Result<HitSimulation> {
    let radii = radii(psi, p, n)?;
    let digits = digits_for(&radii, p);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let streams: Vec<DigitStream> = (0..samples)
        .map(|_| DigitStream::random(p, digits, &mut rng))
        .collect::<Result<_>>()?;
    let counts: Vec<u64> = streams
        .par_iter()
        .map(|x| count_with(&radii, p, x))
        .collect::<Result<_>>()?;
    let expected = expected_hits(psi, p, n)?;
    let k = counts.len() as f64;
    let mean = if counts.is_empty() {
        0.0
    } else {
        counts.iter().sum::<u64>() as f64 / k
    };
    let std_dev = if counts.len() > 1 {
        (counts.iter().map(|&c| (c as f64 - mean).powi(2)).sum::<f64>() / (k - 1.0)).sqrt()
    } else {
        0.0
    };
    Ok(HitSimulation {
        p,
        n,
        seed,
        digits,
        counts,
        expected,
        mean,
        std_dev,
    })
}
