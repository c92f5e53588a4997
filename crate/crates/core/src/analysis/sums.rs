//! The φ-sum main term and partial sums `Σ f(ψ(n)) φ(n)^D` for dimension functions.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::ntheory::{totient_sieve, SIEVE_CAP};
use crate::psi::PsiFunction;
use crate::rational::{exact_root, format_rational, to_f64, ExactSum, Rational};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct PhiSumReport {
    pub p: u64,
    pub n: u64,
    /// `Σ_{k≤N, p∤k} φ(k)`.
    pub sum: u128,
    /// `3pN² / ((p+1)π²)`.
    pub main_term: f64,
    pub abs_error: f64,
    pub relative_error: f64,
}

pub fn phi_sum_asymptotic(p: u64, n: u64) -> Result<PhiSumReport> {
    if n == 0 || p == 0 {
        return Err(Error::ZeroInput);
    }
    if n as usize > SIEVE_CAP {
        return Err(Error::cap("N", n, SIEVE_CAP));
    }
    let tables = totient_sieve(n as usize)?;
    let sum: u128 = tables
        .phi_values()
        .iter()
        .enumerate()
        .filter(|(i, _)| (*i as u64 + 1) % p != 0)
        .map(|(_, &phi)| phi as u128)
        .sum();
    let nf = n as f64;
    let main_term = 3.0 * p as f64 * nf * nf / ((p as f64 + 1.0) * PI * PI);
    let abs_error = (sum as f64 - main_term).abs();
    Ok(PhiSumReport {
        p,
        n,
        sum,
        main_term,
        abs_error,
        relative_error: abs_error / main_term,
    })
}

/// `f(r) = r^s · L(r)^k` with the log surrogate `L(r) = ⌊log₂(1/r)⌋ + 1` for
/// `r < 1` and `L(r) = 1` otherwise; `f(0) = 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DimensionFunction {
    pub s: Rational,
    pub log_power: u32,
}

impl DimensionFunction {
    pub fn new(s: Rational, log_power: u32) -> Result<Self> {
        if !s.is_positive() {
            return Err(Error::precondition("dimension function exponent must be positive"));
        }
        Ok(Self { s, log_power })
    }

    /// Parses `S` or `S,K`, e.g. `1`, `1/2,1`.
    pub fn parse(text: &str) -> Result<Self> {
        let (s, k) = text.split_once(',').unwrap_or((text, "0"));
        let k = k
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad log power {k:?}")))?;
        Self::new(crate::rational::parse_rational(s)?, k)
    }

    fn log_surrogate(r: &Rational) -> u64 {
        if r >= &Rational::one() {
            return 1;
        }
        // Largest j with 2^j · u ≤ v.
        let (u, v) = (r.numer(), r.denom());
        let mut j = v.bits().saturating_sub(u.bits());
        while (u << j as usize) > *v {
            j -= 1;
        }
        j + 1
    }

    /// Exact value when `r^s` is rational.
    pub fn eval_exact(&self, r: &Rational) -> Option<Rational> {
        if r.is_zero() {
            return Some(Rational::zero());
        }
        let a = self.s.numer().to_u32()?;
        let b = self.s.denom().to_u32()?;
        let power = exact_root(&num_traits::pow(r.clone(), a as usize), b)?;
        let log = Rational::from_integer(BigInt::from(Self::log_surrogate(r)).pow(self.log_power));
        Some(power * log)
    }

    pub fn eval_f64(&self, r: &Rational) -> f64 {
        if r.is_zero() {
            return 0.0;
        }
        to_f64(r).powf(to_f64(&self.s)) * (Self::log_surrogate(r) as f64).powi(self.log_power as i32)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Trend {
    Divergent,
    Convergent,
    Inconclusive,
}

impl Trend {
    pub fn label(&self) -> &'static str {
        match self {
            Trend::Divergent => "divergent-trend",
            Trend::Convergent => "convergent-trend",
            Trend::Inconclusive => "inconclusive",
        }
    }
}

/// Doubling-test thresholds on `S(N) / S(N/2)`.
pub const DIVERGENT_RATIO: f64 = 1.05;
pub const CONVERGENT_RATIO: f64 = 1.005;

/// Largest `N` summed in exact arithmetic; longer sums use compensated floats.
pub const EXACT_SUM_CAP: u64 = 5_000;

#[derive(Debug, Clone, PartialEq)]
pub struct HausdorffPoint {
    pub n: u64,
    pub exact: Option<Rational>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HausdorffReport {
    pub n: u64,
    pub dimension: u32,
    /// Partial sums at powers of two and at `N`.
    pub series: Vec<HausdorffPoint>,
    /// True when the sums were accumulated in floating point.
    pub floating: bool,
    pub doubling_ratio: Option<f64>,
    pub trend: Trend,
}

impl HausdorffReport {
    pub fn final_sum(&self) -> &HausdorffPoint {
        self.series.last().expect("series is never empty")
    }
}

/// Neumaier-compensated running sum.
#[derive(Default)]
struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

pub fn hausdorff_partial_sums(
    f: &DimensionFunction,
    psi: &PsiFunction,
    dimension: u32,
    n: u64,
) -> Result<HausdorffReport> {
    if n == 0 {
        return Err(Error::ZeroInput);
    }
    if n as usize > SIEVE_CAP {
        return Err(Error::cap("N", n, SIEVE_CAP));
    }
    let tables = totient_sieve(n as usize)?;
    let checkpoint = |k: u64| k.is_power_of_two() || k == n || k == n / 2;
    let mut series = Vec::new();
    let mut half_value = 0.0;

    let exact_terms: Option<Vec<Rational>> = if n <= EXACT_SUM_CAP {
        (1..=n)
            .map(|k| {
                let phi = BigInt::from(tables.phi(k as usize)).pow(dimension);
                f.eval_exact(&psi.eval(k)).map(|v| v * Rational::from_integer(phi))
            })
            .collect()
    } else {
        None
    };
    let floating = exact_terms.is_none();
    match exact_terms {
        Some(terms) => {
            let mut acc = ExactSum::new();
            for (i, t) in terms.iter().enumerate() {
                let k = i as u64 + 1;
                acc.add(t);
                if checkpoint(k) {
                    let v = acc.value();
                    let value = to_f64(&v);
                    if k == n / 2 {
                        half_value = value;
                    }
                    if k.is_power_of_two() || k == n {
                        series.push(HausdorffPoint { n: k, exact: Some(v), value });
                    }
                }
            }
        }
        None => {
            let mut acc = CompensatedSum::default();
            for k in 1..=n {
                let phi = (tables.phi(k as usize) as f64).powi(dimension as i32);
                acc.add(f.eval_f64(&psi.eval(k)) * phi);
                if checkpoint(k) {
                    let value = acc.value();
                    if k == n / 2 {
                        half_value = value;
                    }
                    if k.is_power_of_two() || k == n {
                        series.push(HausdorffPoint { n: k, exact: None, value });
                    }
                }
            }
        }
    }
    let full = series.last().map(|pt| pt.value).unwrap_or(0.0);
    let (doubling_ratio, trend) = classify(half_value, full);
    Ok(HausdorffReport {
        n,
        dimension,
        series,
        floating,
        doubling_ratio,
        trend,
    })
}

fn classify(half: f64, full: f64) -> (Option<f64>, Trend) {
    if full == 0.0 {
        return (None, Trend::Convergent);
    }
    if half == 0.0 {
        return (None, Trend::Inconclusive);
    }
    let ratio = full / half;
    let trend = if ratio >= DIVERGENT_RATIO {
        Trend::Divergent
    } else if ratio <= CONVERGENT_RATIO {
        Trend::Convergent
    } else {
        Trend::Inconclusive
    };
    (Some(ratio), trend)
}

impl std::fmt::Display for HausdorffPoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.exact {
            Some(v) => write!(f, "S({}) = {}", self.n, format_rational(v)),
            None => write!(f, "S({}) ≈ {:e}", self.n, self.value),
        }
    }
}
