//! Arc unions on the circle ℝ/ℤ with exact rational endpoints.
//!
//! A [`CircleSet`] stores its arcs as integer endpoints over one shared
//! denominator `D`, so the circle is `[0, D]` with `0 ≡ D`. All comparisons in
//! the merge and intersection sweeps are plain integer comparisons. Arcs are
//! closed; an arc that crosses `0` is stored as two pieces `[x, D]` and `[0, y]`,
//! and arcs meeting at an endpoint are merged. Zero-length pieces are dropped
//! since they carry no measure.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::groupring::{decompose_product, ProductDecomposition};
use crate::ntheory::gcd;
use crate::rational::{rat, to_u128_parts, Rational};
use crate::{Error, Result};

/// An exact rational `numerator / denominator` in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ReducedFraction {
    numerator: i64,
    denominator: u64,
}

impl ReducedFraction {
    pub fn new(numerator: i64, denominator: u64) -> Result<Self> {
        if denominator == 0 {
            return Err(Error::ZeroInput);
        }
        let g = gcd(numerator.unsigned_abs(), denominator);
        Ok(Self {
            numerator: numerator / g as i64,
            denominator: denominator / g,
        })
    }

    pub fn numerator(&self) -> i64 {
        self.numerator
    }

    pub fn denominator(&self) -> u64 {
        self.denominator
    }

    /// Representative of `self mod 1` in `[0, 1)`.
    pub fn fractional_part(&self) -> Self {
        Self {
            numerator: self.numerator.rem_euclid(self.denominator as i64),
            denominator: self.denominator,
        }
    }

    pub fn to_rational(&self) -> Rational {
        rat(self.numerator, self.denominator as i64)
    }
}

impl Ord for ReducedFraction {
    fn cmp(&self, other: &Self) -> Ordering {
        let lhs = self.numerator as i128 * other.denominator as i128;
        let rhs = other.numerator as i128 * self.denominator as i128;
        lhs.cmp(&rhs)
    }
}

impl PartialOrd for ReducedFraction {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ReducedFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numerator, self.denominator)
    }
}

/// `‖g‖`, the distance from `g` to the nearest integer.
pub fn circle_distance(g: &ReducedFraction) -> Rational {
    let frac = g.fractional_part();
    let a = frac.numerator as u64;
    let rest = frac.denominator - a;
    rat(a.min(rest) as i64, frac.denominator as i64)
}

/// A finite union of closed arcs on ℝ/ℤ in canonical form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CircleSet {
    denom: u128,
    arcs: Vec<(u128, u128)>,
}

impl CircleSet {
    pub fn empty() -> Self {
        Self {
            denom: 1,
            arcs: Vec::new(),
        }
    }

    pub fn full() -> Self {
        Self {
            denom: 1,
            arcs: vec![(0, 1)],
        }
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.arcs.len() == 1 && self.arcs[0] == (0, self.denom)
    }

    /// Builds a canonical set from closed arcs `[left, right]` over `denom`,
    /// with `0 ≤ left ≤ right ≤ denom`.
    fn from_raw(denom: u128, mut arcs: Vec<(u128, u128)>) -> Self {
        arcs.retain(|&(l, r)| l < r);
        arcs.sort_unstable();
        let mut merged: Vec<(u128, u128)> = Vec::with_capacity(arcs.len());
        for (l, r) in arcs {
            match merged.last_mut() {
                Some(last) if l <= last.1 => last.1 = last.1.max(r),
                _ => merged.push((l, r)),
            }
        }
        if merged.is_empty() {
            return Self::empty();
        }
        let g = merged
            .iter()
            .fold(denom, |g, &(l, r)| gcd_u128(gcd_u128(g, l), r));
        Self {
            denom: denom / g,
            arcs: merged.into_iter().map(|(l, r)| (l / g, r / g)).collect(),
        }
    }

    /// Arcs as `(left, length)` with `left ∈ [0, 1)`, sorted by `left`.
    pub fn arcs(&self) -> Vec<(Rational, Rational)> {
        let d = BigInt::from(self.denom);
        self.arcs
            .iter()
            .map(|&(l, r)| {
                (
                    Rational::new(BigInt::from(l), d.clone()),
                    Rational::new(BigInt::from(r - l), d.clone()),
                )
            })
            .collect()
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn measure(&self) -> Rational {
        let total: u128 = self.arcs.iter().map(|&(l, r)| r - l).sum();
        Rational::new(BigInt::from(total), BigInt::from(self.denom))
    }

    /// Whether the point `x mod 1` lies in the set (closed arcs).
    pub fn contains(&self, x: &ReducedFraction) -> bool {
        let frac = x.fractional_part();
        let (a, q) = (frac.numerator as u128, frac.denominator as u128);
        // a/q ∈ [l/D, r/D]  ⇔  l·q ≤ a·D ≤ r·q
        let scaled = a * self.denom;
        self.arcs.iter().any(|&(l, r)| {
            let hit = |v: u128| l * q <= v && v <= r * q;
            hit(scaled) || (a == 0 && hit(self.denom * q))
        })
    }

    fn rescaled(&self, denom: u128) -> Vec<(u128, u128)> {
        let k = denom / self.denom;
        self.arcs.iter().map(|&(l, r)| (l * k, r * k)).collect()
    }

    pub fn intersect(&self, other: &CircleSet) -> Result<CircleSet> {
        if self.is_empty() || other.is_empty() {
            return Ok(Self::empty());
        }
        let denom = lcm_u128(self.denom, other.denom).ok_or(Error::Overflow("aligning arc denominators"))?;
        let a = self.rescaled(denom);
        let b = other.rescaled(denom);
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < a.len() && j < b.len() {
            let lo = a[i].0.max(b[j].0);
            let hi = a[i].1.min(b[j].1);
            if lo < hi {
                out.push((lo, hi));
            }
            if a[i].1 < b[j].1 {
                i += 1;
            } else {
                j += 1;
            }
        }
        Ok(Self::from_raw(denom, out))
    }

    pub fn union(&self, other: &CircleSet) -> Result<CircleSet> {
        let denom = lcm_u128(self.denom, other.denom).ok_or(Error::Overflow("aligning arc denominators"))?;
        let mut arcs = self.rescaled(denom);
        arcs.extend(other.rescaled(denom));
        Ok(Self::from_raw(denom, arcs))
    }
}

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn lcm_u128(a: u128, b: u128) -> Option<u128> {
    (a / gcd_u128(a, b)).checked_mul(b)
}

/// Numerators `1 ≤ a ≤ n` with `gcd(a, n) = 1`, ascending.
pub fn farey_numerators(n: u64) -> Vec<u64> {
    (1..=n).filter(|&a| gcd(a, n) == 1).collect()
}

/// `A_n(r)`: the union of arcs `[a/n − r, a/n + r]` over reduced `a/n`.
pub fn build_a(n: u64, radius: &Rational) -> Result<CircleSet> {
    if n == 0 {
        return Err(Error::ZeroInput);
    }
    if radius.is_negative() {
        return Err(Error::NegativeRadius(crate::rational::format_rational(radius)));
    }
    if radius.is_zero() {
        return Ok(CircleSet::empty());
    }
    if radius * BigInt::from(2) >= Rational::from_integer(BigInt::from(1)) {
        return Ok(CircleSet::full());
    }
    let (u, v) = to_u128_parts(radius).ok_or(Error::Overflow("converting a radius"))?;
    let n128 = n as u128;
    let denom = lcm_u128(n128, v)
        .filter(|d| d.checked_mul(4).is_some())
        .ok_or(Error::Overflow("building arc endpoints"))?;
    let step = denom / n128;
    let half = u
        .checked_mul(denom / v)
        .ok_or(Error::Overflow("building arc endpoints"))?;
    let mut arcs = Vec::with_capacity(2 * n as usize);
    for a in farey_numerators(n) {
        let center = (a as u128 * step) % denom;
        let left = (center + denom - half) % denom;
        let right = left + 2 * half;
        if right <= denom {
            arcs.push((left, right));
        } else {
            arcs.push((left, denom));
            arcs.push((0, right - denom));
        }
    }
    Ok(CircleSet::from_raw(denom, arcs))
}

pub fn measure(s: &CircleSet) -> Rational {
    s.measure()
}

pub fn intersect(s1: &CircleSet, s2: &CircleSet) -> Result<CircleSet> {
    s1.intersect(s2)
}

/// `λ(A_m(r_m) ∩ A_n(r_n))` read off the support of `F_m × F_n`.
///
/// Each pair of arcs centred at `a/m` and `b/n` overlaps in
/// `clamp(r_m + r_n − ‖a/m − b/n‖, 0, 2·min(r_m, r_n))`, and the multiset of
/// differences `a/m − b/n` is the support of `F_m × F_n` (the `F`'s are
/// symmetric under negation). The support comes from the closed-form
/// decomposition `Σ c_e·F_{K_e}`, and only points with `‖γ‖ < r_m + r_n` are
/// visited.
///
/// Requires `r_m < 1/(2m)`, `r_n < 1/(2n)` so that each set is a disjoint
/// union, and `r_m + r_n ≤ 1/2` (or `m = n`) so that no two arcs meet twice.
pub fn overlap_measure_fast(m: u64, n: u64, r_m: &Rational, r_n: &Rational) -> Result<Rational> {
    if m == 0 || n == 0 {
        return Err(Error::ZeroInput);
    }
    if r_m.is_negative() || r_n.is_negative() {
        return Err(Error::NegativeRadius("overlap radius".into()));
    }
    if r_m * BigInt::from(2 * m) >= one() || r_n * BigInt::from(2 * n) >= one() {
        return Err(Error::precondition(format!(
            "overlap fast path needs r_m < 1/(2m) and r_n < 1/(2n) (m = {m}, n = {n})"
        )));
    }
    let reach = r_m + r_n;
    if m != n && reach > rat(1, 2) {
        return Err(Error::precondition(format!(
            "overlap fast path needs r_m + r_n ≤ 1/2 (m = {m}, n = {n})"
        )));
    }
    if r_m.is_zero() || r_n.is_zero() {
        return Ok(Rational::zero());
    }
    let width = r_m.clone().min(r_n.clone()) * BigInt::from(2);
    let decomposition = decompose_product(m, n)?;
    Ok(overlap_from_decomposition(&decomposition, &reach, &width))
}

fn one() -> Rational {
    Rational::from_integer(BigInt::from(1))
}

fn overlap_from_decomposition(dec: &ProductDecomposition, reach: &Rational, width: &Rational) -> Rational {
    let mut total = Rational::zero();
    for (coefficient, index) in dec.terms() {
        if coefficient.is_zero() {
            continue;
        }
        let k = *index;
        // ‖t/k‖ < reach  ⇔  t < reach·k
        let bound = reach * BigInt::from(k);
        let t_max: BigInt = bound.ceil().to_integer() - 1;
        let t_max: u64 = t_max.try_into().unwrap_or(u64::MAX).min(k / 2);
        let mut inner = Rational::zero();
        for t in 0..=t_max {
            // F_k has the points t/k and (k − t)/k at distance t/k from 0
            let hits: u64 = if t == 0 {
                (k == 1) as u64
            } else if gcd(t, k) != 1 {
                0
            } else if 2 * t == k {
                1
            } else {
                2
            };
            if hits == 0 {
                continue;
            }
            let overlap = (reach - rat(t as i64, k as i64)).min(width.clone());
            if overlap.is_positive() {
                inner += overlap * BigInt::from(hits);
            }
        }
        total += inner * coefficient;
    }
    total
}

/// Overlap measure, taking the fast path when its preconditions hold and the
/// explicit intersection otherwise.
pub fn overlap_measure(m: u64, n: u64, r_m: &Rational, r_n: &Rational) -> Result<Rational> {
    match overlap_measure_fast(m, n, r_m, r_n) {
        Ok(v) => Ok(v),
        Err(Error::Precondition(_)) => Ok(build_a(m, r_m)?.intersect(&build_a(n, r_n)?)?.measure()),
        Err(e) => Err(e),
    }
}
