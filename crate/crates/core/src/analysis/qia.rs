//! Quasi-independence ratios `R(N) = S(N)² / P(N)` with
//! `S(N) = Σ_{n≤N} μ(E_n)` and `P(N) = Σ_{m,n≤N} μ(E_m ∩ E_n)` (ordered
//! pairs, diagonal included).
//!
//! Rows `Σ_{m<n} μ(E_m ∩ E_n)` are computed in parallel and combined in index
//! order with exact arithmetic, so every report is independent of the
//! thread count.

use std::fmt;

use num_traits::{One, Zero};
use rayon::prelude::*;

use super::product::product_space_measure;
use crate::circle::{build_a, overlap_measure, CircleSet};
use crate::padic::{build_e_radius, BallRadius, PadicSet, Variant};
use crate::psi::PsiFunction;
use crate::rational::{ExactSum, Rational};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Space {
    Real,
    Padic(u64),
    /// `(ℝ/ℤ)^ℓ × ℤ_{p₁} × … × ℤ_{p_k}`.
    Product { ell: u32, primes: Vec<u64> },
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Space::Real => write!(f, "real"),
            Space::Padic(p) => write!(f, "padic:{p}"),
            Space::Product { ell, primes } => {
                let ps: Vec<String> = primes.iter().map(u64::to_string).collect();
                write!(f, "product:{ell}:{}", ps.join(","))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    /// Materialize every set and intersect explicitly.
    Oracle,
    /// Real space only: overlaps from the group-ring decomposition.
    Fast,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QiaPoint {
    pub n: u64,
    pub sum_measures: Rational,
    pub sum_pair_measures: Rational,
    /// `S² / P`, or 0 when `P = 0`.
    pub ratio: Rational,
    pub running_max: Rational,
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QiaReport {
    pub space: Space,
    pub method: Method,
    pub n: u64,
    pub series: Vec<QiaPoint>,
}

impl QiaReport {
    pub fn last(&self) -> &QiaPoint {
        self.series.last().expect("N ≥ 1")
    }

    pub fn sum_measures(&self) -> &Rational {
        &self.last().sum_measures
    }

    pub fn sum_pair_measures(&self) -> &Rational {
        &self.last().sum_pair_measures
    }

    pub fn ratio(&self) -> &Rational {
        &self.last().ratio
    }

    pub fn degenerate(&self) -> bool {
        self.last().degenerate
    }
}

enum Sets {
    Real(Vec<CircleSet>),
    Padic(Vec<PadicSet>),
    Product {
        ell: u32,
        real: Vec<CircleSet>,
        padic: Vec<Vec<PadicSet>>,
    },
    Fast(Vec<Rational>),
}

fn padic_sets(psi: &PsiFunction, p: u64, n: u64) -> Result<Vec<PadicSet>> {
    (1..=n)
        .map(|k| build_e_radius(k, p, BallRadius::from_rational(p, &psi.eval(k))?, Variant::Standard))
        .collect()
}

fn real_sets(psi: &PsiFunction, n: u64) -> Result<Vec<CircleSet>> {
    (1..=n).map(|k| build_a(k, &psi.eval(k))).collect()
}

impl Sets {
    /// `μ(E_i ∩ E_j)` for 0-based indices.
    fn pair(&self, i: usize, j: usize) -> Result<Rational> {
        match self {
            Sets::Real(a) => Ok(a[i].intersect(&a[j])?.measure()),
            Sets::Padic(e) => Ok(e[i].intersect(&e[j])?.measure()),
            Sets::Product { ell, real, padic } => {
                let mut out = Rational::one();
                if *ell > 0 {
                    out *= num_traits::pow(real[i].intersect(&real[j])?.measure(), *ell as usize);
                }
                for sets in padic {
                    if out.is_zero() {
                        break;
                    }
                    out *= sets[i].intersect(&sets[j])?.measure();
                }
                Ok(out)
            }
            Sets::Fast(radii) => {
                if radii[i].is_zero() || radii[j].is_zero() {
                    return Ok(Rational::zero());
                }
                overlap_measure(i as u64 + 1, j as u64 + 1, &radii[i], &radii[j])
            }
        }
    }
}

pub fn qia_ratio(space: &Space, psi: &PsiFunction, n: u64, method: Method) -> Result<QiaReport> {
    if n == 0 {
        return Err(Error::ZeroInput);
    }
    let measures: Vec<Rational> = match space {
        Space::Real => (1..=n)
            .map(|k| Ok(build_a(k, &psi.eval(k))?.measure()))
            .collect::<Result<_>>()?,
        Space::Padic(p) => (1..=n)
            .map(|k| product_space_measure(0, &[*p], k, psi))
            .collect::<Result<_>>()?,
        Space::Product { ell, primes } => (1..=n)
            .map(|k| product_space_measure(*ell, primes, k, psi))
            .collect::<Result<_>>()?,
    };
    let sets = match (space, method) {
        (Space::Real, Method::Oracle) => Sets::Real(real_sets(psi, n)?),
        (Space::Real, Method::Fast) => {
            let radii: Vec<Rational> = (1..=n).map(|k| psi.eval(k)).collect();
            for (i, r) in radii.iter().enumerate() {
                if r * Rational::from_integer((2 * (i as u64 + 1)).into()) >= Rational::one() {
                    return Err(Error::precondition(format!(
                        "fast path needs ψ(n) < 1/(2n); fails at n = {}",
                        i + 1
                    )));
                }
            }
            Sets::Fast(radii)
        }
        (Space::Padic(p), Method::Oracle) => Sets::Padic(padic_sets(psi, *p, n)?),
        (Space::Product { ell, primes }, Method::Oracle) => Sets::Product {
            ell: *ell,
            real: if *ell > 0 { real_sets(psi, n)? } else { Vec::new() },
            padic: primes
                .iter()
                .map(|&p| padic_sets(psi, p, n))
                .collect::<Result<_>>()?,
        },
        (_, Method::Fast) => {
            return Err(Error::precondition("the fast path is available in real space only"));
        }
    };
    let rows: Vec<Rational> = (0..n as usize)
        .into_par_iter()
        .map(|j| {
            let mut acc = ExactSum::new();
            for i in 0..j {
                acc.add(&sets.pair(i, j)?);
            }
            Ok(acc.value())
        })
        .collect::<Result<_>>()?;

    let two = Rational::from_integer(2.into());
    let mut s = Rational::zero();
    let mut p = Rational::zero();
    let mut running_max = Rational::zero();
    let mut series = Vec::with_capacity(n as usize);
    for (j, (row, m)) in rows.iter().zip(&measures).enumerate() {
        s += m;
        p += row * &two + m;
        let degenerate = p.is_zero();
        let ratio = if degenerate { Rational::zero() } else { &s * &s / &p };
        if ratio > running_max {
            running_max = ratio.clone();
        }
        series.push(QiaPoint {
            n: j as u64 + 1,
            sum_measures: s.clone(),
            sum_pair_measures: p.clone(),
            ratio,
            running_max: running_max.clone(),
            degenerate,
        });
    }
    Ok(QiaReport {
        space: space.clone(),
        method,
        n,
        series,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::psi::{Predicate, Transform};
    use crate::rational::{int, rat};
    use std::collections::BTreeMap;

    #[test]
    fn single_set() {
        let psi = PsiFunction::table("t", BTreeMap::from([(1, rat(1, 4))])).unwrap();
        for method in [Method::Oracle, Method::Fast] {
            let r = qia_ratio(&Space::Real, &psi, 5, method).unwrap();
            assert_eq!(r.sum_measures(), &rat(1, 2));
            assert_eq!(r.sum_pair_measures(), &rat(1, 2));
            assert_eq!(r.ratio(), &rat(1, 2));
        }
    }

    #[test]
    fn zero_psi_is_flagged() {
        let r = qia_ratio(&Space::Real, &PsiFunction::zero(), 10, Method::Oracle).unwrap();
        assert!(r.degenerate());
        assert_eq!(r.ratio(), &int(0));
        let r = qia_ratio(&Space::Padic(3), &PsiFunction::zero(), 10, Method::Oracle).unwrap();
        assert!(r.degenerate());
    }

    #[test]
    fn fast_matches_oracle() {
        let base = PsiFunction::power_law(rat(1, 4), 2).unwrap();
        let sf = base.clone().with(Transform::Restrict(Predicate::Squarefree)).unwrap();
        let odd = PsiFunction::power_law(rat(1, 3), 1).unwrap().with(Transform::CapQuarterN).unwrap();
        for psi in [base, sf, odd] {
            let a = qia_ratio(&Space::Real, &psi, 60, Method::Oracle).unwrap();
            let b = qia_ratio(&Space::Real, &psi, 60, Method::Fast).unwrap();
            assert_eq!(a.series, b.series, "{psi}");
        }
    }

    #[test]
    fn fast_precondition() {
        let psi = PsiFunction::power_law(int(1), 1).unwrap();
        assert!(matches!(
            qia_ratio(&Space::Real, &psi, 5, Method::Fast),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            qia_ratio(&Space::Padic(3), &psi, 5, Method::Fast),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn pair_sums_against_direct_double_loop() {
        let psi = PsiFunction::power_law(rat(1, 2), 2).unwrap();
        for space in [
            Space::Padic(3),
            Space::Product { ell: 1, primes: vec![2, 5] },
        ] {
            let r = qia_ratio(&space, &psi, 25, Method::Oracle).unwrap();
            let mut p = int(0);
            for m in 1..=25u64 {
                for n in 1..=25u64 {
                    let mut v = int(1);
                    if let Space::Product { ell, .. } = &space {
                        let a = build_a(m, &psi.eval(m)).unwrap();
                        let b = build_a(n, &psi.eval(n)).unwrap();
                        v *= num_traits::pow(a.intersect(&b).unwrap().measure(), *ell as usize);
                    }
                    let primes = match &space {
                        Space::Padic(p) => vec![*p],
                        Space::Product { primes, .. } => primes.clone(),
                        Space::Real => vec![],
                    };
                    for q in primes {
                        let e = |k: u64| {
                            build_e_radius(k, q, BallRadius::from_rational(q, &psi.eval(k)).unwrap(), Variant::Standard)
                                .unwrap()
                        };
                        v *= e(m).intersect(&e(n)).unwrap().measure();
                    }
                    p += v;
                }
            }
            assert_eq!(r.sum_pair_measures(), &p, "{space}");
        }
    }

    #[test]
    fn thread_count_does_not_matter() {
        let psi = PsiFunction::power_law(rat(1, 4), 2).unwrap();
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| qia_ratio(&Space::Real, &psi, 80, Method::Fast).unwrap())
        };
        assert_eq!(run(1), run(4));
    }
}
