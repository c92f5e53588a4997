//! Overlap inequalities comparing ℤ_p with ℝ/ℤ, and the zero-one failure example.

use num_bigint::BigInt;
use num_traits::One;

use super::{BoundCheck, Relation};
use crate::circle::build_a;
use crate::padic::{build_e_radius, build_e_with_cap, BallRadius, PadicSet, Variant};
use crate::psi::PsiFunction;
use crate::rational::{inverse_power, rat, Rational};
use crate::{Error, Result};

/// Checks `p ∤ m`, `p ∤ n`, `p^{M_m} > 4m` and `p^{M_n} > 4n`.
fn overlap_preconditions(m: u64, n: u64, p: u64, m_m: u32, m_n: u32) -> Result<()> {
    if m == 0 || n == 0 {
        return Err(Error::ZeroInput);
    }
    if m % p == 0 || n % p == 0 {
        return Err(Error::precondition(format!("{p} divides {m} or {n}")));
    }
    for (k, e) in [(m, m_m), (n, m_n)] {
        let big = p.checked_pow(e).map_or(true, |q| q as u128 > 4 * k as u128);
        if !big {
            return Err(Error::precondition(format!("p^-M < 1/(4n) fails for n = {k}, p = {p}, M = {e}")));
        }
    }
    Ok(())
}

fn params(m: u64, n: u64, p: u64, m_m: u32, m_n: u32) -> Vec<(&'static str, String)> {
    vec![
        ("m", m.to_string()),
        ("n", n.to_string()),
        ("p", p.to_string()),
        ("M_m", m_m.to_string()),
        ("M_n", m_n.to_string()),
    ]
}

/// `μ_p(𝓔_m ∩ 𝓔_n)` with radii `p^{−M_m}` and `p^{−M_n}`. The sets are built
/// without the default modulus cap: they hold only `2φ(·)` residues each.
fn padic_overlap(m: u64, n: u64, p: u64, m_m: u32, m_n: u32) -> Result<Rational> {
    let build = |k: u64, e: u32| build_e_with_cap(k, p, e, Variant::Standard, u64::MAX);
    Ok(build(m, m_m)?.intersect(&build(n, m_n)?)?.measure())
}

/// `λ(A_m(ψ/2) ∩ A_n(ψ/2)) ≤ μ_p(𝓔_m(ψ) ∩ 𝓔_n(ψ)) ≤ (3/2) λ(A_m(2ψ) ∩ A_n(2ψ))`
/// with `ψ(m) = p^{−M_m}` and `ψ(n) = p^{−M_n}`.
pub fn sandwich_check(m: u64, n: u64, p: u64, m_m: u32, m_n: u32) -> Result<BoundCheck> {
    overlap_preconditions(m, n, p, m_m, m_n)?;
    let (psi_m, psi_n) = (inverse_power(p, m_m), inverse_power(p, m_n));
    let half = rat(1, 2);
    let two = rat(2, 1);
    let real = |scale: &Rational| -> Result<Rational> {
        let a = build_a(m, &(&psi_m * scale))?;
        let b = build_a(n, &(&psi_n * scale))?;
        Ok(a.intersect(&b)?.measure())
    };
    let lower = real(&half)?;
    let upper = real(&two)? * rat(3, 2);
    let middle = padic_overlap(m, n, p, m_m, m_n)?;
    Ok(BoundCheck::between("sandwich", params(m, n, p, m_m, m_n), lower, middle, upper))
}

/// `μ_p(𝓔_m ∩ 𝓔_n) ≤ 6 m n p^{−M_m} p^{−M_n}`.
pub fn product_bound_check(m: u64, n: u64, p: u64, m_m: u32, m_n: u32) -> Result<BoundCheck> {
    overlap_preconditions(m, n, p, m_m, m_n)?;
    let lhs = padic_overlap(m, n, p, m_m, m_n)?;
    let rhs = Rational::from_integer(BigInt::from(6u128 * m as u128 * n as u128))
        * inverse_power(p, m_m)
        * inverse_power(p, m_n);
    Ok(BoundCheck::new("product_bound", params(m, n, p, m_m, m_n), lhs, Relation::LessEq, rhs))
}

/// For `ψ = zero_one_failure(p)` and `p | n`, `𝓔″_n(ψ)` is exactly `{|x|_p ≤ 1/p}`.
/// The check compares measures, and `holds` additionally requires equal point sets.
pub fn zero_one_example_check(p: u64, n: u64) -> Result<BoundCheck> {
    if n == 0 {
        return Err(Error::ZeroInput);
    }
    if n % p != 0 {
        return Err(Error::precondition(format!("{p} does not divide {n}")));
    }
    let psi = PsiFunction::zero_one_failure(p);
    let radius = BallRadius::from_rational(p, &psi.eval(n))?;
    let set = build_e_radius(n, p, radius, Variant::CoprimeJarnikLutz)?;
    let target = PadicSet::ball(p, 1, 0)?;
    let measure = set.measure();
    let expected = Rational::new(BigInt::one(), BigInt::from(p));
    let mut check = BoundCheck::new(
        "zero_one_example",
        vec![("p", p.to_string()), ("n", n.to_string())],
        measure,
        Relation::Equal,
        expected,
    );
    check.holds = check.holds && set.same_points(&target);
    Ok(check)
}

/// Smallest `M` with `p^M > 4k`.
pub fn minimal_precision(p: u64, k: u64) -> u32 {
    let mut m = 0;
    let mut q: u128 = 1;
    while q <= 4 * k as u128 {
        q *= p as u128;
        m += 1;
    }
    m
}
