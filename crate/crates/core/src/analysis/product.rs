//! Measures of `𝓔_n^{ℓ, p₁…p_k} = A_n(ψ)^ℓ × 𝓔_n^{(p₁)}(ψ) × … × 𝓔_n^{(p_k)}(ψ)`.

use num_traits::{One, Zero};

use crate::circle::build_a;
use crate::padic::{standard_measure, BallRadius};
use crate::psi::PsiFunction;
use crate::rational::Rational;
use crate::Result;

/// `λ(A_n(ψ))^ℓ · ∏ μ_{p_i}(𝓔_n(ψ))`. Each p-adic factor uses `ψ(n)` rounded
/// down to a power of `p_i`, which does not change the set.
pub fn product_space_measure(ell: u32, primes: &[u64], n: u64, psi: &PsiFunction) -> Result<Rational> {
    let r = psi.eval(n);
    if r.is_zero() {
        return Ok(Rational::zero());
    }
    let mut out = Rational::one();
    if ell > 0 {
        out *= num_traits::pow(build_a(n, &r)?.measure(), ell as usize);
    }
    for &p in primes {
        out *= standard_measure(n, p, BallRadius::from_rational(p, &r)?)?;
    }
    Ok(out)
}
