//! Exact approximation sets for the real and p-adic Duffin–Schaeffer problems.
//!
//! The crate materializes the sets `A_n(ψ) ⊆ ℝ/ℤ` and `𝓔_n(ψ) ⊆ ℤ_p`, their
//! measures and pairwise intersections, the group-ring decomposition of
//! `F_m × F_n`, and a collection of checkable overlap and counting bounds.
//! Every quantity that has an exact rational value is computed exactly.
//!
//! Module map:
//!
//! - [`ntheory`]: factorization, Möbius, Euler φ, ω, divisors, sieves.
//! - [`circle`]: arc unions on ℝ/ℤ with exact endpoints.
//! - [`padic`]: unions of equal-radius balls in ℤ_p, stored as residue sets.
//! - [`groupring`]: formal sums of points of ℚ/ℤ and the product decomposition.
//! - [`psi`]: exactly-evaluable approximation functions and their transforms.
//! - [`analysis`]: quasi-independence ratios, bound checks, sums, hit counts.

pub mod analysis;
pub mod circle;
mod error;
pub mod groupring;
pub mod ntheory;
pub mod padic;
pub mod psi;
pub mod rational;

pub use error::{Error, Result};
pub use rational::Rational;
