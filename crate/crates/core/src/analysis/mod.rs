//! Quantitative diagnostics built on the set modules.
//!
//! - [`qia`]: the quasi-independence ratio `S(N)² / P(N)` in the real, p-adic
//!   and product settings, with an exact oracle and a fast real-space path.
//! - [`counting`]: counts of admissible numerators in residue classes and the
//!   correction term `A(n)`.
//! - [`bounds`]: overlap inequalities and the zero-one failure example as
//!   [`BoundCheck`] values.
//! - [`sums`]: the φ-sum main term and dimension-function partial sums.
//! - [`product`]: measures in `(ℝ/ℤ)^ℓ × ℤ_{p₁} × … × ℤ_{p_k}`.
//! - [`hits`]: how many `𝓔_n` contain a given point.

use std::fmt;

use crate::rational::{format_rational, Rational};

pub mod bounds;
pub mod counting;
pub mod hits;
pub mod product;
pub mod qia;
pub mod sums;

pub use bounds::{product_bound_check, sandwich_check, zero_one_example_check};
pub use counting::{
    a_correction, a_correction_bound_check, coprime_count, coprime_counts_all, surjectivity_check, CountMethod,
};
pub use hits::{hit_count, required_digits, simulate_hits, HitCount, HitSimulation};
pub use product::product_space_measure;
pub use qia::{qia_ratio, Method, QiaPoint, QiaReport, Space};
pub use sums::{
    hausdorff_partial_sums, phi_sum_asymptotic, DimensionFunction, HausdorffReport, PhiSumReport, Trend,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Less,
    LessEq,
    GreaterEq,
    Equal,
    /// `lhs ≤ middle ≤ rhs`.
    Between,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Less => "<",
            Relation::LessEq => "<=",
            Relation::GreaterEq => ">=",
            Relation::Equal => "=",
            Relation::Between => "<= x <=",
        })
    }
}

/// One evaluated inequality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundCheck {
    pub name: &'static str,
    pub parameters: Vec<(&'static str, String)>,
    pub lhs: Rational,
    pub middle: Option<Rational>,
    pub rhs: Rational,
    pub relation: Relation,
    pub holds: bool,
}

impl BoundCheck {
    pub(crate) fn new(
        name: &'static str,
        parameters: Vec<(&'static str, String)>,
        lhs: Rational,
        relation: Relation,
        rhs: Rational,
    ) -> Self {
        let holds = match relation {
            Relation::Less => lhs < rhs,
            Relation::LessEq => lhs <= rhs,
            Relation::GreaterEq => lhs >= rhs,
            Relation::Equal => lhs == rhs,
            Relation::Between => unreachable!("use BoundCheck::between"),
        };
        Self {
            name,
            parameters,
            lhs,
            middle: None,
            rhs,
            relation,
            holds,
        }
    }

    pub(crate) fn between(
        name: &'static str,
        parameters: Vec<(&'static str, String)>,
        lhs: Rational,
        middle: Rational,
        rhs: Rational,
    ) -> Self {
        let holds = lhs <= middle && middle <= rhs;
        Self {
            name,
            parameters,
            lhs,
            middle: Some(middle),
            rhs,
            relation: Relation::Between,
            holds,
        }
    }
}

impl fmt::Display for BoundCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let params: Vec<String> = self.parameters.iter().map(|(k, v)| format!("{k}={v}")).collect();
        write!(f, "{}({}): {}", self.name, params.join(", "), format_rational(&self.lhs))?;
        match &self.middle {
            Some(m) => write!(f, " <= {} <= {}", format_rational(m), format_rational(&self.rhs))?,
            None => write!(f, " {} {}", self.relation, format_rational(&self.rhs))?,
        }
        write!(f, " [{}]", if self.holds { "holds" } else { "FAILS" })
    }
}
