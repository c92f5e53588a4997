//! Approximation functions `ψ : ℕ → ℚ_{≥0}` with exact evaluation.
//!
//! A [`PsiFunction`] is a base family followed by an ordered list of
//! transforms. Text form (used by the CLI and by [`PsiFunction::parse`]):
//!
//! ```text
//! power:C,S            C / n^S               (S a positive integer)
//! log:C                C / (n² (⌊log₂ n⌋ + 1))
//! zero-one:P           1/P if P | n, else 0
//! indicator:V,PRED     V if PRED(n), else 0
//! table:PATH           values from a table file, 0 elsewhere
//! zero                 identically 0
//! ```
//!
//! followed by any number of `;scale:C`, `;round:P`, `;restrict:PRED`,
//! `;capq`. Predicates are `squarefree`, `pfree:P:K` (`P^{K+1} ∤ n`),
//! `div:P` and `coprime:P`.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::ntheory::{factorize, valuation};
use crate::rational::{format_rational, parse_rational, Rational};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Predicate {
    Squarefree,
    /// `p^{max_exponent+1} ∤ n`.
    PFree { p: u64, max_exponent: u32 },
    DivisibleBy(u64),
    CoprimeTo(u64),
}

impl Predicate {
    pub fn holds(&self, n: u64) -> bool {
        match *self {
            Predicate::Squarefree => factorize(n).map(|f| f.is_squarefree()).unwrap_or(false),
            Predicate::PFree { p, max_exponent } => valuation(p, n) <= max_exponent,
            Predicate::DivisibleBy(p) => n % p == 0,
            Predicate::CoprimeTo(p) => n % p != 0,
        }
    }

    fn parse(text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.split(':').map(str::trim).collect();
        let num = |s: &str| {
            s.parse::<u64>()
                .ok()
                .filter(|&v| v >= 2)
                .ok_or_else(|| Error::Parse(format!("bad predicate argument {s:?}")))
        };
        match parts.as_slice() {
            ["squarefree"] => Ok(Predicate::Squarefree),
            ["pfree", p, k] => Ok(Predicate::PFree {
                p: num(p)?,
                max_exponent: k
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad exponent {k:?}")))?,
            }),
            ["div", p] => Ok(Predicate::DivisibleBy(num(p)?)),
            ["coprime", p] => Ok(Predicate::CoprimeTo(num(p)?)),
            _ => Err(Error::Parse(format!("unknown predicate {text:?}"))),
        }
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Predicate::Squarefree => write!(f, "squarefree"),
            Predicate::PFree { p, max_exponent } => write!(f, "pfree:{p}:{max_exponent}"),
            Predicate::DivisibleBy(p) => write!(f, "div:{p}"),
            Predicate::CoprimeTo(p) => write!(f, "coprime:{p}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Base {
    PowerLaw { c: Rational, s: u32 },
    LogWeighted { c: Rational },
    Table { source: String, entries: BTreeMap<u64, Rational> },
    IndicatorScaled { value: Rational, predicate: Predicate },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Transform {
    Scale(Rational),
    /// Largest value in `{0, 1} ∪ {p^{−M}}` not above the input; values above 1 become 1.
    RoundDownPPower(u64),
    Restrict(Predicate),
    /// Zero wherever `ψ(n) ≥ 1/(4n)`.
    CapQuarterN,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PsiFunction {
    base: Base,
    transforms: Vec<Transform>,
}

/// `⌊log₂ n⌋ + 1`, the bit length of `n`.
pub fn log_surrogate(n: u64) -> u64 {
    64 - n.leading_zeros() as u64
}

/// Largest element of `{0, 1} ∪ {p^{−M} : M ≥ 1}` that is at most `v`.
pub fn round_down_p_power(p: u64, v: &Rational) -> Rational {
    if !v.is_positive() {
        return Rational::zero();
    }
    let mut power = Rational::one();
    if v >= &power {
        return power;
    }
    let pb = BigInt::from(p);
    while &power > v {
        power /= &pb;
    }
    power
}

impl PsiFunction {
    pub fn new(base: Base) -> Self {
        Self {
            base,
            transforms: Vec::new(),
        }
    }

    pub fn power_law(c: Rational, s: u32) -> Result<Self> {
        if !c.is_positive() || s == 0 {
            return Err(Error::precondition("power law needs c > 0 and a positive integer exponent"));
        }
        Ok(Self::new(Base::PowerLaw { c, s }))
    }

    pub fn log_weighted(c: Rational) -> Result<Self> {
        if !c.is_positive() {
            return Err(Error::precondition("log-weighted family needs c > 0"));
        }
        Ok(Self::new(Base::LogWeighted { c }))
    }

    pub fn indicator_scaled(value: Rational, predicate: Predicate) -> Result<Self> {
        if value.is_negative() {
            return Err(Error::NegativeRadius(format_rational(&value)));
        }
        Ok(Self::new(Base::IndicatorScaled { value, predicate }))
    }

    pub fn table(source: impl Into<String>, entries: BTreeMap<u64, Rational>) -> Result<Self> {
        if let Some((n, v)) = entries.iter().find(|(n, v)| **n == 0 || v.is_negative()) {
            return Err(Error::precondition(format!("invalid table entry {n} ↦ {v}")));
        }
        Ok(Self::new(Base::Table {
            source: source.into(),
            entries,
        }))
    }

    pub fn zero() -> Self {
        Self::new(Base::Table {
            source: String::new(),
            entries: BTreeMap::new(),
        })
    }

    /// `ψ(n) = p^{−1}` for `p | n` and `0` otherwise.
    pub fn zero_one_failure(p: u64) -> Self {
        Self::new(Base::IndicatorScaled {
            value: Rational::new(BigInt::one(), BigInt::from(p)),
            predicate: Predicate::DivisibleBy(p),
        })
    }

    pub fn with(mut self, t: Transform) -> Result<Self> {
        match &t {
            Transform::Scale(c) if c.is_negative() => {
                return Err(Error::precondition("scale factor must be non-negative"))
            }
            Transform::RoundDownPPower(p) if *p < 2 => {
                return Err(Error::precondition("rounding base must be at least 2"))
            }
            _ => {}
        }
        self.transforms.push(t);
        Ok(self)
    }

    pub fn base(&self) -> &Base {
        &self.base
    }

    pub fn transforms(&self) -> &[Transform] {
        &self.transforms
    }

    pub fn eval(&self, n: u64) -> Rational {
        assert!(n >= 1, "ψ is defined on positive integers");
        let nb = BigInt::from(n);
        let mut v = match &self.base {
            Base::PowerLaw { c, s } => c / Rational::from_integer(nb.pow(*s)),
            Base::LogWeighted { c } => c / Rational::from_integer(&nb * &nb * BigInt::from(log_surrogate(n))),
            Base::Table { entries, .. } => entries.get(&n).cloned().unwrap_or_else(Rational::zero),
            Base::IndicatorScaled { value, predicate } => {
                if predicate.holds(n) {
                    value.clone()
                } else {
                    Rational::zero()
                }
            }
        };
        for t in &self.transforms {
            v = match t {
                Transform::Scale(c) => v * c,
                Transform::RoundDownPPower(p) => round_down_p_power(*p, &v),
                Transform::Restrict(pred) => {
                    if pred.holds(n) {
                        v
                    } else {
                        Rational::zero()
                    }
                }
                Transform::CapQuarterN => {
                    if &v * Rational::from_integer(BigInt::from(4) * &nb) >= Rational::one() {
                        Rational::zero()
                    } else {
                        v
                    }
                }
            };
        }
        v
    }

    /// Parses the text form described in the module docs.
    pub fn parse(text: &str) -> Result<Self> {
        let mut segments = text.split(';').map(str::trim).filter(|s| !s.is_empty());
        let head = segments
            .next()
            .ok_or_else(|| Error::Parse("empty ψ specification".into()))?;
        let (name, arg) = head.split_once(':').unwrap_or((head, ""));
        let args: Vec<&str> = arg.split(',').map(str::trim).collect();
        let mut psi = match (name.trim(), args.as_slice()) {
            ("power", [c, s]) => Self::power_law(
                parse_rational(c)?,
                s.parse().map_err(|_| Error::Parse(format!("bad exponent {s:?}")))?,
            )?,
            ("log", [c]) => Self::log_weighted(parse_rational(c)?)?,
            ("zero-one", [p]) => {
                let p = p
                    .parse::<u64>()
                    .ok()
                    .filter(|&p| p >= 2)
                    .ok_or_else(|| Error::Parse(format!("bad prime {p:?}")))?;
                Self::zero_one_failure(p)
            }
            ("indicator", [v, pred @ ..]) if !pred.is_empty() => {
                Self::indicator_scaled(parse_rational(v)?, Predicate::parse(&pred.join(","))?)?
            }
            ("table", _) if !arg.trim().is_empty() => load_table(Path::new(arg.trim()))?,
            ("zero", [""]) => Self::zero(),
            _ => return Err(Error::Parse(format!("unknown ψ family {head:?}"))),
        };
        for seg in segments {
            let (name, arg) = seg.split_once(':').unwrap_or((seg, ""));
            let t = match name.trim() {
                "scale" => Transform::Scale(parse_rational(arg)?),
                "round" => Transform::RoundDownPPower(
                    arg.trim()
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad rounding base {arg:?}")))?,
                ),
                "restrict" => Transform::Restrict(Predicate::parse(arg)?),
                "capq" if arg.is_empty() => Transform::CapQuarterN,
                _ => return Err(Error::Parse(format!("unknown ψ transform {seg:?}"))),
            };
            psi = psi.with(t)?;
        }
        Ok(psi)
    }
}

impl fmt::Display for PsiFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.base {
            Base::PowerLaw { c, s } => write!(f, "power:{},{s}", format_rational(c))?,
            Base::LogWeighted { c } => write!(f, "log:{}", format_rational(c))?,
            Base::Table { source, entries } if source.is_empty() && entries.is_empty() => write!(f, "zero")?,
            Base::Table { source, .. } => write!(f, "table:{source}")?,
            Base::IndicatorScaled { value, predicate } => {
                write!(f, "indicator:{},{predicate}", format_rational(value))?
            }
        }
        for t in &self.transforms {
            match t {
                Transform::Scale(c) => write!(f, ";scale:{}", format_rational(c))?,
                Transform::RoundDownPPower(p) => write!(f, ";round:{p}")?,
                Transform::Restrict(pred) => write!(f, ";restrict:{pred}")?,
                Transform::CapQuarterN => write!(f, ";capq")?,
            }
        }
        Ok(())
    }
}

/// Parses table text: one `n value` pair per line, `n` strictly increasing;
/// blank lines and `#` comments are skipped.
pub fn parse_table(text: &str) -> Result<BTreeMap<u64, Rational>> {
    let mut out = BTreeMap::new();
    let mut last = 0u64;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad = |why: &str| Error::Parse(format!("table line {}: {why}: {raw:?}", i + 1));
        let mut fields = line.split_whitespace();
        let (Some(n), Some(v), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(bad("expected two fields"));
        };
        let n: u64 = n.parse().map_err(|_| bad("bad index"))?;
        if n == 0 || n <= last {
            return Err(bad("indices must be positive and strictly increasing"));
        }
        let v = parse_rational(v).map_err(|_| bad("bad value"))?;
        if v.is_negative() {
            return Err(bad("negative value"));
        }
        out.insert(n, v);
        last = n;
    }
    Ok(out)
}

pub fn load_table(path: &Path) -> Result<PsiFunction> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    PsiFunction::table(path.display().to_string(), parse_table(&text)?)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyInfo {
    pub name: &'static str,
    pub syntax: &'static str,
    pub description: &'static str,
}

pub fn builtin_families() -> Vec<FamilyInfo> {
    vec![
        FamilyInfo {
            name: "power_law",
            syntax: "power:C,S",
            description: "C / n^S with S a positive integer",
        },
        FamilyInfo {
            name: "log_weighted",
            syntax: "log:C",
            description: "C / (n² (⌊log₂ n⌋ + 1)); the bit length stands in for log n",
        },
        FamilyInfo {
            name: "zero_one_failure",
            syntax: "zero-one:P",
            description: "1/P when P divides n, 0 otherwise",
        },
        FamilyInfo {
            name: "indicator_scaled",
            syntax: "indicator:V,PRED",
            description: "V on the support of a predicate, 0 elsewhere",
        },
        FamilyInfo {
            name: "table",
            syntax: "table:PATH",
            description: "user table of `n value` lines, 0 at unlisted n",
        },
        FamilyInfo {
            name: "zero",
            syntax: "zero",
            description: "identically 0",
        },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};
    use proptest::prelude::*;

    #[test]
    fn eval_examples() {
        let psi = PsiFunction::power_law(rat(1, 4), 2).unwrap();
        assert_eq!(psi.eval(10), rat(1, 400));
        let rounded = PsiFunction::parse("power:1,2;round:5").unwrap();
        assert_eq!(rounded.eval(10), rat(1, 125));
        assert_eq!(rounded.eval(1), int(1));
        let restricted = psi.clone().with(Transform::Restrict(Predicate::Squarefree)).unwrap();
        assert_eq!(restricted.eval(12), int(0));
        assert_eq!(restricted.eval(10), rat(1, 400));
    }

    #[test]
    fn family_examples() {
        let z = PsiFunction::zero_one_failure(3);
        assert_eq!(z.eval(6), rat(1, 3));
        assert_eq!(z.eval(7), int(0));
        assert_eq!(PsiFunction::log_weighted(int(1)).unwrap().eval(8), rat(1, 256));
        assert_eq!(PsiFunction::zero().eval(5), int(0));
        assert!(builtin_families().iter().any(|f| f.name == "zero_one_failure"));
    }

    #[test]
    fn predicates() {
        let pfree = Predicate::PFree { p: 2, max_exponent: 1 };
        assert!(pfree.holds(6));
        assert!(!pfree.holds(12));
        assert!(Predicate::CoprimeTo(3).holds(7));
        assert!(!Predicate::Squarefree.holds(18));
    }

    #[test]
    fn cap_quarter() {
        let psi = PsiFunction::parse("power:1,1;capq").unwrap();
        assert_eq!(psi.eval(3), int(0));
        let psi = PsiFunction::parse("power:1,2;capq").unwrap();
        assert_eq!(psi.eval(5), rat(1, 25));
        assert_eq!(psi.eval(4), int(0));
    }

    #[test]
    fn parse_round_trip() {
        for text in [
            "power:1/4,2",
            "power:1/4,2;restrict:squarefree",
            "log:3/2;scale:1/2;round:3",
            "zero",
            "indicator:1/5,pfree:5:2;capq",
            "power:1/1,3;restrict:coprime:7;restrict:div:2",
        ] {
            let psi = PsiFunction::parse(text).unwrap();
            assert_eq!(PsiFunction::parse(&psi.to_string()).unwrap(), psi, "{text}");
        }
        assert_eq!(PsiFunction::parse("zero-one:3").unwrap(), PsiFunction::zero_one_failure(3));
        for bad in ["", "power:1", "power:-1,2", "cube:2", "power:1,2;round", "power:1,2;wobble:3"] {
            assert!(PsiFunction::parse(bad).is_err(), "{bad:?}");
        }
    }

    #[test]
    fn table_parsing() {
        let t = parse_table("# header\n1 1/4\n3 1/9  # tail\n\n10 0\n").unwrap();
        assert_eq!(t.len(), 3);
        let psi = PsiFunction::table("inline", t).unwrap();
        assert_eq!(psi.eval(3), rat(1, 9));
        assert_eq!(psi.eval(2), int(0));
        assert!(parse_table("2 1/2\n2 1/3\n").is_err());
        assert!(parse_table("3 1/2\n2 1/3\n").is_err());
        assert!(parse_table("0 1/2\n").is_err());
        assert!(parse_table("1 -1/2\n").is_err());
        assert!(parse_table("1 1/2 extra\n").is_err());
    }

    #[test]
    fn table_file_loading() {
        let dir = std::env::temp_dir().join(format!("psi-table-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("t.txt");
        std::fs::write(&path, "1 1/8\n2 1/16\n").unwrap();
        let psi = PsiFunction::parse(&format!("table:{}", path.display())).unwrap();
        assert_eq!(psi.eval(2), rat(1, 16));
        std::fs::remove_dir_all(&dir).unwrap();
        assert!(matches!(PsiFunction::parse("table:/nonexistent/psi.txt"), Err(Error::Io(_))));
    }

    proptest! {
        #[test]
        fn rounding_bounds(p in prop::sample::select(vec![2u64, 3, 5, 7]), num in 0i64..5000, den in 1i64..5000) {
            let v = rat(num, den);
            let r = round_down_p_power(p, &v);
            prop_assert!(r <= v);
            if v >= int(1) {
                prop_assert_eq!(r, int(1));
            } else if v.is_positive() {
                prop_assert!(r.clone() * int(p as i64) > v);
                prop_assert!(r.numer().is_one());
            } else {
                prop_assert!(r.is_zero());
            }
        }

        #[test]
        fn restrict_zeroes_complement(n in 1u64..2000, q in prop::sample::select(vec![2u64, 3, 5])) {
            let base = PsiFunction::power_law(int(1), 1).unwrap();
            for pred in [Predicate::Squarefree, Predicate::DivisibleBy(q), Predicate::CoprimeTo(q),
                         Predicate::PFree { p: q, max_exponent: 1 }] {
                let r = base.clone().with(Transform::Restrict(pred.clone())).unwrap();
                let expected = if pred.holds(n) { base.eval(n) } else { int(0) };
                prop_assert_eq!(r.eval(n), expected);
            }
        }

        #[test]
        fn scales_compose(n in 1u64..500, a in 0i64..50, b in 1i64..50, c in 0i64..50, d in 1i64..50) {
            let base = PsiFunction::log_weighted(rat(1, 3)).unwrap();
            let twice = base.clone()
                .with(Transform::Scale(rat(a, b))).unwrap()
                .with(Transform::Scale(rat(c, d))).unwrap();
            let once = base.with(Transform::Scale(rat(a, b) * rat(c, d))).unwrap();
            prop_assert_eq!(twice.eval(n), once.eval(n));
        }
    }
}
