use rayon::prelude::*;

use dsqia::analysis::bounds::minimal_precision;
use dsqia::analysis::{
    coprime_counts_all, hausdorff_partial_sums, phi_sum_asymptotic, product_bound_check, product_space_measure,
    qia_ratio, sandwich_check, simulate_hits, surjectivity_check, zero_one_example_check, CountMethod,
    DimensionFunction, Method, QiaReport, Space,
};
use dsqia::circle::build_a;
use dsqia::groupring::{convolve, decompose_product, expand, f};
use dsqia::ntheory::{is_prime, omega};
use dsqia::psi::PsiFunction;
use dsqia::rational::{format_rational, to_f64, ExactSum};

use crate::options::Options;
use crate::output::{Cell, Table};
use crate::CliError;

/// A finished run: the artifact table, summary fields, a one-line headline
/// and the number of failed checks or mismatches.
pub struct Report {
    pub table: Table,
    pub summary: Vec<(&'static str, Cell)>,
    pub headline: String,
    pub failures: u64,
}

pub fn run(opts: &Options) -> Result<Report, CliError> {
    match opts.command() {
        "verify group-ring" => verify_group_ring(opts),
        "verify overlaps" => verify_overlaps(opts),
        "verify counting" => verify_counting(opts),
        "verify zero-one" => verify_zero_one(opts),
        "measure" => measure(opts),
        "qia" => qia(opts),
        "simulate hits" => simulate(opts),
        "sums" => sums(opts),
        other => Err(CliError::Usage(format!("unknown command {other:?}"))),
    }
}

fn primes(opts: &Options, key: &str, default: Option<&str>) -> Result<Vec<u64>, CliError> {
    let ps: Vec<u64> = opts.list(key, default)?;
    if let Some(bad) = ps.iter().find(|&&p| !is_prime(p)) {
        return Err(CliError::Usage(format!("--{key}: {bad} is not prime")));
    }
    Ok(ps)
}

fn positive(opts: &Options, key: &str) -> Result<u64, CliError> {
    match opts.require::<u64>(key)? {
        0 => Err(CliError::Usage(format!("--{key} must be positive"))),
        v => Ok(v),
    }
}

fn psi(opts: &Options) -> Result<PsiFunction, CliError> {
    let text: String = opts.require("psi")?;
    Ok(PsiFunction::parse(&text)?)
}

/// `real`, `padic[:P]` or `product[:ELL:P1,P2,…]`; missing parts come from
/// `--p`, `--ell` and `--primes`.
fn space(opts: &Options) -> Result<Space, CliError> {
    let text: String = opts.get_or("space", "real")?;
    let mut parts = text.splitn(3, ':');
    let kind = parts.next().unwrap_or("");
    let bad = |why: &str| CliError::Usage(format!("--space {text:?}: {why}"));
    match kind {
        "real" if parts.next().is_none() => Ok(Space::Real),
        "padic" => {
            let p = match parts.next() {
                Some(p) => p.parse().map_err(|_| bad("bad prime"))?,
                None => opts.require("p")?,
            };
            if !is_prime(p) {
                return Err(bad("p must be prime"));
            }
            Ok(Space::Padic(p))
        }
        "product" => {
            let ell = match parts.next() {
                Some(e) => e.parse().map_err(|_| bad("bad ell"))?,
                None => opts.get_or("ell", "0")?,
            };
            let primes = match parts.next() {
                Some(list) => list
                    .split(',')
                    .filter(|p| !p.trim().is_empty())
                    .map(|p| p.trim().parse::<u64>().map_err(|_| bad("bad prime list")))
                    .collect::<Result<Vec<_>, _>>()?,
                None => primes(opts, "primes", Some(""))?,
            };
            if primes.iter().any(|&p| !is_prime(p)) {
                return Err(bad("every listed p must be prime"));
            }
            Ok(Space::Product { ell, primes })
        }
        _ => Err(bad("expected real, padic[:P] or product[:ELL:P1,P2,...]")),
    }
}

fn range(opts: &Options) -> Result<(u64, u64), CliError> {
    let text: String = opts.require("range")?;
    let bad = || CliError::Usage(format!("--range {text:?}: expected A..B with 1 <= A <= B"));
    let (a, b) = text.split_once("..").ok_or_else(bad)?;
    let b = b.strip_prefix('=').unwrap_or(b);
    let (a, b): (u64, u64) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
    if a == 0 || a > b {
        return Err(bad());
    }
    Ok((a, b))
}

fn verify_group_ring(opts: &Options) -> Result<Report, CliError> {
    let max = positive(opts, "max")?;
    let pairs: Vec<(u64, u64)> = (1..=max).flat_map(|m| (1..=max).map(move |n| (m, n))).collect();
    let rows: Vec<Vec<Cell>> = pairs
        .par_iter()
        .map(|&(m, n)| -> Result<Vec<Cell>, CliError> {
            let dec = decompose_product(m, n)?;
            let closed = expand(&dec)?;
            let brute = convolve(&f(m)?, &f(n)?);
            Ok(vec![
                m.into(),
                n.into(),
                dec.d().into(),
                dec.d_prime().into(),
                dec.nonzero_terms().count().into(),
                brute.support_size().into(),
                (&brute.total_mass()).into(),
                (closed == brute).into(),
            ])
        })
        .collect::<Result<_, _>>()?;
    let mut table = Table::new(&["m", "n", "d", "d_prime", "terms", "support", "mass", "verified"]);
    rows.into_iter().for_each(|r| table.push(r));
    let failures = table.rows.iter().filter(|r| r[7] == Cell::Bool(false)).count() as u64;
    Ok(Report {
        headline: format!(
            "verify group-ring: {} identities, {} verified, {failures} mismatches",
            table.rows.len(),
            table.rows.len() as u64 - failures
        ),
        summary: vec![("pairs", table.rows.len().into()), ("mismatches", failures.into())],
        table,
        failures,
    })
}

fn verify_overlaps(opts: &Options) -> Result<Report, CliError> {
    let max = positive(opts, "max")?;
    let ps = primes(opts, "primes", Some("2,3,5"))?;
    let diagonal: bool = opts.get_or("diagonal", "true")?;
    let cases: Vec<(u64, u64, u64)> = ps
        .iter()
        .flat_map(|&p| {
            (1..=max)
                .filter(move |m| m % p != 0)
                .flat_map(move |m| (1..=max).filter(move |n| n % p != 0).map(move |n| (p, m, n)))
        })
        .filter(|&(_, m, n)| diagonal || m != n)
        .collect();
    let rows: Vec<Vec<Cell>> = cases
        .par_iter()
        .map(|&(p, m, n)| -> Result<Vec<Cell>, CliError> {
            let (mm, mn) = (minimal_precision(p, m), minimal_precision(p, n));
            let s = sandwich_check(m, n, p, mm, mn)?;
            let b = product_bound_check(m, n, p, mm, mn)?;
            let middle = s.middle.clone().expect("sandwich checks carry the overlap");
            Ok(vec![
                p.into(),
                m.into(),
                n.into(),
                mm.into(),
                mn.into(),
                (&s.lhs).into(),
                (&middle).into(),
                (&s.rhs).into(),
                s.holds.into(),
                (&b.rhs).into(),
                b.holds.into(),
            ])
        })
        .collect::<Result<_, _>>()?;
    let mut table = Table::new(&[
        "p",
        "m",
        "n",
        "M_m",
        "M_n",
        "lower",
        "overlap",
        "upper",
        "sandwich",
        "product_bound",
        "product_holds",
    ]);
    rows.into_iter().for_each(|r| table.push(r));
    let sandwich_fail = table.rows.iter().filter(|r| r[8] == Cell::Bool(false)).count() as u64;
    let product_fail = table.rows.iter().filter(|r| r[10] == Cell::Bool(false)).count() as u64;
    Ok(Report {
        headline: format!(
            "verify overlaps: {} pairs, {sandwich_fail} sandwich failures, {product_fail} product-bound failures",
            table.rows.len()
        ),
        summary: vec![
            ("pairs", table.rows.len().into()),
            ("sandwich_failures", sandwich_fail.into()),
            ("product_bound_failures", product_fail.into()),
        ],
        table,
        failures: sandwich_fail + product_fail,
    })
}

fn verify_counting(opts: &Options) -> Result<Report, CliError> {
    let max = positive(opts, "max")?;
    let ps = primes(opts, "primes", Some("2,3,5,7"))?;
    let rows: Vec<Vec<Cell>> = (1..=max)
        .into_par_iter()
        .map(|n| -> Result<Vec<Cell>, CliError> {
            let mut mismatches = 0u64;
            for q in 1..=4 * n {
                if coprime_counts_all(n, q, CountMethod::Formula)? != coprime_counts_all(n, q, CountMethod::Brute)? {
                    mismatches += 1;
                }
            }
            let bound = 4u128.pow(omega(n)?);
            let (mut cases, mut failed) = (0u64, 0u64);
            for &p in ps.iter().filter(|&&p| n % p != 0) {
                let mut m = 0;
                // p^{-M} > 4^ω(n) / n
                while (n as u128) > bound * (p as u128).pow(m) {
                    cases += 1;
                    if !surjectivity_check(n, p, m)?.holds {
                        failed += 1;
                    }
                    m += 1;
                }
            }
            Ok(vec![n.into(), (4 * n).into(), mismatches.into(), cases.into(), failed.into()])
        })
        .collect::<Result<_, _>>()?;
    let mut table = Table::new(&["n", "moduli", "mismatches", "surjectivity_cases", "surjectivity_failures"]);
    rows.into_iter().for_each(|r| table.push(r));
    let sum = |col: usize| -> u64 {
        table
            .rows
            .iter()
            .map(|r| match r[col] {
                Cell::Int(v) => v as u64,
                _ => 0,
            })
            .sum()
    };
    let (moduli, mismatches, cases, failed) = (sum(1), sum(2), sum(3), sum(4));
    Ok(Report {
        headline: format!(
            "verify counting: {moduli} moduli, {mismatches} mismatches; {cases} surjectivity cases, {failed} failures"
        ),
        summary: vec![
            ("moduli", moduli.into()),
            ("mismatches", mismatches.into()),
            ("surjectivity_cases", cases.into()),
            ("surjectivity_failures", failed.into()),
        ],
        table,
        failures: mismatches + failed,
    })
}

fn verify_zero_one(opts: &Options) -> Result<Report, CliError> {
    let ps = primes(opts, "primes", Some("2,3,5"))?;
    let k: u64 = opts.get_or("multiples", "10")?;
    let mut table = Table::new(&["p", "n", "measure", "expected", "holds"]);
    let mut failures = 0;
    for &p in &ps {
        for n in (1..=k).map(|j| j * p) {
            let c = zero_one_example_check(p, n)?;
            failures += u64::from(!c.holds);
            table.push(vec![p.into(), n.into(), (&c.lhs).into(), (&c.rhs).into(), c.holds.into()]);
        }
    }
    Ok(Report {
        headline: format!("verify zero-one: {} cases, {failures} failures", table.rows.len()),
        summary: vec![("cases", table.rows.len().into()), ("failures", failures.into())],
        table,
        failures,
    })
}

fn measure(opts: &Options) -> Result<Report, CliError> {
    let space = space(opts)?;
    let psi = psi(opts)?;
    let (a, b) = range(opts)?;
    let rows: Vec<Vec<Cell>> = (a..=b)
        .into_par_iter()
        .map(|n| -> Result<Vec<Cell>, CliError> {
            let r = psi.eval(n);
            let m = match &space {
                Space::Real => build_a(n, &r)?.measure(),
                Space::Padic(p) => product_space_measure(0, &[*p], n, &psi)?,
                Space::Product { ell, primes } => product_space_measure(*ell, primes, n, &psi)?,
            };
            Ok(vec![n.into(), (&r).into(), (&m).into()])
        })
        .collect::<Result<_, _>>()?;
    let mut table = Table::new(&["n", "psi", "measure"]);
    let mut total = ExactSum::new();
    for r in rows {
        if let Cell::Rat(m) = &r[2] {
            total.add(m);
        }
        table.push(r);
    }
    let total = total.value();
    Ok(Report {
        headline: format!(
            "measure: space {space}, n = {a}..{b}, total measure {}",
            format_rational(&total)
        ),
        summary: vec![("space", space.to_string().into()), ("total", (&total).into())],
        table,
        failures: 0,
    })
}

fn qia_table(report: &QiaReport, agree: Option<&[bool]>) -> Table {
    let mut cols = vec!["n", "sum_measures", "sum_pair_measures", "ratio", "running_max", "degenerate"];
    if agree.is_some() {
        cols.push("fast_agrees");
    }
    let mut table = Table::new(&cols);
    for (i, pt) in report.series.iter().enumerate() {
        let mut row = vec![
            pt.n.into(),
            (&pt.sum_measures).into(),
            (&pt.sum_pair_measures).into(),
            (&pt.ratio).into(),
            (&pt.running_max).into(),
            pt.degenerate.into(),
        ];
        if let Some(a) = agree {
            row.push(a[i].into());
        }
        table.push(row);
    }
    table
}

fn qia(opts: &Options) -> Result<Report, CliError> {
    let space = space(opts)?;
    let psi = psi(opts)?;
    let n = positive(opts, "N")?;
    let method: String = opts.get_or("method", "oracle")?;
    let both = method == "both";
    let (report, agree) = match method.as_str() {
        "oracle" => (qia_ratio(&space, &psi, n, Method::Oracle)?, None),
        "fast" => (qia_ratio(&space, &psi, n, Method::Fast)?, None),
        "both" => {
            let oracle = qia_ratio(&space, &psi, n, Method::Oracle)?;
            let fast = qia_ratio(&space, &psi, n, Method::Fast)?;
            let agree: Vec<bool> = oracle.series.iter().zip(&fast.series).map(|(a, b)| a == b).collect();
            (oracle, Some(agree))
        }
        other => return Err(CliError::Usage(format!("--method {other:?}: expected oracle, fast or both"))),
    };
    let table = qia_table(&report, agree.as_deref());
    let mismatches = agree.map_or(0, |a| a.iter().filter(|&&ok| !ok).count() as u64);
    let last = report.last();
    let mut headline = format!(
        "qia: space {space}, N = {n}, ratio ≈ {:.6}, running max ≈ {:.6}",
        to_f64(&last.ratio),
        to_f64(&last.running_max)
    );
    if last.degenerate {
        headline.push_str(" (degenerate: no mass)");
    }
    if both {
        headline.push_str(&format!(", {mismatches} oracle/fast mismatches"));
    }
    let mut summary = vec![
        ("space", space.to_string().into()),
        ("method", method.into()),
        ("sum_measures", (&last.sum_measures).into()),
        ("sum_pair_measures", (&last.sum_pair_measures).into()),
        ("ratio", (&last.ratio).into()),
        ("running_max", (&last.running_max).into()),
        ("degenerate", last.degenerate.into()),
    ];
    if both {
        summary.push(("mismatches", mismatches.into()));
    }
    Ok(Report {
        table,
        summary,
        headline,
        failures: mismatches,
    })
}

fn simulate(opts: &Options) -> Result<Report, CliError> {
    let p: u64 = opts.require("p")?;
    if !is_prime(p) {
        return Err(CliError::Usage(format!("--p: {p} is not prime")));
    }
    let psi = psi(opts)?;
    let n = positive(opts, "N")?;
    let samples: usize = opts.require("samples")?;
    let seed: u64 = opts.get_or("seed", "0")?;
    let sim = simulate_hits(&psi, p, n, samples, seed)?;
    let mut table = Table::new(&["sample", "hits"]);
    for (i, &c) in sim.counts.iter().enumerate() {
        table.push(vec![i.into(), c.into()]);
    }
    let z = sim.z_score();
    Ok(Report {
        headline: format!(
            "simulate hits: p = {p}, N = {n}, {samples} samples, mean {:.4} vs expected {:.4} (z = {z:.3})",
            sim.mean,
            to_f64(&sim.expected)
        ),
        summary: vec![
            ("digits", sim.digits.into()),
            ("expected", (&sim.expected).into()),
            ("expected_approx", to_f64(&sim.expected).into()),
            ("mean", sim.mean.into()),
            ("std_dev", sim.std_dev.into()),
            ("z_score", z.into()),
            ("statistical", true.into()),
        ],
        table,
        failures: 0,
    })
}

fn sums(opts: &Options) -> Result<Report, CliError> {
    let which: String = opts.require("which")?;
    match which.as_str() {
        "phi-asymptotic" => {
            let ps = primes(opts, "p", None)?;
            let n = positive(opts, "N")?;
            let reports = ps
                .par_iter()
                .map(|&p| phi_sum_asymptotic(p, n))
                .collect::<Result<Vec<_>, _>>()?;
            let mut table = Table::new(&["p", "N", "sum", "main_term", "abs_error", "relative_error"]);
            for r in &reports {
                table.push(vec![
                    r.p.into(),
                    r.n.into(),
                    Cell::Int(r.sum as i128),
                    r.main_term.into(),
                    r.abs_error.into(),
                    r.relative_error.into(),
                ]);
            }
            let worst = reports.iter().map(|r| r.relative_error).fold(0.0, f64::max);
            Ok(Report {
                headline: format!("sums phi-asymptotic: N = {n}, worst relative error {worst:.3e}"),
                summary: vec![("max_relative_error", worst.into())],
                table,
                failures: 0,
            })
        }
        "hausdorff" => {
            let psi = psi(opts)?;
            let f = DimensionFunction::parse(&opts.require::<String>("f")?)?;
            let dim: u32 = opts.get_or("dimension", "1")?;
            let n = positive(opts, "N")?;
            let report = hausdorff_partial_sums(&f, &psi, dim, n)?;
            let mut table = Table::new(&["n", "exact", "value"]);
            for pt in &report.series {
                let exact = pt.exact.as_ref().map_or(Cell::Empty, Cell::from);
                table.push(vec![pt.n.into(), exact, pt.value.into()]);
            }
            let ratio = report.doubling_ratio.map_or(Cell::Empty, Cell::Float);
            Ok(Report {
                headline: format!(
                    "sums hausdorff: N = {n}, sum {:.6e}, trend {}{}",
                    report.final_sum().value,
                    report.trend.label(),
                    if report.floating { " (floating point)" } else { "" }
                ),
                summary: vec![
                    ("trend", report.trend.label().into()),
                    ("doubling_ratio", ratio),
                    ("floating", report.floating.into()),
                ],
                table,
                failures: 0,
            })
        }
        other => Err(CliError::Usage(format!(
            "--which {other:?}: expected phi-asymptotic or hausdorff"
        ))),
    }
}
