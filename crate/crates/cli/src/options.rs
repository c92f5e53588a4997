//! Command-line grammar and the merged flag / config-file option set.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use clap::parser::ValueSource;
use clap::{Arg, ArgMatches, Command};

use crate::CliError;

/// Keys that affect where, how or how fast a run is written, not what it computes.
const NOT_ECHOED: [&str; 5] = ["config", "format", "out", "threads", "params"];

fn opt(name: &'static str, help: &'static str) -> Arg {
    Arg::new(name).long(name).value_name(name).help(help)
}

fn space_args() -> [Arg; 4] {
    [
        opt("space", "real, padic[:P] or product[:ELL:P1,P2,...]"),
        opt("p", "prime for the p-adic space"),
        opt("ell", "number of circle factors in the product space"),
        opt("primes", "comma-separated primes for the product space"),
    ]
}

fn psi_arg() -> Arg {
    opt("psi", "approximation function, e.g. power:1,2;round:5 or table:PATH")
}

fn n_arg() -> Arg {
    opt("N", "largest index").visible_alias("n")
}

pub fn command() -> Command {
    let global = |a: Arg| a.global(true);
    Command::new("dsqia")
        .about("Exact experiments on Duffin-Schaeffer type sets in the circle and the p-adic integers")
        .subcommand_required(true)
        .arg_required_else_help(true)
        .arg(global(opt("config", "flat key = value file; flags override it")))
        .arg(global(opt("out", "artifact path (default: standard output)")))
        .arg(global(opt("format", "csv (default) or json")))
        .arg(global(opt("threads", "worker threads (default: $DSQIA_THREADS or all cores)")))
        .subcommand(
            Command::new("verify")
                .about("Exhaustive identity and inequality checks")
                .subcommand_required(true)
                .subcommand(
                    Command::new("group-ring")
                        .about("F_m × F_n against its closed-form decomposition for m, n ≤ MAX")
                        .arg(opt("max", "largest index")),
                )
                .subcommand(
                    Command::new("overlaps")
                        .about("p-adic overlap sandwich and product bound at minimal admissible precision")
                        .args([
                            opt("max", "largest index"),
                            opt("primes", "comma-separated primes (default 2,3,5)"),
                            opt("diagonal", "include pairs with m = n (default true)"),
                        ]),
                )
                .subcommand(
                    Command::new("counting")
                        .about("Möbius counts against brute force, and residue-class surjectivity")
                        .args([
                            opt("max", "largest n"),
                            opt("primes", "primes for the surjectivity check (default 2,3,5,7)"),
                        ]),
                )
                .subcommand(
                    Command::new("zero-one")
                        .about("The zero-one failure example for the coprime Jarník-Lutz sets")
                        .args([
                            opt("primes", "comma-separated primes (default 2,3,5)"),
                            opt("multiples", "check n = p, 2p, ..., K·p (default 10)"),
                        ]),
                ),
        )
        .subcommand(
            Command::new("measure")
                .about("Measures of the individual sets for n in a range")
                .args(space_args())
                .args([psi_arg(), opt("range", "A..B, inclusive")]),
        )
        .subcommand(
            Command::new("qia")
                .about("Quasi-independence ratio series")
                .args(space_args())
                .args([psi_arg(), n_arg(), opt("method", "oracle (default), fast or both")]),
        )
        .subcommand(
            Command::new("simulate")
                .about("Seeded Monte Carlo experiments")
                .subcommand_required(true)
                .subcommand(
                    Command::new("hits")
                        .about("How many sets contain a random p-adic integer")
                        .args([
                            opt("p", "prime"),
                            psi_arg(),
                            n_arg(),
                            opt("samples", "number of random points"),
                            opt("seed", "64-bit seed (default 0)"),
                        ]),
                ),
        )
        .subcommand(
            Command::new("sums")
                .about("Partial sums: the φ-sum main term or dimension-function sums")
                .args([
                    opt("which", "phi-asymptotic or hausdorff"),
                    opt("params", "space-separated key=value pairs, e.g. \"p=2,3 N=100000\""),
                    opt("p", "comma-separated primes (phi-asymptotic)"),
                    n_arg(),
                    psi_arg(),
                    opt("f", "dimension function S or S,K for r^S·log(1/r)^K (hausdorff)"),
                    opt("dimension", "exponent D on φ(n) (hausdorff, default 1)"),
                ]),
        )
}

/// Walks to the leaf subcommand, returning its path and the explicitly given flags.
pub fn flags(matches: &ArgMatches) -> (Vec<String>, BTreeMap<String, String>) {
    let mut path = Vec::new();
    let mut out = BTreeMap::new();
    let mut m = matches;
    loop {
        for id in m.ids() {
            if m.value_source(id.as_str()) == Some(ValueSource::CommandLine) {
                if let Ok(Some(v)) = m.try_get_one::<String>(id.as_str()) {
                    out.insert(id.to_string(), v.clone());
                }
            }
        }
        match m.subcommand() {
            Some((name, sub)) => {
                path.push(name.to_string());
                m = sub;
            }
            None => break,
        }
    }
    (path, out)
}

pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("config line {}: expected key = value", i + 1)))?;
        let k = k.trim().trim_start_matches("--");
        if k.is_empty() {
            return Err(CliError::Usage(format!("config line {}: empty key", i + 1)));
        }
        out.insert(k.to_string(), v.trim().to_string());
    }
    Ok(out)
}

fn expand_params(map: &mut BTreeMap<String, String>) -> Result<(), CliError> {
    let Some(params) = map.get("params").cloned() else {
        return Ok(());
    };
    for token in params.split_whitespace() {
        let (k, v) = token
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("--params entry {token:?} is not key=value")))?;
        map.entry(k.to_string()).or_insert_with(|| v.to_string());
    }
    Ok(())
}

/// Config-file values overlaid by command-line flags. Every value a command
/// reads, defaults included, is recorded for the artifact's config echo.
#[derive(Debug)]
pub struct Options {
    command: String,
    values: BTreeMap<String, String>,
    resolved: RefCell<BTreeMap<String, String>>,
}

impl Options {
    pub fn new(command: String, file: BTreeMap<String, String>, flags: BTreeMap<String, String>) -> Result<Self, CliError> {
        let mut values = file;
        expand_params(&mut values)?;
        let mut flags = flags;
        expand_params(&mut flags)?;
        values.extend(flags);
        Ok(Self {
            command,
            values,
            resolved: RefCell::new(BTreeMap::new()),
        })
    }

    /// Reads flags and, when `--config` is given, the config file.
    pub fn from_matches(matches: &ArgMatches) -> Result<Self, CliError> {
        let (path, flags) = flags(matches);
        let config_path = flags.get("config").cloned();
        let file = match config_path {
            Some(p) => {
                let text = std::fs::read_to_string(Path::new(&p))
                    .map_err(|e| CliError::Usage(format!("cannot read config {p}: {e}")))?;
                parse_config(&text)?
            }
            None => BTreeMap::new(),
        };
        Self::new(path.join(" "), file, flags)
    }

    pub fn command(&self) -> &str {
        &self.command
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    fn record(&self, key: &str, value: &str) {
        if !NOT_ECHOED.contains(&key) {
            self.resolved.borrow_mut().insert(key.to_string(), value.to_string());
        }
    }

    pub fn get<T>(&self, key: &str) -> Result<Option<T>, CliError>
    where
        T: FromStr,
        T::Err: Display,
    {
        let Some(v) = self.values.get(key) else {
            return Ok(None);
        };
        let parsed = v
            .parse()
            .map_err(|e| CliError::Usage(format!("--{key} {v:?}: {e}")))?;
        self.record(key, v);
        Ok(Some(parsed))
    }

    pub fn require<T>(&self, key: &str) -> Result<T, CliError>
    where
        T: FromStr,
        T::Err: Display,
    {
        self.get(key)?
            .ok_or_else(|| CliError::Usage(format!("missing required option --{key}")))
    }

    /// Parses the value, or `default` when absent; the default is echoed too.
    pub fn get_or<T>(&self, key: &str, default: &str) -> Result<T, CliError>
    where
        T: FromStr,
        T::Err: Display,
    {
        match self.get(key)? {
            Some(v) => Ok(v),
            None => {
                let v = default
                    .parse()
                    .map_err(|e| CliError::Usage(format!("default for --{key}: {e}")))?;
                self.record(key, default);
                Ok(v)
            }
        }
    }

    pub fn list<T>(&self, key: &str, default: Option<&str>) -> Result<Vec<T>, CliError>
    where
        T: FromStr,
        T::Err: Display,
    {
        let text = match (self.values.get(key), default) {
            (Some(v), _) => v.clone(),
            (None, Some(d)) => d.to_string(),
            (None, None) => return Err(CliError::Usage(format!("missing required option --{key}"))),
        };
        self.record(key, &text);
        text.split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| s.parse().map_err(|e| CliError::Usage(format!("--{key} entry {s:?}: {e}"))))
            .collect()
    }

    /// The resolved configuration, for the artifact.
    pub fn echo(&self) -> Vec<(String, String)> {
        let mut out = vec![("command".to_string(), self.command.clone())];
        out.extend(self.resolved.borrow().iter().map(|(k, v)| (k.clone(), v.clone())));
        out
    }

    /// Keys that were supplied but never read.
    pub fn unused(&self) -> Vec<String> {
        let resolved = self.resolved.borrow();
        self.values
            .keys()
            .filter(|k| !NOT_ECHOED.contains(&k.as_str()) && !resolved.contains_key(k.as_str()))
            .cloned()
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts(args: &[&str]) -> Options {
        let m = command().try_get_matches_from(args).unwrap();
        let (path, flags) = flags(&m);
        Options::new(path.join(" "), BTreeMap::new(), flags).unwrap()
    }

    #[test]
    fn leaf_flags_and_globals() {
        let o = opts(&["dsqia", "--threads", "2", "verify", "group-ring", "--max", "7"]);
        assert_eq!(o.command(), "verify group-ring");
        assert_eq!(o.require::<u64>("max").unwrap(), 7);
        assert_eq!(o.raw("threads"), Some("2"));
        assert_eq!(o.echo(), vec![("command".into(), "verify group-ring".into()), ("max".into(), "7".into())]);
    }

    #[test]
    fn flags_override_config() {
        let file = parse_config("# comment\nmax = 3\nprimes = 2,3\n\n").unwrap();
        let m = command()
            .try_get_matches_from(["dsqia", "verify", "overlaps", "--max", "9"])
            .unwrap();
        let (path, flags) = flags(&m);
        let o = Options::new(path.join(" "), file, flags).unwrap();
        assert_eq!(o.require::<u64>("max").unwrap(), 9);
        assert_eq!(o.list::<u64>("primes", None).unwrap(), vec![2, 3]);
    }

    #[test]
    fn params_expand_below_flags() {
        let o = opts(&["dsqia", "sums", "--which", "phi-asymptotic", "--params", "p=2 N=50", "--N", "70"]);
        assert_eq!(o.require::<u64>("N").unwrap(), 70);
        assert_eq!(o.list::<u64>("p", None).unwrap(), vec![2]);
    }

    #[test]
    fn defaults_are_echoed() {
        let o = opts(&["dsqia", "verify", "zero-one"]);
        assert_eq!(o.get_or::<u64>("multiples", "10").unwrap(), 10);
        assert!(o.echo().contains(&("multiples".into(), "10".into())));
    }

    #[test]
    fn bad_values_are_usage_errors() {
        let o = opts(&["dsqia", "verify", "group-ring", "--max", "ten"]);
        assert!(matches!(o.require::<u64>("max"), Err(CliError::Usage(_))));
        assert!(parse_config("max 3").is_err());
    }
}
