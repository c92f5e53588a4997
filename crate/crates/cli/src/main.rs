//! `dsqia`: command-line front end for the exact set-measure experiments.
//!
//! Every subcommand writes one table (CSV or JSON) to `--out` or standard
//! output and prints a one-line summary. Exit status: 0 on success, 1 when a
//! check fails or the oracle and fast paths disagree, 2 for unusable input, 3
//! when a size cap is exceeded.

mod commands;
mod options;
mod output;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::process::ExitCode;

use log::{info, warn};

use options::Options;
use output::{write_csv, write_json, Format};

const THREADS_ENV: &str = "DSQIA_THREADS";

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(dsqia::Error),
    Io(String),
}

impl From<dsqia::Error> for CliError {
    fn from(e: dsqia::Error) -> Self {
        CliError::Core(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Io(m) => f.write_str(m),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use dsqia::Error as E;
        match self {
            CliError::Core(E::CapExceeded { .. } | E::Overflow(_)) => 3,
            CliError::Core(E::Internal(_)) | CliError::Io(_) => 1,
            CliError::Usage(_) | CliError::Core(_) => 2,
        }
    }
}

fn configure_threads(opts: &Options) -> Result<(), CliError> {
    let text = match opts.raw("threads") {
        Some(t) => Some(t.to_string()),
        None => std::env::var(THREADS_ENV).ok(),
    };
    let Some(text) = text else {
        return Ok(());
    };
    let threads: usize = text
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("thread count {text:?} is not a number")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Io(format!("cannot start thread pool: {e}")))
}

fn run(matches: &clap::ArgMatches) -> Result<bool, CliError> {
    let opts = Options::from_matches(matches)?;
    configure_threads(&opts)?;
    let format: Format = match opts.raw("format") {
        Some(f) => f.parse().map_err(CliError::Usage)?,
        None => Format::Csv,
    };
    info!("running {}", opts.command());
    let report = commands::run(&opts)?;
    for key in opts.unused() {
        warn!("option {key} is not used by {}", opts.command());
    }

    let io_err = |e: io::Error| CliError::Io(format!("writing output: {e}"));
    let out_path = opts.raw("out").map(str::to_string);
    let mut sink: Box<dyn Write> = match &out_path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| CliError::Io(format!("cannot create {p}: {e}")))?,
        )),
        None => Box::new(io::stdout().lock()),
    };
    match format {
        Format::Csv => write_csv(&report.table, &mut sink),
        Format::Json => write_json(&opts.echo(), &report.table, &report.summary, &mut sink),
    }
    .map_err(io_err)?;
    sink.flush().map_err(io_err)?;
    drop(sink);

    if out_path.is_some() {
        println!("{}", report.headline);
    } else {
        eprintln!("{}", report.headline);
    }
    Ok(report.failures == 0)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("DSQIA_LOG", "warn"))
        .format_timestamp(None)
        .init();
    let matches = options::command().get_matches();
    match run(&matches) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("dsqia: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
