//! Command-line front end: single evaluations, parameter sweeps and the
//! engine cross-check, written as CSV or JSON tables.

pub mod config;
pub mod output;
pub mod run;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::Parser;

use config::{Cli, Command, Format, Options, SweepSpec};
use output::Row;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Clap(#[from] clap::Error),
    #[error("{0}")]
    Usage(String),
    #[error("{}: {}", .0.display(), .1)]
    Io(PathBuf, #[source] io::Error),
    #[error("writing CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("writing JSON: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// Process exit code: 2 for usage errors, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Clap(e) => e.exit_code(),
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

/// Summary of a finished run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Report {
    pub rows: usize,
    pub failed_rows: usize,
    /// Failed cross-checks (`validate` only).
    pub failed_checks: usize,
}

fn emit(rows: &[Row], spec: &SweepSpec) -> Result<(), CliError> {
    match &spec.output {
        Some(path) => {
            let file = File::create(path).map_err(|e| CliError::Io(path.clone(), e))?;
            write_table(rows, spec.format, BufWriter::new(file))
        }
        None => write_table(rows, spec.format, io::stdout().lock()),
    }
}

fn write_table<W: Write>(rows: &[Row], format: Format, out: W) -> Result<(), CliError> {
    match format {
        Format::Csv => output::write_csv(rows, out),
        Format::Json => output::write_json(rows, out),
    }
}

/// Runs the command line `argv` (including the program name).
pub fn run(argv: Vec<String>) -> Result<Report, CliError> {
    let argv = config::splice_config(argv)?;
    let cli = Cli::try_parse_from(argv)?;
    match cli.command {
        None => run_table(&SweepSpec::from_options(&Options::default())?),
        Some(Command::Eval(opts)) => {
            if opts.var.is_some() {
                return Err(CliError::Usage("`eval` takes a single point; use `sweep` with `--var`".into()));
            }
            run_table(&SweepSpec::from_options(&opts)?)
        }
        Some(Command::Sweep(opts)) => {
            if opts.var.is_none() {
                return Err(CliError::Usage("`sweep` needs `--var`".into()));
            }
            run_table(&SweepSpec::from_options(&opts)?)
        }
        Some(Command::Validate(opts)) => run_validate(&SweepSpec::from_options(&opts)?),
    }
}

fn run_table(spec: &SweepSpec) -> Result<Report, CliError> {
    let rows = run::run_sweep(spec);
    for row in &rows {
        if let Some(e) = &row.error {
            eprintln!("warning: {} {} row failed: {e}", row.metric, row.method);
        }
    }
    emit(&rows, spec)?;
    Ok(Report {
        rows: rows.len(),
        failed_rows: rows.iter().filter(|r| r.error.is_some()).count(),
        failed_checks: 0,
    })
}

fn run_validate(spec: &SweepSpec) -> Result<Report, CliError> {
    let (rows, checks) = run::validate(spec);
    let mut out = io::stdout().lock();
    let io_err = |e| CliError::Io("<stdout>".into(), e);
    for c in &checks {
        writeln!(
            out,
            "{} {}: analytic {:.6} montecarlo {:.6} tolerance {:.6}",
            if c.pass { "PASS" } else { "FAIL" },
            c.label,
            c.analytic,
            c.montecarlo,
            c.tolerance
        )
        .map_err(io_err)?;
    }
    let failed = checks.iter().filter(|c| !c.pass).count();
    writeln!(out, "{} of {} checks passed", checks.len() - failed, checks.len()).map_err(io_err)?;
    drop(out);
    if spec.output.is_some() {
        emit(&rows, spec)?;
    }
    Ok(Report {
        rows: rows.len(),
        failed_rows: rows.iter().filter(|r| r.error.is_some()).count(),
        failed_checks: failed,
    })
}
