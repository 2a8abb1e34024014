//! Command-line front end for the ring-market tax simulator.
//!
//! `ringtax run|suite|validate` reads an optional JSON config, applies flag
//! overrides and writes a JSON or CSV report to a file or stdout.

pub mod config;
pub mod exec;
pub mod report;
pub mod validate;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use ringtax_core::equilibrium::solve_two_stage;
use ringtax_core::experiments::run_suite;
use ringtax_core::TaxKind;

use config::{ConfigDoc, Overrides};
use exec::PoolExecutor;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_SOLVER: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;
pub const EXIT_OUTPUT: i32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    fn from_extension(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "json" => Some(Format::Json),
            "csv" => Some(Format::Csv),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Solve one configuration.
    Run,
    /// Solve the nine tax-by-cost comparison scenarios.
    Suite,
    /// Run the built-in oracle checks.
    Validate,
}

#[derive(Debug, Clone, PartialEq, Parser)]
#[command(name = "ringtax", version, about = "Capacity-then-price equilibria of a two-firm ring market under location taxes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// JSON config; defaults apply when omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Report destination; stdout when omitted.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Defaults to the output extension, else json.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Worker threads: a positive integer or "auto".
    #[arg(long, global = true, value_parser = parse_threads, default_value = "auto")]
    pub threads: Threads,
    #[arg(long, global = true, value_parser = parse_tax)]
    pub tax: Option<TaxKind>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub gamma: Option<f64>,
    /// Unit costs, e.g. `99,100`.
    #[arg(long, global = true, value_delimiter = ',', allow_negative_numbers = true)]
    pub costs: Option<Vec<f64>>,
    /// Quantity grid `min:max:step`.
    #[arg(long = "q-grid", global = true, value_parser = parse_range)]
    pub q_grid: Option<(f64, f64, f64)>,
    /// Price grid `min:max:step`.
    #[arg(long = "p-grid", global = true, value_parser = parse_range)]
    pub p_grid: Option<(f64, f64, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Threads {
    Auto,
    Fixed(usize),
}

fn parse_threads(s: &str) -> Result<Threads, String> {
    if s == "auto" {
        return Ok(Threads::Auto);
    }
    match s.parse::<usize>() {
        Ok(n) if n > 0 => Ok(Threads::Fixed(n)),
        _ => Err(format!("expected a positive integer or \"auto\", got {s:?}")),
    }
}

fn parse_tax(s: &str) -> Result<TaxKind, String> {
    s.parse::<TaxKind>().map_err(|e| e.to_string())
}

fn parse_range(s: &str) -> Result<(f64, f64, f64), String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [a, b, c] = parts.as_slice() else {
        return Err(format!("expected min:max:step, got {s:?}"));
    };
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("not a number: {t:?}"));
    Ok((num(a)?, num(b)?, num(c)?))
}

/// Usage or config problems, with the exit code they map to.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Self { code, message: message.into() }
    }
}

impl Cli {
    pub fn overrides(&self) -> Overrides {
        Overrides {
            tax: self.tax,
            lambda: self.lambda,
            gamma: self.gamma,
            costs: self.costs.clone(),
            q_grid: self.q_grid,
            p_grid: self.p_grid,
        }
    }

    /// Explicit `--format`, checked against the output extension.
    pub fn resolved_format(&self) -> Result<Format, Failure> {
        let from_ext = self.output.as_deref().and_then(Format::from_extension);
        match (self.format, from_ext) {
            (Some(f), Some(e)) if f != e => Err(Failure::new(
                EXIT_USAGE,
                format!("--format {f:?} does not match output extension ({e:?})").to_lowercase(),
            )),
            (Some(f), _) => Ok(f),
            (None, Some(e)) => Ok(e),
            (None, None) => Ok(Format::Json),
        }
    }
}

/// Executes a parsed command line, writing the report to `--output` or to
/// `stdout`. Returns the process exit code.
pub fn execute(cli: &Cli, stdout: &mut dyn Write) -> Result<i32, Failure> {
    let format = cli.resolved_format()?;
    let text = match &cli.config {
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| Failure::new(EXIT_USAGE, format!("cannot read config {}: {e}", path.display())))?,
        None => String::new(),
    };
    let mut doc = ConfigDoc::parse(&text).map_err(|e| Failure::new(EXIT_USAGE, e.to_string()))?;
    doc.apply(&cli.overrides());
    let (market, grid) = doc.resolve().map_err(|e| Failure::new(EXIT_USAGE, e.to_string()))?;
    let threads = match cli.threads {
        Threads::Auto => None,
        Threads::Fixed(n) => Some(n),
    };
    let executor = PoolExecutor::new(threads).map_err(|e| Failure::new(EXIT_USAGE, e.to_string()))?;

    let (body, code) = match cli.command {
        Command::Run => {
            let eq = solve_two_stage(&market, &grid, &executor)
                .map_err(|e| Failure::new(EXIT_SOLVER, format!("solver error: {e}")))?;
            let row = report::run_row(&market, &eq);
            let body = match format {
                Format::Json => report::to_json(&row),
                Format::Csv => report::rows_to_csv(std::slice::from_ref(&row)),
            };
            (body, EXIT_OK)
        }
        Command::Suite => {
            let suite = run_suite(&market, &grid, &executor)
                .map_err(|e| Failure::new(EXIT_SOLVER, format!("solver error: {e}")))?;
            let json = report::suite_rows(&suite);
            let failed = json.rows.iter().any(|r| r.status != "ok");
            let body = match format {
                Format::Json => report::to_json(&json),
                Format::Csv => report::rows_to_csv(&json.rows),
            };
            (body, if failed { EXIT_SOLVER } else { EXIT_OK })
        }
        Command::Validate => {
            let v = validate::validate(&market, &grid, &executor);
            let body = match format {
                Format::Json => report::to_json(&v),
                Format::Csv => report::checks_to_csv(&v.checks),
            };
            (body, if v.passed { EXIT_OK } else { EXIT_VALIDATION })
        }
    };

    match &cli.output {
        Some(path) => std::fs::write(path, body)
            .map_err(|e| Failure::new(EXIT_OUTPUT, format!("cannot write {}: {e}", path.display())))?,
        None => stdout
            .write_all(body.as_bytes())
            .map_err(|e| Failure::new(EXIT_OUTPUT, format!("cannot write to stdout: {e}")))?,
    }
    Ok(code)
}

/// Parses `args` (program name first) and runs. Messages go to stderr.
pub fn main_with_args<I, T>(args: I, stdout: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(&cli, stdout) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}
