//! Command-line front end.

mod render;

use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::quadratic::{cache, ORACLE_BOUND};
use crate::theorems::{analyze_with, AnalyzeOptions, TheoremError};
use crate::verify::regulator::{MAX_PRECISION, MIN_PRECISION};
use crate::verify::sweep::{sweep_properties, SweepBounds};
use crate::verify::{index_pairs, pairs_below, run_index, run_table1, VerifyError};

pub use render::ScanRow;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Parser)]
#[command(name = "triquad", version, about = "Unit groups and 2-class numbers of Q(√2, √p1, √p2)")]
pub struct Cli {
    /// Unit cache file, read before and written after the command.
    #[arg(long, global = true, env = "TRIQUAD_CACHE")]
    pub cache: Option<PathBuf>,
    /// Largest discriminant handed to the form-class oracle.
    #[arg(long, global = true, env = "TRIQUAD_ORACLE_BOUND", default_value_t = ORACLE_BOUND)]
    pub oracle_bound: u64,
    /// Top of the precision ladder for regulator certification, in bits.
    #[arg(long, global = true, env = "TRIQUAD_MAX_PRECISION", default_value_t = MAX_PRECISION)]
    pub max_precision: u32,
    /// Worker threads (0 = one per core).
    #[arg(long, global = true, env = "TRIQUAD_JOBS", default_value_t = 0)]
    pub jobs: usize,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify one pair and report its units, q(K) and 2-class numbers.
    Analyze {
        #[arg(long)]
        p1: u64,
        #[arg(long)]
        p2: u64,
    },
    /// One row per pair p < q of primes ≡ 1 (mod 4) up to --max.
    Scan {
        #[arg(long)]
        max: u64,
        /// Keep pairs with this norm signature, e.g. -1,-1,-1,-1.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        sig: Option<Vec<i8>>,
        /// Keep pairs with these residues mod 8, e.g. 1,5.
        #[arg(long, value_delimiter = ',')]
        mod8: Option<Vec<u64>>,
    },
    /// Run a verification suite.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        /// Range bound of the suite (ignored by table1).
        #[arg(long)]
        bound: Option<u64>,
        /// Where to write the full report; defaults to a temporary file on failure.
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Table1,
    Sweep,
    Index,
}

impl Suite {
    fn name(self) -> &'static str {
        match self {
            Suite::Table1 => "table1",
            Suite::Sweep => "sweep",
            Suite::Index => "index",
        }
    }
}

/// Validated run settings.
#[derive(Debug, Clone)]
pub struct Config {
    pub min_precision: u32,
    pub max_precision: u32,
    pub oracle_bound: u64,
    pub cache: Option<PathBuf>,
    pub format: Format,
    pub jobs: usize,
}

impl Config {
    pub fn from_cli(cli: &Cli) -> Result<Config, CliError> {
        if cli.max_precision < MIN_PRECISION {
            return Err(CliError::Usage(format!("--max-precision must be at least {MIN_PRECISION}")));
        }
        if cli.oracle_bound == 0 {
            return Err(CliError::Usage("--oracle-bound must be positive".into()));
        }
        Ok(Config {
            min_precision: MIN_PRECISION,
            max_precision: cli.max_precision,
            oracle_bound: cli.oracle_bound,
            cache: cli.cache.clone(),
            format: cli.format,
            jobs: cli.jobs,
        })
    }

    pub fn analyze_options(&self) -> AnalyzeOptions {
        AnalyzeOptions { oracle_bound: self.oracle_bound, ..AnalyzeOptions::default() }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Theorem(#[from] TheoremError),
    #[error(transparent)]
    Verify(#[from] VerifyError),
    #[error(transparent)]
    Cache(#[from] cache::CacheError),
    #[error("i/o: {0}")]
    Io(#[from] io::Error),
    /// A suite ran to completion and found violations.
    #[error("{suite}: {violations} violation(s); report at {}", path.display())]
    Violations { suite: &'static str, violations: usize, path: PathBuf },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Cache(_) | CliError::Io(_) => 2,
            CliError::Theorem(e) => e.exit_code(),
            CliError::Verify(VerifyError::Theorem(e)) => e.exit_code(),
            CliError::Verify(VerifyError::Field(e)) => TheoremError::from(e.clone()).exit_code(),
            CliError::Verify(VerifyError::Inconclusive(_)) | CliError::Violations { .. } => 3,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Cache(_) => "cache",
            CliError::Io(_) => "io",
            CliError::Theorem(e) => e.kind(),
            CliError::Verify(VerifyError::Inconclusive(_)) => "inconclusive",
            CliError::Verify(_) => match self.exit_code() {
                2 => "precondition",
                _ => "inconsistency",
            },
            CliError::Violations { .. } => "violations",
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({ "error": self.kind(), "message": self.to_string(), "exit_code": self.exit_code() })
    }
}

/// Parses the process arguments, runs the command and returns the exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return 0;
        }
        Err(e) => {
            let err = CliError::Usage(e.to_string().trim_end().to_string());
            eprintln!("{}", err.to_json());
            return err.exit_code();
        }
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match execute(&cli, &mut out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = out.flush();
            eprintln!("{}", e.to_json());
            e.exit_code()
        }
    }
}

/// Runs a parsed command, writing its output to `out`.
pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    let cfg = Config::from_cli(cli)?;
    if let Some(path) = &cfg.cache {
        cache::load(path)?;
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let mut buf = Vec::new();
    let result = pool.install(|| match &cli.command {
        Command::Analyze { p1, p2 } => cmd_analyze(*p1, *p2, &cfg, &mut buf),
        Command::Scan { max, sig, mod8 } => cmd_scan(*max, sig.as_deref(), mod8.as_deref(), &cfg, &mut buf),
        Command::Verify { suite, bound, report } => cmd_verify(*suite, *bound, report.as_deref(), &cfg, &mut buf),
    });
    out.write_all(&buf)?;
    if let Some(path) = &cfg.cache {
        cache::save(path)?;
    }
    result
}

pub fn cmd_analyze(p1: u64, p2: u64, cfg: &Config, out: &mut dyn Write) -> Result<(), CliError> {
    let r = analyze_with(p1, p2, &cfg.analyze_options())?;
    match cfg.format {
        Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&r).expect("report serializes"))?,
        Format::Csv => {
            writeln!(out, "{}", render::CSV_HEADER)?;
            writeln!(out, "{}", ScanRow::from_report(&r).csv())?;
        }
        Format::Text => write!(out, "{}", render::text_report(&r))?,
    }
    Ok(())
}

pub fn cmd_scan(max: u64, sig: Option<&[i8]>, mod8: Option<&[u64]>, cfg: &Config, out: &mut dyn Write) -> Result<(), CliError> {
    if max < 13 {
        return Err(CliError::Usage(format!("--max must be at least 13, got {max}")));
    }
    if let Some(s) = sig {
        if s.len() != 4 || s.iter().any(|&v| v != 1 && v != -1) {
            return Err(CliError::Usage("--sig takes four entries, each 1 or -1".into()));
        }
    }
    if let Some(m) = mod8 {
        if m.len() != 2 {
            return Err(CliError::Usage("--mod8 takes two residues".into()));
        }
    }
    let pairs: Vec<(u64, u64)> = pairs_below(max + 1)
        .into_iter()
        .filter(|&(p, q)| mod8.map_or(true, |m| p % 8 == m[0] && q % 8 == m[1]))
        .collect();
    let opts = cfg.analyze_options();
    let rows: Vec<Result<Option<ScanRow>, TheoremError>> = pairs
        .par_iter()
        .map(|&(p, q)| {
            if let Some(s) = sig {
                if crate::quadratic::norm_signature(p, q)?.as_array() != s {
                    return Ok(None);
                }
            }
            analyze_with(p, q, &opts).map(|r| Some(ScanRow::from_report(&r)))
        })
        .collect();
    if cfg.format == Format::Csv {
        writeln!(out, "{}", render::CSV_HEADER)?;
    }
    let mut text = Vec::new();
    for row in rows {
        let Some(row) = row? else { continue };
        match cfg.format {
            Format::Json => writeln!(out, "{}", serde_json::to_string(&row).expect("row serializes"))?,
            Format::Csv => writeln!(out, "{}", row.csv())?,
            Format::Text => text.push(row),
        }
    }
    if cfg.format == Format::Text {
        write!(out, "{}", render::text_table(&text))?;
    }
    Ok(())
}

#[derive(Serialize)]
struct Summary<'a> {
    suite: &'static str,
    pass: bool,
    tested: usize,
    violations: usize,
    seconds: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    report: Option<&'a Path>,
}

pub fn cmd_verify(suite: Suite, bound: Option<u64>, report: Option<&Path>, cfg: &Config, out: &mut dyn Write) -> Result<(), CliError> {
    let start = Instant::now();
    let opts = cfg.analyze_options();
    let (tested, violations, full) = match suite {
        Suite::Table1 => {
            let rows = run_table1(&opts);
            let bad = rows.iter().filter(|r| !r.pass).count();
            (rows.len(), bad, serde_json::to_value(rows))
        }
        Suite::Sweep => {
            let b = bound.map(SweepBounds::uniform).unwrap_or_else(SweepBounds::acceptance);
            let r = sweep_properties(b)?;
            let tested = r.checks.iter().map(|c| c.tested).sum();
            (tested, r.violations(), serde_json::to_value(r))
        }
        Suite::Index => {
            let rows = run_index(&index_pairs(bound.unwrap_or(100)), &opts, cfg.max_precision);
            let bad = rows.iter().filter(|r| !r.pass).count();
            (rows.len(), bad, serde_json::to_value(rows))
        }
    };
    let full = full.expect("suite report serializes");
    let path = match report {
        Some(p) => Some(p.to_path_buf()),
        None if violations > 0 => Some(std::env::temp_dir().join(format!("triquad-verify-{}.json", suite.name()))),
        None => None,
    };
    if let Some(p) = &path {
        std::fs::write(p, serde_json::to_string_pretty(&full).expect("report serializes") + "\n")?;
    }
    let summary = Summary {
        suite: suite.name(),
        pass: violations == 0,
        tested,
        violations,
        seconds: (start.elapsed().as_secs_f64() * 1000.0).round() / 1000.0,
        report: path.as_deref(),
    };
    match cfg.format {
        Format::Text => writeln!(
            out,
            "{}: {} ({tested} tested, {violations} violations, {:.1}s)",
            summary.suite,
            if summary.pass { "PASS" } else { "FAIL" },
            summary.seconds
        )?,
        _ => writeln!(out, "{}", serde_json::to_string_pretty(&summary).expect("summary serializes"))?,
    }
    match path {
        Some(path) if violations > 0 => Err(CliError::Violations { suite: suite.name(), violations, path }),
        _ => Ok(()),
    }
}
