//! Command-line front-end: configuration, pipelines, serialization and
//! figures.
//!
//! Exit codes: 0 clean, 1 verification violations or partial results,
//! 2 input or I/O error.

pub mod config;
pub mod pipeline;
pub mod results;
pub mod svg;

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use config::{PlotSource, RunConfig};
use pipeline::{Fault, VerifyReport};
use results::{write_file, ResultSet};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("input error: {0}")]
    Input(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error(transparent)]
    Core(#[from] itlab_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        2
    }
}

pub const EXIT_CLEAN: i32 = 0;
pub const EXIT_VIOLATIONS: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FaultArg {
    FlippedBranch,
}

#[derive(Debug, Parser)]
#[command(name = "itlab", version, about = "Interior transmission eigenvalue laboratory")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Output directory (overrides the config and $ITLAB_OUT_DIR).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, hide = true, value_enum)]
    pub inject_fault: Option<FaultArg>,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Assemble and solve the pencils at N and the refined size; writes results.json/csv.
    Solve { config: PathBuf },
    /// Zeros of the dispersion relation for constant m; writes oracle.json/csv.
    Oracle { config: PathBuf },
    /// Seeded scan of the boundary symbol identities.
    VerifySymbols { config: PathBuf },
    /// Residual scaling of the interior parametrix.
    VerifyParametrix { config: PathBuf },
    /// Solve, then test the parabolic and left half-plane regions.
    VerifyRegions { config: PathBuf },
    /// Scatter plot of a previous solve (or oracle) run; writes figure.svg.
    Plot { config: PathBuf },
}

impl Command {
    fn config(&self) -> &Path {
        match self {
            Command::Solve { config }
            | Command::Oracle { config }
            | Command::VerifySymbols { config }
            | Command::VerifyParametrix { config }
            | Command::VerifyRegions { config }
            | Command::Plot { config } => config,
        }
    }
}

/// What a subcommand produced.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub clean: bool,
    pub summary: String,
    pub written: Vec<PathBuf>,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.clean {
            EXIT_CLEAN
        } else {
            EXIT_VIOLATIONS
        }
    }
}

fn write_results(set: &ResultSet, dir: &Path, stem: &str) -> Result<Vec<PathBuf>, CliError> {
    set.write(dir, stem)?;
    Ok(vec![dir.join(format!("{stem}.json")), dir.join(format!("{stem}.csv"))])
}

fn write_verify(report: &VerifyReport, dir: &Path) -> Result<Outcome, CliError> {
    let path = dir.join(format!("verify-{}.json", report.kind));
    let mut text = serde_json::to_string_pretty(report).map_err(|e| CliError::Io(e.to_string()))?;
    text.push('\n');
    write_file(&path, &text)?;
    let failed: Vec<String> = report.checks.iter().filter(|c| !c.passed).map(|c| c.name.clone()).collect();
    let summary = if failed.is_empty() {
        format!("verify-{}: {} checks passed", report.kind, report.checks.len())
    } else {
        format!("verify-{}: {} of {} checks failed: {}", report.kind, failed.len(), report.checks.len(), failed.join("; "))
    };
    Ok(Outcome { clean: report.passed, summary, written: vec![path] })
}

fn result_summary(name: &str, set: &ResultSet) -> String {
    let stable = set.stable().count();
    let mut s = format!("{name}: {} records, {stable} stable", set.records.len());
    for f in &set.failures {
        s.push_str(&format!("\n  failed: {f}"));
    }
    s
}

/// Runs one subcommand.
pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    let loaded = RunConfig::load(cli.command.config())?;
    let dir = loaded.config.out_dir(cli.out.as_deref());
    let fault = cli.inject_fault.map(|FaultArg::FlippedBranch| Fault::FlippedBranch);
    match &cli.command {
        Command::Solve { .. } => {
            let out = pipeline::run_solve(&loaded)?;
            let written = write_results(&out.result, &dir, "results")?;
            Ok(Outcome { clean: out.result.failures.is_empty(), summary: result_summary("solve", &out.result), written })
        }
        Command::Oracle { .. } => {
            let set = pipeline::run_oracle(&loaded)?;
            let written = write_results(&set, &dir, "oracle")?;
            Ok(Outcome { clean: set.failures.is_empty(), summary: result_summary("oracle", &set), written })
        }
        Command::VerifySymbols { .. } => write_verify(&pipeline::run_verify_symbols(&loaded, fault)?, &dir),
        Command::VerifyParametrix { .. } => write_verify(&pipeline::run_verify_parametrix(&loaded)?, &dir),
        Command::VerifyRegions { .. } => write_verify(&pipeline::run_verify_regions(&loaded)?, &dir),
        Command::Plot { .. } => {
            let stem = match loaded.config.plot.source {
                PlotSource::Solve => "results",
                PlotSource::Oracle => "oracle",
            };
            let src = dir.join(format!("{stem}.json"));
            let text = std::fs::read_to_string(&src)
                .map_err(|e| CliError::Input(format!("cannot read {} (run the matching command first): {e}", src.display())))?;
            let set = ResultSet::from_json(&text)?;
            let svg = svg::render_figure(&set, &loaded.config.region(), &loaded.config.plot)?;
            let path = dir.join("figure.svg");
            write_file(&path, &svg)?;
            Ok(Outcome { clean: true, summary: format!("plot: {} markers", set.stable().count()), written: vec![path] })
        }
    }
}

/// Parses `args`, runs, prints a summary and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_CLEAN };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(outcome) => {
            println!("{}", outcome.summary);
            for p in &outcome.written {
                println!("wrote {}", p.display());
            }
            outcome.exit_code()
        }
        Err(e) => {
            eprintln!("itlab: {e}");
            e.exit_code()
        }
    }
}
