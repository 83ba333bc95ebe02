//! `fastlight <command> --config <path> --out <dir>`
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical or convergence
//! error, 4 I/O error.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use commands::Command;
use output::RunReport;

#[derive(Debug, Parser)]
#[command(name = "fastlight", version, about = "Superluminal pulse propagation in an active Raman gain medium")]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// Flat `key = value` configuration file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory for `<command>.csv` and `<command>.json`.
    #[arg(long)]
    out: PathBuf,
    /// Override `grid_n`.
    #[arg(long)]
    grid_n: Option<usize>,
    /// Override `window_factor`.
    #[arg(long)]
    window_factor: Option<f64>,
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numerical(String),
    Io(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical error: {m}"),
            CliError::Io(m) => write!(f, "I/O error: {m}"),
        }
    }
}

fn run(cli: &Cli) -> Result<RunReport, CliError> {
    let text = std::fs::read_to_string(&cli.config).map_err(|e| CliError::Io(format!("{}: {e}", cli.config.display())))?;
    let mut cfg = config::parse_config(&text).map_err(|e| CliError::Config(format!("{}: {e}", cli.config.display())))?;
    if let Some(n) = cli.grid_n {
        cfg.grid_n = n;
    }
    if let Some(w) = cli.window_factor {
        cfg.window_factor = w;
    }

    let outcome = commands::run(cli.command, &cfg)?;
    let report = RunReport {
        tool: "fastlight",
        version: env!("CARGO_PKG_VERSION"),
        command: cli.command.name(),
        config_text: cfg.to_text(),
        config: cfg,
        constants: outcome.constants,
        metrics: outcome.metrics,
        all_checks_pass: outcome.checks.iter().all(|c| c.pass),
        checks: outcome.checks,
    };
    let (csv, json) =
        output::write_outputs(&cli.out, cli.command.name(), &outcome.table, &report).map_err(CliError::Io)?;
    for c in &report.checks {
        println!("[{}] {} = {:e}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.value);
    }
    println!("wrote {}", csv.display());
    println!("wrote {}", json.display());
    Ok(report)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("fastlight: {e}");
            ExitCode::from(e.code())
        }
    }
}
