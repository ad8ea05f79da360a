//! `isingcmp`: command-line front end for Wells domination, threshold,
//! majorization, Gibbs and bound computations.
//!
//! Exit status: 0 when every asserted inequality holds, 1 when one fails
//! (the report describes the violation), 2 on usage or input errors.

mod commands;
mod inputs;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use report::{Clock, Format, RunManifest, Timings};

#[derive(Parser, Debug, Serialize)]
#[command(name = "isingcmp", version, about = "Comparison inequalities for even apriori measures")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct Global {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "json")]
    pub format: Format,
    /// Shorthand for `--format csv`.
    #[arg(long, global = true)]
    pub csv: bool,
    /// Seed for randomized ensembles.
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    /// Exact rational arithmetic wherever parameters are rational (default).
    #[arg(long, global = true, conflicts_with = "float")]
    pub exact: bool,
    /// Double-precision arithmetic throughout.
    #[arg(long, global = true)]
    pub float: bool,
    /// Write the report to this path instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker thread cap; defaults to the available parallelism.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
}

impl Global {
    fn format(&self) -> Format {
        if self.csv {
            Format::Csv
        } else {
            self.format
        }
    }
}

#[derive(Subcommand, Debug, Serialize)]
pub enum Command {
    /// Wells domination and the T₋/T₊ thresholds.
    #[command(subcommand)]
    Wells(commands::WellsCmd),
    /// Canonicality of the spin, D-vector and power-analog families.
    #[command(subcommand)]
    Families(commands::FamiliesCmd),
    /// Majorization certificates and the ψ-grid constructions.
    #[command(subcommand)]
    Majorize(commands::MajorizeCmd),
    /// Exact Gibbs expectations on small systems.
    #[command(subcommand)]
    Gibbs(commands::GibbsCmd),
    /// Transition-temperature bound coefficients.
    #[command(subcommand)]
    Bounds(commands::BoundsCmd),
    /// Inspect a measure.
    #[command(subcommand)]
    Measures(commands::MeasuresCmd),
}

impl Command {
    fn name(&self) -> String {
        let (group, sub) = match self {
            Command::Wells(c) => ("wells", c.name()),
            Command::Families(c) => ("families", c.name()),
            Command::Majorize(c) => ("majorize", c.name()),
            Command::Gibbs(c) => ("gibbs", c.name()),
            Command::Bounds(c) => ("bounds", c.name()),
            Command::Measures(c) => ("measures", c.name()),
        };
        format!("{group} {sub}")
    }
}

fn run(cli: &Cli) -> anyhow::Result<bool> {
    if let Some(jobs) = cli.global.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build_global()?;
    }
    let clock = Clock::start();
    let outcome = commands::dispatch(&cli.command, &cli.global)?;
    let manifest = RunManifest {
        command: cli.command.name(),
        parameters: serde_json::to_value(cli)?,
        seed: cli.global.seed,
        tool_version: env!("CARGO_PKG_VERSION"),
        arithmetic_mode: if cli.global.float { "float" } else { "exact" },
        timings: Timings {
            elapsed_ms: clock.elapsed_ms(),
        },
    };
    report::emit(&manifest, &outcome, cli.global.format(), cli.global.out.as_deref())?;
    Ok(outcome.pass)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
