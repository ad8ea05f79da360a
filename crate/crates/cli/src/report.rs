//! Report envelope, run manifest and JSON/CSV emission.

use std::io::Write;
use std::path::Path;
use std::time::Instant;

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::{json, Value as Json};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: Json,
    pub seed: u64,
    pub tool_version: &'static str,
    pub arithmetic_mode: &'static str,
    pub timings: Timings,
}

#[derive(Clone, Debug, Serialize)]
pub struct Timings {
    pub elapsed_ms: f64,
}

/// A command result: the report body, a pass flag and an optional table.
pub struct Outcome {
    pub report: Json,
    pub pass: bool,
    pub table: Option<Table>,
}

impl Outcome {
    pub fn new<T: Serialize>(report: &T, pass: bool) -> Result<Self> {
        Ok(Outcome {
            report: serde_json::to_value(report)?,
            pass,
            table: None,
        })
    }

    pub fn with_table(mut self, table: Table) -> Self {
        self.table = Some(table);
        self
    }
}

pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: Vec<&'static str>) -> Self {
        Table { header, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }
}

pub struct Clock(Instant);

impl Clock {
    pub fn start() -> Self {
        Clock(Instant::now())
    }

    pub fn elapsed_ms(&self) -> f64 {
        self.0.elapsed().as_secs_f64() * 1e3
    }
}

pub fn envelope(manifest: &RunManifest, outcome: &Outcome) -> Json {
    json!({
        "manifest": manifest,
        "pass": outcome.pass,
        "report": outcome.report,
    })
}

fn write_csv(table: &Table, out: &mut dyn Write) -> Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(&table.header)?;
    for row in &table.rows {
        writer.write_record(row)?;
    }
    writer.flush()?;
    Ok(())
}

/// Writes the report to `out` (or stdout) in the requested format. A
/// command without a table falls back to JSON.
pub fn emit(manifest: &RunManifest, outcome: &Outcome, format: Format, out: Option<&Path>) -> Result<()> {
    let mut sink: Box<dyn Write> = match out {
        Some(path) => Box::new(
            std::fs::File::create(path).with_context(|| format!("cannot create {}", path.display()))?,
        ),
        None => Box::new(std::io::stdout().lock()),
    };
    match (format, &outcome.table) {
        (Format::Csv, Some(table)) => write_csv(table, &mut sink)?,
        _ => {
            serde_json::to_writer_pretty(&mut sink, &envelope(manifest, outcome))?;
            writeln!(sink)?;
        }
    }
    sink.flush()?;
    Ok(())
}
