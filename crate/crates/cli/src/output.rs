use std::fmt;
use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::args::Format;

/// Exit status 1: the command line itself is wrong.
/// Exit status 2: the inputs or data cannot support the request.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Data(m) => f.write_str(m),
        }
    }
}

impl From<favorit_core::Error> for CliError {
    fn from(e: favorit_core::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub tool: String,
    pub tool_version: String,
    pub command: String,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dataset_version: Option<String>,
    /// `computed` from a dataset or `published` from a summary table.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    pub inputs: Map<String, Value>,
}

impl Metadata {
    pub fn new(command: &str, seed: u64) -> Self {
        Self {
            tool: "favorit".into(),
            tool_version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            seed,
            dataset_version: None,
            source: None,
            inputs: Map::new(),
        }
    }

    pub fn input(mut self, key: &str, value: impl Serialize) -> Self {
        let v = serde_json::to_value(value).unwrap_or(Value::Null);
        if !v.is_null() {
            self.inputs.insert(key.into(), v);
        }
        self
    }

    fn header_lines(&self) -> Vec<String> {
        let mut lines = vec![format!("{} {} {}", self.tool, self.tool_version, self.command)];
        lines.push(format!("seed: {}", self.seed));
        if let Some(v) = &self.dataset_version {
            lines.push(format!("dataset_version: {v}"));
        }
        if let Some(s) = &self.source {
            lines.push(format!("source: {s}"));
        }
        for (k, v) in &self.inputs {
            let shown = match v {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            lines.push(format!("{k}: {shown}"));
        }
        lines
    }
}

#[derive(Serialize)]
struct JsonReport<'a, T> {
    metadata: &'a Metadata,
    result: &'a T,
}

/// A table cell. Numbers keep full precision in CSV and are rounded to two
/// decimals in text tables.
pub enum Cell {
    Text(String),
    Num(f64),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::Num(v) if v.is_infinite() => if *v > 0.0 { "inf".into() } else { "-inf".into() },
            Cell::Num(v) => v.to_string(),
        }
    }

    fn display(&self) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::Num(v) if v.is_infinite() => self.csv(),
            Cell::Num(v) => format!("{v:.2}"),
        }
    }
}

pub fn text(s: impl ToString) -> Cell {
    Cell::Text(s.to_string())
}

pub fn num(v: f64) -> Cell {
    Cell::Num(v)
}

/// Column names and rows shared by the CSV and table renderings.
pub struct Rows {
    pub headers: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Rows {
    pub fn new(headers: &[&'static str]) -> Self {
        Self { headers: headers.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        self.rows.push(row);
    }
}

/// Renders a report. JSON carries the metadata as an object; CSV and
/// tables carry it as leading `#` lines.
pub fn render<T: Serialize>(meta: &Metadata, result: &T, rows: &Rows, format: Format) -> Result<Vec<u8>, CliError> {
    let mut out = Vec::new();
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, &JsonReport { metadata: meta, result })
                .map_err(|e| CliError::Data(e.to_string()))?;
            out.push(b'\n');
        }
        Format::Csv => {
            for line in meta.header_lines() {
                writeln!(out, "# {line}")?;
            }
            let mut w = csv::Writer::from_writer(&mut out);
            w.write_record(&rows.headers)?;
            for r in &rows.rows {
                w.write_record(r.iter().map(Cell::csv))?;
            }
            w.flush()?;
        }
        Format::Table => {
            for line in meta.header_lines() {
                writeln!(out, "# {line}")?;
            }
            out.extend_from_slice(table(rows).as_bytes());
        }
    }
    Ok(out)
}

fn table(rows: &Rows) -> String {
    let cells: Vec<Vec<String>> = rows.rows.iter().map(|r| r.iter().map(Cell::display).collect()).collect();
    let mut widths: Vec<usize> = rows.headers.iter().map(|h| h.len()).collect();
    for r in &cells {
        for (w, cell) in widths.iter_mut().zip(r) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect();
        padded.join("  ").trim_end().to_string() + "\n"
    };
    let mut s = line(rows.headers.clone());
    let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
    s += &line(rule.iter().map(String::as_str).collect());
    for r in &cells {
        s += &line(r.iter().map(String::as_str).collect());
    }
    s
}

pub fn write_output(bytes: &[u8], out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => File::create(path)?.write_all(bytes)?,
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(bytes)?;
            stdout.flush()?;
        }
    }
    Ok(())
}
