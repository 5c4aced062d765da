use std::fmt;
use std::io::Write;
use std::path::Path;

use serde_json::Value;

/// A command's result: the JSON document and a flat table for CSV output.
pub struct Report {
    pub json: Value,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Report {
    pub fn new(json: Value, header: &[&str]) -> Self {
        Report {
            json,
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn row(&mut self, cells: Vec<String>) {
        self.rows.push(cells);
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Failure with the process exit code it maps to.
pub struct Failure {
    pub code: i32,
    pub message: String,
    /// Partial report still worth emitting (for failed certificates).
    pub report: Option<Report>,
}

impl fmt::Debug for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "exit {}: {}", self.code, self.message)
    }
}

pub const EXIT_INPUT: i32 = 2;
pub const EXIT_FAILED: i32 = 3;
pub const EXIT_CAP: i32 = 4;

impl Failure {
    pub fn input(message: impl fmt::Display) -> Self {
        Failure {
            code: EXIT_INPUT,
            message: message.to_string(),
            report: None,
        }
    }

    pub fn failed(message: impl fmt::Display, report: Report) -> Self {
        Failure {
            code: EXIT_FAILED,
            message: message.to_string(),
            report: Some(report),
        }
    }

    pub fn infeasible(message: impl fmt::Display) -> Self {
        Failure {
            code: EXIT_FAILED,
            message: message.to_string(),
            report: None,
        }
    }

    pub fn cap(message: impl fmt::Display) -> Self {
        Failure {
            code: EXIT_CAP,
            message: message.to_string(),
            report: None,
        }
    }
}

fn render(report: &Report, format: Format) -> Result<Vec<u8>, Failure> {
    match format {
        Format::Json => {
            let mut out = serde_json::to_vec_pretty(&report.json).map_err(Failure::input)?;
            out.push(b'\n');
            Ok(out)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&report.header).map_err(Failure::input)?;
            for r in &report.rows {
                w.write_record(r).map_err(Failure::input)?;
            }
            w.into_inner().map_err(Failure::input)
        }
    }
}

pub fn emit(report: &Report, format: Format, out: Option<&Path>) -> Result<(), Failure> {
    let bytes = render(report, format)?;
    match out {
        Some(path) => std::fs::write(path, bytes).map_err(|e| Failure::input(format!("{}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(&bytes)
            .map_err(|e| Failure::input(format!("stdout: {e}"))),
    }
}

/// `[a, b, c]` with each entry in its display form.
pub fn join<T: fmt::Display>(xs: &[T]) -> String {
    let parts: Vec<String> = xs.iter().map(|x| x.to_string()).collect();
    format!("[{}]", parts.join(", "))
}
