//! Rendering of reports and errors as text, CSV or JSON.

use clap::ValueEnum;
use relgrowth::Error;
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

/// A flat table: one row per k, per N or per stratum.
pub struct Table {
    pub headers: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

pub struct Report {
    pub command: &'static str,
    pub record: Value,
    pub table: Table,
    pub text: String,
    pub exit_code: i32,
}

impl Report {
    pub fn new(command: &'static str, record: &impl Serialize, table: Table, text: String) -> Self {
        Self {
            command,
            record: serde_json::to_value(record).expect("reports serialize"),
            table,
            text,
            exit_code: 0,
        }
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.text.clone(),
            Format::Csv => csv_string(&self.table.headers, &self.table.rows),
            Format::Json => json_string(json!({
                "version": env!("CARGO_PKG_VERSION"),
                "command": self.command,
                "report": self.record,
            })),
        }
    }
}

fn json_string(v: Value) -> String {
    let mut s = serde_json::to_string_pretty(&v).expect("values serialize");
    s.push('\n');
    s
}

fn csv_string(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(headers).expect("in-memory write");
    for row in rows {
        w.write_record(row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Input { .. } => "input",
        Error::Validation(_) => "validation",
        Error::NonConvergence { .. } => "non_convergence",
        Error::Resource { .. } => "resource",
    }
}

pub fn render_error(e: &Error, format: Format) -> String {
    let kind = error_kind(e);
    let code = e.exit_code();
    match format {
        Format::Text => format!("error: {e}\n"),
        Format::Csv => csv_string(
            &["kind", "exit_code", "message"],
            &[vec![kind.to_string(), code.to_string(), e.to_string()]],
        ),
        Format::Json => {
            let mut record = json!({ "kind": kind, "exit_code": code, "message": e.to_string() });
            match e {
                Error::Input { location, .. } => record["location"] = json!(location),
                Error::Validation(d) => record["diagnostics"] = json!(d),
                Error::NonConvergence {
                    best_upper_bound, ..
                } => record["best_upper_bound"] = json!(best_upper_bound),
                Error::Resource { limit, partial, .. } => {
                    record["limit"] = json!(limit);
                    record["partial"] = json!(partial);
                }
            }
            json_string(json!({ "version": env!("CARGO_PKG_VERSION"), "error": record }))
        }
    }
}

/// Shortest round-trip decimal form, as used in every table.
pub fn num(x: f64) -> String {
    format!("{x}")
}
