use std::io::Write;

use serde_json::{json, Value};
use urnlab_core::rational::{self, Rational};
use urnlab_core::{Error, Status, Verdict};

pub const EXIT_OK: u8 = 0;
pub const EXIT_VIOLATED: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_ZERO_PROB: u8 = 3;
pub const EXIT_CAP: u8 = 4;

/// Failures that end a run, each with its exit code.
#[derive(Debug)]
pub enum Failure {
    Core(Error),
    Usage(String),
    Io(String),
    OracleMismatch(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Core(Error::ZeroProbability(_)) => EXIT_ZERO_PROB,
            Failure::Core(Error::CapExceeded { .. }) => EXIT_CAP,
            Failure::OracleMismatch(_) => EXIT_VIOLATED,
            _ => EXIT_USAGE,
        }
    }

    pub fn to_json(&self) -> Value {
        let (kind, message) = match self {
            Failure::Core(e) => (
                match e {
                    Error::Dimension(_) => "dimension",
                    Error::Invalid(_) => "invalid_input",
                    Error::ZeroWeight => "zero_weight",
                    Error::ZeroProbability(_) => "zero_probability",
                    Error::CapExceeded { .. } => "cap_exceeded",
                    Error::Parse(_) => "parse",
                },
                e.to_string(),
            ),
            Failure::Usage(m) => ("usage", m.clone()),
            Failure::Io(m) => ("io", m.clone()),
            Failure::OracleMismatch(m) => ("oracle_mismatch", m.clone()),
        };
        json!({"error": {"kind": kind, "message": message, "exit_code": self.code()}})
    }
}

pub type Run<T> = std::result::Result<T, Failure>;

pub fn usage<T>(msg: impl Into<String>) -> Run<T> {
    Err(Failure::Usage(msg.into()))
}

/// Rows for `--format csv`. Columns named `*_approx` hold decimals that are
/// rounded and must not be read as exact values.
#[derive(Debug, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn verdicts<'a>(items: impl IntoIterator<Item = (String, &'a Verdict)>) -> Self {
        let mut t = Table::new(&["item", "property", "status", "checked", "skipped"]);
        for (item, v) in items {
            t.push(vec![
                item,
                v.property.clone(),
                status_name(v.status).into(),
                v.checked.to_string(),
                v.skipped.to_string(),
            ]);
        }
        t
    }
}

pub fn status_name(s: Status) -> &'static str {
    match s {
        Status::Holds => "holds",
        Status::Violated => "violated",
        Status::Inconclusive => "inconclusive",
    }
}

pub fn approx(r: &Rational) -> String {
    format!("{:.6e}", rational::approx(r))
}

/// The result of one command.
#[derive(Debug)]
pub struct Output {
    pub json: Value,
    pub table: Table,
    pub code: u8,
}

/// Exit code for a verdict: violations give 1; inconclusive verdicts give 4
/// when a cap stopped the check and 0 otherwise (a falsifier that found
/// nothing, or a scan below its threshold).
pub fn verdict_code(v: &Verdict) -> u8 {
    match v.status {
        Status::Holds => EXIT_OK,
        Status::Violated => EXIT_VIOLATED,
        Status::Inconclusive if v.notes.iter().any(|n| n.contains("cap")) => EXIT_CAP,
        Status::Inconclusive => EXIT_OK,
    }
}

pub fn combined_code<'a>(verdicts: impl IntoIterator<Item = &'a Verdict>) -> u8 {
    let codes: Vec<u8> = verdicts.into_iter().map(verdict_code).collect();
    if codes.contains(&EXIT_VIOLATED) {
        EXIT_VIOLATED
    } else {
        codes.into_iter().max().unwrap_or(EXIT_OK)
    }
}

pub fn write_json(out: &mut impl Write, value: &Value) -> std::io::Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)
}

pub fn write_csv(out: &mut impl Write, table: &Table) -> Run<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Failure::Io(e.to_string());
    w.write_record(&table.header).map_err(io)?;
    for row in &table.rows {
        w.write_record(row).map_err(io)?;
    }
    w.flush().map_err(|e| Failure::Io(e.to_string()))
}
