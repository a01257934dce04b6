use std::fmt::Write as _;

use num_bigint::BigInt;
use serde::Serialize;
use serde_json::{Map, Value};

use newform_core::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Plain,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    Violation,
    Error,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::Violation => 1,
            Status::Error => 2,
        }
    }

    pub fn from_ok(ok: bool) -> Self {
        if ok {
            Status::Ok
        } else {
            Status::Violation
        }
    }
}

/// The structured result of one invocation.
#[derive(Debug, Clone, Serialize)]
pub struct OutputDocument {
    pub command: String,
    pub inputs: Map<String, Value>,
    pub results: Value,
    pub status: Status,
    pub diagnostics: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub generated_at: Option<u64>,
}

/// A command's outcome plus its tabular and human-readable renderings.
#[derive(Debug, Clone)]
pub struct Report {
    pub doc: OutputDocument,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    pub plain: String,
}

impl Report {
    pub fn new(command: &str, inputs: Map<String, Value>) -> Self {
        Report {
            doc: OutputDocument {
                command: command.to_string(),
                inputs,
                results: Value::Null,
                status: Status::Ok,
                diagnostics: Vec::new(),
                generated_at: None,
            },
            header: Vec::new(),
            rows: Vec::new(),
            plain: String::new(),
        }
    }

    pub fn error(command: &str, inputs: Map<String, Value>, err: &Error) -> Self {
        let mut r = Report::new(command, inputs);
        r.doc.status = error_status(err);
        r.doc.diagnostics.push(err.to_string());
        r.header = vec!["status".into(), "message".into()];
        r.rows = vec![vec![status_word(r.doc.status).into(), err.to_string()]];
        r
    }

    pub fn table(&mut self, header: &[&str], rows: Vec<Vec<String>>) {
        self.header = header.iter().map(|h| h.to_string()).collect();
        self.rows = rows;
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.doc).expect("document serializes");
                s.push('\n');
                s
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&self.header).expect("in-memory write");
                for row in &self.rows {
                    w.write_record(row).expect("in-memory write");
                }
                String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
            }
            Format::Plain => {
                let mut s = self.plain.clone();
                for d in &self.doc.diagnostics {
                    let _ = writeln!(s, "note: {d}");
                }
                let _ = writeln!(s, "status: {}", status_word(self.doc.status));
                s
            }
        }
    }
}

pub fn status_word(s: Status) -> &'static str {
    match s {
        Status::Ok => "ok",
        Status::Violation => "violation",
        Status::Error => "error",
    }
}

/// Bad input and environment problems exit with 2, failed checks with 1.
pub fn error_status(err: &Error) -> Status {
    match err {
        Error::TableMismatch { .. } | Error::InternalIntegralityFailure(_) => Status::Violation,
        _ => Status::Error,
    }
}

pub fn dec(n: &BigInt) -> Value {
    Value::String(n.to_string())
}

pub fn dec_list<'a>(v: impl IntoIterator<Item = &'a BigInt>) -> Value {
    Value::Array(v.into_iter().map(dec).collect())
}

pub fn join<T: ToString>(v: impl IntoIterator<Item = T>) -> String {
    v.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

/// Lays out rows as left-aligned columns separated by two spaces.
pub fn columns(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut width: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in width.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = String::new();
    let mut line = |cells: Vec<&str>| {
        let mut l = String::new();
        for (i, (c, w)) in cells.iter().zip(&width).enumerate() {
            if i + 1 == cells.len() {
                l.push_str(c);
            } else {
                let pad = w - c.chars().count();
                let _ = write!(l, "{c}{}  ", " ".repeat(pad));
            }
        }
        out.push_str(l.trim_end());
        out.push('\n');
    };
    line(header.to_vec());
    for row in rows {
        line(row.iter().map(String::as_str).collect());
    }
    out
}
