use std::path::PathBuf;

use arithdeg::search::SolutionSet;
use serde_json::{json, Value};

use crate::args::{Format, RunConfig};

pub const TOOL: &str = "arithdeg";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Table {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }
}

/// Result of one command before rendering.
#[derive(Debug, Default)]
pub struct Output {
    pub pass: bool,
    pub json: Value,
    pub tables: Vec<Table>,
    /// Plain-text body; tables are rendered when absent.
    pub text: Option<String>,
    /// Solution file to write once the command has succeeded.
    pub solutions: Option<(PathBuf, SolutionSet)>,
}

impl Output {
    pub fn new(json: Value) -> Self {
        Output {
            pass: true,
            json,
            ..Default::default()
        }
    }
}

pub fn header(cfg: &RunConfig) -> Value {
    json!({ "tool": TOOL, "version": VERSION, "config": cfg })
}

/// Comment line used by text and CSV outputs.
pub fn header_line(cfg: &RunConfig) -> String {
    format!("# {}\n", header(cfg))
}

pub fn render_tables(tables: &[Table]) -> String {
    let mut out = String::new();
    for (k, t) in tables.iter().enumerate() {
        if k > 0 {
            out.push('\n');
        }
        if tables.len() > 1 {
            out.push_str(&format!("[{}]\n", t.name));
        }
        let mut widths: Vec<usize> = t.columns.iter().map(|c| c.chars().count()).collect();
        for r in &t.rows {
            for (w, c) in widths.iter_mut().zip(r) {
                *w = (*w).max(c.chars().count());
            }
        }
        let line = |cells: &[String]| -> String {
            let parts: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
            parts.join("  ").trim_end().to_string() + "\n"
        };
        out.push_str(&line(&t.columns));
        for r in &t.rows {
            out.push_str(&line(r));
        }
    }
    out
}

fn render_csv(tables: &[Table]) -> String {
    let mut out = Vec::new();
    for (k, t) in tables.iter().enumerate() {
        if k > 0 {
            out.push(b'\n');
        }
        let mut w = csv::WriterBuilder::new().flexible(true).from_writer(Vec::new());
        w.write_record(&t.columns).expect("in-memory write");
        for r in &t.rows {
            w.write_record(r).expect("in-memory write");
        }
        out.extend(w.into_inner().expect("in-memory flush"));
    }
    String::from_utf8(out).expect("utf-8 cells")
}

/// The report exactly as written. Files always carry the header; standard
/// output shows it for the machine formats only.
pub fn render(cfg: &RunConfig, out: &Output, to_file: bool) -> String {
    match cfg.format {
        Format::Json => {
            let v = json!({ "header": header(cfg), "pass": out.pass, "result": out.json });
            serde_json::to_string_pretty(&v).expect("serializable") + "\n"
        }
        Format::Csv => header_line(cfg) + &render_csv(&out.tables),
        Format::Text => {
            let body = out.text.clone().unwrap_or_else(|| render_tables(&out.tables));
            if to_file {
                header_line(cfg) + &body
            } else {
                body
            }
        }
    }
}

/// Recover the run configuration from the first line(s) of a file.
pub fn read_header(content: &str) -> Option<Value> {
    let first = content.lines().next()?;
    if let Some(rest) = first.strip_prefix("# ") {
        return serde_json::from_str(rest).ok();
    }
    if let Ok(v) = serde_json::from_str::<Value>(first) {
        if v["kind"] == "header" {
            return Some(v);
        }
    }
    let v: Value = serde_json::from_str(content).ok()?;
    Some(v.get("header")?.clone())
}

/// Solution file contents with the run configuration in its header line.
pub fn solution_bytes(cfg: &RunConfig, set: &SolutionSet) -> arithdeg::Result<Vec<u8>> {
    let mut buf = Vec::new();
    set.write_jsonl(&mut buf, &serde_json::to_value(cfg).expect("serializable"))?;
    Ok(buf)
}
