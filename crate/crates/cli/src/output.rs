use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};
use clap::ValueEnum;
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }
}

/// A command result: JSON, a CSV table, or both views of the same data.
pub struct Output {
    pub json: Option<Value>,
    pub table: Option<Table>,
    pub passed: bool,
}

impl Output {
    pub fn json(v: Value) -> Self {
        Output { json: Some(v), table: None, passed: true }
    }

    pub fn table(t: Table) -> Self {
        Output { json: None, table: Some(t), passed: true }
    }

    pub fn render(&self, format: Option<Format>) -> Result<Vec<u8>> {
        let format = format.unwrap_or(if self.json.is_some() { Format::Json } else { Format::Csv });
        match (format, &self.json, &self.table) {
            (Format::Json, Some(v), _) => {
                let mut s = serde_json::to_string_pretty(v)?;
                s.push('\n');
                Ok(s.into_bytes())
            }
            (Format::Csv, _, Some(t)) => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&t.header)?;
                for r in &t.rows {
                    w.write_record(r)?;
                }
                Ok(w.into_inner().context("flushing csv")?)
            }
            (Format::Json, None, _) => bail!("this command emits CSV only"),
            (Format::Csv, _, None) => bail!("this command emits JSON only"),
        }
    }
}

pub fn emit(bytes: &[u8], out: Option<&Path>) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, bytes).with_context(|| format!("cannot write {}", p.display())),
        None => {
            let mut s = std::io::stdout().lock();
            s.write_all(bytes)?;
            s.flush()?;
            Ok(())
        }
    }
}
