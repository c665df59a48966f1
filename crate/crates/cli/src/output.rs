use crate::args::{Common, Format};
use gsa_core::io::{with_config, write_csv_blocks};
use gsa_core::{Error, Result};
use serde_json::{Map, Value};
use std::fs::File;
use std::io::{BufWriter, Write};

/// Everything a command produces.
#[derive(Debug, Default)]
pub struct Outcome {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    /// Summary values: a `# result:` line in CSV, top-level keys in JSON.
    pub summary: Map<String, Value>,
    /// JSON-only payload merged after the summary.
    pub payload: Map<String, Value>,
    /// Named checks that exceeded their tolerance.
    pub failures: Vec<String>,
}

impl Outcome {
    pub fn table(header: &[&str], rows: Vec<Vec<String>>) -> Self {
        Self { header: header.iter().map(|s| s.to_string()).collect(), rows, ..Default::default() }
    }

    pub fn note(&mut self, key: &str, value: impl Into<Value>) {
        self.summary.insert(key.into(), value.into());
    }

    pub fn attach(&mut self, key: &str, value: impl Into<Value>) {
        self.payload.insert(key.into(), value.into());
    }
}

pub fn to_value<T: serde::Serialize>(v: &T) -> Result<Value> {
    serde_json::to_value(v).map_err(|e| Error::Format(e.to_string()))
}

/// Writes CSV rows with the config and summary blocks on top.
pub fn write_table<W: Write>(w: W, config: &Value, summary: &Map<String, Value>, header: &[String], rows: &[Vec<String>]) -> Result<()> {
    let summary = Value::Object(summary.clone());
    let mut blocks = vec![("config", config)];
    if summary.as_object().is_some_and(|m| !m.is_empty()) {
        blocks.push(("result", &summary));
    }
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    write_csv_blocks(w, &blocks, &header, rows)
}

fn write_all<W: Write>(mut w: W, common: &Common, config: &Value, out: &Outcome) -> Result<()> {
    match common.format {
        Format::Csv => write_table(&mut w, config, &out.summary, &out.header, &out.rows)?,
        Format::Json => {
            let mut body = out.summary.clone();
            body.extend(out.payload.clone());
            let doc = with_config(config, Value::Object(body));
            let text = serde_json::to_string_pretty(&doc).map_err(|e| Error::Format(e.to_string()))?;
            writeln!(w, "{text}")?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn emit(common: &Common, config: &Value, out: &Outcome) -> Result<()> {
    match &common.out {
        Some(path) => {
            let file = File::create(path).map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
            write_all(BufWriter::new(file), common, config, out)
        }
        None => write_all(std::io::stdout().lock(), common, config, out),
    }
}
