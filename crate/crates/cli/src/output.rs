use std::io::Write;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::Serialize;
use serde_json::{json, Value};

use crate::failure::Failure;
use crate::manifest::{InputDigest, RunManifest};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Full-precision decimal form used in every CSV cell (17 significant digits).
pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        format!("{x}")
    }
}

pub fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self { header: header.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<Vec<u8>, Failure> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).map_err(csv_err)?;
        for r in &self.rows {
            w.write_record(r).map_err(csv_err)?;
        }
        w.into_inner().map_err(|e| Failure::compute(e.to_string()))
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| Value::Object(self.header.iter().zip(r).map(|(h, v)| (h.to_string(), json!(v))).collect()))
            .collect();
        Value::Array(rows)
    }
}

fn csv_err(e: csv::Error) -> Failure {
    Failure::compute(format!("csv: {e}"))
}

/// What a command produces before the manifest is attached.
pub struct Report {
    pub config: Value,
    pub inputs: Vec<InputDigest>,
    pub result: Value,
    pub table: Table,
    pub default_format: Format,
    /// Extra tables written to their own files.
    pub attachments: Vec<(PathBuf, Table)>,
}

impl Report {
    pub fn new(config: Value, inputs: Vec<InputDigest>, result: Value, table: Table, default_format: Format) -> Self {
        Self { config, inputs, result, table, default_format, attachments: Vec::new() }
    }
}

pub fn sidecar(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    std::fs::write(path, bytes).map_err(|e| Failure::compute(format!("{}: {e}", path.display())))
}

/// Writes the report. JSON embeds the manifest; CSV files get a
/// `.manifest.json` sidecar, and CSV on stdout sends the manifest to stderr.
pub fn emit(report: &Report, manifest: &RunManifest, format: Option<Format>, out: Option<&Path>) -> Result<(), Failure> {
    let manifest_json = serde_json::to_string_pretty(manifest).map_err(|e| Failure::compute(e.to_string()))?;
    for (path, table) in &report.attachments {
        write_file(path, &table.to_csv()?)?;
        write_file(&sidecar(path), manifest_json.as_bytes())?;
    }
    match format.unwrap_or(report.default_format) {
        Format::Json => {
            let doc = json!({ "manifest": manifest, "result": report.result });
            let mut text = serde_json::to_string_pretty(&doc).map_err(|e| Failure::compute(e.to_string()))?;
            text.push('\n');
            match out {
                Some(p) => write_file(p, text.as_bytes()),
                None => Ok(std::io::stdout().write_all(text.as_bytes())?),
            }
        }
        Format::Csv => {
            let bytes = report.table.to_csv()?;
            match out {
                Some(p) => {
                    write_file(p, &bytes)?;
                    write_file(&sidecar(p), manifest_json.as_bytes())
                }
                None => {
                    std::io::stdout().write_all(&bytes)?;
                    eprintln!("{manifest_json}");
                    Ok(())
                }
            }
        }
    }
}
