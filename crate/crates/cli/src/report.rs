use std::collections::BTreeMap;
use std::io::Write;

use clap::ValueEnum;
use serde::Serialize;
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// Structured result of one command; every format is rendered from this.
#[derive(Debug, Serialize)]
pub struct RunReport {
    pub command: &'static str,
    pub parameters: BTreeMap<&'static str, Value>,
    pub status: &'static str,
    pub summary: BTreeMap<&'static str, Value>,
    pub rows: Vec<Value>,
    pub timing_ms: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prune_counters: Option<BTreeMap<&'static str, u64>>,
    #[serde(skip)]
    pub table: Table,
}

/// Flat view of `rows` for CSV output.
#[derive(Debug, Default)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub records: Vec<Vec<String>>,
}

impl RunReport {
    pub fn new(command: &'static str) -> Self {
        Self {
            command,
            parameters: BTreeMap::new(),
            status: "ok",
            summary: BTreeMap::new(),
            rows: Vec::new(),
            timing_ms: 0.0,
            prune_counters: None,
            table: Table::default(),
        }
    }

    pub fn param(&mut self, key: &'static str, v: impl Into<Value>) -> &mut Self {
        self.parameters.insert(key, v.into());
        self
    }

    pub fn note(&mut self, key: &'static str, v: impl Into<Value>) -> &mut Self {
        self.summary.insert(key, v.into());
        self
    }

    pub fn write(&self, format: Format, out: &mut impl Write) -> std::io::Result<()> {
        match format {
            Format::Json => {
                serde_json::to_writer_pretty(&mut *out, self)?;
                writeln!(out)
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(out);
                w.write_record(&self.table.header)?;
                for r in &self.table.records {
                    w.write_record(r)?;
                }
                w.flush()
            }
        }
    }
}
