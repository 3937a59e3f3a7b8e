//! The report every subcommand prints, and its JSON/CSV renderings.

use std::collections::BTreeMap;
use std::io::Write;
use std::time::Instant;

use embcol::experiment::RateSummary;
use serde::Serialize;
use serde_json::{json, Map, Value};

/// Bumped whenever a field changes meaning; `schema/report.schema.json`
/// tracks it.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Serialize)]
pub struct Report {
    pub schema_version: u32,
    /// Subcommand name.
    pub command: String,
    /// Full argument vector, program name excluded.
    pub argv: Vec<String>,
    pub seed: Option<u64>,
    pub params: Value,
    /// One object per trial, identical across reruns with the same seed.
    pub records: Vec<Value>,
    pub summary: Option<RateSummary>,
    pub result: Value,
    pub queries: BTreeMap<String, u64>,
    pub wall_clock_s: f64,
}

impl Report {
    pub fn new(command: &str, seed: Option<u64>, params: Value) -> Self {
        Report {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            argv: std::env::args().skip(1).collect(),
            seed,
            params,
            records: Vec::new(),
            summary: None,
            result: json!({}),
            queries: BTreeMap::new(),
            wall_clock_s: 0.0,
        }
    }

    pub fn query_count(&mut self, name: &str, calls: u64) {
        *self.queries.entry(name.to_string()).or_default() += calls;
    }

    pub fn finish(mut self, started: Instant) -> Self {
        self.wall_clock_s = started.elapsed().as_secs_f64();
        self
    }

    pub fn write_json<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        serde_json::to_writer_pretty(&mut out, self)?;
        writeln!(out)
    }

    /// Per-trial records as CSV rows, one column per record key (sorted).
    /// Reports without records print their `result` as a single row.
    pub fn write_csv<W: Write>(&self, out: W) -> anyhow::Result<()> {
        let single = [self.result.clone()];
        let rows: &[Value] = if self.records.is_empty() { &single } else { &self.records };
        let mut columns: Vec<String> = Vec::new();
        for row in rows {
            for key in row.as_object().map(Map::keys).into_iter().flatten() {
                if !columns.contains(key) {
                    columns.push(key.clone());
                }
            }
        }
        columns.sort();
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&columns)?;
        for row in rows {
            w.write_record(columns.iter().map(|c| cell(row.get(c))))?;
        }
        w.flush()?;
        Ok(())
    }
}

fn cell(v: Option<&Value>) -> String {
    match v {
        None | Some(Value::Null) => String::new(),
        Some(Value::String(s)) => s.clone(),
        Some(other) => other.to_string(),
    }
}

/// Counts go out as decimal strings: u128 does not survive a trip through
/// an f64-based JSON reader.
pub fn decimal(c: u128) -> Value {
    Value::String(c.to_string())
}
