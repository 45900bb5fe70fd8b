//! JSON and CSV emitters shared by the subcommands.

use std::io::Write;

use anyhow::{bail, Result};
use clap::ValueEnum;
use fqcharpoly::charpoly_dist::ExactQ;
use fqcharpoly::series::ratio_to_f64;
use num_bigint::BigInt;
use serde_json::{json, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// An exact rational as `{"num": "...", "den": "..."}`.
pub fn rat(x: &ExactQ) -> Value {
    json!({ "num": x.numer().to_string(), "den": x.denom().to_string() })
}

pub fn opt_rat(x: Option<&ExactQ>) -> Value {
    x.map_or(Value::Null, rat)
}

pub fn big(x: &BigInt) -> Value {
    Value::String(x.to_string())
}

pub fn decimal(x: &ExactQ) -> f64 {
    ratio_to_f64(x)
}

pub fn fraction(x: &ExactQ) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn cell<T: ToString>(x: Option<T>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Table {
        Table { header: header.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

/// Writes `value` as pretty JSON, or `table` as CSV with a header row.
pub fn emit(format: Format, value: &Value, table: Option<Table>, command: &str) -> Result<()> {
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, value)?;
            writeln!(out)?;
        }
        Format::Csv => {
            let Some(table) = table else {
                bail!("{command} has no CSV output; use --format json");
            };
            let mut w = csv::Writer::from_writer(out);
            w.write_record(&table.header)?;
            for row in &table.rows {
                w.write_record(row)?;
            }
            w.flush()?;
        }
    }
    Ok(())
}
