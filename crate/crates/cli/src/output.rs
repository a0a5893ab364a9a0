//! Tables rendered as CSV or JSON. Every cell is a string so exact
//! rationals pass through untouched.

use std::io::Write;

use serde_json::{json, Map, Value};
use ultranorm::valued_field::rational::format_rational;
use ultranorm::{FieldElement, Magnitude, ValuedField};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Debug, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
    /// Extra top-level JSON entries; not written in CSV.
    pub summary: Map<String, Value>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table { columns: columns.iter().map(|c| c.to_string()).collect(), ..Table::default() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write(&self, format: Format, out: &mut dyn Write) -> std::io::Result<()> {
        match format {
            Format::Csv => {
                let mut w = csv::Writer::from_writer(out);
                w.write_record(&self.columns)?;
                for r in &self.rows {
                    w.write_record(r)?;
                }
                w.flush()
            }
            Format::Json => {
                let rows: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|r| Value::Array(r.iter().map(|c| Value::String(c.clone())).collect()))
                    .collect();
                let mut doc = Map::new();
                doc.insert("columns".into(), json!(self.columns));
                doc.insert("rows".into(), Value::Array(rows));
                for (k, v) in &self.summary {
                    doc.insert(k.clone(), v.clone());
                }
                serde_json::to_writer_pretty(&mut *out, &Value::Object(doc))?;
                writeln!(out)
            }
        }
    }
}

pub fn rational(r: &num_rational::BigRational) -> String {
    format_rational(r)
}

pub fn element(x: &FieldElement) -> String {
    x.to_string()
}

/// Coordinates joined by `;`.
pub fn vector(v: &[FieldElement]) -> String {
    v.iter().map(element).collect::<Vec<_>>().join(";")
}

pub fn qvector(v: &[num_rational::BigRational]) -> String {
    v.iter().map(rational).collect::<Vec<_>>().join(";")
}

/// Vectors joined by `|`.
pub fn qvectors(vs: &[Vec<num_rational::BigRational>]) -> String {
    vs.iter().map(|v| qvector(v)).collect::<Vec<_>>().join("|")
}

/// `[value, q, exponent]` with `value = q·ρ^exponent` over `field`.
pub fn magnitude(m: &Magnitude, field: &ValuedField) -> [String; 3] {
    match m.parts(field.base_prime()) {
        Some((q, n)) => [m.to_string(), rational(&q), n.to_string()],
        None => ["0/1".into(), "0/1".into(), "0".into()],
    }
}

/// `[num, den, exponent]` of the pair `(q, exponent)`.
pub fn magnitude_parts(m: &Magnitude, field: &ValuedField) -> [String; 3] {
    match m.parts(field.base_prime()) {
        Some((q, n)) => [q.numer().to_string(), q.denom().to_string(), n.to_string()],
        None => ["0".into(), "1".into(), "0".into()],
    }
}
