//! Tabular command output and its CSV / JSON encodings.

use std::io::Write;

use serde_json::{Map, Number, Value};

use crate::error::CliResult;

/// Significant digits kept for every floating-point output value.
pub const SIGNIFICANT_DIGITS: usize = 12;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Bool(bool),
    /// Value that does not exist for this row (e.g. the delay of an
    /// infeasible point).
    Null,
}

impl Cell {
    pub fn opt(x: Option<f64>) -> Cell {
        x.map_or(Cell::Null, Cell::Num)
    }

    pub fn text(s: impl Into<String>) -> Cell {
        Cell::Text(s.into())
    }
}

/// Rounds to [`SIGNIFICANT_DIGITS`] significant digits.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { 0.0 } else { x };
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
        .parse()
        .expect("formatted float parses")
}

/// Shortest decimal text that round-trips the rounded value. Plain notation
/// is used for moderate magnitudes, exponent notation otherwise.
pub fn format_float(x: f64) -> String {
    let r = round_sig(x);
    let a = r.abs();
    if r == 0.0 {
        "0".to_string()
    } else if (1e-5..1e16).contains(&a) {
        format!("{r}")
    } else {
        format!("{r:e}")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub command: &'static str,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(command: &'static str, columns: &[&'static str]) -> Self {
        Self { command, columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width for {}", self.command);
        self.rows.push(row);
    }

    pub fn write_csv(&self, out: impl Write) -> CliResult<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        let io = |e: csv::Error| std::io::Error::other(e);
        w.write_record(&self.columns).map_err(io)?;
        for row in &self.rows {
            w.write_record(row.iter().map(csv_text)).map_err(io)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn write_json(&self, mut out: impl Write) -> CliResult<()> {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(c, v)| (c.to_string(), json_value(v)))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        let doc = serde_json::json!({
            "command": self.command,
            "columns": self.columns,
            "rows": rows,
        });
        serde_json::to_writer_pretty(&mut out, &doc).map_err(std::io::Error::other)?;
        out.write_all(b"\n")?;
        Ok(())
    }
}

fn csv_text(cell: &Cell) -> String {
    match cell {
        Cell::Num(x) if x.is_finite() => format_float(*x),
        Cell::Num(_) | Cell::Null => String::new(),
        Cell::Int(n) => n.to_string(),
        Cell::Text(s) => s.clone(),
        Cell::Bool(b) => b.to_string(),
    }
}

fn json_value(cell: &Cell) -> Value {
    match cell {
        Cell::Num(x) => Number::from_f64(round_sig(*x)).map_or(Value::Null, Value::Number),
        Cell::Null => Value::Null,
        Cell::Int(n) => Value::from(*n),
        Cell::Text(s) => Value::from(s.as_str()),
        Cell::Bool(b) => Value::from(*b),
    }
}
