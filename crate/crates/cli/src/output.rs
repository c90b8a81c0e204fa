use std::io::{self, Write};

use serde::{Deserialize, Serialize};
use serde_json::ser::{CompactFormatter, Formatter};
use serde_json::Value;

pub const SCHEMA_VERSION: &str = "1";

/// One structured document per invocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub schema_version: String,
    pub command: String,
    pub inputs: Value,
    pub results: Value,
    pub diagnostics: Value,
}

impl OutputRecord {
    pub fn new(command: &str, inputs: Value, results: Value, diagnostics: Value) -> Self {
        OutputRecord {
            schema_version: SCHEMA_VERSION.to_string(),
            command: command.to_string(),
            inputs,
            results,
            diagnostics,
        }
    }
}

/// Compact JSON with every float in 17-digit scientific notation.
struct ScientificFloats;

impl Formatter for ScientificFloats {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            write!(writer, "{value:.16e}")
        } else {
            CompactFormatter.write_null(writer)
        }
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

pub fn write_json<W: Write>(mut out: W, record: &OutputRecord) -> io::Result<()> {
    let mut ser = serde_json::Serializer::with_formatter(&mut out, ScientificFloats);
    record.serialize(&mut ser)?;
    writeln!(out)
}

/// Text for a float cell in delimited output; same digits as the JSON form.
pub fn cell(value: f64) -> String {
    if value.is_finite() {
        format!("{value:.16e}")
    } else {
        value.to_string()
    }
}

pub fn cells(values: &[f64]) -> String {
    values.iter().map(|&v| cell(v)).collect::<Vec<_>>().join(";")
}

pub fn write_csv<W: Write>(out: W, header: &[&str], rows: &[Vec<String>]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}
