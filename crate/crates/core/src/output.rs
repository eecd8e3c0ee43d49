//! Deterministic JSON and CSV writers. Floats are printed with 17 significant
//! digits in scientific notation; nothing time-dependent is emitted.

use crate::error::{Error, Result};
use serde::Serialize;
use serde_json::ser::Formatter;
use std::io::{self, Write};
use std::path::Path;

/// `{:.16e}` rendering shared by both writers.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn format_optional(v: Option<f64>) -> String {
    v.filter(|x| x.is_finite()).map(format_float).unwrap_or_default()
}

/// Compact JSON (the trait defaults) with fixed float formatting.
struct FixedFloat;

impl Formatter for FixedFloat {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(format_float(value).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

/// Serializes `value` as a single JSON object followed by a newline.
pub fn to_json<T: Serialize>(value: &T) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FixedFloat);
    value
        .serialize(&mut ser)
        .map_err(|e| Error::InvalidInput(format!("JSON serialization failed: {e}")))?;
    buf.push(b'\n');
    Ok(buf)
}

/// CSV with a mandatory header row, ',' separators and '\n' line ends.
pub fn to_csv(header: &[&str], rows: &[Vec<String>]) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let io_err = |e: csv::Error| Error::InvalidInput(format!("CSV serialization failed: {e}"));
    w.write_record(header).map_err(io_err)?;
    for row in rows {
        if row.len() != header.len() {
            return Err(Error::InvalidInput(format!(
                "CSV row has {} fields, header has {}",
                row.len(),
                header.len()
            )));
        }
        w.write_record(row).map_err(io_err)?;
    }
    w.into_inner().map_err(|e| Error::InvalidInput(format!("CSV flush failed: {e}")))
}

/// Writes to `path`, or to stdout when `path` is `None` or "-".
pub fn emit(path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match path {
        Some(p) if p != Path::new("-") => std::fs::write(p, bytes)
            .map_err(|e| Error::InvalidInput(format!("cannot write {}: {e}", p.display()))),
        _ => io::stdout()
            .write_all(bytes)
            .map_err(|e| Error::InvalidInput(format!("cannot write to stdout: {e}"))),
    }
}

/// Natural-unit conventions, attached to every data file.
#[derive(Debug, Clone, Serialize)]
pub struct Units {
    pub hbar: f64,
    pub mass: f64,
    pub harmonic_omega: f64,
    pub poschl_teller_width: f64,
    pub morse_range: f64,
    pub note: &'static str,
}

impl Default for Units {
    fn default() -> Self {
        Self {
            hbar: 1.0,
            mass: 1.0,
            harmonic_omega: 1.0,
            poschl_teller_width: std::f64::consts::PI,
            morse_range: 1.0,
            note: "hbar = m = 1; harmonic omega = 1; Poschl-Teller a = pi (x = sin q); Morse d = 1 (u = exp(-q))",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_have_seventeen_digits() {
        assert_eq!(format_float(0.1), "1.0000000000000001e-1");
        assert_eq!(format_float(-2.0), "-2.0000000000000000e0");
        for v in [0.1, 1.0 / 3.0, 6.02214076e23, -1e-300] {
            assert_eq!(format_float(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(format_optional(None), "");
        assert_eq!(format_optional(Some(f64::NAN)), "");
    }

    #[test]
    fn json_uses_fixed_floats() {
        #[derive(Serialize)]
        struct S {
            a: f64,
            b: Vec<f64>,
            c: Option<f64>,
        }
        let out = to_json(&S { a: 0.5, b: vec![1.0, -3.25], c: None }).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(
            text,
            "{\"a\":5.0000000000000000e-1,\"b\":[1.0000000000000000e0,-3.2500000000000000e0],\"c\":null}\n"
        );
        let back: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(back["b"][1].as_f64(), Some(-3.25));
    }

    #[test]
    fn csv_shape() {
        let out = to_csv(&["a", "b"], &[vec!["1".into(), "x,y".into()]]).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "a,b\n1,\"x,y\"\n");
        assert!(to_csv(&["a"], &[vec![]]).is_err());
    }
}
