//! Artifact writers. Every float goes out with 17 significant digits so a
//! rerun can be compared bit for bit.

use std::io::{self, Write};
use std::path::Path;

use bdies_core::verification::StudyRow;
use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::CliError;

pub const CSV_HEADER: [&str; 9] = [
    "n_boundary",
    "n_t",
    "n_s",
    "err_u_max",
    "err_u_l2",
    "err_psi_max",
    "order",
    "cond",
    "seconds",
];

pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Pretty JSON with full-precision floats.
struct Precise<'a>(PrettyFormatter<'a>);

impl Formatter for Precise<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        w.write_all(format_f64(v).as_bytes())
    }
    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, v: f32) -> io::Result<()> {
        self.write_f64(w, v as f64)
    }
    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn to_json_string(value: &impl Serialize) -> Result<String, CliError> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, Precise(PrettyFormatter::new()));
    value.serialize(&mut ser).map_err(|e| CliError::Io(e.to_string()))?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}

pub fn write_json(path: &Path, value: &impl Serialize) -> Result<(), CliError> {
    let text = to_json_string(value)?;
    std::fs::write(path, text).map_err(|e| CliError::Io(format!("writing {}: {e}", path.display())))
}

pub fn write_errors_csv(path: &Path, rows: &[StudyRow]) -> Result<(), CliError> {
    let io_err = |e: csv::Error| CliError::Io(format!("writing {}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(io_err)?;
    w.write_record(CSV_HEADER).map_err(io_err)?;
    for r in rows {
        w.write_record([
            r.n_boundary.to_string(),
            r.n_t.to_string(),
            r.n_s.to_string(),
            format_f64(r.err_u_max),
            format_f64(r.err_u_l2),
            format_f64(r.err_psi_max),
            r.order.map(format_f64).unwrap_or_default(),
            format_f64(r.cond),
            format_f64(r.seconds),
        ])
        .map_err(io_err)?;
    }
    w.flush()
        .map_err(|e| CliError::Io(format!("writing {}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_keep_seventeen_digits() {
        let x = 0.1 + 0.2;
        let s = format_f64(x);
        assert_eq!(s, "3.0000000000000004e-1");
        assert_eq!(s.parse::<f64>().unwrap(), x);
        let json = to_json_string(&serde_json::json!({"a": x, "n": 3, "bad": f64::NAN})).unwrap();
        assert!(json.contains("\"a\": 3.0000000000000004e-1"), "{json}");
        assert!(json.contains("\"n\": 3"));
        assert!(json.contains("\"bad\": null"));
        let back: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(back["a"].as_f64(), Some(x));
    }
}
