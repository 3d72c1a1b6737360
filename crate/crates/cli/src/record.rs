//! Output records. Floats are written as `{:.16e}` (17 significant digits),
//! so equal runs give equal bytes and values round-trip exactly.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

use crate::error::CliError;

/// A float serialized with fixed scientific precision; non-finite values
/// become `null`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sci(pub f64);

pub fn sci(x: f64) -> String {
    format!("{x:.16e}")
}

impl Serialize for Sci {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return s.serialize_none();
        }
        RawValue::from_string(sci(self.0))
            .map_err(serde::ser::Error::custom)?
            .serialize(s)
    }
}

pub fn sci_array<const N: usize>(v: [f64; N]) -> [Sci; N] {
    v.map(Sci)
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut text =
        serde_json::to_string_pretty(value).map_err(|e| CliError::Output(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

/// CSV from a header and rows of already formatted cells.
pub fn to_csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = header.join(",");
    out.push('\n');
    for row in rows {
        let _ = writeln!(out, "{}", row.join(","));
    }
    out
}

/// Writes to `path`, or to stdout when there is none.
pub fn emit(text: &str, path: Option<&Path>) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text)
            .map_err(|e| CliError::Output(format!("cannot write {}: {e}", p.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Output(e.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize)]
    struct Row {
        x: Sci,
        v: [Sci; 2],
    }

    #[test]
    fn fixed_precision_round_trips() {
        let row = Row {
            x: Sci(0.1),
            v: sci_array([1e-300, f64::NAN]),
        };
        let text = to_json(&row).unwrap();
        assert!(text.contains("\"x\": 1.0000000000000001e-1"));
        assert!(text.contains("null"));
        let back: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(back["x"].as_f64(), Some(0.1));
        for x in [1e-300, 0.1 + 0.2, -7.25e17, f64::MIN_POSITIVE, std::f64::consts::PI] {
            assert_eq!(sci(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(sci(-2.5), "-2.5000000000000000e0");
    }

    #[test]
    fn csv_layout() {
        let text = to_csv(&["a", "b"], &[vec!["1".into(), "2".into()]]);
        assert_eq!(text, "a,b\n1,2\n");
    }
}
