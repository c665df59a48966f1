//! CSV and JSON output with an embedded run configuration, and curve files.
//!
//! CSV files start with `# ` comment lines carrying the configuration as a
//! single JSON object; readers skip them.

use crate::error::{Error, Result};
use crate::geometry::PlanarCurve;
use serde_json::{Map, Value};
use std::io::{Read, Write};
use std::path::Path;

/// Formats a number with 12 significant digits in shortest round-trip form.
pub fn sig12(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let rounded: f64 = format!("{x:.11e}").parse().unwrap_or(x);
    if rounded != 0.0 && !(1e-4..1e15).contains(&rounded.abs()) {
        format!("{rounded:e}")
    } else {
        format!("{rounded}")
    }
}

/// Reads the two coordinate columns of a curve file. Accepts `s,x,y` or
/// `s,rho,z` rows (the first column is ignored) and bare `x,y` rows.
pub fn read_curve_rows<R: Read>(reader: R) -> Result<Vec<[f64; 2]>> {
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).trim(csv::Trim::All).from_reader(reader);
    let width = rdr.headers()?.len();
    if !(2..=3).contains(&width) {
        return Err(Error::Format(format!("curve file needs 2 or 3 columns, found {width}")));
    }
    let mut pts = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let get = |i: usize| -> Result<f64> {
            rec.get(i).and_then(|s| s.parse().ok()).ok_or_else(|| Error::Format(format!("row {}: bad number in column {}", line + 1, i + 1)))
        };
        pts.push([get(width - 2)?, get(width - 1)?]);
    }
    Ok(pts)
}

pub fn read_curve_csv(path: &Path) -> Result<Vec<[f64; 2]>> {
    let file = std::fs::File::open(path).map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
    read_curve_rows(file)
}

/// Writes a table with the config block on top.
pub fn write_csv<W: Write>(w: W, config: &Value, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    write_csv_blocks(w, &[("config", config)], header, rows)
}

/// Writes a table preceded by one `# key: {json}` line per block.
pub fn write_csv_blocks<W: Write>(mut w: W, blocks: &[(&str, &Value)], header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    for (key, value) in blocks {
        writeln!(w, "# {key}: {}", serde_json::to_string(value).map_err(|e| Error::Format(e.to_string()))?)?;
    }
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(header)?;
    for r in rows {
        if r.len() != header.len() {
            return Err(Error::Format(format!("row has {} fields, header has {}", r.len(), header.len())));
        }
        wtr.write_record(r)?;
    }
    wtr.flush()?;
    Ok(())
}

/// Writes a curve as `s,x,y` rows closed by a repeat of the first node.
pub fn write_curve_csv<W: Write>(w: W, config: &Value, curve: &PlanarCurve) -> Result<()> {
    write_csv(w, config, &["s", "x", "y"], &curve_rows(curve))
}

/// `s,x,y` rows of a curve at 12 significant digits.
pub fn curve_rows(curve: &PlanarCurve) -> Vec<Vec<String>> {
    curve.to_rows().iter().map(|r| r.iter().map(|v| sig12(*v)).collect()).collect()
}

/// Merges `config` under the key `config` into a JSON object payload.
pub fn with_config(config: &Value, payload: Value) -> Value {
    let mut out = Map::new();
    out.insert("config".into(), config.clone());
    match payload {
        Value::Object(m) => out.extend(m),
        other => {
            out.insert("result".into(), other);
        }
    }
    Value::Object(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(sig12(0.63561400206471), "0.635614002065");
        assert_eq!(sig12(1.0), "1");
        assert_eq!(sig12(-2.5e-13), "-2.5e-13");
    }

    #[test]
    fn curve_round_trip_through_csv() {
        let c = PlanarCurve::circle(1.5, 64).unwrap();
        let mut buf = Vec::new();
        write_curve_csv(&mut buf, &json!({"seed": 7}), &c).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# config: {\"seed\":7}\ns,x,y\n"));
        let pts = read_curve_rows(buf.as_slice()).unwrap();
        assert_eq!(pts.len(), 65);
        let back = PlanarCurve::from_closed_polyline(pts, true).unwrap();
        let err = back.points().iter().zip(c.points()).map(|(a, b)| (a[0] - b[0]).abs().max((a[1] - b[1]).abs())).fold(0.0, f64::max);
        assert!(err < 1e-11);
    }

    #[test]
    fn rejects_ragged_rows() {
        let bad = "s,x,y\n0,1,zz\n";
        assert!(matches!(read_curve_rows(bad.as_bytes()), Err(Error::Format(_))));
    }
}
