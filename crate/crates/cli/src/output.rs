//! Result tables and their CSV / JSON encodings.
//!
//! Floats are written in Rust's shortest round-trip form, so reading a CSV
//! back gives the same table bit for bit.

use std::io::{Read, Write};
use std::path::Path;

use anyhow::{Context, Result};
use serde::{de::DeserializeOwned, Deserialize, Serialize};

use crate::config::Format;

/// One `(alpha, method)` cell of a sweep. Column order is the CSV header.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub alpha: f64,
    pub method: String,
    pub value: f64,
    pub std_error: f64,
    pub elapsed_ms: f64,
}

/// JSON form of a cell, with the inputs that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub method: String,
    pub alpha: f64,
    pub lambda: f64,
    pub params: serde_json::Value,
    pub value: f64,
    pub std_error: f64,
    pub samples: usize,
    pub elapsed_ms: f64,
}

impl Record {
    pub fn row(&self) -> ResultRow {
        ResultRow {
            alpha: self.alpha,
            method: self.method.clone(),
            value: self.value,
            std_error: self.std_error,
            elapsed_ms: self.elapsed_ms,
        }
    }
}

/// Relation-check report line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRow {
    pub check: String,
    pub alpha: f64,
    pub value: f64,
    pub std_error: f64,
    pub limit: f64,
    pub pass: bool,
}

/// PDE solution sample: time to expiry, spot, value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PdePoint {
    pub t: f64,
    pub z: f64,
    pub value: f64,
}

/// Inverse subordinator sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathPoint {
    pub t: f64,
    #[serde(rename = "S_t")]
    pub s_t: f64,
}

/// Shared-grid trajectory sample of the clock and both subordinated prices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub path: usize,
    pub t: f64,
    #[serde(rename = "S_t")]
    pub s_t: f64,
    pub gbm: f64,
    pub abm: f64,
}

pub fn write_csv<T: Serialize, W: Write>(rows: &[T], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<T: DeserializeOwned, R: Read>(input: R) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_reader(input);
    r.deserialize().map(|row| row.map_err(Into::into)).collect()
}

pub fn to_csv_string<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf)?;
    Ok(String::from_utf8(buf)?)
}

pub fn write_json<T: Serialize, W: Write>(items: &T, mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, items)?;
    writeln!(out)?;
    Ok(())
}

/// Writes `csv_rows` or `json_items` to `path`, or stdout when `path` is `None`.
pub fn emit<C: Serialize, J: Serialize>(
    format: Format,
    path: Option<&Path>,
    csv_rows: &[C],
    json_items: &J,
) -> Result<()> {
    let sink: Box<dyn Write> = match path {
        Some(p) => Box::new(std::io::BufWriter::new(
            std::fs::File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(std::io::stdout().lock()),
    };
    match format {
        Format::Csv => write_csv(csv_rows, sink),
        Format::Json => write_json(json_items, sink),
    }
    .with_context(|| match path {
        Some(p) => format!("writing {}", p.display()),
        None => "writing to stdout".to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn headers_match_the_documented_columns() {
        let row = ResultRow {
            alpha: 0.7,
            method: "MC-CRR".into(),
            value: 1.0,
            std_error: 0.1,
            elapsed_ms: 2.5,
        };
        let text = to_csv_string(&[row]).unwrap();
        assert_eq!(
            text.lines().next(),
            Some("alpha,method,value,std_error,elapsed_ms")
        );
        let text = to_csv_string(&[PdePoint {
            t: 0.0,
            z: 1.0,
            value: 0.0,
        }])
        .unwrap();
        assert_eq!(text.lines().next(), Some("t,z,value"));
        let text = to_csv_string(&[PathPoint { t: 0.0, s_t: 0.0 }]).unwrap();
        assert_eq!(text.lines().next(), Some("t,S_t"));
    }

    #[test]
    fn awkward_floats_round_trip() {
        let rows: Vec<ResultRow> = [
            0.1 + 0.2,
            1.0 / 3.0,
            1e-300,
            5e-324,
            f64::MAX,
            -0.0,
            1.079_216_216_944_695_3,
        ]
        .iter()
        .enumerate()
        .map(|(i, &v)| ResultRow {
            alpha: v,
            method: format!("m{i}"),
            value: v * 7.0,
            std_error: v.abs(),
            elapsed_ms: i as f64 * 0.1,
        })
        .collect();
        let text = to_csv_string(&rows).unwrap();
        let back: Vec<ResultRow> = read_csv(text.as_bytes()).unwrap();
        assert_eq!(back.len(), rows.len());
        for (a, b) in rows.iter().zip(&back) {
            assert_eq!(a.alpha.to_bits(), b.alpha.to_bits());
            assert_eq!(a.value.to_bits(), b.value.to_bits());
            assert_eq!(a, b);
        }
    }
}
