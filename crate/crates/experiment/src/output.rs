//! CSV / JSON writers shared by the stages. Floats use Rust's shortest
//! round-trip formatting, so rewriting a loaded table reproduces its bytes.

use std::path::Path;

use ndarray::Array2;
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{ExpError, Result};

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    std::fs::write(path, bytes).map_err(|e| ExpError::io(path, e))
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| ExpError::data(path, e))?;
    text.push('\n');
    write_bytes(path, text.as_bytes())
}

/// Header row written explicitly so empty tables still carry it.
pub fn write_rows<T: Serialize>(path: &Path, header: &[&str], rows: impl IntoIterator<Item = T>) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    w.write_record(header).map_err(|e| ExpError::data(path, e))?;
    for r in rows {
        w.serialize(r).map_err(|e| ExpError::data(path, e))?;
    }
    let bytes = w.into_inner().map_err(|e| ExpError::data(path, e))?;
    write_bytes(path, &bytes)
}

pub fn read_rows<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| ExpError::data(path, e))?;
    r.deserialize().collect::<std::result::Result<_, _>>().map_err(|e| ExpError::data(path, e))
}

/// Labelled matrix with column headers `{prefix}{start}`, `{prefix}{start+1}`, ...
pub fn write_matrix(
    path: &Path,
    first: &str,
    prefix: &str,
    start: usize,
    labels: &[String],
    values: &Array2<f64>,
) -> Result<()> {
    let headers: Vec<String> = (0..values.ncols()).map(|j| format!("{prefix}{}", j + start)).collect();
    write_matrix_named(path, first, &headers, labels, values)
}

pub fn write_matrix_named(
    path: &Path,
    first: &str,
    headers: &[String],
    labels: &[String],
    values: &Array2<f64>,
) -> Result<()> {
    if labels.len() != values.nrows() || headers.len() != values.ncols() {
        return Err(ExpError::data(path, "matrix labels do not match its shape"));
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    let head = std::iter::once(first.to_string()).chain(headers.iter().cloned());
    w.write_record(head).map_err(|e| ExpError::data(path, e))?;
    for (label, row) in labels.iter().zip(values.rows()) {
        let rec = std::iter::once(label.clone()).chain(row.iter().map(|v| v.to_string()));
        w.write_record(rec).map_err(|e| ExpError::data(path, e))?;
    }
    let bytes = w.into_inner().map_err(|e| ExpError::data(path, e))?;
    write_bytes(path, &bytes)
}
