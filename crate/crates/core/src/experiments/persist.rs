//! Rows as CSV, everything else as a JSON sidecar next to it.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use super::{Row, SweepResult};
use crate::error::{Error, Result};

/// Bumped whenever the CSV columns or the sidecar layout change.
pub const SCHEMA_VERSION: u32 = 1;

pub const CSV_HEADER: [&str; 12] = [
    "experiment",
    "replicate",
    "n",
    "N",
    "c_or_beta",
    "W",
    "W_tilde",
    "d_n",
    "d_tilde_n",
    "Delta",
    "delta",
    "connected",
];

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    Ok(BufWriter::new(File::create(path).map_err(|e| Error::io(path, e))?))
}

/// Header line always, then one line per row; empty cells for absent values.
pub fn write_rows(rows: &[Row], path: &Path) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(create(path)?);
    w.write_record(CSV_HEADER)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

pub fn read_rows(path: &Path) -> Result<Vec<Row>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut r = csv::Reader::from_reader(file);
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != CSV_HEADER {
        return Err(Error::InvalidParameter(format!(
            "{}: unexpected CSV header {}",
            path.display(),
            header.join(",")
        )));
    }
    r.deserialize().map(|row| row.map_err(Error::from)).collect()
}

fn sidecar(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("json")
}

/// Writes `csv_path` and the sidecar with the same stem and a `.json`
/// extension; returns the sidecar path.
pub fn persist(result: &SweepResult, csv_path: &Path) -> Result<PathBuf> {
    write_rows(&result.rows, csv_path)?;
    let json_path = sidecar(csv_path);
    let mut w = create(&json_path)?;
    serde_json::to_writer_pretty(&mut w, result)?;
    w.write_all(b"\n").map_err(|e| Error::io(&json_path, e))?;
    w.flush().map_err(|e| Error::io(&json_path, e))?;
    Ok(json_path)
}

pub fn load(csv_path: &Path) -> Result<SweepResult> {
    let json_path = sidecar(csv_path);
    let text = fs::read_to_string(&json_path).map_err(|e| Error::io(&json_path, e))?;
    let mut result: SweepResult = serde_json::from_str(&text)?;
    if result.schema_version != SCHEMA_VERSION {
        return Err(Error::InvalidParameter(format!(
            "{}: schema version {} (expected {SCHEMA_VERSION})",
            json_path.display(),
            result.schema_version
        )));
    }
    result.rows = read_rows(csv_path)?;
    Ok(result)
}
