//! CSV and JSON persistence of result rows.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::ResultRow;
use crate::error::{invalid, Error, Result};

/// CSV header, in column order.
pub const CSV_HEADER: &str =
    "experiment,scheme,snr_db,k,b,l,slicing,trials,mse,nmse,ci95,latency_s,seed";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
    /// `<stem>.csv` and `<stem>.json` side by side.
    Both,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn write_csv(rows: &[ResultRow], path: &Path) -> Result<()> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = csv::Writer::from_writer(BufWriter::new(file));
    for row in rows {
        w.serialize(row).map_err(|e| Error::Format {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
    }
    w.flush().map_err(io_err(path))
}

fn write_json(rows: &[ResultRow], path: &Path) -> Result<()> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, rows).map_err(|e| Error::Format {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    w.write_all(b"\n").map_err(io_err(path))?;
    w.flush().map_err(io_err(path))
}

/// Writes `rows` and returns the paths written.
pub fn emit(rows: &[ResultRow], path: &Path, format: OutputFormat) -> Result<Vec<PathBuf>> {
    if rows.is_empty() {
        return Err(invalid("no rows to write"));
    }
    match format {
        OutputFormat::Csv => write_csv(rows, path).map(|_| vec![path.to_path_buf()]),
        OutputFormat::Json => write_json(rows, path).map(|_| vec![path.to_path_buf()]),
        OutputFormat::Both => {
            let csv = path.with_extension("csv");
            let json = path.with_extension("json");
            write_csv(rows, &csv)?;
            write_json(rows, &json)?;
            Ok(vec![csv, json])
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(i: usize) -> ResultRow {
        ResultRow {
            experiment: "sweep-snr".into(),
            scheme: "digital-map".into(),
            snr_db: i as f64,
            k: 10,
            b: 6,
            l: 6,
            slicing: "1-1-1-1-1-1".into(),
            trials: 100,
            mse: 0.1 / (i + 1) as f64,
            nmse: 0.02,
            ci95: 1e-3,
            latency_s: 0.544512,
            seed: 42,
        }
    }

    #[test]
    fn csv_header_and_json_mirror() {
        let dir = tempfile::tempdir().unwrap();
        let rows: Vec<_> = (0..5).map(row).collect();
        let paths = emit(&rows, &dir.path().join("out"), OutputFormat::Both).unwrap();
        let csv = std::fs::read_to_string(&paths[0]).unwrap();
        assert_eq!(csv.lines().next().unwrap(), CSV_HEADER);
        assert_eq!(csv.lines().count(), 6);
        let json: Vec<ResultRow> =
            serde_json::from_str(&std::fs::read_to_string(&paths[1]).unwrap()).unwrap();
        assert_eq!(json, rows);
        let mut r = csv::Reader::from_path(&paths[0]).unwrap();
        let back: Vec<ResultRow> = r.deserialize().map(|x| x.unwrap()).collect();
        assert_eq!(back, rows);
    }

    #[test]
    fn byte_identical_rewrite() {
        let dir = tempfile::tempdir().unwrap();
        let rows: Vec<_> = (0..3).map(row).collect();
        let p = dir.path().join("a.csv");
        emit(&rows, &p, OutputFormat::Csv).unwrap();
        let first = std::fs::read(&p).unwrap();
        emit(&rows, &p, OutputFormat::Csv).unwrap();
        assert_eq!(first, std::fs::read(&p).unwrap());
    }

    #[test]
    fn errors_carry_path() {
        let err = emit(
            &[row(0)],
            Path::new("/nonexistent/dir/x.csv"),
            OutputFormat::Csv,
        )
        .unwrap_err();
        assert!(err.to_string().contains("/nonexistent/dir/x.csv"));
        assert!(emit(&[], Path::new("x.csv"), OutputFormat::Csv).is_err());
    }
}
