//! JSON-lines datasets and predictions, JSON reports and CSV tables.

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::pipeline::{Prediction, Syllogism};

use super::metrics::MetricReport;
use super::EvalError;

fn io_error(path: &Path, e: impl std::fmt::Display) -> EvalError {
    EvalError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

/// One record per non-blank line; errors carry the 1-based line number.
fn read_jsonl<T: DeserializeOwned>(path: &Path, check: impl Fn(&T) -> Result<(), String>) -> Result<Vec<T>, EvalError> {
    let file = File::open(path).map_err(|e| io_error(path, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| io_error(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let schema = |message: String| EvalError::Schema {
            path: path.display().to_string(),
            line: i + 1,
            message,
        };
        let record: T = serde_json::from_str(&line).map_err(|e| schema(e.to_string()))?;
        check(&record).map_err(schema)?;
        out.push(record);
    }
    Ok(out)
}

fn write_jsonl<T: Serialize>(path: &Path, records: &[T]) -> Result<(), EvalError> {
    let mut w = BufWriter::new(File::create(path).map_err(|e| io_error(path, e))?);
    for r in records {
        serde_json::to_writer(&mut w, r).map_err(|e| io_error(path, e))?;
        w.write_all(b"\n").map_err(|e| io_error(path, e))?;
    }
    w.flush().map_err(|e| io_error(path, e))
}

/// Syllogisms, validated record by record, with unique ids.
pub fn load_dataset(path: &Path) -> Result<Vec<Syllogism>, EvalError> {
    let seen = std::cell::RefCell::new(BTreeSet::new());
    read_jsonl(path, |s: &Syllogism| {
        s.validate().map_err(|e| e.to_string())?;
        if !seen.borrow_mut().insert(s.id.clone()) {
            return Err(format!("duplicate id `{}`", s.id));
        }
        Ok(())
    })
}

pub fn save_dataset(path: &Path, data: &[Syllogism]) -> Result<(), EvalError> {
    write_jsonl(path, data)
}

pub fn load_predictions(path: &Path) -> Result<Vec<Prediction>, EvalError> {
    read_jsonl(path, |_: &Prediction| Ok(()))
}

pub fn save_predictions(path: &Path, preds: &[Prediction]) -> Result<(), EvalError> {
    write_jsonl(path, preds)
}

/// The report as one pretty-printed JSON document.
pub fn emit_report(path: &Path, report: &MetricReport) -> Result<(), EvalError> {
    let text = serde_json::to_string_pretty(report).map_err(|e| io_error(path, e))?;
    std::fs::write(path, text + "\n").map_err(|e| io_error(path, e))
}

/// Rows with a header taken from the field names.
pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<(), EvalError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| io_error(path, e))?;
    for r in rows {
        w.serialize(r).map_err(|e| io_error(path, e))?;
    }
    w.flush().map_err(|e| io_error(path, e))
}
