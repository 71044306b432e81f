//! Result CSV files.

use std::fs;
use std::path::Path;

use super::{ExperimentError, ResultRow};

pub const HEADER: [&str; 17] = [
    "method", "N", "tau", "p", "schedule", "fit", "depth", "degree", "ideal", "noisy_mean", "estimate", "variance",
    "bias", "mse", "shots", "seed", "best",
];

/// 17 significant digits, enough to round-trip any `f64`.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn record(row: &ResultRow) -> Vec<String> {
    vec![
        row.method.clone(),
        row.n.to_string(),
        format_float(row.tau),
        format_float(row.p),
        row.schedule.clone(),
        row.fit.clone(),
        row.depth.to_string(),
        row.degree.to_string(),
        format_float(row.ideal),
        format_float(row.noisy_mean),
        format_float(row.estimate),
        format_float(row.variance),
        format_float(row.bias),
        format_float(row.mse),
        row.shots.to_string(),
        row.seed.to_string(),
        row.best.to_string(),
    ]
}

/// Rows in the given order, header first.
pub fn rows_to_csv(rows: &[ResultRow]) -> Result<Vec<u8>, ExperimentError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(HEADER)?;
    for row in rows {
        w.write_record(record(row))?;
    }
    w.into_inner().map_err(|e| ExperimentError::Io(e.into_error()))
}

/// Writes the CSV, creating parent directories as needed.
pub fn emit_csv(rows: &[ResultRow], path: &Path) -> Result<(), ExperimentError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    fs::write(path, rows_to_csv(rows)?)?;
    Ok(())
}

fn field<T: std::str::FromStr>(rec: &csv::StringRecord, i: usize) -> Result<T, ExperimentError> {
    let raw = rec.get(i).unwrap_or("");
    raw.parse().map_err(|_| ExperimentError::Parse(format!("column {} value `{raw}`", HEADER[i])))
}

pub fn parse_csv(text: &str) -> Result<Vec<ResultRow>, ExperimentError> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    if r.headers()?.iter().ne(HEADER) {
        return Err(ExperimentError::Parse("unexpected header".into()));
    }
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        rows.push(ResultRow {
            method: field(&rec, 0)?,
            n: field(&rec, 1)?,
            tau: field(&rec, 2)?,
            p: field(&rec, 3)?,
            schedule: field(&rec, 4)?,
            fit: field(&rec, 5)?,
            depth: field(&rec, 6)?,
            degree: field(&rec, 7)?,
            ideal: field(&rec, 8)?,
            noisy_mean: field(&rec, 9)?,
            estimate: field(&rec, 10)?,
            variance: field(&rec, 11)?,
            bias: field(&rec, 12)?,
            mse: field(&rec, 13)?,
            shots: field(&rec, 14)?,
            seed: field(&rec, 15)?,
            best: field(&rec, 16)?,
        });
    }
    Ok(rows)
}

pub fn read_csv(path: &Path) -> Result<Vec<ResultRow>, ExperimentError> {
    parse_csv(&fs::read_to_string(path)?)
}
