//! CSV and JSON persistence of sweep results.
//!
//! The CSV schema is fixed:
//! `method,snr_db,trial,seed,spectral_efficiency,tx_power,interference_power,power_violation,interference_violation,iterations,termination`
//! with one row per (method, SNR, trial) cell, failed cells included with
//! empty numeric fields. Rows are ordered by the spec's method order, then
//! the SNR grid, then trial index, so a rerun with the same spec produces
//! byte-identical output.

use std::io::Write;
use std::path::Path;

use crate::run::{SweepResult, TrialRecord};
use crate::spec::Method;
use crate::{Result, SimError};

pub const CSV_HEADER: &str = "method,snr_db,trial,seed,spectral_efficiency,tx_power,\
interference_power,power_violation,interference_violation,iterations,termination";

fn csv_row(record: &TrialRecord) -> String {
    let (iterations, termination) = match &record.convergence {
        Some(c) => (c.iterations, c.termination.to_string()),
        None => (0, "direct".to_string()),
    };
    format!(
        "{},{},{},{},{},{},{},{},{},{},{}",
        record.method.name(),
        record.snr_db,
        record.trial,
        record.seed,
        record.report.spectral_efficiency,
        record.report.tx_power,
        record.report.interference_power,
        record.report.power_violation,
        record.report.interference_violation,
        iterations,
        termination
    )
}

/// Renders the whole result as CSV text.
pub fn to_csv(result: &SweepResult) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for &method in &result.spec.methods {
        for &snr in &result.spec.snr_grid_db {
            for trial in 0..result.spec.num_trials {
                if let Some(record) = result
                    .records
                    .iter()
                    .find(|r| r.method == method && r.snr_db == snr && r.trial == trial)
                {
                    out.push_str(&csv_row(record));
                    out.push('\n');
                } else if let Some(failure) = result
                    .failures
                    .iter()
                    .find(|f| f.method == method && f.snr_db == snr && f.trial == trial)
                {
                    out.push_str(&format!(
                        "{},{},{},{},,,,,,,failed\n",
                        method.name(),
                        snr,
                        trial,
                        failure.seed
                    ));
                }
            }
        }
    }
    out
}

pub fn write_csv(result: &SweepResult, path: &Path) -> Result<()> {
    let mut file = std::fs::File::create(path).map_err(|source| SimError::Io {
        path: path.display().to_string(),
        source,
    })?;
    file.write_all(to_csv(result).as_bytes())
        .map_err(|source| SimError::Io {
            path: path.display().to_string(),
            source,
        })
}

pub fn write_json(result: &SweepResult, path: &Path) -> Result<()> {
    let text = serde_json::to_string_pretty(result).expect("result serializes");
    std::fs::write(path, text).map_err(|source| SimError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Reads a previously exported JSON result back.
pub fn read_json(path: &Path) -> Result<SweepResult> {
    let text = std::fs::read_to_string(path).map_err(|source| SimError::Io {
        path: path.display().to_string(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|e| SimError::Parse {
        path: path.display().to_string(),
        detail: e.to_string(),
    })
}

/// `a:b:step` SNR grid syntax used by the CLI.
pub fn parse_snr_range(text: &str) -> std::result::Result<Vec<f64>, String> {
    let parts: Vec<&str> = text.split(':').collect();
    match parts.as_slice() {
        [single] => single
            .parse::<f64>()
            .map(|v| vec![v])
            .map_err(|e| e.to_string()),
        [a, b, step] => {
            let a: f64 = a.parse().map_err(|e: std::num::ParseFloatError| e.to_string())?;
            let b: f64 = b.parse().map_err(|e: std::num::ParseFloatError| e.to_string())?;
            let step: f64 = step
                .parse()
                .map_err(|e: std::num::ParseFloatError| e.to_string())?;
            if step <= 0.0 {
                return Err("step must be positive".into());
            }
            let mut grid = Vec::new();
            let mut v = a;
            while v <= b + 1e-9 {
                grid.push(v);
                v += step;
            }
            if grid.is_empty() {
                return Err("empty SNR range".into());
            }
            Ok(grid)
        }
        _ => Err("expected a single value or a:b:step".into()),
    }
}

#[allow(dead_code)]
fn _method_is_exhaustive(m: Method) {
    match m {
        Method::Digital | Method::HybridMi | Method::HybridFrob => {}
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snr_range_parses() {
        assert_eq!(parse_snr_range("10").unwrap(), vec![10.0]);
        assert_eq!(parse_snr_range("-5:5:5").unwrap(), vec![-5.0, 0.0, 5.0]);
        assert!(parse_snr_range("5:1:-1").is_err());
        assert!(parse_snr_range("a:b").is_err());
    }
}
