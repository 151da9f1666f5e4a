//! Per-solver CSV traces and the JSON run summary.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One trace line. Columns that do not apply to a solver or task are empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub k: usize,
    pub objective: f64,
    /// `objective - f_ref`.
    pub optimality: f64,
    pub certificate: Option<f64>,
    pub certificate_min: Option<f64>,
    pub phi_star: Option<f64>,
    pub nnz: Option<usize>,
    pub atoms: Option<usize>,
    pub rank: Option<usize>,
    pub test_accuracy: Option<f64>,
    pub wall_ns: Option<u64>,
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path.display().to_string(), io),
        other => Error::MalformedLine {
            line: 0,
            reason: format!("{}: {other:?}", path.display()),
        },
    }
}

pub fn write_trace(path: &Path, rows: &[TraceRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    for row in rows {
        w.serialize(row).map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path.display().to_string(), e))
}

pub fn read_trace(path: &Path) -> Result<Vec<TraceRow>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| csv_err(path, e))?;
    let mut rows = Vec::new();
    for (i, rec) in r.deserialize().enumerate() {
        rows.push(rec.map_err(|e: csv::Error| Error::MalformedLine {
            line: i + 2,
            reason: e.to_string(),
        })?);
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReferenceSource {
    /// Closed-form constrained minimizer.
    Analytic,
    /// Smallest objective value seen across all solvers and iterations.
    BestFound,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverSummary {
    pub iterations: usize,
    pub stopped_at: Option<usize>,
    pub fo_calls: usize,
    pub lmo_calls: usize,
    pub final_objective: f64,
    pub final_optimality: f64,
    pub final_certificate: Option<f64>,
    /// Log-log slope of the optimality column over the last 90% of the run.
    pub slope: Option<f64>,
    pub slope_clipped: bool,
    pub wall_seconds: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub name: Option<String>,
    pub task: String,
    pub constraint: String,
    pub radius: f64,
    pub seed: u64,
    pub dataset_hash: Option<String>,
    pub f_ref: f64,
    pub f_ref_source: ReferenceSource,
    pub solvers: BTreeMap<String, SolverSummary>,
    pub warnings: Vec<String>,
}

pub fn write_summary(path: &Path, summary: &Summary) -> Result<()> {
    let mut text = serde_json::to_string_pretty(summary).expect("summary serializes");
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Error::io(path.display().to_string(), e))
}
