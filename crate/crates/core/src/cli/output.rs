//! CSV files written and read by the command-line tool.

use std::f64::consts::PI;
use std::path::Path;

use crate::diagnostics::{FrontTrace, Scaling};
use crate::error::{Error, Result};
use crate::state::{CellState, Grid1D};

pub const FRONT_HEADER: [&str; 5] = ["t[s]", "R[m]", "A[m2]", "lambda[-]", "tau[-]"];
pub const SNAPSHOT_HEADER: [&str; 7] = ["x[m]", "h1[m]", "rho1[kg/m3]", "u1[m/s]", "h2[m]", "rho2[kg/m3]", "u2[m/s]"];
pub const SWEEP_HEADER: [&str; 6] = ["value", "Fr[-]", "r_squared[-]", "R_final[m]", "steps[-]", "mass_drift[-]"];

fn num(v: f64) -> String {
    format!("{v}")
}

pub fn write_front_csv(path: &Path, trace: &FrontTrace, scaling: &Scaling) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(FRONT_HEADER)?;
    for &(t, r) in trace.samples() {
        w.write_record([num(t), num(r), num(PI * r * r), num(scaling.scale_radius(r)), num(scaling.scale_time(t))])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_snapshot_csv(path: &Path, grid: &Grid1D, field: &[CellState]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(SNAPSHOT_HEADER)?;
    for (x, c) in grid.centers().zip(field) {
        w.write_record([x, c.lower.h, c.lower.rho, c.lower.u, c.upper.h, c.upper.rho, c.upper.u].map(num))?;
    }
    w.flush()?;
    Ok(())
}

/// One row of the sweep summary.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: String,
    pub froude: f64,
    pub r_squared: f64,
    pub final_radius: f64,
    pub steps: u64,
    pub mass_drift: f64,
}

pub fn write_sweep_csv(path: &Path, rows: &[SweepRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(SWEEP_HEADER)?;
    for r in rows {
        w.write_record([
            r.value.clone(),
            num(r.froude),
            num(r.r_squared),
            num(r.final_radius),
            r.steps.to_string(),
            num(r.mass_drift),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// A trace read back from disk; scaled columns are present only in front CSVs.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceFile {
    pub samples: Vec<(f64, f64)>,
    pub scaled: Option<Vec<(f64, f64)>>,
}

impl TraceFile {
    pub fn to_trace(&self, name: &str, h0: f64) -> Result<FrontTrace> {
        FrontTrace::from_samples(name, h0, self.samples.iter().copied())
    }

    /// (τ, Σ = πλ²) pairs.
    pub fn scaled_area(&self) -> Option<Vec<(f64, f64)>> {
        self.scaled.as_ref().map(|s| s.iter().map(|&(lambda, tau)| (tau, PI * lambda * lambda)).collect())
    }
}

/// Reads `t[s],R[m]` plus optional further columns; lines starting with `#` are skipped.
pub fn read_trace_csv(path: &Path) -> Result<TraceFile> {
    let bad = |msg: String| Error::Diagnostics(format!("{}: {msg}", path.display()));
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| bad(e.to_string()))?;
    let headers = reader.headers().map_err(|e| bad(e.to_string()))?.clone();
    let col = |name: &str| headers.iter().position(|h| h == name);
    let (Some(ti), Some(ri)) = (col("t[s]"), col("R[m]")) else {
        return Err(bad(format!("expected columns t[s] and R[m], got {:?}", headers.iter().collect::<Vec<_>>())));
    };
    let scaled_cols = col("lambda[-]").zip(col("tau[-]"));
    let mut samples = Vec::new();
    let mut scaled = Vec::new();
    for (n, record) in reader.records().enumerate() {
        let record = record.map_err(|e| bad(e.to_string()))?;
        let field = |i: usize| -> Result<f64> {
            record
                .get(i)
                .and_then(|s| s.parse::<f64>().ok())
                .ok_or_else(|| bad(format!("row {}: bad number in column {}", n + 1, &headers[i])))
        };
        samples.push((field(ti)?, field(ri)?));
        if let Some((li, tau_i)) = scaled_cols {
            scaled.push((field(li)?, field(tau_i)?));
        }
    }
    if samples.len() < 2 {
        return Err(bad(format!("trace has {} rows, need at least 2", samples.len())));
    }
    Ok(TraceFile { samples, scaled: scaled_cols.map(|_| scaled) })
}
