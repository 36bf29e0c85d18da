//! Flat-file output of a run: one CSV row per round plus a TOML summary.
//!
//! Floats are written in Rust's shortest round-trip exponent form, so the
//! same trace always produces the same bytes. Flags are `1`/`0`, or empty
//! when the relation is not checked for that row.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::engine::{CheckFlags, RoundDiagnostics};
use crate::error::HarnessError;
use crate::harness::Trace;
use crate::regularity::RegularityReport;

pub const FLAG_COLUMNS: [&str; 6] = [
    "agent_descent_ok",
    "sum_identity_ok",
    "sum_lower_bound_ok",
    "aggregate_descent_ok",
    "step_energy_ok",
    "contraction_ok",
];

/// Rows with `V` at or below this are left out of the rate fit.
pub const FIT_FLOOR: f64 = 1e-300;

fn num(v: f64) -> String {
    format!("{v:e}")
}

fn flag(v: Option<bool>) -> String {
    match v {
        Some(true) => "1".into(),
        Some(false) => "0".into(),
        None => String::new(),
    }
}

fn flag_values(flags: Option<&CheckFlags>) -> [Option<bool>; 6] {
    match flags {
        None => [None; 6],
        Some(f) => [
            Some(f.agent_descent),
            Some(f.sum_identity),
            Some(f.sum_lower_bound),
            f.aggregate_descent,
            Some(f.step_energy),
            f.contraction,
        ],
    }
}

pub fn header(trace: &Trace) -> Vec<String> {
    let mut cols: Vec<String> = ["t", "V", "min_Vi", "max_Vi", "sum_phi", "sum_S", "sum_psi"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    cols.extend(FLAG_COLUMNS.iter().map(|s| s.to_string()));
    cols.extend(trace.final_states.iter().map(|s| format!("dist_{}", s.id)));
    cols
}

fn record(row: &RoundDiagnostics) -> Vec<String> {
    let min = row.v_i.iter().copied().fold(f64::INFINITY, f64::min);
    let max = row.v_i.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let step = row.step.as_ref();
    let opt = |v: Option<f64>| v.map(num).unwrap_or_default();
    let mut out = vec![
        row.t.to_string(),
        num(row.v),
        num(min),
        num(max),
        opt(step.map(|s| s.sum_phi)),
        opt(step.map(|s| s.sum_s)),
        opt(step.map(|s| s.sum_psi)),
    ];
    out.extend(flag_values(step.map(|s| &s.flags)).into_iter().map(flag));
    out.extend(row.v_i.iter().map(|v| num(v.sqrt())));
    out
}

pub fn write_trace_to<W: Write>(trace: &Trace, out: W) -> Result<(), HarnessError> {
    if trace.rows.is_empty() {
        return Err(HarnessError::TooFewPoints(0));
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header(trace))?;
    for row in &trace.rows {
        w.write_record(record(row))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_trace(trace: &Trace, path: impl AsRef<Path>) -> Result<(), HarnessError> {
    let file = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_trace_to(trace, file)
}

pub fn trace_to_string(trace: &Trace) -> Result<String, HarnessError> {
    let mut buf = Vec::new();
    write_trace_to(trace, &mut buf)?;
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}

/// Per-round factor `exp(slope)` of the least-squares line through `(t, ln V(t))`.
pub fn fit_rate(rows: &[RoundDiagnostics]) -> Result<f64, HarnessError> {
    fit_rate_values(rows.iter().map(|r| (r.t as f64, r.v)))
}

pub fn fit_rate_values(points: impl IntoIterator<Item = (f64, f64)>) -> Result<f64, HarnessError> {
    let pts: Vec<(f64, f64)> = points
        .into_iter()
        .filter(|(_, v)| *v > FIT_FLOOR)
        .map(|(t, v)| (t, v.ln()))
        .collect();
    if pts.len() < 2 {
        return Err(HarnessError::TooFewPoints(pts.len()));
    }
    let n = pts.len() as f64;
    let mean_t = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|(t, y)| (t - mean_t) * (y - mean_y)).sum();
    let sxx: f64 = pts.iter().map(|(t, _)| (t - mean_t) * (t - mean_t)).sum();
    Ok((sxy / sxx).exp())
}

#[derive(Serialize)]
struct Summary<'a> {
    rounds: usize,
    alpha: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    rho: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    fitted_rate: Option<f64>,
    initial_v: f64,
    final_v: f64,
    failed_checks: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    report: Option<&'a RegularityReport>,
}

/// Run metadata and the regularity report as a small TOML document.
pub fn summary_toml(trace: &Trace) -> Result<String, HarnessError> {
    let summary = Summary {
        rounds: trace.rows.len().saturating_sub(1),
        alpha: trace.alpha,
        rho: trace.rho,
        fitted_rate: trace.fitted_rate,
        initial_v: trace.rows.first().map_or(0.0, |r| r.v),
        final_v: trace.rows.last().map_or(0.0, |r| r.v),
        failed_checks: trace.failed_checks().into_iter().map(String::from).collect(),
        report: trace.report.as_ref(),
    };
    Ok(toml::to_string(&summary)?)
}
