//! CSV and JSON output.
//!
//! Numbers are written in Rust's shortest round-trip form, so a file is a
//! pure function of its values.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use exlimit_core::verify::{ComparisonReport, SweepPoint};
use exlimit_core::{EmpiricalCdf, ModelSummary};
use serde::Serialize;

pub const LIMIT_HEADER: &str = "x,theoretical";
pub const SIMULATE_HEADER: &str = "x,empirical";
pub const VERIFY_HEADER: &str = "x,empirical,theoretical,abs_diff";
pub const SWEEP_HEADER: &str = "n,sup_distance";
pub const QUANTILE_HEADER: &str = "probability,quantile";

pub const QUANTILE_LEVELS: [f64; 9] = [0.01, 0.05, 0.1, 0.25, 0.5, 0.75, 0.9, 0.95, 0.99];

fn num(v: f64) -> String {
    format!("{v:?}")
}

pub fn limit_csv(x: &[f64], theoretical: &[f64]) -> String {
    let mut s = String::from(LIMIT_HEADER);
    s.push('\n');
    for (x, t) in x.iter().zip(theoretical) {
        writeln!(s, "{},{}", num(*x), num(*t)).unwrap();
    }
    s
}

pub fn simulate_csv(x: &[f64], empirical: &[f64]) -> String {
    let mut s = String::from(SIMULATE_HEADER);
    s.push('\n');
    for (x, e) in x.iter().zip(empirical) {
        writeln!(s, "{},{}", num(*x), num(*e)).unwrap();
    }
    s
}

pub fn quantile_csv(ecdf: &EmpiricalCdf) -> String {
    let mut s = String::from(QUANTILE_HEADER);
    s.push('\n');
    for p in QUANTILE_LEVELS {
        let q = ecdf.quantile(p).expect("levels lie in [0, 1] and the batch is non-empty");
        writeln!(s, "{},{}", num(p), num(q)).unwrap();
    }
    s
}

pub fn verify_csv(report: &ComparisonReport) -> String {
    let mut s = String::from(VERIFY_HEADER);
    s.push('\n');
    for (((x, e), t), d) in report
        .x_grid
        .iter()
        .zip(&report.empirical)
        .zip(&report.theoretical)
        .zip(report.abs_diff())
    {
        writeln!(s, "{},{},{},{}", num(*x), num(*e), num(*t), num(d)).unwrap();
    }
    s
}

pub fn sweep_csv(points: &[SweepPoint]) -> String {
    let mut s = String::from(SWEEP_HEADER);
    s.push('\n');
    for p in points {
        writeln!(s, "{},{}", p.n, num(p.sup_distance)).unwrap();
    }
    s
}

/// Contents of the `<output>.summary.json` sidecar.
#[derive(Debug, Clone, Serialize)]
pub struct RunSummary {
    pub name: String,
    pub mode: String,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    pub replications: u64,
    pub model_summary: ModelSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sup_distance: Option<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub excluded_points: Vec<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub sweep: Vec<SweepPoint>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub assert_tolerance: Option<f64>,
    pub runtime_seconds: f64,
}

/// `out.csv` → `out.<suffix>`.
pub fn sidecar_path(output: &Path, suffix: &str) -> PathBuf {
    output.with_extension(suffix)
}
