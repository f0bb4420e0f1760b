//! CSV output with a JSON metadata sidecar.
//!
//! Run files have columns
//! `seed,checkpoint_fraction,iteration,train_loss,train_acc,test_loss,test_acc,case1,case2,case3,wall_ms`,
//! one row per (seed, checkpoint) in seed then checkpoint order; verification
//! files have `k,empirical_gap,standard_error,bound,violated`, one row per
//! `k`. Floats carry 9 significant digits; absent values are empty fields.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::run::RunRecord;
use super::verify::VerifyReport;
use crate::error::{Error, Result};

pub const RUN_HEADER: &str = "seed,checkpoint_fraction,iteration,train_loss,train_acc,test_loss,test_acc,case1,case2,case3,wall_ms";
pub const VERIFY_HEADER: &str = "k,empirical_gap,standard_error,bound,violated";

/// `v` with 9 significant digits.
pub fn fmt_sig9(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.8e}")
    } else {
        v.to_string()
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(fmt_sig9).unwrap_or_default()
}

pub fn run_csv_string(records: &[RunRecord]) -> String {
    let mut s = String::from(RUN_HEADER);
    s.push('\n');
    for r in records {
        for c in &r.checkpoints {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{},{},{},{}",
                r.seed,
                fmt_sig9(c.fraction),
                c.iteration,
                fmt_sig9(c.train_loss),
                opt(c.train_acc),
                opt(c.test_loss),
                opt(c.test_acc),
                c.case_counts[0],
                c.case_counts[1],
                c.case_counts[2],
                opt(c.wall_ms),
            );
        }
    }
    s
}

pub fn verify_csv_string(report: &VerifyReport) -> String {
    let mut s = String::from(VERIFY_HEADER);
    s.push('\n');
    for r in &report.rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            r.k,
            fmt_sig9(r.empirical),
            fmt_sig9(r.standard_error),
            fmt_sig9(r.bound),
            r.violated
        );
    }
    s
}

/// Writes the rows of `records` to `path`.
pub fn emit_run_csv(records: &[RunRecord], path: impl AsRef<Path>) -> Result<()> {
    write(path.as_ref(), &run_csv_string(records))
}

pub fn emit_verify_csv(report: &VerifyReport, path: impl AsRef<Path>) -> Result<()> {
    write(path.as_ref(), &verify_csv_string(report))
}

/// Provenance recorded next to every CSV file.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunMetadata {
    /// SHA-256 of the configuration without its base seed.
    pub config_hash: String,
    pub rng_family: String,
    pub base_seed: u64,
    pub n_seeds: usize,
    pub x1: Vec<f64>,
    /// The configuration in its canonical `key = value` form.
    pub config: String,
}

/// `<path>.meta.json`
pub fn metadata_path(path: &Path) -> PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(".meta.json");
    PathBuf::from(name)
}

pub fn emit_metadata(meta: &RunMetadata, csv_path: impl AsRef<Path>) -> Result<()> {
    let text = serde_json::to_string_pretty(meta)
        .map_err(|e| Error::Data(format!("cannot serialize metadata: {e}")))?;
    write(&metadata_path(csv_path.as_ref()), &(text + "\n"))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}
