use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::harness::output::SUMMARY_FILE;

/// One scalar from both runs and `a / b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatioEntry {
    pub a: f64,
    pub b: f64,
    pub ratio: f64,
}

impl RatioEntry {
    fn new(a: f64, b: f64) -> Self {
        RatioEntry { a, b, ratio: a / b }
    }
}

/// Side-by-side error scalars of two runs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub rms_analysis_error: RatioEntry,
    pub max_analysis_error: RatioEntry,
    pub max_beta_error: RatioEntry,
    /// `max_i |mu_i - mu~_i|`.
    pub mean_estimate_error: RatioEntry,
    /// `max_ij |Q_ij - Q~_ij|`.
    pub cov_estimate_error: RatioEntry,
    /// `max_ij |Q_ij - Q-bar_ij|`.
    pub cov_sampling_error: RatioEntry,
}

fn load_summary(dir: &Path) -> Result<Value> {
    let path = dir.join(SUMMARY_FILE);
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Format {
        path,
        message: e.to_string(),
    })
}

fn scalar(summary: &Value, pointer: &str, dir: &Path) -> Result<f64> {
    summary
        .pointer(pointer)
        .and_then(Value::as_f64)
        .ok_or_else(|| Error::Format {
            path: dir.join(SUMMARY_FILE),
            message: format!("missing numeric field {pointer}"),
        })
}

/// Compares the summaries of two run directories.
pub fn compare_runs(a: impl AsRef<Path>, b: impl AsRef<Path>) -> Result<Comparison> {
    let (a, b) = (a.as_ref(), b.as_ref());
    let (sa, sb) = (load_summary(a)?, load_summary(b)?);
    let entry = |pointer: &str| -> Result<RatioEntry> {
        Ok(RatioEntry::new(
            scalar(&sa, pointer, a)?,
            scalar(&sb, pointer, b)?,
        ))
    };
    Ok(Comparison {
        rms_analysis_error: entry("/rms_analysis_error")?,
        max_analysis_error: entry("/max_analysis_error")?,
        max_beta_error: entry("/max_beta_error")?,
        mean_estimate_error: entry("/moment_errors/mean_sampled_vs_estimated")?,
        cov_estimate_error: entry("/moment_errors/cov_sampled_vs_estimated")?,
        cov_sampling_error: entry("/moment_errors/cov_sampled_vs_prescribed")?,
    })
}
