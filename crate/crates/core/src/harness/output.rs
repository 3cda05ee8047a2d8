use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bounds::BoundCertificate;
use crate::dynamics::LipschitzEstimate;
use crate::error::{Error, Result};
use crate::estimation::MomentErrorMaxima;
use crate::harness::experiment::SPINUP_PERTURBATION;
use crate::harness::{ExperimentConfig, ExperimentResult};
use crate::state::StateVector;

pub const SUMMARY_FILE: &str = "summary.json";
pub const MANIFEST_FILE: &str = "manifest.json";

/// One written file and its SHA-256 digest.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub file: String,
    pub bytes: u64,
    pub sha256: String,
}

/// Files written by [`write_outputs`], in write order. The manifest itself is
/// saved as `manifest.json` and is not listed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub files: Vec<ManifestEntry>,
}

#[derive(Debug, Clone, Serialize)]
struct Initialization {
    truth: String,
    first_forecast: String,
    streams: [&'static str; 3],
}

/// Scalar results of a run, saved as `summary.json`.
#[derive(Debug, Clone, Serialize)]
struct Summary<'a> {
    config: &'a ExperimentConfig,
    seed: u64,
    initialization: Initialization,
    steps: usize,
    sample_count: usize,
    lipschitz: LipschitzEstimate,
    rms_analysis_error: f64,
    max_analysis_error: f64,
    max_beta_error: f64,
    moment_errors: MomentErrorMaxima,
    certificates: &'a [BoundCertificate],
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn csv_bytes<I>(rows: I, path: &Path) -> Result<Vec<u8>>
where
    I: IntoIterator<Item = Vec<f64>>,
{
    let mut wtr = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(Vec::new());
    for row in rows {
        wtr.serialize(row).map_err(|e| Error::Format {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
    }
    wtr.into_inner().map_err(|e| Error::Format {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

fn vector_rows(states: &[StateVector]) -> impl Iterator<Item = Vec<f64>> + '_ {
    states.iter().map(|s| s.iter().copied().collect())
}

fn matrix_rows(m: &DMatrix<f64>) -> impl Iterator<Item = Vec<f64>> + '_ {
    m.row_iter().map(|r| r.iter().copied().collect())
}

fn column_rows(v: &StateVector) -> impl Iterator<Item = Vec<f64>> + '_ {
    v.iter().map(|&x| vec![x])
}

struct Writer<'a> {
    dir: &'a Path,
    manifest: Manifest,
}

impl Writer<'_> {
    fn put(&mut self, name: &str, bytes: Vec<u8>) -> Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, &bytes).map_err(|e| Error::io(&path, e))?;
        self.manifest.files.push(ManifestEntry {
            file: name.to_string(),
            bytes: bytes.len() as u64,
            sha256: sha256_hex(&bytes),
        });
        Ok(())
    }

    fn csv<I: IntoIterator<Item = Vec<f64>>>(&mut self, name: &str, rows: I) -> Result<()> {
        let bytes = csv_bytes(rows, &self.dir.join(name))?;
        self.put(name, bytes)
    }
}

/// Writes the run's diagnostics to `dir` (created if missing).
///
/// CSV files carry no header and use shortest round-trip float formatting, so
/// reading a value back reproduces it exactly:
///
/// * `truth.csv`, `analysis.csv`, `hovmoller.csv`: one row per step, one
///   column per component; `hovmoller.csv` holds `|x_t - x_a|`.
/// * `beta.csv`, `beta_tilde.csv`: realized and estimated model errors.
/// * `mu_true.csv`, `mu_sampled.csv`, `mu_estimated.csv`: prescribed, sampled
///   and estimated means as a single column.
/// * `Q_true.csv`, `Q_sampled.csv`, `Q_estimated.csv`: the matching
///   covariances, and `Q_err_sampled_true.csv`, `Q_err_sampled_estimated.csv`,
///   `Q_err_true_estimated.csv` with their entry-wise absolute differences.
/// * `summary.json`: config echo, Lipschitz estimate, error scalars, and every
///   certificate.
pub fn write_outputs(result: &ExperimentResult, dir: impl AsRef<Path>) -> Result<Manifest> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut w = Writer {
        dir,
        manifest: Manifest { files: Vec::new() },
    };

    w.csv("truth.csv", vector_rows(result.truth.states()))?;
    w.csv("analysis.csv", vector_rows(result.analysis.states()))?;
    w.csv("hovmoller.csv", vector_rows(&result.hovmoller))?;
    w.csv("beta.csv", vector_rows(result.beta.samples()))?;
    w.csv("beta_tilde.csv", vector_rows(result.beta_tilde.samples()))?;
    w.csv("mu_true.csv", column_rows(&result.prescribed_mean))?;
    w.csv("mu_sampled.csv", column_rows(&result.sampled.mean))?;
    w.csv("mu_estimated.csv", column_rows(&result.estimated.mean))?;
    w.csv("Q_true.csv", matrix_rows(result.prescribed_cov.matrix()))?;
    w.csv("Q_sampled.csv", matrix_rows(result.sampled.cov.matrix()))?;
    w.csv(
        "Q_estimated.csv",
        matrix_rows(result.estimated.cov.matrix()),
    )?;
    w.csv(
        "Q_err_sampled_true.csv",
        matrix_rows(&result.report.cov_sampled_vs_prescribed),
    )?;
    w.csv(
        "Q_err_sampled_estimated.csv",
        matrix_rows(&result.report.cov_sampled_vs_estimated),
    )?;
    w.csv(
        "Q_err_true_estimated.csv",
        matrix_rows(&result.report.cov_prescribed_vs_estimated),
    )?;

    let summary = Summary {
        config: &result.config,
        seed: result.config.seed,
        initialization: Initialization {
            truth: format!(
                "equilibrium with component 1 offset by {SPINUP_PERTURBATION}, integrated {} steps",
                result.config.spinup_steps
            ),
            first_forecast: "initial truth plus a N(0, I) draw from the init stream".into(),
            streams: ["model-error", "observation-noise", "init"],
        },
        steps: result.truth.len(),
        sample_count: result.beta.len(),
        lipschitz: result.lipschitz,
        rms_analysis_error: result.rms_analysis_error(),
        max_analysis_error: result.max_analysis_error(),
        max_beta_error: result.max_beta_error(),
        moment_errors: result.report.maxima(),
        certificates: &result.certificates,
    };
    let mut json = serde_json::to_vec_pretty(&summary).map_err(|e| Error::Format {
        path: dir.join(SUMMARY_FILE),
        message: e.to_string(),
    })?;
    json.push(b'\n');
    w.put(SUMMARY_FILE, json)?;

    let manifest = w.manifest;
    let mut json = serde_json::to_vec_pretty(&manifest).expect("manifest serializes");
    json.push(b'\n');
    let path = dir.join(MANIFEST_FILE);
    fs::write(&path, json).map_err(|e| Error::io(&path, e))?;
    Ok(manifest)
}

/// Reads a headerless numeric CSV written by [`write_outputs`].
pub fn read_csv_matrix(path: impl AsRef<Path>) -> Result<DMatrix<f64>> {
    let path = path.as_ref();
    let format_err = |message: String| Error::Format {
        path: path.to_path_buf(),
        message,
    };
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .from_path(path)
        .map_err(|e| format_err(e.to_string()))?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for rec in rdr.deserialize() {
        rows.push(rec.map_err(|e| format_err(e.to_string()))?);
    }
    let ncols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(format_err("ragged rows".into()));
    }
    Ok(DMatrix::from_row_iterator(
        rows.len(),
        ncols,
        rows.into_iter().flatten(),
    ))
}

/// Reads `manifest.json` from a run directory.
pub fn read_manifest(dir: impl AsRef<Path>) -> Result<Manifest> {
    let path = dir.as_ref().join(MANIFEST_FILE);
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Format {
        path,
        message: e.to_string(),
    })
}

/// Recomputes every digest in the manifest and returns the files that differ.
pub fn verify_manifest(dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    let manifest = read_manifest(dir)?;
    let mut mismatched = Vec::new();
    for entry in &manifest.files {
        let path = dir.join(&entry.file);
        let bytes = fs::read(&path).map_err(|e| Error::io(&path, e))?;
        if sha256_hex(&bytes) != entry.sha256 {
            mismatched.push(path);
        }
    }
    Ok(mismatched)
}
