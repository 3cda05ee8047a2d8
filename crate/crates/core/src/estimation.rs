//! Model-error residuals and their sample moments.
//!
//! A trajectory of `tau` states yields `tau - 1` residuals
//! `x^{k+1} - f(x^k)`. Moments are taken over whatever samples the sequence
//! holds: the mean divides by the sample count, the covariance by one less.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::dynamics::ModelMap;
use crate::error::{Error, Result};
use crate::state::{inf_norm, StateVector, Trajectory};
use crate::stochastic::CovarianceMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SequenceKind {
    /// Realized model errors `beta^k` of the truth.
    TrueBeta,
    /// Residual estimates `x_a^{k+1} - f(x_a^k)`.
    EstimatedBeta,
}

/// Per-timestep model-error vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorSequence {
    samples: Vec<StateVector>,
    kind: SequenceKind,
}

impl ErrorSequence {
    pub fn new(samples: Vec<StateVector>, kind: SequenceKind) -> Result<Self> {
        if let Some(first) = samples.first() {
            let n = first.len();
            if let Some(k) = samples.iter().position(|s| s.len() != n) {
                return Err(Error::validation(format!(
                    "sample {k} has dimension {} (expected {n})",
                    samples[k].len()
                )));
            }
        }
        Ok(ErrorSequence { samples, kind })
    }

    pub fn samples(&self) -> &[StateVector] {
        &self.samples
    }

    pub fn kind(&self) -> SequenceKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.samples.first().map_or(0, |s| s.len())
    }

    /// `max_k |self^k - other^k|_inf`.
    pub fn max_abs_diff(&self, other: &ErrorSequence) -> Result<f64> {
        if self.len() != other.len() || self.dim() != other.dim() {
            return Err(Error::validation(format!(
                "error sequences are misaligned ({}x{} vs {}x{})",
                self.len(),
                self.dim(),
                other.len(),
                other.dim()
            )));
        }
        Ok(self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| inf_norm(&(a - b)))
            .fold(0.0, f64::max))
    }
}

/// Residuals `x^{k+1} - f(x^k)` for `k = 0 .. len-2`.
///
/// A free model run gives an identically zero sequence, so analyses that
/// follow the model trajectory exactly carry no model-error information.
pub fn residual_sequence<M: ModelMap + ?Sized>(
    analysis: &Trajectory,
    model: &M,
) -> Result<ErrorSequence> {
    if analysis.len() < 2 {
        return Err(Error::validation(format!(
            "residuals need at least 2 states, got {}",
            analysis.len()
        )));
    }
    let samples = analysis
        .states()
        .windows(2)
        .enumerate()
        .map(|(k, w)| Ok(&w[1] - model.apply(&w[0]).map_err(|e| e.at_step(k))?))
        .collect::<Result<Vec<_>>>()?;
    ErrorSequence::new(samples, SequenceKind::EstimatedBeta)
}

pub fn sample_mean(seq: &ErrorSequence) -> Result<StateVector> {
    if seq.is_empty() {
        return Err(Error::validation("sample mean of an empty sequence"));
    }
    let mut sum = StateVector::zeros(seq.dim());
    for s in seq.samples() {
        sum += s;
    }
    Ok(sum / seq.len() as f64)
}

/// Unbiased sample covariance (divisor `len - 1`), computed in two passes.
pub fn sample_cov(seq: &ErrorSequence) -> Result<CovarianceMatrix> {
    if seq.len() < 2 {
        return Err(Error::validation(format!(
            "sample covariance needs at least 2 samples, got {}",
            seq.len()
        )));
    }
    let mean = sample_mean(seq)?;
    let n = seq.dim();
    let mut acc = DMatrix::<f64>::zeros(n, n);
    for s in seq.samples() {
        let centered = s - &mean;
        acc.ger(1.0, &centered, &centered, 1.0);
    }
    Ok(CovarianceMatrix::from_trusted(acc / (seq.len() - 1) as f64))
}

/// Sample mean and covariance of an error sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentEstimate {
    pub mean: StateVector,
    pub cov: CovarianceMatrix,
    pub sample_count: usize,
}

impl MomentEstimate {
    pub fn from_sequence(seq: &ErrorSequence) -> Result<Self> {
        Ok(MomentEstimate {
            mean: sample_mean(seq)?,
            cov: sample_cov(seq)?,
            sample_count: seq.len(),
        })
    }
}

/// Largest entries of each difference in a [`MomentErrorReport`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MomentErrorMaxima {
    pub mean_sampled_vs_prescribed: f64,
    pub mean_sampled_vs_estimated: f64,
    pub mean_prescribed_vs_estimated: f64,
    pub cov_sampled_vs_prescribed: f64,
    pub cov_sampled_vs_estimated: f64,
    pub cov_prescribed_vs_estimated: f64,
}

/// Pairwise absolute differences between the sampled moments `(mu, Q)` of the
/// true model errors, the estimated moments `(mu~, Q~)` from residuals, and the
/// prescribed generating moments `(mu-bar, Q-bar)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentErrorReport {
    pub mean_sampled_vs_prescribed: StateVector,
    pub mean_sampled_vs_estimated: StateVector,
    pub mean_prescribed_vs_estimated: StateVector,
    pub cov_sampled_vs_prescribed: DMatrix<f64>,
    pub cov_sampled_vs_estimated: DMatrix<f64>,
    pub cov_prescribed_vs_estimated: DMatrix<f64>,
}

impl MomentErrorReport {
    pub fn maxima(&self) -> MomentErrorMaxima {
        MomentErrorMaxima {
            mean_sampled_vs_prescribed: self.mean_sampled_vs_prescribed.amax(),
            mean_sampled_vs_estimated: self.mean_sampled_vs_estimated.amax(),
            mean_prescribed_vs_estimated: self.mean_prescribed_vs_estimated.amax(),
            cov_sampled_vs_prescribed: self.cov_sampled_vs_prescribed.amax(),
            cov_sampled_vs_estimated: self.cov_sampled_vs_estimated.amax(),
            cov_prescribed_vs_estimated: self.cov_prescribed_vs_estimated.amax(),
        }
    }
}

pub fn moment_error_report(
    sampled: &MomentEstimate,
    estimated: &MomentEstimate,
    prescribed_mean: &StateVector,
    prescribed_cov: &CovarianceMatrix,
) -> Result<MomentErrorReport> {
    let n = sampled.mean.len();
    let dims = [
        estimated.mean.len(),
        prescribed_mean.len(),
        sampled.cov.dim(),
        estimated.cov.dim(),
        prescribed_cov.dim(),
    ];
    if dims.iter().any(|&d| d != n) {
        return Err(Error::validation(format!(
            "moment dimensions disagree: mean {n}, others {dims:?}"
        )));
    }
    let (q, qt, qb) = (
        sampled.cov.matrix(),
        estimated.cov.matrix(),
        prescribed_cov.matrix(),
    );
    Ok(MomentErrorReport {
        mean_sampled_vs_prescribed: (&sampled.mean - prescribed_mean).abs(),
        mean_sampled_vs_estimated: (&sampled.mean - &estimated.mean).abs(),
        mean_prescribed_vs_estimated: (prescribed_mean - &estimated.mean).abs(),
        cov_sampled_vs_prescribed: (q - qb).abs(),
        cov_sampled_vs_estimated: (q - qt).abs(),
        cov_prescribed_vs_estimated: (qb - qt).abs(),
    })
}
