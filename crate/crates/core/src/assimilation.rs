//! Observation operators and sequential 3DVar.
//!
//! The analysis minimizes
//! `1/2 (x - x_f)^T B^-1 (x - x_f) + 1/2 (y - Hx)^T R^-1 (y - Hx)`
//! for linear `H`, which has the closed form
//! `x_a = x_f + K (y - H x_f)` with `K = B H^T (H B H^T + R)^-1`.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::state::{ensure_finite, StateVector};
use crate::stochastic::{CovarianceMatrix, RngStream};

/// Linear observation operator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ObservationOperator {
    /// Observe every component.
    Identity { dim: usize },
    /// Observe the listed components (0-based) in order.
    Selection { dim: usize, indices: Vec<usize> },
}

impl ObservationOperator {
    pub fn identity(dim: usize) -> Self {
        ObservationOperator::Identity { dim }
    }

    pub fn selection(dim: usize, indices: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; dim];
        for &i in &indices {
            if i >= dim {
                return Err(Error::validation(format!(
                    "observed index {i} is out of range for dimension {dim}"
                )));
            }
            if std::mem::replace(&mut seen[i], true) {
                return Err(Error::validation(format!("observed index {i} is repeated")));
            }
        }
        Ok(ObservationOperator::Selection { dim, indices })
    }

    pub fn state_dim(&self) -> usize {
        match self {
            ObservationOperator::Identity { dim } | ObservationOperator::Selection { dim, .. } => {
                *dim
            }
        }
    }

    pub fn obs_dim(&self) -> usize {
        match self {
            ObservationOperator::Identity { dim } => *dim,
            ObservationOperator::Selection { indices, .. } => indices.len(),
        }
    }

    pub fn apply(&self, x: &StateVector) -> Result<StateVector> {
        if x.len() != self.state_dim() {
            return Err(Error::validation(format!(
                "state has dimension {} but the operator expects {}",
                x.len(),
                self.state_dim()
            )));
        }
        Ok(match self {
            ObservationOperator::Identity { .. } => x.clone(),
            ObservationOperator::Selection { indices, .. } => {
                StateVector::from_iterator(indices.len(), indices.iter().map(|&i| x[i]))
            }
        })
    }

    /// Dense `obs_dim x state_dim` matrix of the operator.
    pub fn matrix(&self) -> DMatrix<f64> {
        match self {
            ObservationOperator::Identity { dim } => DMatrix::identity(*dim, *dim),
            ObservationOperator::Selection { dim, indices } => {
                let mut h = DMatrix::zeros(indices.len(), *dim);
                for (r, &c) in indices.iter().enumerate() {
                    h[(r, c)] = 1.0;
                }
                h
            }
        }
    }
}

/// Static error covariances and observation operator for 3DVar.
#[derive(Debug, Clone, PartialEq)]
pub struct AssimilationConfig {
    pub background: CovarianceMatrix,
    pub observation: CovarianceMatrix,
    pub operator: ObservationOperator,
}

impl AssimilationConfig {
    /// `B = b I`, `R = r I`, `H = I`.
    pub fn isotropic(
        dim: usize,
        background_variance: f64,
        observation_variance: f64,
    ) -> Result<Self> {
        Ok(AssimilationConfig {
            background: CovarianceMatrix::scaled_identity(dim, background_variance)?,
            observation: CovarianceMatrix::scaled_identity(dim, observation_variance)?,
            operator: ObservationOperator::identity(dim),
        })
    }
}

/// A 3DVar analysis step with its gain precomputed.
///
/// `B`, `R` and `H` are static, so `K` is formed once from a Cholesky
/// factorization of `H B H^T + R`; no explicit inverse is built.
#[derive(Debug, Clone)]
pub struct ThreeDVar {
    operator: ObservationOperator,
    gain: DMatrix<f64>,
}

impl ThreeDVar {
    pub fn new(cfg: &AssimilationConfig) -> Result<Self> {
        let n = cfg.operator.state_dim();
        let m = cfg.operator.obs_dim();
        if cfg.background.dim() != n {
            return Err(Error::validation(format!(
                "background covariance is {0}x{0}, state dimension is {n}",
                cfg.background.dim()
            )));
        }
        if cfg.observation.dim() != m {
            return Err(Error::validation(format!(
                "observation covariance is {0}x{0}, observation dimension is {m}",
                cfg.observation.dim()
            )));
        }
        let h = cfg.operator.matrix();
        let hb = &h * cfg.background.matrix();
        let innovation_cov = &hb * h.transpose() + cfg.observation.matrix();
        let chol = innovation_cov.cholesky().ok_or_else(|| {
            Error::IllPosedAnalysis("H B H^T + R is not positive definite".into())
        })?;
        // S^-1 H B = K^T since B and S are symmetric.
        let gain = chol.solve(&hb).transpose();
        if gain.iter().any(|v| !v.is_finite()) {
            return Err(Error::IllPosedAnalysis(
                "gain has non-finite entries".into(),
            ));
        }
        Ok(ThreeDVar {
            operator: cfg.operator.clone(),
            gain,
        })
    }

    pub fn gain(&self) -> &DMatrix<f64> {
        &self.gain
    }

    pub fn analyze(&self, forecast: &StateVector, y: &StateVector) -> Result<StateVector> {
        ensure_finite(forecast, "forecast")?;
        ensure_finite(y, "observation")?;
        if y.len() != self.operator.obs_dim() {
            return Err(Error::validation(format!(
                "observation has dimension {} but the operator produces {}",
                y.len(),
                self.operator.obs_dim()
            )));
        }
        let innovation = y - self.operator.apply(forecast)?;
        Ok(forecast + &self.gain * innovation)
    }
}

/// One-off 3DVar analysis; see [`ThreeDVar`] for repeated use.
pub fn threedvar_analysis(
    forecast: &StateVector,
    y: &StateVector,
    cfg: &AssimilationConfig,
) -> Result<StateVector> {
    ThreeDVar::new(cfg)?.analyze(forecast, y)
}

/// `H x_t + R^{1/2} z` with `z` standard normal from `rng`.
pub fn observe(
    x_t: &StateVector,
    operator: &ObservationOperator,
    r_sqrt: &DMatrix<f64>,
    rng: &mut RngStream,
) -> Result<StateVector> {
    let hx = operator.apply(x_t)?;
    if r_sqrt.nrows() != hx.len() {
        return Err(Error::validation(format!(
            "noise square root has {} rows, observation dimension is {}",
            r_sqrt.nrows(),
            hx.len()
        )));
    }
    let z = rng.standard_normal_vector(r_sqrt.ncols());
    Ok(hx + r_sqrt * z)
}
