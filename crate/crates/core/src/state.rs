use nalgebra::DVector;

use crate::error::{Error, Result};

/// A model state, observation, or model-error vector.
pub type StateVector = DVector<f64>;

/// Max-norm of a vector. All vector-level bound statements use this norm.
pub fn inf_norm(v: &StateVector) -> f64 {
    v.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

pub(crate) fn ensure_finite(v: &StateVector, what: &str) -> Result<()> {
    if let Some(i) = v.iter().position(|x| !x.is_finite()) {
        return Err(Error::validation(format!(
            "{what} has a non-finite entry at index {i}"
        )));
    }
    Ok(())
}

/// Time-indexed sequence of states of a common dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    states: Vec<StateVector>,
}

impl Trajectory {
    pub fn new(states: Vec<StateVector>) -> Result<Self> {
        if let Some(first) = states.first() {
            let n = first.len();
            if let Some(k) = states.iter().position(|s| s.len() != n) {
                return Err(Error::validation(format!(
                    "trajectory state {k} has dimension {} (expected {n})",
                    states[k].len()
                )));
            }
        }
        Ok(Trajectory { states })
    }

    pub fn states(&self) -> &[StateVector] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// State dimension, or 0 for an empty trajectory.
    pub fn dim(&self) -> usize {
        self.states.first().map_or(0, |s| s.len())
    }

    pub fn into_states(self) -> Vec<StateVector> {
        self.states
    }

    /// Per-step absolute differences `|self^k - other^k|`, component-wise.
    pub fn abs_diff(&self, other: &Trajectory) -> Result<Vec<StateVector>> {
        if self.len() != other.len() || self.dim() != other.dim() {
            return Err(Error::validation(format!(
                "trajectories are misaligned ({}x{} vs {}x{})",
                self.len(),
                self.dim(),
                other.len(),
                other.dim()
            )));
        }
        Ok(self
            .states
            .iter()
            .zip(&other.states)
            .map(|(a, b)| (a - b).abs())
            .collect())
    }

    /// `max_k |self^k - other^k|_inf`.
    pub fn max_abs_diff(&self, other: &Trajectory) -> Result<f64> {
        Ok(self
            .abs_diff(other)?
            .iter()
            .map(inf_norm)
            .fold(0.0, f64::max))
    }
}

impl std::ops::Index<usize> for Trajectory {
    type Output = StateVector;

    fn index(&self, k: usize) -> &StateVector {
        &self.states[k]
    }
}
