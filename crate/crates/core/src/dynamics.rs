//! The deterministic model map `f`: an ODE tendency advanced by one classical
//! RK4 step, its exact tangent linear, and Lipschitz estimates along a
//! trajectory.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::state::{ensure_finite, inf_norm, StateVector, Trajectory};
use crate::stochastic::RngStream;

/// Default model timestep in Lorenz 96 time units.
pub const DEFAULT_DT: f64 = 0.05;

/// Right-hand side of an autonomous ODE `dx/dt = F(x)`.
pub trait Tendency {
    fn tendency(&self, x: &StateVector) -> StateVector;

    /// `J_F(x) * m` where `J_F` is the Jacobian of the tendency at `x`.
    fn jacobian_mul(&self, x: &StateVector, m: &DMatrix<f64>) -> DMatrix<f64>;

    /// Smallest state dimension the tendency is defined for.
    fn min_dim(&self) -> usize {
        1
    }
}

/// Lorenz 96 with cyclic indexing:
/// `dx_i/dt = -x_{i-2} x_{i-1} + x_{i-1} x_{i+1} - x_i + F`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lorenz96 {
    pub forcing: f64,
}

impl Default for Lorenz96 {
    fn default() -> Self {
        Lorenz96 { forcing: 8.0 }
    }
}

impl Tendency for Lorenz96 {
    fn tendency(&self, x: &StateVector) -> StateVector {
        let n = x.len();
        StateVector::from_fn(n, |i, _| {
            let im2 = x[(i + n - 2) % n];
            let im1 = x[(i + n - 1) % n];
            let ip1 = x[(i + 1) % n];
            -im2 * im1 + im1 * ip1 - x[i] + self.forcing
        })
    }

    // Each row of the Jacobian has four non-zeros, so apply it row by row
    // instead of forming it.
    fn jacobian_mul(&self, x: &StateVector, m: &DMatrix<f64>) -> DMatrix<f64> {
        let n = x.len();
        let mut out = DMatrix::zeros(n, m.ncols());
        for i in 0..n {
            let im2 = (i + n - 2) % n;
            let im1 = (i + n - 1) % n;
            let ip1 = (i + 1) % n;
            let d_im2 = -x[im1];
            let d_im1 = x[ip1] - x[im2];
            let d_ip1 = x[im1];
            for c in 0..m.ncols() {
                out[(i, c)] =
                    d_im2 * m[(im2, c)] + d_im1 * m[(im1, c)] - m[(i, c)] + d_ip1 * m[(ip1, c)];
            }
        }
        out
    }

    fn min_dim(&self) -> usize {
        4
    }
}

/// Linear tendency `dx/dt = A x`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearTendency {
    pub matrix: DMatrix<f64>,
}

impl Tendency for LinearTendency {
    fn tendency(&self, x: &StateVector) -> StateVector {
        &self.matrix * x
    }

    fn jacobian_mul(&self, _x: &StateVector, m: &DMatrix<f64>) -> DMatrix<f64> {
        &self.matrix * m
    }
}

/// `dx/dt = 0`; the flow is the identity.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ZeroTendency;

impl Tendency for ZeroTendency {
    fn tendency(&self, x: &StateVector) -> StateVector {
        StateVector::zeros(x.len())
    }

    fn jacobian_mul(&self, x: &StateVector, m: &DMatrix<f64>) -> DMatrix<f64> {
        DMatrix::zeros(x.len(), m.ncols())
    }
}

/// Evaluates the Lorenz 96 tendency with forcing 8.
pub fn lorenz96_tendency(state: &StateVector) -> Result<StateVector> {
    let model = Lorenz96::default();
    check_state(&model, state)?;
    Ok(model.tendency(state))
}

fn check_state<T: Tendency + ?Sized>(tendency: &T, state: &StateVector) -> Result<()> {
    if state.len() < tendency.min_dim() {
        return Err(Error::validation(format!(
            "state dimension {} is below the model minimum {}",
            state.len(),
            tendency.min_dim()
        )));
    }
    ensure_finite(state, "state")
}

fn check_dt(dt: f64) -> Result<()> {
    if !dt.is_finite() || dt < 0.0 {
        return Err(Error::validation(format!(
            "timestep must be finite and >= 0, got {dt}"
        )));
    }
    Ok(())
}

/// Advances `state` by one classical four-stage Runge-Kutta step of size `dt`.
///
/// A non-finite stage value yields [`Error::Integration`] with step index 0;
/// callers iterating a trajectory re-tag it with [`Error::at_step`].
pub fn rk4_step<T: Tendency + ?Sized>(
    tendency: &T,
    state: &StateVector,
    dt: f64,
) -> Result<StateVector> {
    check_state(tendency, state)?;
    check_dt(dt)?;
    let half = 0.5 * dt;
    let k1 = tendency.tendency(state);
    let k2 = tendency.tendency(&(state + &k1 * half));
    let k3 = tendency.tendency(&(state + &k2 * half));
    let k4 = tendency.tendency(&(state + &k3 * dt));
    let next = state + (k1 + (k2 + k3) * 2.0 + k4) * (dt / 6.0);
    if next.iter().any(|v| !v.is_finite()) {
        return Err(Error::Integration {
            step: 0,
            reason: "non-finite value in RK4 stages".into(),
        });
    }
    Ok(next)
}

/// Jacobian of [`rk4_step`] with respect to `state`, obtained by differentiating
/// each RK4 stage (the discrete tangent linear, not that of the ODE).
pub fn flow_jacobian<T: Tendency + ?Sized>(
    tendency: &T,
    state: &StateVector,
    dt: f64,
) -> Result<DMatrix<f64>> {
    check_state(tendency, state)?;
    check_dt(dt)?;
    let n = state.len();
    let half = 0.5 * dt;
    let eye = DMatrix::<f64>::identity(n, n);

    let k1 = tendency.tendency(state);
    let j1 = tendency.jacobian_mul(state, &eye);

    let x2 = state + &k1 * half;
    let k2 = tendency.tendency(&x2);
    let j2 = tendency.jacobian_mul(&x2, &(&eye + &j1 * half));

    let x3 = state + &k2 * half;
    let k3 = tendency.tendency(&x3);
    let j3 = tendency.jacobian_mul(&x3, &(&eye + &j2 * half));

    let x4 = state + &k3 * dt;
    let j4 = tendency.jacobian_mul(&x4, &(&eye + &j3 * dt));

    Ok(eye + (j1 + (j2 + j3) * 2.0 + j4) * (dt / 6.0))
}

/// Induced max-norm of a matrix: the largest absolute row sum.
pub fn matrix_inf_norm(m: &DMatrix<f64>) -> f64 {
    m.row_iter()
        .map(|row| row.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// A deterministic map `x^{k+1} = f(x^k)`.
pub trait ModelMap {
    fn apply(&self, x: &StateVector) -> Result<StateVector>;
}

impl<F> ModelMap for F
where
    F: Fn(&StateVector) -> StateVector,
{
    fn apply(&self, x: &StateVector) -> Result<StateVector> {
        Ok(self(x))
    }
}

/// One RK4 step of a tendency; this is the model map `f` used downstream.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelStep<T> {
    tendency: T,
    dt: f64,
}

impl<T: Tendency> ModelStep<T> {
    pub fn new(tendency: T, dt: f64) -> Result<Self> {
        if !dt.is_finite() || dt <= 0.0 {
            return Err(Error::validation(format!(
                "model dt must be finite and > 0, got {dt}"
            )));
        }
        Ok(ModelStep { tendency, dt })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn tendency(&self) -> &T {
        &self.tendency
    }

    pub fn jacobian(&self, x: &StateVector) -> Result<DMatrix<f64>> {
        flow_jacobian(&self.tendency, x, self.dt)
    }

    /// Iterates the map `steps` times from `x0`, returning the final state.
    pub fn integrate(&self, x0: &StateVector, steps: usize) -> Result<StateVector> {
        let mut x = x0.clone();
        for k in 0..steps {
            x = self.apply(&x).map_err(|e| e.at_step(k))?;
        }
        Ok(x)
    }

    /// The free model run `x0, f(x0), f(f(x0)), ...` with `len` states.
    pub fn free_run(&self, x0: &StateVector, len: usize) -> Result<Trajectory> {
        let mut states = Vec::with_capacity(len);
        if len > 0 {
            states.push(x0.clone());
        }
        for k in 1..len {
            let next = self.apply(&states[k - 1]).map_err(|e| e.at_step(k - 1))?;
            states.push(next);
        }
        Trajectory::new(states)
    }
}

impl<T: Tendency> ModelMap for ModelStep<T> {
    fn apply(&self, x: &StateVector) -> Result<StateVector> {
        rk4_step(&self.tendency, x, self.dt)
    }
}

/// The discrete linear map `x -> A x`; its max-norm Lipschitz constant is
/// exactly `|A|_inf`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearMap {
    pub matrix: DMatrix<f64>,
}

impl LinearMap {
    pub fn lipschitz(&self) -> f64 {
        matrix_inf_norm(&self.matrix)
    }
}

impl ModelMap for LinearMap {
    fn apply(&self, x: &StateVector) -> Result<StateVector> {
        if x.len() != self.matrix.ncols() {
            return Err(Error::validation(format!(
                "state dimension {} does not match map dimension {}",
                x.len(),
                self.matrix.ncols()
            )));
        }
        Ok(&self.matrix * x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum LipschitzMethod {
    JacobianSupremum,
    PairwiseSampling,
}

/// An empirical Lipschitz constant. Both methods only see the visited region,
/// so the value is a lower bound on any global constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LipschitzEstimate {
    pub value: f64,
    pub method: LipschitzMethod,
    pub sample_count: usize,
}

/// Largest induced max-norm of the flow Jacobian over the trajectory states.
pub fn estimate_lipschitz<T: Tendency>(
    step: &ModelStep<T>,
    trajectory: &Trajectory,
) -> Result<LipschitzEstimate> {
    estimate_lipschitz_over(step, trajectory.states())
}

/// As [`estimate_lipschitz`], over an arbitrary set of states.
pub fn estimate_lipschitz_over<T: Tendency>(
    step: &ModelStep<T>,
    states: &[StateVector],
) -> Result<LipschitzEstimate> {
    if states.len() < 2 {
        return Err(Error::validation(format!(
            "Lipschitz estimation needs at least 2 states, got {}",
            states.len()
        )));
    }
    let mut value = 0.0_f64;
    for x in states {
        value = value.max(matrix_inf_norm(&step.jacobian(x)?));
    }
    Ok(LipschitzEstimate {
        value,
        method: LipschitzMethod::JacobianSupremum,
        sample_count: states.len(),
    })
}

/// Largest ratio `|f(a) - f(b)|_inf / |a - b|_inf` over pairs where `a` is a
/// trajectory state and `b = a + radius * u`, `u` uniform in `[-1, 1]^N`.
pub fn sample_pairwise_lipschitz<M: ModelMap + ?Sized>(
    map: &M,
    states: &[StateVector],
    radius: f64,
    pairs_per_state: usize,
    rng: &mut RngStream,
) -> Result<LipschitzEstimate> {
    if states.len() < 2 {
        return Err(Error::validation(format!(
            "Lipschitz estimation needs at least 2 states, got {}",
            states.len()
        )));
    }
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::validation(format!(
            "perturbation radius must be > 0, got {radius}"
        )));
    }
    let mut value = 0.0_f64;
    let mut count = 0;
    for a in states {
        let fa = map.apply(a)?;
        for _ in 0..pairs_per_state {
            let delta = StateVector::from_fn(a.len(), |_, _| radius * (2.0 * rng.next_f64() - 1.0));
            let denom = inf_norm(&delta);
            if denom == 0.0 {
                continue;
            }
            let fb = map.apply(&(a + &delta))?;
            value = value.max(inf_norm(&(fb - &fa)) / denom);
            count += 1;
        }
    }
    Ok(LipschitzEstimate {
        value,
        method: LipschitzMethod::PairwiseSampling,
        sample_count: count,
    })
}
