//! Estimation of dynamical-model error statistics from data-assimilation
//! analyses.
//!
//! Given a sequence of analyses `x_a^k` and a deterministic model map `f`, the
//! residuals `x_a^{k+1} - f(x_a^k)` approximate the additive model error. This
//! crate computes those residuals and their sample mean and covariance, and
//! certifies numerically how the accuracy of those moments is controlled by the
//! analysis error through the Lipschitz constant of `f`.
//!
//! The pieces are:
//!
//! * [`dynamics`]: Lorenz 96 under a classical RK4 step, its exact tangent
//!   linear, and along-trajectory Lipschitz estimates.
//! * [`stochastic`]: a counter-based generator, Gaussian sampling through a
//!   symmetric square root, and the prescribed model-error moments.
//! * [`assimilation`]: observation operators and closed-form 3DVar.
//! * [`estimation`]: residual sequences, two-pass sample moments, and error
//!   reports between true, sampled and estimated moments.
//! * [`bounds`]: hypothesis checks and certificates for the product, residual,
//!   mean, and covariance-entry bounds.
//! * [`harness`]: the Lorenz 96 twin experiment, its configuration file and
//!   its CSV/JSON outputs.

pub mod assimilation;
pub mod bounds;
pub mod dynamics;
pub mod error;
pub mod estimation;
pub mod harness;
pub mod stochastic;

mod state;

pub use error::{Error, Result};
pub use state::{inf_norm, StateVector, Trajectory};
