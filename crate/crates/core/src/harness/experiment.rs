use nalgebra::DMatrix;

use crate::assimilation::{observe, AssimilationConfig, ObservationOperator, ThreeDVar};
use crate::bounds::{
    beta_bound_certificate, beta_bound_tight, cov_bound_certificate, cov_bound_tight,
    mean_bound_certificate, mean_bound_tight, BoundCertificate,
};
use crate::dynamics::{estimate_lipschitz_over, LipschitzEstimate, Lorenz96, ModelMap, ModelStep};
use crate::error::{Error, Result};
use crate::estimation::{
    moment_error_report, residual_sequence, ErrorSequence, MomentErrorReport, MomentEstimate,
    SequenceKind,
};
use crate::harness::ExperimentConfig;
use crate::state::{inf_norm, StateVector, Trajectory};
use crate::stochastic::{
    build_true_cov, build_true_mean, CovarianceMatrix, GaussianSpec, RngStream, StreamId,
};

/// Offset added to the first component of the equilibrium before spin-up.
pub const SPINUP_PERTURBATION: f64 = 0.01;

/// Integrates from the Lorenz 96 equilibrium (all components equal to the
/// forcing) with the first component nudged by [`SPINUP_PERTURBATION`].
pub fn spin_up<M: ModelMap + ?Sized>(
    model: &M,
    n: usize,
    forcing: f64,
    steps: usize,
) -> Result<StateVector> {
    let mut x = StateVector::from_element(n, forcing);
    x[0] += SPINUP_PERTURBATION;
    for k in 0..steps {
        x = model.apply(&x).map_err(|e| e.at_step(k))?;
    }
    Ok(x)
}

/// Truth run `x^{k+1} = f(x^k) + beta^k` with `beta^k` drawn from `spec`.
/// Returns `len` states and the `len - 1` realized model errors.
pub fn generate_truth<M: ModelMap + ?Sized>(
    model: &M,
    spec: &GaussianSpec,
    x0: StateVector,
    len: usize,
    rng: &mut RngStream,
) -> Result<(Trajectory, ErrorSequence)> {
    let mut states = Vec::with_capacity(len);
    let mut betas = Vec::with_capacity(len.saturating_sub(1));
    states.push(x0);
    for k in 1..len {
        let beta = spec.sample(rng);
        let next = model.apply(&states[k - 1]).map_err(|e| e.at_step(k - 1))? + &beta;
        if next.iter().any(|v| !v.is_finite()) {
            return Err(Error::Integration {
                step: k - 1,
                reason: "truth left the finite range".into(),
            });
        }
        states.push(next);
        betas.push(beta);
    }
    Ok((
        Trajectory::new(states)?,
        ErrorSequence::new(betas, SequenceKind::TrueBeta)?,
    ))
}

/// One noisy observation of every truth state.
pub fn observe_all(
    truth: &Trajectory,
    operator: &ObservationOperator,
    r_sqrt: &DMatrix<f64>,
    rng: &mut RngStream,
) -> Result<Vec<StateVector>> {
    truth
        .states()
        .iter()
        .map(|x| observe(x, operator, r_sqrt, rng))
        .collect()
}

/// Sequential 3DVar: the first analysis uses `first_forecast` as background,
/// every later one uses `f` of the previous analysis.
pub fn assimilate<M: ModelMap + ?Sized>(
    model: &M,
    analysis_step: &ThreeDVar,
    first_forecast: &StateVector,
    observations: &[StateVector],
) -> Result<Trajectory> {
    let mut states: Vec<StateVector> = Vec::with_capacity(observations.len());
    for (k, y) in observations.iter().enumerate() {
        let forecast = match states.last() {
            None => first_forecast.clone(),
            Some(prev) => model.apply(prev).map_err(|e| e.at_step(k - 1))?,
        };
        states.push(analysis_step.analyze(&forecast, y)?);
    }
    Trajectory::new(states)
}

/// Everything a twin experiment produces.
#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    pub truth: Trajectory,
    pub analysis: Trajectory,
    pub beta: ErrorSequence,
    pub beta_tilde: ErrorSequence,
    /// Sample moments of the realized model errors.
    pub sampled: MomentEstimate,
    /// Sample moments of the residual estimates.
    pub estimated: MomentEstimate,
    pub prescribed_mean: StateVector,
    pub prescribed_cov: CovarianceMatrix,
    pub report: MomentErrorReport,
    pub lipschitz: LipschitzEstimate,
    pub certificates: Vec<BoundCertificate>,
    /// `|x_t^k - x_a^k|` per step and component.
    pub hovmoller: Vec<StateVector>,
}

impl ExperimentResult {
    /// Root mean square of `|x_t - x_a|` over all steps and components.
    pub fn rms_analysis_error(&self) -> f64 {
        let count = (self.hovmoller.len() * self.config.n) as f64;
        let sum_sq: f64 = self.hovmoller.iter().map(|e| e.norm_squared()).sum();
        (sum_sq / count).sqrt()
    }

    pub fn max_analysis_error(&self) -> f64 {
        self.hovmoller.iter().map(inf_norm).fold(0.0, f64::max)
    }

    /// `max_k |beta~^k - beta^k|_inf`.
    pub fn max_beta_error(&self) -> f64 {
        self.beta
            .max_abs_diff(&self.beta_tilde)
            .expect("sequences come from the same run")
    }
}

/// Runs the Lorenz 96 twin experiment described by `cfg`:
/// spin-up, truth with additive Gaussian model error, noisy observations of
/// every component at every step, sequential 3DVar, residual moments, error
/// report, and bound certificates.
pub fn run_twin_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    let n = cfg.n;
    let lorenz = Lorenz96::default();
    let forcing = lorenz.forcing;
    let model = ModelStep::new(lorenz, cfg.dt)?;

    let scale = cfg.model_error_scale;
    let prescribed_mean = build_true_mean(n) * scale;
    let prescribed_cov = build_true_cov(n, cfg.cyclic_cov)?.scaled(scale * scale);
    let beta_spec = GaussianSpec::from_covariance(prescribed_mean.clone(), &prescribed_cov)?;

    let x0 = spin_up(&model, n, forcing, cfg.spinup_steps)?;
    let mut model_rng = RngStream::new(cfg.seed, StreamId::ModelError);
    let (truth, beta) = generate_truth(&model, &beta_spec, x0, cfg.steps, &mut model_rng)?;

    let operator = ObservationOperator::identity(n);
    let r_sqrt = DMatrix::identity(n, n) * cfg.r_variance.sqrt();
    let mut obs_rng = RngStream::new(cfg.seed, StreamId::ObservationNoise);
    let observations = observe_all(&truth, &operator, &r_sqrt, &mut obs_rng)?;

    let assim_cfg = AssimilationConfig::isotropic(n, cfg.b_variance, cfg.r_variance)?;
    let analysis_step = ThreeDVar::new(&assim_cfg)?;
    let mut init_rng = RngStream::new(cfg.seed, StreamId::Init);
    let first_forecast = &truth[0] + init_rng.standard_normal_vector(n);
    let analysis = assimilate(&model, &analysis_step, &first_forecast, &observations)?;

    let beta_tilde = residual_sequence(&analysis, &model)?;
    let sampled = MomentEstimate::from_sequence(&beta)?;
    let estimated = MomentEstimate::from_sequence(&beta_tilde)?;
    let report = moment_error_report(&sampled, &estimated, &prescribed_mean, &prescribed_cov)?;

    let visited: Vec<StateVector> = truth
        .states()
        .iter()
        .chain(analysis.states())
        .cloned()
        .collect();
    let lipschitz = estimate_lipschitz_over(&model, &visited)?;
    let l = lipschitz.value;

    let (ci, cj) = cfg.entry();
    let mut certificates = Vec::with_capacity(3 * (cfg.epsilons.len() + 1));
    for &eps in &cfg.epsilons {
        certificates.push(beta_bound_certificate(
            &truth,
            &analysis,
            l,
            &beta,
            &beta_tilde,
            eps,
        )?);
    }
    certificates.push(beta_bound_tight(&truth, &analysis, l, &beta, &beta_tilde)?);
    for &eps in &cfg.epsilons {
        certificates.push(mean_bound_certificate(
            &truth,
            &analysis,
            l,
            &sampled.mean,
            &estimated.mean,
            eps,
        )?);
    }
    certificates.push(mean_bound_tight(
        &truth,
        &analysis,
        l,
        &sampled.mean,
        &estimated.mean,
    )?);
    for &eps in &cfg.epsilons {
        certificates.push(cov_bound_certificate(
            &truth,
            &analysis,
            l,
            &beta,
            &beta_tilde,
            &sampled,
            &estimated,
            eps,
            ci,
            cj,
        )?);
    }
    certificates.push(cov_bound_tight(
        &truth,
        &analysis,
        l,
        &beta,
        &beta_tilde,
        &sampled,
        &estimated,
        ci,
        cj,
    )?);

    let hovmoller = truth.abs_diff(&analysis)?;
    Ok(ExperimentResult {
        config: cfg.clone(),
        truth,
        analysis,
        beta,
        beta_tilde,
        sampled,
        estimated,
        prescribed_mean,
        prescribed_cov,
        report,
        lipschitz,
        certificates,
        hovmoller,
    })
}
