//! Certificates for the error bounds linking analysis accuracy to the accuracy
//! of model-error estimates.
//!
//! Each check evaluates the hypothesis of one bound on concrete data, measures
//! the quantity the bound controls, and reports whether the conclusion held.
//! A certificate whose hypothesis is not met is vacuous: it passes, and
//! [`BoundCertificate::is_vacuous`] says so.
//!
//! Vector quantities are compared in the max-norm; the covariance-entry bound is
//! component-wise.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimation::{ErrorSequence, MomentEstimate};
use crate::state::{inf_norm, StateVector, Trajectory};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Theorem {
    /// `|fg - LM| < eps` from closeness of the factors.
    ProductLemma,
    /// Per-step residual error `|beta~^k - beta^k| < eps`.
    BetaBound,
    /// Mean error `|mu~ - mu| < eps`.
    MeanBound,
    /// Covariance entry error `|Q_ij - Q~_ij| < eps`.
    CovEntryBound,
}

/// Outcome of checking one bound on one data set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundCertificate {
    pub theorem: Theorem,
    pub epsilon: f64,
    pub hypothesis_met: bool,
    pub measured_lhs: f64,
    pub bound_rhs: f64,
    pub passed: bool,
    /// Tight certificates use non-strict comparisons at the smallest epsilon
    /// the data admits.
    pub tight: bool,
    pub lipschitz: Option<f64>,
    /// 0-based covariance entry for [`Theorem::CovEntryBound`].
    pub entry: Option<(usize, usize)>,
    /// `max_k |x_t^k - x_a^k|_inf` where trajectories are involved.
    pub max_analysis_error: Option<f64>,
    /// Per-timestep or per-entry breakdown; see the constructing function.
    #[serde(skip)]
    pub details: Vec<f64>,
}

impl BoundCertificate {
    pub fn is_vacuous(&self) -> bool {
        !self.hypothesis_met
    }

    /// Margin `bound_rhs - measured_lhs`.
    pub fn slack(&self) -> f64 {
        self.bound_rhs - self.measured_lhs
    }
}

fn check_epsilon(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::validation(format!(
            "epsilon must be finite and > 0, got {eps}"
        )));
    }
    Ok(())
}

fn check_lipschitz(l: f64) -> Result<()> {
    if !(l >= 0.0 && l.is_finite()) {
        return Err(Error::validation(format!(
            "Lipschitz constant must be >= 0, got {l}"
        )));
    }
    Ok(())
}

/// `a / b`, reading division by zero as `+inf`.
fn ratio_or_inf(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        f64::INFINITY
    } else {
        a / b
    }
}

/// Thresholds `(min{1, eps/(2|M|)}, min{1, eps/(2|L|+2)})` on `|f-L|` and `|g-M|`.
pub fn product_thresholds(l: f64, m: f64, eps: f64) -> (f64, f64) {
    (
        ratio_or_inf(eps, 2.0 * m.abs()).min(1.0),
        (eps / (2.0 * l.abs() + 2.0)).min(1.0),
    )
}

/// If `|f-L|` and `|g-M|` are below [`product_thresholds`], then `|fg-LM| < eps`.
pub fn check_product_bound(f: f64, g: f64, l: f64, m: f64, eps: f64) -> Result<BoundCertificate> {
    check_epsilon(eps)?;
    let (thr_f, thr_g) = product_thresholds(l, m, eps);
    let hypothesis_met = (f - l).abs() < thr_f && (g - m).abs() < thr_g;
    let measured = (f * g - l * m).abs();
    Ok(BoundCertificate {
        theorem: Theorem::ProductLemma,
        epsilon: eps,
        hypothesis_met,
        measured_lhs: measured,
        bound_rhs: eps,
        passed: !hypothesis_met || measured < eps,
        tight: false,
        lipschitz: None,
        entry: None,
        max_analysis_error: None,
        details: vec![thr_f, thr_g],
    })
}

fn check_aligned(
    truth: &Trajectory,
    analysis: &Trajectory,
    true_beta: &ErrorSequence,
    est_beta: &ErrorSequence,
) -> Result<()> {
    if truth.len() != analysis.len() || truth.dim() != analysis.dim() {
        return Err(Error::validation(format!(
            "truth is {}x{} but analysis is {}x{}",
            truth.len(),
            truth.dim(),
            analysis.len(),
            analysis.dim()
        )));
    }
    for (name, seq) in [("true", true_beta), ("estimated", est_beta)] {
        if seq.len() + 1 != truth.len() || (seq.dim() != truth.dim() && !seq.is_empty()) {
            return Err(Error::validation(format!(
                "{name} model-error sequence has {} samples of dimension {}, expected {} of dimension {}",
                seq.len(),
                seq.dim(),
                truth.len().saturating_sub(1),
                truth.dim()
            )));
        }
    }
    Ok(())
}

/// Smallest epsilon the residual and mean bounds admit: `(L+1) max_k |x_t^k - x_a^k|`.
pub fn implied_epsilon(truth: &Trajectory, analysis: &Trajectory, lipschitz: f64) -> Result<f64> {
    Ok((lipschitz + 1.0) * truth.max_abs_diff(analysis)?)
}

enum Strictness {
    Strict(f64),
    Tight,
}

fn trajectory_bound(
    theorem: Theorem,
    truth: &Trajectory,
    analysis: &Trajectory,
    lipschitz: f64,
    strictness: Strictness,
    measured: f64,
    details: Vec<f64>,
) -> Result<BoundCertificate> {
    check_lipschitz(lipschitz)?;
    let max_err = truth.max_abs_diff(analysis)?;
    let scaled = max_err * (lipschitz + 1.0);
    let (eps, hypothesis_met, passed, tight) = match strictness {
        Strictness::Strict(eps) => {
            check_epsilon(eps)?;
            let met = scaled < eps;
            (eps, met, !met || measured < eps, false)
        }
        Strictness::Tight => (scaled, true, measured <= scaled, true),
    };
    Ok(BoundCertificate {
        theorem,
        epsilon: eps,
        hypothesis_met,
        measured_lhs: measured,
        bound_rhs: eps,
        passed,
        tight,
        lipschitz: Some(lipschitz),
        entry: None,
        max_analysis_error: Some(max_err),
        details,
    })
}

fn beta_errors(true_beta: &ErrorSequence, est_beta: &ErrorSequence) -> Vec<f64> {
    true_beta
        .samples()
        .iter()
        .zip(est_beta.samples())
        .map(|(b, e)| inf_norm(&(b - e)))
        .collect()
}

/// If `(L+1) max_k |x_t^k - x_a^k| < eps`, then `max_k |beta~^k - beta^k| < eps`.
///
/// `details` holds `|beta~^k - beta^k|_inf` per step.
pub fn beta_bound_certificate(
    truth: &Trajectory,
    analysis: &Trajectory,
    lipschitz: f64,
    true_beta: &ErrorSequence,
    est_beta: &ErrorSequence,
    eps: f64,
) -> Result<BoundCertificate> {
    check_aligned(truth, analysis, true_beta, est_beta)?;
    let per_step = beta_errors(true_beta, est_beta);
    let measured = per_step.iter().copied().fold(0.0, f64::max);
    trajectory_bound(
        Theorem::BetaBound,
        truth,
        analysis,
        lipschitz,
        Strictness::Strict(eps),
        measured,
        per_step,
    )
}

/// [`beta_bound_certificate`] at [`implied_epsilon`], with `<=` in place of `<`.
/// Always passes when `lipschitz` is a valid constant on the visited region.
pub fn beta_bound_tight(
    truth: &Trajectory,
    analysis: &Trajectory,
    lipschitz: f64,
    true_beta: &ErrorSequence,
    est_beta: &ErrorSequence,
) -> Result<BoundCertificate> {
    check_aligned(truth, analysis, true_beta, est_beta)?;
    let per_step = beta_errors(true_beta, est_beta);
    let measured = per_step.iter().copied().fold(0.0, f64::max);
    trajectory_bound(
        Theorem::BetaBound,
        truth,
        analysis,
        lipschitz,
        Strictness::Tight,
        measured,
        per_step,
    )
}

fn check_means(truth: &Trajectory, true_mu: &StateVector, est_mu: &StateVector) -> Result<()> {
    if true_mu.len() != truth.dim() || est_mu.len() != truth.dim() {
        return Err(Error::validation(format!(
            "means have dimensions {} and {}, trajectories {}",
            true_mu.len(),
            est_mu.len(),
            truth.dim()
        )));
    }
    Ok(())
}

/// If `(L+1) max_k |x_t^k - x_a^k| < eps`, then `|mu~ - mu|_inf < eps`.
///
/// `details` holds `|mu~_i - mu_i|` per component.
pub fn mean_bound_certificate(
    truth: &Trajectory,
    analysis: &Trajectory,
    lipschitz: f64,
    true_mu: &StateVector,
    est_mu: &StateVector,
    eps: f64,
) -> Result<BoundCertificate> {
    check_means(truth, true_mu, est_mu)?;
    let diff = (true_mu - est_mu).abs();
    trajectory_bound(
        Theorem::MeanBound,
        truth,
        analysis,
        lipschitz,
        Strictness::Strict(eps),
        diff.amax(),
        diff.iter().copied().collect(),
    )
}

/// [`mean_bound_certificate`] at [`implied_epsilon`], with `<=` in place of `<`.
pub fn mean_bound_tight(
    truth: &Trajectory,
    analysis: &Trajectory,
    lipschitz: f64,
    true_mu: &StateVector,
    est_mu: &StateVector,
) -> Result<BoundCertificate> {
    check_means(truth, true_mu, est_mu)?;
    let diff = (true_mu - est_mu).abs();
    trajectory_bound(
        Theorem::MeanBound,
        truth,
        analysis,
        lipschitz,
        Strictness::Tight,
        diff.amax(),
        diff.iter().copied().collect(),
    )
}

/// Per-sample analysis-accuracy thresholds for covariance entry `(i, j)`.
///
/// Sample `k` pairs with `beta^k`. Analysis state `k` enters both `beta~^{k-1}`
/// and `beta~^k`, so [`state_thresholds`](Self::state_thresholds) takes the
/// smaller of the two adjacent sample thresholds.
#[derive(Debug, Clone, PartialEq)]
pub struct AccuracyRequirement {
    pub i: usize,
    pub j: usize,
    pub epsilon: f64,
    pub lipschitz: f64,
    /// Bound on `|x_t,i - x_a,i|` per sample (may be `+inf`).
    pub thresholds_i: Vec<f64>,
    /// Bound on `|x_t,j - x_a,j|` per sample (may be `+inf`).
    pub thresholds_j: Vec<f64>,
}

impl AccuracyRequirement {
    pub fn sample_count(&self) -> usize {
        self.thresholds_i.len()
    }

    /// `(bound on component i, bound on component j)` for analysis state `k`,
    /// `k = 0 ..= sample_count`.
    pub fn state_thresholds(&self, k: usize) -> (f64, f64) {
        let n = self.sample_count();
        let lo = k.saturating_sub(1).min(n - 1);
        let hi = k.min(n - 1);
        (
            self.thresholds_i[lo].min(self.thresholds_i[hi]),
            self.thresholds_j[lo].min(self.thresholds_j[hi]),
        )
    }
}

/// Analysis accuracy sufficient for `|Q_ij - Q~_ij| < eps`.
///
/// With `tau` samples and `c = (tau-1)/tau`, sample `k` requires
///
/// ```text
/// |x_t,i - x_a,i| < min{1, eps c / (8|beta^k_j|), eps c / (8|mu_j|)} / (L+1)
/// |x_t,j - x_a,j| < min{1, eps c / (8|beta^k_i| + 8), eps c / (8|mu_i| + 8)} / (L+1)
/// ```
///
/// where a zero denominator makes that branch `+inf`. Indices are 0-based.
pub fn cov_accuracy_requirement(
    eps: f64,
    true_beta: &ErrorSequence,
    mu: &StateVector,
    lipschitz: f64,
    i: usize,
    j: usize,
) -> Result<AccuracyRequirement> {
    check_epsilon(eps)?;
    check_lipschitz(lipschitz)?;
    let n = true_beta.dim();
    if i >= n || j >= n || mu.len() != n {
        return Err(Error::validation(format!(
            "entry ({i}, {j}) with mean of dimension {} is invalid for samples of dimension {n}",
            mu.len()
        )));
    }
    let tau = true_beta.len();
    if tau < 2 {
        return Err(Error::validation(format!(
            "covariance accuracy needs at least 2 samples, got {tau}"
        )));
    }
    let c = eps * (tau - 1) as f64 / tau as f64;
    let scale = 1.0 / (lipschitz + 1.0);
    let (thresholds_i, thresholds_j) = true_beta
        .samples()
        .iter()
        .map(|b| {
            let ti = 1.0_f64
                .min(ratio_or_inf(c, 8.0 * b[j].abs()))
                .min(ratio_or_inf(c, 8.0 * mu[j].abs()));
            let tj = 1.0_f64
                .min(c / (8.0 * b[i].abs() + 8.0))
                .min(c / (8.0 * mu[i].abs() + 8.0));
            (scale * ti, scale * tj)
        })
        .unzip();
    Ok(AccuracyRequirement {
        i,
        j,
        epsilon: eps,
        lipschitz,
        thresholds_i,
        thresholds_j,
    })
}

fn cov_hypothesis(req: &AccuracyRequirement, errors: &[StateVector]) -> (bool, Vec<f64>) {
    // Utilization per state: the larger of |e_i|/thr_i and |e_j|/thr_j.
    let usage: Vec<f64> = errors
        .iter()
        .enumerate()
        .map(|(k, e)| {
            let (ti, tj) = req.state_thresholds(k);
            let ui = if e[req.i] < ti {
                e[req.i] / ti
            } else {
                f64::INFINITY
            };
            let uj = if e[req.j] < tj {
                e[req.j] / tj
            } else {
                f64::INFINITY
            };
            ui.max(uj)
        })
        .collect();
    (usage.iter().all(|u| u.is_finite()), usage)
}

/// If the analysis meets [`cov_accuracy_requirement`] at every state, then
/// `|Q_ij - Q~_ij| < eps`.
///
/// `details` holds, per analysis state, the larger of `|e_i| / bound_i` and
/// `|e_j| / bound_j` (`+inf` where a bound is violated).
#[allow(clippy::too_many_arguments)]
pub fn cov_bound_certificate(
    truth: &Trajectory,
    analysis: &Trajectory,
    lipschitz: f64,
    true_beta: &ErrorSequence,
    est_beta: &ErrorSequence,
    true_moments: &MomentEstimate,
    est_moments: &MomentEstimate,
    eps: f64,
    i: usize,
    j: usize,
) -> Result<BoundCertificate> {
    check_aligned(truth, analysis, true_beta, est_beta)?;
    let req = cov_accuracy_requirement(eps, true_beta, &true_moments.mean, lipschitz, i, j)?;
    let errors = truth.abs_diff(analysis)?;
    let (hypothesis_met, usage) = cov_hypothesis(&req, &errors);
    let measured = (true_moments.cov.matrix()[(i, j)] - est_moments.cov.matrix()[(i, j)]).abs();
    Ok(BoundCertificate {
        theorem: Theorem::CovEntryBound,
        epsilon: eps,
        hypothesis_met,
        measured_lhs: measured,
        bound_rhs: eps,
        passed: !hypothesis_met || measured < eps,
        tight: false,
        lipschitz: Some(lipschitz),
        entry: Some((i, j)),
        max_analysis_error: Some(errors.iter().map(inf_norm).fold(0.0, f64::max)),
        details: usage,
    })
}

/// [`cov_bound_certificate`] at (just above) the smallest epsilon whose
/// hypothesis the analysis meets, located by bisection. If no epsilon up to
/// `1e12` works, the returned certificate is vacuous at that epsilon.
#[allow(clippy::too_many_arguments)]
pub fn cov_bound_tight(
    truth: &Trajectory,
    analysis: &Trajectory,
    lipschitz: f64,
    true_beta: &ErrorSequence,
    est_beta: &ErrorSequence,
    true_moments: &MomentEstimate,
    est_moments: &MomentEstimate,
    i: usize,
    j: usize,
) -> Result<BoundCertificate> {
    check_aligned(truth, analysis, true_beta, est_beta)?;
    let errors = truth.abs_diff(analysis)?;
    let met = |eps: f64| -> Result<bool> {
        let req = cov_accuracy_requirement(eps, true_beta, &true_moments.mean, lipschitz, i, j)?;
        Ok(cov_hypothesis(&req, &errors).0)
    };
    const EPS_CEILING: f64 = 1e12;
    let mut hi = 1.0;
    while !met(hi)? && hi < EPS_CEILING {
        hi *= 2.0;
    }
    if met(hi)? {
        let mut lo = hi / 2.0;
        while met(lo)? && lo > f64::MIN_POSITIVE {
            hi = lo;
            lo /= 2.0;
        }
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if met(mid)? {
                hi = mid;
            } else {
                lo = mid;
            }
        }
    }
    let mut cert = cov_bound_certificate(
        truth,
        analysis,
        lipschitz,
        true_beta,
        est_beta,
        true_moments,
        est_moments,
        hi,
        i,
        j,
    )?;
    cert.tight = true;
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimation::SequenceKind;
    use proptest::prelude::*;

    fn traj(rows: Vec<Vec<f64>>) -> Trajectory {
        Trajectory::new(rows.into_iter().map(StateVector::from_vec).collect()).unwrap()
    }

    fn betas(rows: Vec<Vec<f64>>, kind: SequenceKind) -> ErrorSequence {
        ErrorSequence::new(rows.into_iter().map(StateVector::from_vec).collect(), kind).unwrap()
    }

    #[test]
    fn product_bound_examples() {
        let c = check_product_bound(1.0, 2.0, 1.0, 2.0, 1.0).unwrap();
        assert!(c.hypothesis_met && c.passed);
        assert_eq!(c.measured_lhs, 0.0);

        let c = check_product_bound(1.2, 2.2, 1.0, 2.0, 1.0).unwrap();
        assert_eq!(c.details, vec![0.25, 0.25]);
        assert!(c.hypothesis_met && c.passed);
        assert!((c.measured_lhs - 0.64).abs() < 1e-12);

        let c = check_product_bound(1.5, 2.0, 1.0, 2.0, 1.0).unwrap();
        assert!(c.is_vacuous() && c.passed);

        assert!(check_product_bound(1.0, 1.0, 1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn product_threshold_with_zero_factor_is_capped_at_one() {
        let (tf, tg) = product_thresholds(3.0, 0.0, 0.5);
        assert_eq!(tf, 1.0);
        assert_eq!(tg, 0.5 / 8.0);
    }

    #[test]
    fn identical_trajectories_pass_every_bound() {
        let t = traj(vec![vec![1.0, 2.0], vec![0.5, 1.0], vec![0.0, 3.0]]);
        let b = betas(
            vec![vec![0.1, 0.2], vec![0.3, -0.1]],
            SequenceKind::TrueBeta,
        );
        let e = betas(
            vec![vec![0.1, 0.2], vec![0.3, -0.1]],
            SequenceKind::EstimatedBeta,
        );
        for eps in [1e-6, 1.0] {
            let c = beta_bound_certificate(&t, &t, 2.0, &b, &e, eps).unwrap();
            assert!(c.hypothesis_met && c.passed && c.measured_lhs == 0.0);
            let mu = StateVector::from_vec(vec![0.2, 0.05]);
            let c = mean_bound_certificate(&t, &t, 2.0, &mu, &mu, eps).unwrap();
            assert!(c.hypothesis_met && c.passed);
            let m = MomentEstimate::from_sequence(&b).unwrap();
            let c = cov_bound_certificate(&t, &t, 2.0, &b, &e, &m, &m, eps, 0, 1).unwrap();
            assert!(c.hypothesis_met && c.passed && c.measured_lhs == 0.0);
        }
    }

    #[test]
    fn identity_model_offset_analysis() {
        // f(x) = x, truth/analysis differ by delta with alternating sign, so each
        // residual error is exactly 2 delta = (L+1) delta.
        let delta = 0.01;
        let truth = traj(vec![vec![0.0], vec![1.0], vec![0.5], vec![2.0]]);
        let analysis = traj(vec![
            vec![delta],
            vec![1.0 - delta],
            vec![0.5 + delta],
            vec![2.0 - delta],
        ]);
        let res = |t: &Trajectory, kind| {
            betas(
                t.states()
                    .windows(2)
                    .map(|w| vec![w[1][0] - w[0][0]])
                    .collect(),
                kind,
            )
        };
        let b = res(&truth, SequenceKind::TrueBeta);
        let e = res(&analysis, SequenceKind::EstimatedBeta);
        let tight = beta_bound_tight(&truth, &analysis, 1.0, &b, &e).unwrap();
        assert!(tight.passed && tight.tight);
        assert!((tight.epsilon - 2.0 * delta).abs() < 1e-15);
        assert!((tight.measured_lhs - 2.0 * delta).abs() < 1e-12);

        // Mean error cancels almost entirely.
        let mu = crate::estimation::sample_mean(&b).unwrap();
        let mu_e = crate::estimation::sample_mean(&e).unwrap();
        let c = mean_bound_tight(&truth, &analysis, 1.0, &mu, &mu_e).unwrap();
        assert!(c.passed);
        assert!(c.measured_lhs < 0.5 * c.bound_rhs);
    }

    #[test]
    fn unmet_hypothesis_is_vacuous_not_failed() {
        let truth = traj(vec![vec![0.0], vec![0.0]]);
        let analysis = traj(vec![vec![1.0], vec![-1.0]]);
        let b = betas(vec![vec![0.0]], SequenceKind::TrueBeta);
        let e = betas(vec![vec![5.0]], SequenceKind::EstimatedBeta);
        let c = beta_bound_certificate(&truth, &analysis, 1.0, &b, &e, 0.1).unwrap();
        assert!(c.is_vacuous());
        assert!(c.passed);
    }

    #[test]
    fn misaligned_inputs_are_rejected() {
        let truth = traj(vec![vec![0.0], vec![0.0], vec![0.0]]);
        let analysis = traj(vec![vec![0.0], vec![0.0]]);
        let b = betas(vec![vec![0.0]], SequenceKind::TrueBeta);
        assert!(beta_bound_certificate(&truth, &analysis, 1.0, &b, &b, 0.1).is_err());
        assert!(beta_bound_certificate(&truth, &truth, 1.0, &b, &b, 0.1).is_err());
    }

    #[test]
    fn requirement_at_degenerate_inputs() {
        let b = betas(vec![vec![0.0, 0.0]; 2], SequenceKind::TrueBeta);
        let mu = StateVector::zeros(2);
        let req = cov_accuracy_requirement(1.0, &b, &mu, 0.0, 0, 1).unwrap();
        assert_eq!(req.thresholds_i, vec![1.0, 1.0]);
        assert_eq!(req.thresholds_j, vec![1.0 / 16.0, 1.0 / 16.0]);

        let req1 = cov_accuracy_requirement(1.0, &b, &mu, 1.0, 0, 1).unwrap();
        assert_eq!(req1.thresholds_i, vec![0.5, 0.5]);
        assert_eq!(req1.thresholds_j, vec![1.0 / 32.0, 1.0 / 32.0]);

        assert!(cov_accuracy_requirement(1.0, &b, &mu, 0.0, 0, 2).is_err());
        assert!(cov_accuracy_requirement(0.0, &b, &mu, 0.0, 0, 1).is_err());
    }

    #[test]
    fn state_thresholds_take_adjacent_minimum() {
        let req = AccuracyRequirement {
            i: 0,
            j: 0,
            epsilon: 1.0,
            lipschitz: 0.0,
            thresholds_i: vec![0.3, 0.1, 0.2],
            thresholds_j: vec![0.5, 0.6, 0.4],
        };
        assert_eq!(req.state_thresholds(0), (0.3, 0.5));
        assert_eq!(req.state_thresholds(1), (0.1, 0.5));
        assert_eq!(req.state_thresholds(2), (0.1, 0.4));
        assert_eq!(req.state_thresholds(3), (0.2, 0.4));
    }

    #[test]
    fn tight_cov_epsilon_sits_on_the_hypothesis_boundary() {
        let truth = traj(vec![
            vec![0.0, 0.0],
            vec![1.0, 0.5],
            vec![0.2, 0.1],
            vec![0.0, 1.0],
        ]);
        let analysis = traj(vec![
            vec![1e-3, 0.0],
            vec![1.0, 0.5 - 2e-3],
            vec![0.2, 0.1],
            vec![0.0, 1.0],
        ]);
        let diff = |t: &Trajectory, kind| {
            betas(
                t.states()
                    .windows(2)
                    .map(|w| (&w[1] - &w[0]).iter().copied().collect())
                    .collect(),
                kind,
            )
        };
        let b = diff(&truth, SequenceKind::TrueBeta);
        let e = diff(&analysis, SequenceKind::EstimatedBeta);
        let mb = MomentEstimate::from_sequence(&b).unwrap();
        let me = MomentEstimate::from_sequence(&e).unwrap();
        let tight = cov_bound_tight(&truth, &analysis, 1.0, &b, &e, &mb, &me, 0, 1).unwrap();
        assert!(tight.hypothesis_met && tight.passed);
        let below = cov_bound_certificate(
            &truth,
            &analysis,
            1.0,
            &b,
            &e,
            &mb,
            &me,
            tight.epsilon * (1.0 - 1e-9),
            0,
            1,
        )
        .unwrap();
        assert!(below.is_vacuous());
    }

    proptest! {
        #[test]
        fn thresholds_are_monotone(
            beta in -2.0f64..2.0, mu in -1.0f64..1.0, l in 0.0f64..3.0,
            eps in 1e-4f64..1.0, grow in 1.0f64..3.0,
        ) {
            let seq = |v: f64| betas(vec![vec![v, v]; 3], SequenceKind::TrueBeta);
            let m = |v: f64| StateVector::from_vec(vec![v, v]);
            let base = cov_accuracy_requirement(eps, &seq(beta), &m(mu), l, 0, 1).unwrap();
            let bigger_beta = cov_accuracy_requirement(eps, &seq(beta * grow), &m(mu), l, 0, 1).unwrap();
            let bigger_mu = cov_accuracy_requirement(eps, &seq(beta), &m(mu * grow), l, 0, 1).unwrap();
            let bigger_l = cov_accuracy_requirement(eps, &seq(beta), &m(mu), l * grow + 0.1, 0, 1).unwrap();
            for other in [&bigger_beta, &bigger_mu, &bigger_l] {
                prop_assert!(other.thresholds_i[0] <= base.thresholds_i[0]);
                prop_assert!(other.thresholds_j[0] <= base.thresholds_j[0]);
            }
            // Off the saturated branch the thresholds scale with eps.
            let half = cov_accuracy_requirement(eps / 2.0, &seq(beta), &m(mu), l, 0, 1).unwrap();
            let cap = 1.0 / (l + 1.0);
            if base.thresholds_j[0] < cap {
                prop_assert!((half.thresholds_j[0] * 2.0 - base.thresholds_j[0]).abs() <= 1e-12 * base.thresholds_j[0]);
            }
        }

        #[test]
        fn product_bound_never_fails(
            l in -5.0f64..5.0, m in -5.0f64..5.0, eps in 1e-3f64..2.0,
            uf in -1.0f64..1.0, ug in -1.0f64..1.0,
        ) {
            let (tf, tg) = product_thresholds(l, m, eps);
            let c = check_product_bound(l + uf * tf * 0.999, m + ug * tg * 0.999, l, m, eps).unwrap();
            prop_assert!(c.hypothesis_met);
            prop_assert!(c.passed);
        }

        #[test]
        fn vacuous_certificates_always_pass(f in -3.0f64..3.0, g in -3.0f64..3.0, eps in 1e-3f64..1.0) {
            let c = check_product_bound(f, g, 0.0, 0.0, eps).unwrap();
            prop_assert!(c.hypothesis_met || c.passed);
        }
    }
}
