//! Check the error bounds on a run: product thresholds, residual and mean
//! bounds at several epsilons, and the per-sample accuracy the covariance
//! bound asks for.

use model_error::bounds::{check_product_bound, cov_accuracy_requirement, product_thresholds};
use model_error::harness::{run_twin_experiment, ExperimentConfig};
use model_error::Result;

fn main() -> Result<()> {
    let (tf, tg) = product_thresholds(2.0, 3.0, 0.1);
    println!("product near (2, 3): |f-2| < {tf:.4}, |g-3| < {tg:.4} keeps |fg - 6| < 0.1");
    let cert = check_product_bound(2.0 + 0.9 * tf, 3.0 - 0.9 * tg, 2.0, 3.0, 0.1)?;
    println!(
        "  |fg - 6| = {:.4}, passed {}",
        cert.measured_lhs, cert.passed
    );

    let cfg = ExperimentConfig {
        steps: 1000,
        r_variance: 1e-6,
        ..ExperimentConfig::default()
    };
    let run = run_twin_experiment(&cfg)?;
    println!(
        "L = {:.4}, max analysis error = {:.3e}",
        run.lipschitz.value,
        run.max_analysis_error()
    );
    for c in &run.certificates {
        println!(
            "{:<16} eps {:>10.3e}  hypothesis {:<5}  lhs {:.3e}  {}{}",
            format!("{:?}", c.theorem),
            c.epsilon,
            c.hypothesis_met,
            c.measured_lhs,
            if c.passed { "pass" } else { "FAIL" },
            if c.tight { " (tight)" } else { "" }
        );
    }

    let (i, j) = cfg.entry();
    let req = cov_accuracy_requirement(
        1e-3,
        &run.beta,
        &run.sampled.mean,
        run.lipschitz.value,
        i,
        j,
    )?;
    let smallest = req
        .thresholds_i
        .iter()
        .chain(&req.thresholds_j)
        .copied()
        .fold(f64::INFINITY, f64::min);
    println!(
        "for |Q_ij - Q~_ij| < 1e-3 the analysis must stay within {smallest:.3e} on ({i}, {j})"
    );
    Ok(())
}
