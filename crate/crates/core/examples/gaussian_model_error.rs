//! Draw model errors from the prescribed Gaussian and compare sample moments
//! with their targets.
//!
//!     cargo run --example gaussian_model_error [samples]

use model_error::estimation::{sample_cov, sample_mean, ErrorSequence, SequenceKind};
use model_error::stochastic::{
    build_true_cov, build_true_mean, symmetric_sqrt, GaussianSpec, RngStream, StreamId,
};
use model_error::Result;

fn main() -> Result<()> {
    let count: usize = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(5000);
    let n = 40;
    let mean = build_true_mean(n);
    let cov = build_true_cov(n, false)?;

    let root = symmetric_sqrt(&cov)?;
    println!(
        "|S S - Q|_max = {:.2e}",
        (&root * &root - cov.matrix()).amax()
    );

    let spec = GaussianSpec::new(mean.clone(), root)?;
    let mut rng = RngStream::new(1, StreamId::ModelError);
    let draws = (0..count).map(|_| spec.sample(&mut rng)).collect();
    let seq = ErrorSequence::new(draws, SequenceKind::TrueBeta)?;

    let mu = sample_mean(&seq)?;
    let q = sample_cov(&seq)?;
    println!("{count} draws");
    println!("  max |mu - mu_bar| = {:.3e}", (&mu - &mean).amax());
    println!(
        "  max |Q - Q_bar|   = {:.3e}",
        (q.matrix() - cov.matrix()).amax()
    );
    println!(
        "  Q[0][0..3] = {:.4?}  (target 0.015, 0.01, 0.0025)",
        [q.matrix()[(0, 0)], q.matrix()[(0, 1)], q.matrix()[(0, 2)]]
    );
    Ok(())
}
