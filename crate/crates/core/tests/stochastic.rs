mod common;

use model_error::stochastic::{
    build_true_cov, build_true_mean, sample_gaussian, symmetric_sqrt, CovarianceMatrix,
    GaussianSpec, RngStream, StreamId,
};
use nalgebra::DMatrix;

#[test]
fn monte_carlo_moments_match_prescribed() {
    let mean = build_true_mean(40);
    let cov = build_true_cov(40, false).unwrap();
    let spec = GaussianSpec::from_covariance(mean.clone(), &cov).unwrap();
    let mut rng = RngStream::new(123, StreamId::ModelError);
    let draws: Vec<_> = (0..100_000)
        .map(|_| sample_gaussian(&spec, &mut rng))
        .collect();
    let n = draws.len() as f64;
    let sample_mean = draws.iter().fold(mean.clone() * 0.0, |acc, d| acc + d) / n;
    assert!((&sample_mean - &mean).amax() < 0.005);
    let sample_cov = common::brute_force_cov(&draws);
    assert!((sample_cov - cov.matrix()).amax() < 0.002);
}

#[test]
fn square_roots_reconstruct_their_targets() {
    for n in [5, 6, 17, 40, 64] {
        for cyclic in [false, true] {
            let q = build_true_cov(n, cyclic).unwrap();
            let spec = GaussianSpec::from_covariance(build_true_mean(n), &q).unwrap();
            let s = spec.sqrt_cov();
            assert!(
                (s * s.transpose() - q.matrix()).amax() < 1e-10,
                "n={n} cyclic={cyclic}"
            );
        }
    }
    // A rank-deficient target: ones(3,3) has eigenvalues 3, 0, 0.
    let q = CovarianceMatrix::new(DMatrix::from_element(3, 3, 1.0)).unwrap();
    let s = symmetric_sqrt(&q).unwrap();
    assert!((&s * s.transpose() - q.matrix()).amax() < 1e-10);
}

#[test]
fn streams_from_one_seed_are_uncorrelated() {
    let mut a = RngStream::new(7, StreamId::ModelError);
    let mut b = RngStream::new(7, StreamId::ObservationNoise);
    let n = 10_000;
    let xs: Vec<f64> = (0..n).map(|_| a.next_normal()).collect();
    let ys: Vec<f64> = (0..n).map(|_| b.next_normal()).collect();
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let corr = sxy / (sxx * syy).sqrt();
    assert!(corr.abs() < 0.05, "correlation {corr}");
}

#[test]
fn generator_output_is_pinned() {
    // The counter-based generator is part of the reproducibility contract;
    // these words must never change across releases or platforms.
    let rng = RngStream::new(0, StreamId::ModelError);
    let words: Vec<u64> = (0..3).map(|c| rng.word_at(c)).collect();
    assert_eq!(words, PINNED_WORDS);
}

// SplitMix64 finalizer of (key + counter * golden gamma), checked against an
// independent implementation.
const PINNED_WORDS: [u64; 3] = [
    13553007506419474716,
    5884387382020919596,
    3012222893850019301,
];
