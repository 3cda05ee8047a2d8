//! Recover model-error moments from analysis residuals on a linear toy model
//! where the analysis is the truth plus a little noise.

use model_error::dynamics::LinearMap;
use model_error::estimation::{
    moment_error_report, residual_sequence, ErrorSequence, MomentEstimate, SequenceKind,
};
use model_error::stochastic::{CovarianceMatrix, GaussianSpec, RngStream, StreamId};
use model_error::{Result, StateVector, Trajectory};
use nalgebra::{dmatrix, dvector};

fn main() -> Result<()> {
    let map = LinearMap {
        matrix: dmatrix![0.9, 0.1; -0.2, 0.8],
    };
    let mean = dvector![0.3, -0.1];
    let cov = CovarianceMatrix::new(dmatrix![0.04, 0.01; 0.01, 0.02])?;
    let spec = GaussianSpec::from_covariance(mean.clone(), &cov)?;
    let mut rng = RngStream::new(3, StreamId::ModelError);
    let mut noise = RngStream::new(3, StreamId::ObservationNoise);

    let mut truth = vec![StateVector::zeros(2)];
    let mut betas = Vec::new();
    for _ in 0..4000 {
        let b = spec.sample(&mut rng);
        truth.push(&map.matrix * truth.last().unwrap() + &b);
        betas.push(b);
    }
    let analysis: Vec<StateVector> = truth
        .iter()
        .map(|x| x + noise.standard_normal_vector(2) * 1e-3)
        .collect();

    let beta = ErrorSequence::new(betas, SequenceKind::TrueBeta)?;
    let beta_tilde = residual_sequence(&Trajectory::new(analysis)?, &map)?;
    let sampled = MomentEstimate::from_sequence(&beta)?;
    let estimated = MomentEstimate::from_sequence(&beta_tilde)?;
    let report = moment_error_report(&sampled, &estimated, &mean, &cov)?;

    println!("estimated mean {:.4?}", estimated.mean.as_slice());
    println!("estimated cov  {:.4}", estimated.cov.matrix());
    println!(
        "{}",
        serde_json::to_string_pretty(&report.maxima()).expect("serializes")
    );
    Ok(())
}
