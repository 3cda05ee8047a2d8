//! One 3DVar analysis with partial observations, and how the weights on
//! background and observations move with B and R.

use model_error::assimilation::{threedvar_analysis, AssimilationConfig, ObservationOperator};
use model_error::stochastic::CovarianceMatrix;
use model_error::{Result, StateVector};

fn main() -> Result<()> {
    let forecast = StateVector::from_vec(vec![1.0, 2.0, 3.0, 4.0, 5.0]);
    let y = StateVector::from_vec(vec![0.0, 0.0]);
    let operator = ObservationOperator::selection(5, vec![1, 3])?;

    for (b, r) in [(1.0, 1.0), (1.0, 1e-4), (1e-4, 1.0)] {
        let cfg = AssimilationConfig {
            background: CovarianceMatrix::scaled_identity(5, b)?,
            observation: CovarianceMatrix::scaled_identity(2, r)?,
            operator: operator.clone(),
        };
        let xa = threedvar_analysis(&forecast, &y, &cfg)?;
        println!("B = {b:<6} R = {r:<6} x_a = {:.4?}", xa.as_slice());
    }
    Ok(())
}
