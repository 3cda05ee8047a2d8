//! Integrate Lorenz 96, inspect the RK4 tangent linear map and estimate the
//! Lipschitz constant of one step along a trajectory.
//!
//!     cargo run --example lorenz96_flow

use model_error::dynamics::{
    estimate_lipschitz, matrix_inf_norm, sample_pairwise_lipschitz, Lorenz96, ModelStep,
};
use model_error::stochastic::{RngStream, StreamId};
use model_error::{Result, StateVector};

fn main() -> Result<()> {
    let n = 40;
    let model = ModelStep::new(Lorenz96::default(), 0.05)?;

    let mut x0 = StateVector::from_element(n, 8.0);
    x0[0] += 0.01;
    let x0 = model.integrate(&x0, 1000)?;
    let traj = model.free_run(&x0, 500)?;
    println!("state after spin-up: x[0..4] = {:.4?}", &x0.as_slice()[..4]);

    let jac = model.jacobian(&x0)?;
    println!("|J(x0)|_inf = {:.4}", matrix_inf_norm(&jac));

    let sup = estimate_lipschitz(&model, &traj)?;
    println!(
        "Jacobian supremum over {} states: L = {:.4}",
        sup.sample_count, sup.value
    );

    let mut rng = RngStream::new(7, StreamId::Init);
    let pairs = sample_pairwise_lipschitz(&model, traj.states(), 1e-4, 4, &mut rng)?;
    println!(
        "pairwise sampling ({} pairs): L >= {:.4}",
        pairs.sample_count, pairs.value
    );
    Ok(())
}
