//! Independent reference computations shared by the integration tests.
//! None of these go through the library's numerical paths.
#![allow(dead_code)]

use model_error::dynamics::rk4_step;
use model_error::dynamics::Tendency;
use nalgebra::{DMatrix, DVector};

/// Sample covariance by explicit double loop, divisor `len - 1`.
pub fn brute_force_cov(samples: &[DVector<f64>]) -> DMatrix<f64> {
    let n = samples[0].len();
    let t = samples.len();
    let mut mean = vec![0.0; n];
    for s in samples {
        for i in 0..n {
            mean[i] += s[i] / t as f64;
        }
    }
    let mut out = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let mut acc = 0.0;
            for s in samples {
                acc += (s[i] - mean[i]) * (s[j] - mean[j]);
            }
            out[(i, j)] = acc / (t - 1) as f64;
        }
    }
    out
}

/// Central finite-difference Jacobian of one RK4 step.
pub fn fd_jacobian<T: Tendency>(tendency: &T, x: &DVector<f64>, dt: f64, h: f64) -> DMatrix<f64> {
    let n = x.len();
    let mut jac = DMatrix::zeros(n, n);
    for c in 0..n {
        let mut xp = x.clone();
        let mut xm = x.clone();
        xp[c] += h;
        xm[c] -= h;
        let col = (rk4_step(tendency, &xp, dt).unwrap() - rk4_step(tendency, &xm, dt).unwrap())
            / (2.0 * h);
        jac.set_column(c, &col);
    }
    jac
}

/// Minimizes the 3DVar cost by steepest descent with a fixed step `1/|A|_F`,
/// where `A = B^-1 + H^T R^-1 H` is the cost Hessian.
pub fn gradient_descent_3dvar(
    xf: &DVector<f64>,
    y: &DVector<f64>,
    b: &DMatrix<f64>,
    r: &DMatrix<f64>,
    h: &DMatrix<f64>,
) -> DVector<f64> {
    let b_inv = b.clone().try_inverse().unwrap();
    let r_inv = r.clone().try_inverse().unwrap();
    let hessian = &b_inv + h.transpose() * &r_inv * h;
    let step = 1.0 / hessian.norm();
    let mut x = xf.clone();
    for _ in 0..2_000_000 {
        let grad = &b_inv * (&x - xf) - h.transpose() * &r_inv * (y - h * &x);
        if grad.amax() < 1e-14 {
            break;
        }
        x -= grad * step;
    }
    x
}

/// Least-squares slope of `ys` against `xs`.
pub fn fitted_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}
