//! Seeded Gaussian sampling for model error and observation noise.
//!
//! Randomness comes from [`RngStream`], a counter-based generator: the `i`-th
//! output of a stream is a pure function of `(seed, stream id, i)`. The integer
//! generator is SplitMix64 keyed per stream, so output is identical on every
//! platform. Normals use the Box-Muller transform (cosine branch), consuming two
//! 64-bit words each.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::state::StateVector;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix_finalize(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Identifies an independent random stream derived from one seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StreamId {
    ModelError,
    ObservationNoise,
    Init,
}

impl StreamId {
    fn salt(self) -> u64 {
        match self {
            StreamId::ModelError => 0x6D6F_6465_6C2D_6572,
            StreamId::ObservationNoise => 0x6F62_732D_6E6F_6973,
            StreamId::Init => 0x696E_6974_2D73_7472,
        }
    }
}

/// Counter-based random stream. Cloning a stream replays it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RngStream {
    seed: u64,
    stream: StreamId,
    key: u64,
    counter: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream: StreamId) -> Self {
        Self::at(seed, stream, 0)
    }

    /// A stream positioned at `counter`.
    pub fn at(seed: u64, stream: StreamId, counter: u64) -> Self {
        RngStream {
            seed,
            stream,
            key: splitmix_finalize(seed ^ stream.salt()),
            counter,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> StreamId {
        self.stream
    }

    pub fn counter(&self) -> u64 {
        self.counter
    }

    /// The word at an arbitrary position, without advancing.
    pub fn word_at(&self, counter: u64) -> u64 {
        splitmix_finalize(self.key.wrapping_add(counter.wrapping_mul(GOLDEN_GAMMA)))
    }

    pub fn next_u64(&mut self) -> u64 {
        let out = self.word_at(self.counter);
        self.counter = self.counter.wrapping_add(1);
        out
    }

    /// Uniform on `[0, 1)` with 53 bits of resolution.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal draw.
    pub fn next_normal(&mut self) -> f64 {
        // (0, 1] so the logarithm is finite.
        let u1 = ((self.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64);
        let u2 = self.next_f64();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    pub fn standard_normal_vector(&mut self, n: usize) -> StateVector {
        StateVector::from_fn(n, |_, _| self.next_normal())
    }
}

/// A symmetric positive semi-definite matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix(DMatrix<f64>);

const SYMMETRY_TOL: f64 = 1e-12;
const PSD_TOL: f64 = 1e-10;
const CLAMP_TOL: f64 = 1e-12;

impl CovarianceMatrix {
    /// Validates symmetry, a non-negative diagonal, and positive
    /// semi-definiteness.
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::validation(format!(
                "covariance must be square, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::validation("covariance has non-finite entries"));
        }
        let asym = (&m - m.transpose()).amax();
        if asym > SYMMETRY_TOL {
            return Err(Error::validation(format!(
                "covariance is not symmetric (max asymmetry {asym:e})"
            )));
        }
        if m.diagonal().iter().any(|&d| d < 0.0) {
            return Err(Error::validation(
                "covariance has a negative diagonal entry",
            ));
        }
        let min_eigenvalue = min_eigenvalue(&m);
        if min_eigenvalue < -PSD_TOL {
            return Err(Error::NotPositiveSemiDefinite { min_eigenvalue });
        }
        Ok(CovarianceMatrix(m))
    }

    /// Wraps a matrix that is symmetric PSD by construction.
    pub(crate) fn from_trusted(m: DMatrix<f64>) -> Self {
        CovarianceMatrix(m)
    }

    pub fn scaled_identity(n: usize, variance: f64) -> Result<Self> {
        if !(variance >= 0.0 && variance.is_finite()) {
            return Err(Error::validation(format!(
                "variance must be >= 0, got {variance}"
            )));
        }
        Ok(CovarianceMatrix(DMatrix::identity(n, n) * variance))
    }

    pub fn zeros(n: usize) -> Self {
        CovarianceMatrix(DMatrix::zeros(n, n))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.0
    }

    pub fn scaled(&self, factor: f64) -> Self {
        CovarianceMatrix(&self.0 * factor)
    }
}

fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    let sym = (m + m.transpose()) * 0.5;
    SymmetricEigen::new(sym)
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// Prescribed model-error mean: component `i` (1-based) is `0.2 sin(pi i / n)`.
pub fn build_true_mean(n: usize) -> StateVector {
    StateVector::from_fn(n, |r, _| {
        let i = (r + 1) as f64;
        0.2 * (std::f64::consts::PI * i / n as f64).sin()
    })
}

/// Prescribed model-error covariance `0.01 * 1.5 * C` where `C` is banded with
/// 1 on the diagonal, 2/3 at distance one and 1/6 at distance two.
///
/// With `cyclic = false` the distance is the plain index difference; with
/// `cyclic = true` it wraps around like the Lorenz 96 indices.
pub fn build_true_cov(n: usize, cyclic: bool) -> Result<CovarianceMatrix> {
    if n < 5 {
        return Err(Error::validation(format!(
            "prescribed covariance needs dimension >= 5, got {n}"
        )));
    }
    // (1/10)^2 * 3/2, written to round to the nearest double of 0.015.
    let scale = 3.0 / 200.0;
    let m = DMatrix::from_fn(n, n, |i, j| {
        let d = i.abs_diff(j);
        let d = if cyclic { d.min(n - d) } else { d };
        let c = match d {
            0 => 1.0,
            1 => 2.0 / 3.0,
            2 => 1.0 / 6.0,
            _ => 0.0,
        };
        scale * c
    });
    Ok(CovarianceMatrix(m))
}

/// Symmetric square root `S` with `S S^T = Q`, via the eigendecomposition of
/// `Q`. Eigenvalues in `[-1e-10, 0)` are treated as zero; anything more
/// negative is rejected.
pub fn symmetric_sqrt(q: &CovarianceMatrix) -> Result<DMatrix<f64>> {
    let sym = (q.matrix() + q.matrix().transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let min_eigenvalue = eig
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    if min_eigenvalue < -PSD_TOL {
        return Err(Error::NotPositiveSemiDefinite { min_eigenvalue });
    }
    let roots = eig.eigenvalues.map(|l| {
        if l < CLAMP_TOL {
            l.max(0.0).sqrt()
        } else {
            l.sqrt()
        }
    });
    let v = &eig.eigenvectors;
    let s = v * DMatrix::from_diagonal(&roots) * v.transpose();
    Ok((&s + s.transpose()) * 0.5)
}

/// Mean and square-root covariance of a Gaussian.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianSpec {
    mean: StateVector,
    sqrt_cov: DMatrix<f64>,
}

impl GaussianSpec {
    pub fn new(mean: StateVector, sqrt_cov: DMatrix<f64>) -> Result<Self> {
        if sqrt_cov.nrows() != mean.len() {
            return Err(Error::validation(format!(
                "square root has {} rows but the mean has {} entries",
                sqrt_cov.nrows(),
                mean.len()
            )));
        }
        Ok(GaussianSpec { mean, sqrt_cov })
    }

    pub fn from_covariance(mean: StateVector, cov: &CovarianceMatrix) -> Result<Self> {
        Self::new(mean, symmetric_sqrt(cov)?)
    }

    pub fn mean(&self) -> &StateVector {
        &self.mean
    }

    pub fn sqrt_cov(&self) -> &DMatrix<f64> {
        &self.sqrt_cov
    }

    pub fn covariance(&self) -> CovarianceMatrix {
        CovarianceMatrix::from_trusted(&self.sqrt_cov * self.sqrt_cov.transpose())
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn sample(&self, rng: &mut RngStream) -> StateVector {
        sample_gaussian(self, rng)
    }
}

/// Draws `mean + S z` with `z` standard normal, advancing `rng` by two words per
/// latent dimension.
pub fn sample_gaussian(spec: &GaussianSpec, rng: &mut RngStream) -> StateVector {
    let z = rng.standard_normal_vector(spec.sqrt_cov.ncols());
    &spec.mean + &spec.sqrt_cov * z
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn true_mean_values() {
        let mu = build_true_mean(40);
        assert!((mu[19] - 0.2).abs() < 1e-15);
        assert!(mu[39].abs() < 1e-15);
        assert!((mu[9] - 0.141_421_4).abs() < 1e-7);
    }

    #[test]
    fn true_cov_band_values() {
        let q = build_true_cov(40, false).unwrap();
        let m = q.matrix();
        assert!((m[(0, 0)] - 0.015).abs() < 1e-17);
        assert!((m[(4, 5)] - 0.01).abs() < 1e-17);
        assert!((m[(7, 5)] - 0.0025).abs() < 1e-17);
        assert_eq!(m[(0, 39)], 0.0);
        assert_eq!(m[(0, 38)], 0.0);

        let cyc = build_true_cov(40, true).unwrap();
        assert!((cyc.matrix()[(0, 39)] - 0.01).abs() < 1e-17);
        assert!((cyc.matrix()[(0, 38)] - 0.0025).abs() < 1e-17);
        assert!(build_true_cov(4, false).is_err());
    }

    #[test]
    fn both_prescribed_covariances_are_psd() {
        for cyclic in [false, true] {
            let q = build_true_cov(40, cyclic).unwrap();
            CovarianceMatrix::new(q.into_inner()).unwrap();
        }
    }

    #[test]
    fn sqrt_of_simple_matrices() {
        let eye = CovarianceMatrix::new(DMatrix::identity(3, 3)).unwrap();
        assert!((symmetric_sqrt(&eye).unwrap() - DMatrix::identity(3, 3)).amax() < 1e-15);
        let d = CovarianceMatrix::new(DMatrix::from_diagonal(&StateVector::from_vec(vec![
            4.0, 9.0,
        ])))
        .unwrap();
        let s = symmetric_sqrt(&d).unwrap();
        let expected = DMatrix::from_diagonal(&StateVector::from_vec(vec![2.0, 3.0]));
        assert!((s - expected).amax() < 1e-14);
    }

    #[test]
    fn sqrt_reconstructs_prescribed_cov() {
        for cyclic in [false, true] {
            let q = build_true_cov(40, cyclic).unwrap();
            let s = symmetric_sqrt(&q).unwrap();
            assert!((&s - s.transpose()).amax() == 0.0);
            assert!((&s * s.transpose() - q.matrix()).amax() < 1e-10);
        }
    }

    #[test]
    fn rejects_indefinite_matrices() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        assert!(matches!(
            CovarianceMatrix::new(m.clone()),
            Err(Error::NotPositiveSemiDefinite { .. })
        ));
        let q = CovarianceMatrix::from_trusted(m);
        assert!(matches!(
            symmetric_sqrt(&q),
            Err(Error::NotPositiveSemiDefinite { .. })
        ));
        let asym = DMatrix::from_row_slice(2, 2, &[1.0, 0.1, 0.0, 1.0]);
        assert!(CovarianceMatrix::new(asym).is_err());
    }

    #[test]
    fn zero_sqrt_returns_mean() {
        let mean = build_true_mean(10);
        let spec = GaussianSpec::new(mean.clone(), DMatrix::zeros(10, 10)).unwrap();
        let mut rng = RngStream::new(5, StreamId::ModelError);
        assert_eq!(spec.sample(&mut rng), mean);
        assert_eq!(rng.counter(), 20);
    }

    #[test]
    fn streams_replay_from_position() {
        let mut a = RngStream::new(42, StreamId::ObservationNoise);
        let first: Vec<u64> = (0..10).map(|_| a.next_u64()).collect();
        let mut b = RngStream::at(42, StreamId::ObservationNoise, 4);
        assert_eq!(b.next_u64(), first[4]);

        let spec =
            GaussianSpec::from_covariance(build_true_mean(6), &build_true_cov(6, false).unwrap())
                .unwrap();
        let mut r1 = RngStream::at(1, StreamId::ModelError, 100);
        let mut r2 = r1.clone();
        assert_eq!(spec.sample(&mut r1), spec.sample(&mut r2));
    }

    #[test]
    fn streams_from_one_seed_differ() {
        let mut a = RngStream::new(1, StreamId::ModelError);
        let mut b = RngStream::new(1, StreamId::ObservationNoise);
        let mut c = RngStream::new(2, StreamId::ModelError);
        let x = a.next_u64();
        assert_ne!(x, b.next_u64());
        assert_ne!(x, c.next_u64());
    }

    #[test]
    fn uniform_and_normal_ranges() {
        let mut rng = RngStream::new(11, StreamId::Init);
        let n = 20_000;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for _ in 0..n {
            let u = rng.next_f64();
            assert!((0.0..1.0).contains(&u));
            let z = rng.next_normal();
            assert!(z.is_finite());
            sum += z;
            sum_sq += z * z;
        }
        let mean = sum / n as f64;
        let var = sum_sq / n as f64 - mean * mean;
        assert!(mean.abs() < 4.0 / (n as f64).sqrt());
        assert!((var - 1.0).abs() < 0.05);
    }
}
