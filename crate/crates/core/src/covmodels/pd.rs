//! Numerical positive-definiteness check: smallest eigenvalue of the
//! covariance matrix on random points.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use super::CovarianceModel;
use crate::error::{Error, Result};
use crate::variogram::{distance, Point};

pub const MAX_PD_POINTS: usize = 500;

/// Side length of the cube the diagnostic samples from.
const DOMAIN: f64 = 10.0;

/// Covariance matrix of `model` over `locations`. Built from unordered pairs
/// and mirrored, so it is exactly symmetric; the nugget sits on the diagonal.
pub fn covariance_matrix(model: &CovarianceModel, locations: &[Point]) -> DMatrix<f64> {
    let n = locations.len();
    let mut m = DMatrix::zeros(n, n);
    let c0 = model.covariance(0.0);
    for i in 0..n {
        m[(i, i)] = c0;
        for j in i + 1..n {
            let c = model.covariance(distance(&locations[i], &locations[j]));
            m[(i, j)] = c;
            m[(j, i)] = c;
        }
    }
    m
}

pub fn min_eigenvalue(matrix: DMatrix<f64>) -> Result<f64> {
    let eig = SymmetricEigen::try_new(matrix, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Eigen("symmetric eigensolver did not converge".into()))?;
    Ok(eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min))
}

/// Minimum eigenvalue of the covariance matrix on `n` points drawn uniformly
/// from `[0, 10]^dim` with a ChaCha20 generator seeded by `seed`.
pub fn pd_diagnostic(model: &CovarianceModel, dim: usize, n: usize, seed: u64) -> Result<f64> {
    if !(1..=3).contains(&dim) {
        return Err(Error::InvalidParameter(format!(
            "dimension must be 1, 2 or 3, got {dim}"
        )));
    }
    if n == 0 || n > MAX_PD_POINTS {
        return Err(Error::InvalidParameter(format!(
            "point count must lie in 1..={MAX_PD_POINTS}, got {n}"
        )));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let points: Vec<Point> = (0..n)
        .map(|_| {
            let mut p = [0.0; 3];
            for c in p.iter_mut().take(dim) {
                *c = rng.random::<f64>() * DOMAIN;
            }
            p
        })
        .collect();
    min_eigenvalue(covariance_matrix(model, &points))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covmodels::{Family, ParameterVector};

    #[test]
    fn gaussian_and_hole_effect_are_pd() {
        let g = CovarianceModel::unscaled(Family::GaussianHo { r: 1 }).unwrap();
        assert!(pd_diagnostic(&g, 2, 50, 1).unwrap() >= -1e-8);
        let hole =
            CovarianceModel::new(Family::HoleEffect, ParameterVector::new(0.0, 1.0, 1.0)).unwrap();
        assert!(pd_diagnostic(&hole, 3, 50, 1).unwrap() >= -1e-8);
        assert!(pd_diagnostic(&hole, 1, 50, 1).unwrap() >= -1e-8);
    }

    #[test]
    fn matrix_is_symmetric_with_nugget_on_diagonal() {
        let model =
            CovarianceModel::new(Family::SineCosine, ParameterVector::new(0.5, 2.0, 1.0)).unwrap();
        let pts = [[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.3, 2.0, 0.0]];
        let m = covariance_matrix(&model, &pts);
        assert_eq!(m, m.transpose());
        assert_eq!(m[(1, 1)], 2.5);
        assert!(m[(0, 1)] < 2.0);
    }

    #[test]
    fn rejects_bad_arguments() {
        let g = CovarianceModel::unscaled(Family::GaussianHo { r: 1 }).unwrap();
        assert!(pd_diagnostic(&g, 4, 10, 1).is_err());
        assert!(pd_diagnostic(&g, 2, 501, 1).is_err());
        assert!(pd_diagnostic(&g, 2, 0, 1).is_err());
    }

    #[test]
    fn seeded_runs_are_reproducible() {
        let g = CovarianceModel::unscaled(Family::MullerC2 { r: 2, s: 1 }).unwrap();
        assert_eq!(
            pd_diagnostic(&g, 3, 40, 7).unwrap(),
            pd_diagnostic(&g, 3, 40, 7).unwrap()
        );
    }
}
