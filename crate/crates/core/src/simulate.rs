//! Unconditional Gaussian random-field simulation by Cholesky factorization
//! of the covariance matrix, and pointwise variogram envelopes.
//!
//! Standard normal variates come from a ChaCha20 stream
//! (`rand_chacha::ChaCha20Rng::seed_from_u64(seed)`) transformed by the
//! ziggurat sampler of `rand_distr::StandardNormal`. Both are pure integer and
//! IEEE arithmetic, so a given seed yields the same field on every platform.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::covmodels::{covariance_matrix, CovarianceModel};
use crate::error::{Error, Result};
use crate::variogram::{BinningConfig, Dataset, LagPairs, Point};

pub const MAX_SIM_POINTS: usize = 5000;

/// Replicates used by the envelope test unless told otherwise.
pub const DEFAULT_N_SIM: usize = 39;

/// First diagonal jitter tried, relative to `C(0)`.
const JITTER_START: f64 = 1e-10;
/// Largest diagonal jitter tried, relative to `C(0)`.
const JITTER_MAX: f64 = 1e-6;

/// A factorized covariance matrix, reusable across seeds.
#[derive(Debug, Clone)]
pub struct FieldSampler {
    n: usize,
    factor: Option<Cholesky<f64, Dyn>>,
    jitter: f64,
}

impl FieldSampler {
    pub fn new(model: &CovarianceModel, locations: &[Point]) -> Result<Self> {
        let n = locations.len();
        if n == 0 || n > MAX_SIM_POINTS {
            return Err(Error::InvalidParameter(format!(
                "simulation needs 1..={MAX_SIM_POINTS} locations, got {n}"
            )));
        }
        let c0 = model.covariance(0.0);
        if c0 == 0.0 {
            // zero covariance: every draw is the mean
            return Ok(Self {
                n,
                factor: None,
                jitter: 0.0,
            });
        }
        let sigma = covariance_matrix(model, locations);
        if let Some(chol) = sigma.clone().cholesky() {
            return Ok(Self {
                n,
                factor: Some(chol),
                jitter: 0.0,
            });
        }
        let mut rel = JITTER_START;
        while rel <= JITTER_MAX * (1.0 + 1e-9) {
            let jitter = rel * c0;
            let shifted = &sigma + DMatrix::identity(n, n) * jitter;
            if let Some(chol) = shifted.cholesky() {
                return Ok(Self {
                    n,
                    factor: Some(chol),
                    jitter,
                });
            }
            rel *= 10.0;
        }
        Err(Error::NotPositiveDefinite {
            max_jitter: JITTER_MAX * c0,
        })
    }

    /// Diagonal jitter that was needed for the factorization (0 if none).
    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// `mean + L z` with `z` drawn from the seeded stream.
    pub fn sample(&self, mean: f64, seed: u64) -> Vec<f64> {
        let Some(chol) = &self.factor else {
            return vec![mean; self.n];
        };
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let z = DVector::from_fn(self.n, |_, _| StandardNormal.sample(&mut rng));
        let field = chol.l_dirty().lower_triangle() * z;
        field.iter().map(|v| mean + v).collect()
    }
}

/// One simulated field and the jitter its factorization needed.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulatedField {
    pub values: Vec<f64>,
    pub jitter: f64,
}

/// Draws a Gaussian field with constant `mean` at `locations`; the nugget
/// enters the covariance diagonal only. Deterministic per seed.
pub fn simulate_field(
    model: &CovarianceModel,
    locations: &[Point],
    mean: f64,
    seed: u64,
) -> Result<SimulatedField> {
    let sampler = FieldSampler::new(model, locations)?;
    Ok(SimulatedField {
        values: sampler.sample(mean, seed),
        jitter: sampler.jitter(),
    })
}

/// Per-bin extremes of replicate variograms against the observed one.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeResult {
    pub bin_centers: Vec<f64>,
    pub counts: Vec<usize>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub observed: Vec<f64>,
    pub n_sim: usize,
    pub contained: Vec<bool>,
    pub overall: bool,
    pub jitter: f64,
}

/// Simulates `n_sim` fields of `model` at the data locations (mean = sample
/// mean, replicate `i` seeded with `seed + i`), estimates each variogram with
/// the observed binning, and records per-bin minima and maxima.
pub fn envelope_test(
    model: &CovarianceModel,
    data: &Dataset,
    binning: BinningConfig,
    n_sim: usize,
    seed: u64,
) -> Result<EnvelopeResult> {
    if n_sim == 0 {
        return Err(Error::InvalidParameter("n_sim must be at least 1".into()));
    }
    let pairs = LagPairs::new(data.locations(), binning.resolve(data)?)?;
    let observed = pairs.estimate(data.values());
    let sampler = FieldSampler::new(model, data.locations())?;
    let mean = data.mean();

    let k = observed.len();
    let mut lower = vec![f64::INFINITY; k];
    let mut upper = vec![f64::NEG_INFINITY; k];
    for i in 0..n_sim {
        let field = sampler.sample(mean, seed.wrapping_add(i as u64));
        let rep = pairs.estimate(&field);
        for (b, &g) in rep.estimates().iter().enumerate() {
            lower[b] = lower[b].min(g);
            upper[b] = upper[b].max(g);
        }
    }
    let contained: Vec<bool> = observed
        .estimates()
        .iter()
        .zip(lower.iter().zip(&upper))
        .map(|(o, (lo, hi))| lo <= o && o <= hi)
        .collect();
    Ok(EnvelopeResult {
        bin_centers: observed.bin_centers().to_vec(),
        counts: observed.counts().to_vec(),
        overall: contained.iter().all(|&c| c),
        lower,
        upper,
        observed: observed.estimates().to_vec(),
        n_sim,
        contained,
        jitter: sampler.jitter(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covmodels::{Family, ParameterVector};

    fn model(family: Family, nugget: f64, sill: f64, range: f64) -> CovarianceModel {
        CovarianceModel::new(family, ParameterVector::new(nugget, sill, range)).unwrap()
    }

    fn grid(n: usize, step: f64) -> Vec<Point> {
        (0..n * n)
            .map(|i| [(i % n) as f64 * step, (i / n) as f64 * step, 0.0])
            .collect()
    }

    #[test]
    fn zero_covariance_gives_constant_mean() {
        let m = model(Family::HoleEffect, 0.0, 0.0, 1.0);
        let f = simulate_field(&m, &grid(3, 1.0), 4.5, 7).unwrap();
        assert_eq!(f.values, vec![4.5; 9]);
    }

    #[test]
    fn same_seed_same_field() {
        let m = model(Family::SineCosine, 0.1, 1.0, 2.0);
        let locs = grid(4, 1.0);
        let a = simulate_field(&m, &locs, 0.0, 11).unwrap();
        let b = simulate_field(&m, &locs, 0.0, 11).unwrap();
        let c = simulate_field(&m, &locs, 0.0, 12).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.values, c.values);
    }

    #[test]
    fn near_singular_matrix_gets_jitter() {
        // coincident-limit points under a smooth model without nugget
        let m = model(Family::GaussianHo { r: 1 }, 0.0, 1.0, 50.0);
        let locs: Vec<Point> = (0..30).map(|i| [i as f64 * 1e-3, 0.0, 0.0]).collect();
        let f = simulate_field(&m, &locs, 0.0, 1).unwrap();
        assert!(f.jitter > 0.0);
        assert!(f.values.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn single_replicate_envelope_is_degenerate() {
        let m = model(Family::HoleEffect, 0.2, 1.0, 1.5);
        let locs = grid(6, 1.0);
        let values = simulate_field(&m, &locs, 1.0, 3).unwrap().values;
        let data = Dataset::from_points(2, locs, values).unwrap();
        let env = envelope_test(&m, &data, BinningConfig::new(6, None), 1, 99).unwrap();
        assert_eq!(env.lower, env.upper);
        assert_eq!(env.n_sim, 1);
        for ((lo, hi), (o, c)) in env
            .lower
            .iter()
            .zip(&env.upper)
            .zip(env.observed.iter().zip(&env.contained))
        {
            assert!(lo <= hi);
            assert_eq!(*c, lo <= o && o <= hi);
        }
    }

    #[test]
    fn envelope_is_reproducible() {
        let m = model(Family::SineCosine, 0.1, 1.0, 1.0);
        let locs = grid(5, 1.0);
        let values = simulate_field(&m, &locs, 0.0, 5).unwrap().values;
        let data = Dataset::from_points(2, locs, values).unwrap();
        let cfg = BinningConfig::new(5, None);
        let a = envelope_test(&m, &data, cfg, 39, 100).unwrap();
        let b = envelope_test(&m, &data, cfg, 39, 100).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_empty_and_oversized_inputs() {
        let m = model(Family::HoleEffect, 0.0, 1.0, 1.0);
        assert!(simulate_field(&m, &[], 0.0, 0).is_err());
        let too_many = vec![[0.0; 3]; MAX_SIM_POINTS + 1];
        assert!(FieldSampler::new(&m, &too_many).is_err());
    }
}
