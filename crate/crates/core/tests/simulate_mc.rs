use hokcov::simulate::{envelope_test, simulate_field, FieldSampler};
use hokcov::{BinningConfig, CovarianceModel, Dataset, Family, ParameterVector, Point};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

fn model(family: Family, nugget: f64, sill: f64, range: f64) -> CovarianceModel {
    CovarianceModel::new(family, ParameterVector::new(nugget, sill, range)).unwrap()
}

fn random_points(n: usize, seed: u64) -> Vec<Point> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| [rng.random::<f64>() * 10.0, rng.random::<f64>() * 10.0, 0.0])
        .collect()
}

#[test]
fn single_point_variance() {
    let m = model(Family::HoleEffect, 0.0, 4.0, 1.0);
    let sampler = FieldSampler::new(&m, &[[0.0; 3]]).unwrap();
    let draws: Vec<f64> = (0..10_000).map(|s| sampler.sample(2.0, s)[0]).collect();
    let mean = draws.iter().sum::<f64>() / draws.len() as f64;
    let var = draws.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (draws.len() - 1) as f64;
    assert!((var - 4.0).abs() / 4.0 < 0.05, "variance {var}");
    assert!((mean - 2.0).abs() < 0.05, "mean {mean}");
}

#[test]
fn two_point_correlation() {
    let m = model(Family::HoleEffect, 0.0, 1.0, 0.5);
    let d = 1.3;
    let target = m.covariance(d) / m.covariance(0.0);
    let sampler = FieldSampler::new(&m, &[[0.0; 3], [d, 0.0, 0.0]]).unwrap();
    let (mut sa, mut sb, mut saa, mut sbb, mut sab) = (0.0, 0.0, 0.0, 0.0, 0.0);
    let n = 10_000;
    for s in 0..n {
        let v = sampler.sample(0.0, s);
        sa += v[0];
        sb += v[1];
        saa += v[0] * v[0];
        sbb += v[1] * v[1];
        sab += v[0] * v[1];
    }
    let n = n as f64;
    let cov = sab / n - sa / n * sb / n;
    let corr = cov / ((saa / n - (sa / n).powi(2)) * (sbb / n - (sb / n).powi(2))).sqrt();
    assert!((corr - target).abs() < 0.05, "corr {corr} vs {target}");
}

#[test]
fn nugget_sits_on_the_diagonal_only() {
    let m = model(Family::SineCosine, 1.0, 1.0, 2.0);
    let locs = [[0.0; 3], [1e-7, 0.0, 0.0]];
    let sampler = FieldSampler::new(&m, &locs).unwrap();
    let n = 10_000;
    let mut sd = 0.0;
    for s in 0..n {
        let v = sampler.sample(0.0, s);
        sd += (v[0] - v[1]).powi(2);
    }
    // Var(Z1 - Z2) = 2 nugget at coincident-limit lags
    let var_diff = sd / n as f64;
    assert!((var_diff - 2.0).abs() / 2.0 < 0.05, "{var_diff}");
}

#[test]
fn misspecified_model_fails_envelope() {
    let truth = model(Family::SineCosine, 0.1, 1.0, 1.5);
    let locs = random_points(120, 1);
    let values = simulate_field(&truth, &locs, 0.0, 2).unwrap().values;
    let data = Dataset::from_points(2, locs, values).unwrap();
    let wrong = model(Family::SineCosine, 0.1, 100.0 * data.variance(), 1.5);
    let env = envelope_test(&wrong, &data, BinningConfig::new(10, None), 39, 10).unwrap();
    assert!(!env.overall);
}

/// Data simulated from the model itself should sit inside the 39-replicate
/// envelope in at least 90% of 50 repetitions.
#[test]
fn envelope_calibration() {
    let m = model(Family::SineCosine, 0.2, 1.0, 1.5);
    let mut covered = 0;
    let reps = 50;
    for rep in 0..reps {
        let locs = random_points(100, 1000 + rep);
        let values = simulate_field(&m, &locs, 0.0, 5000 + rep).unwrap().values;
        let data = Dataset::from_points(2, locs, values).unwrap();
        let env = envelope_test(&m, &data, BinningConfig::new(10, None), 39, 100_000 * (rep + 1))
            .unwrap();
        covered += usize::from(env.overall);
    }
    println!("envelope calibration: {covered}/{reps} overall containment");
    assert!(covered * 10 >= reps as usize * 9, "{covered}/{reps}");
}

/// With the observed variogram exchangeable with 39 replicates, each bin
/// falls outside the min/max range with probability 2/40.
#[test]
fn envelope_per_bin_coverage() {
    let m = model(Family::HoleEffect, 0.3, 1.0, 1.0);
    let (mut inside, mut total) = (0usize, 0usize);
    for rep in 0..50 {
        let locs = random_points(80, 7000 + rep);
        let values = simulate_field(&m, &locs, 1.0, 9000 + rep).unwrap().values;
        let data = Dataset::from_points(2, locs, values).unwrap();
        let env =
            envelope_test(&m, &data, BinningConfig::new(8, None), 39, 1_000_000 * (rep + 1))
                .unwrap();
        inside += env.contained.iter().filter(|&&c| c).count();
        total += env.contained.len();
    }
    let rate = inside as f64 / total as f64;
    println!("per-bin envelope coverage: {rate}");
    // 400 Bernoulli(0.95) trials: sd ~ 0.011
    assert!((rate - 0.95).abs() < 0.04, "{rate}");
}
