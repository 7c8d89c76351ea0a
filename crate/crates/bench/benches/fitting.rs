use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use hokcov::fit::{default_global_budget, fit, wls_objective, FitProblem, FreeParam};
use hokcov::simulate::{envelope_test, FieldSampler};
use hokcov::{
    BinningConfig, CovarianceModel, Dataset, EmpiricalVariogram, Family, ParamName,
    ParameterVector, Point,
};

fn truth() -> CovarianceModel {
    CovarianceModel::new(Family::SineCosine, ParameterVector::new(0.1, 1.0, 2.0)).unwrap()
}

fn problem() -> FitProblem {
    let model = truth();
    let centers: Vec<f64> = (0..15).map(|i| 0.8 * (i as f64 + 0.5)).collect();
    let gammas = centers.iter().map(|&h| model.semivariogram(h)).collect();
    let emp = EmpiricalVariogram::from_parts(centers, gammas, vec![50; 15]).unwrap();
    FitProblem::new(
        Family::SineCosine,
        emp,
        vec![
            FreeParam::new(ParamName::Sill, 0.01, 20.0),
            FreeParam::new(ParamName::Range, 0.1, 20.0),
        ],
        vec![(ParamName::Nugget, 0.1)],
    )
    .unwrap()
}

fn grid_points(n: usize) -> Vec<Point> {
    (0..n * n)
        .map(|k| [(k % n) as f64, (k / n) as f64, 0.0])
        .collect()
}

fn bench_objective(c: &mut Criterion) {
    let p = problem();
    let theta = ParameterVector::new(0.1, 1.2, 1.7);
    c.bench_function("wls_objective_15_bins", |b| {
        b.iter(|| wls_objective(&p, black_box(&theta)).unwrap().value)
    });
}

fn bench_fit(c: &mut Criterion) {
    let p = problem();
    let budget = default_global_budget(&p);
    c.bench_function("fit_sine_cosine_default_budget", |b| {
        b.iter(|| fit(&p, budget, 1e-10).unwrap().objective)
    });
}

fn bench_simulation(c: &mut Criterion) {
    let model = truth();
    let points = grid_points(12);
    c.bench_function("sampler_factor_144", |b| {
        b.iter(|| FieldSampler::new(&model, black_box(&points)).unwrap().jitter())
    });
    let sampler = FieldSampler::new(&model, &points).unwrap();
    let mut seed = 0u64;
    c.bench_function("sampler_draw_144", |b| {
        b.iter(|| {
            seed += 1;
            sampler.sample(0.0, seed)
        })
    });
    let values = sampler.sample(0.0, 99);
    let coords: Vec<Vec<f64>> = points.iter().map(|p| p[..2].to_vec()).collect();
    let data = Dataset::new(2, &coords, values).unwrap();
    let cfg = BinningConfig::new(10, None);
    let mut group = c.benchmark_group("envelope");
    group.sample_size(10);
    group.bench_function("envelope_144_points_39_sims", |b| {
        b.iter(|| envelope_test(&model, &data, cfg, 39, 1).unwrap().overall)
    });
    group.finish();
}

criterion_group!(benches, bench_objective, bench_fit, bench_simulation);
criterion_main!(benches);
