use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use lacsum_core::{
    count_quadruple_solutions, evaluate_batch, l1_monte_carlo, lacunary_set, lp_norm_quadrature, mian_chowla,
    McConfig, QuadratureConfig,
};

fn evaluation(c: &mut Criterion) {
    let mut g = c.benchmark_group("evaluate_batch");
    let thetas: Vec<f64> = (0..4096).map(|i| (i as f64 + 0.5) / 4096.0).collect();
    g.throughput(Throughput::Elements(thetas.len() as u64));
    for n in [4u32, 16] {
        let fs = lacunary_set(8, n).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(n), &fs, |b, fs| b.iter(|| evaluate_batch(fs, black_box(&thetas))));
    }
    g.finish();
}

fn quadrature(c: &mut Criterion) {
    let mut g = c.benchmark_group("l1_quadrature");
    g.sample_size(10);
    for n in [3u32, 5] {
        let fs = lacunary_set(8, n).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(n), &fs, |b, fs| {
            b.iter(|| lp_norm_quadrature(fs, 1, &QuadratureConfig::default()).unwrap())
        });
    }
    g.finish();
}

fn energy(c: &mut Criterion) {
    let mut g = c.benchmark_group("energy");
    g.sample_size(10);
    for n in [100usize, 400] {
        let fs = mian_chowla(n).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(n), &fs, |b, fs| b.iter(|| count_quadruple_solutions(fs).unwrap()));
    }
    g.finish();
}

fn monte_carlo(c: &mut Criterion) {
    let mut g = c.benchmark_group("l1_monte_carlo");
    g.sample_size(10);
    let samples = 1u64 << 18;
    g.throughput(Throughput::Elements(samples));
    let fs = lacunary_set(8, 16).unwrap();
    g.bench_function("n16", |b| b.iter(|| l1_monte_carlo(&fs, &McConfig::new(samples, 1)).unwrap()));
    g.finish();
}

criterion_group!(benches, evaluation, quadrature, energy, monte_carlo);
criterion_main!(benches);
