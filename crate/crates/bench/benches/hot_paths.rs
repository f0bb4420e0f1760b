use std::hint::black_box;
use std::path::PathBuf;

use criterion::{criterion_group, criterion_main, BatchSize, Criterion, Throughput};
use trish_core::ingest::{parse_libsvm, parse_libsvm_file};
use trish_core::{trish_step, FiniteSum, LogisticProblem, Objective, TrishParams};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/data")
        .join(name)
}

fn step(c: &mut Criterion) {
    let params = TrishParams::new(11.0, 4.4).unwrap();
    let mut group = c.benchmark_group("trish_step");
    for dim in [10usize, 1_000, 100_000] {
        let x: Vec<f64> = (0..dim).map(|i| (i as f64).sin()).collect();
        let g: Vec<f64> = (0..dim).map(|i| (i as f64 * 0.7).cos() * 1e-2).collect();
        group.throughput(Throughput::Elements(dim as u64));
        group.bench_function(format!("dim_{dim}"), |b| {
            b.iter(|| trish_step(black_box(&x), black_box(&g), 0.1, &params).unwrap())
        });
    }
    group.finish();
}

fn logistic(c: &mut Criterion) {
    let train = parse_libsvm_file(data("train.svm")).unwrap();
    let problem = LogisticProblem::from_rows(&train.rows, None).unwrap();
    let w = vec![0.05; problem.dim()];
    c.bench_function("logistic_full_gradient", |b| {
        b.iter(|| problem.gradient(black_box(&w)))
    });
    c.bench_function("logistic_minibatch_10", |b| {
        b.iter_batched(
            || vec![0.0; problem.dim()],
            |mut out| {
                for i in 0..10 {
                    problem.add_component_gradient(
                        i * 97 % problem.n_components(),
                        &w,
                        0.1,
                        &mut out,
                    );
                }
                out
            },
            BatchSize::SmallInput,
        )
    });
}

fn ingest(c: &mut Criterion) {
    let text = std::fs::read(data("train.svm")).unwrap();
    let mut group = c.benchmark_group("parse_libsvm");
    group.throughput(Throughput::Bytes(text.len() as u64));
    group.bench_function("train_svm", |b| {
        b.iter(|| parse_libsvm(black_box(text.as_slice())).unwrap())
    });
    group.finish();
}

criterion_group!(benches, step, logistic, ingest);
criterion_main!(benches);
