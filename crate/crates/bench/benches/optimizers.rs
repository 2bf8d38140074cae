use criterion::{criterion_group, criterion_main, BatchSize, BenchmarkId, Criterion, Throughput};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::hint::black_box;

use scpda_bench::svm_fixture;
use scpda_core::*;

/// Per-step cost of each update rule with a fixed gradient, so the
/// measurement excludes the oracle.
fn update_rules(c: &mut Criterion) {
    let mut group = c.benchmark_group("step");
    for d in [20usize, 123, 1000] {
        let g = GradientSample::new((0..d).map(|i| ((i * 37 % 11) as f64 - 5.0) * 1e-3).collect());
        group.throughput(Throughput::Elements(d as u64));
        for algo in Algorithm::ALL {
            let cfg = OptimizerConfig::new(d, 1.0);
            group.bench_with_input(BenchmarkId::new(algo.name(), d), &g, |b, g| {
                b.iter_batched_ref(
                    || build(algo, &cfg).unwrap(),
                    |opt| {
                        for _ in 0..100 {
                            opt.step(black_box(g)).unwrap();
                        }
                    },
                    BatchSize::SmallInput,
                )
            });
        }
    }
    group.finish();
}

fn oracles(c: &mut Criterion) {
    let (problem, _) = svm_fixture(2000, 123, 1.0);
    let w = vec![0.01; 123];
    let mut group = c.benchmark_group("oracle");
    group.bench_function("full_subgradient n=2000 d=123", |b| {
        b.iter(|| problem.full_subgradient(black_box(&w)).unwrap())
    });
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    group.bench_function("stochastic_subgradient d=123", |b| {
        b.iter(|| problem.stochastic_subgradient(black_box(&w), &mut rng).unwrap())
    });
    group.finish();
}

fn projections(c: &mut Criterion) {
    let v: Vec<f64> = (0..1000).map(|i| (i as f64).sin() * 3.0).collect();
    let mut group = c.benchmark_group("projection d=1000");
    for (name, set) in [
        ("ball", FeasibleSet::l2_ball(1.0).unwrap()),
        ("box", FeasibleSet::uniform_box(1000, -0.5, 0.5).unwrap()),
    ] {
        group.bench_function(name, |b| {
            b.iter_batched_ref(
                || v.clone(),
                |x| set.project_in_place(x).unwrap(),
                BatchSize::SmallInput,
            )
        });
    }
    group.finish();
}

/// Whole harness runs, checkpoints and bound tracking included.
fn runs(c: &mut Criterion) {
    let (problem, reference) = svm_fixture(200, 20, 1.0);
    let mut group = c.benchmark_group("run 1e4 steps n=200 d=20");
    group.sample_size(10);
    for algo in [Algorithm::ScPda, Algorithm::Gda, Algorithm::Pegasos] {
        let mut spec = RunSpec::new(algo, 10_000);
        spec.timing = false;
        group.bench_function(BenchmarkId::new("deterministic", algo.name()), |b| {
            b.iter(|| run(&problem, &reference, &spec).unwrap())
        });
        let spec = spec.clone().stochastic(3);
        group.bench_function(BenchmarkId::new("stochastic", algo.name()), |b| {
            b.iter(|| run(&problem, &reference, &spec).unwrap())
        });
    }
    group.finish();

    let mut group = c.benchmark_group("reference");
    group.sample_size(10);
    group.bench_function("dual ascent n=200 d=20", |b| {
        b.iter(|| reference_optimum(&problem, &FeasibleSet::WholeSpace, 1e-12).unwrap())
    });
    group.finish();
}

criterion_group!(benches, update_rules, oracles, projections, runs);
criterion_main!(benches);
