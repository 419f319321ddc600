use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sheppard_core::grouping::randomized_lattice_mean_with;
use sheppard_core::multivariate::correct_mv_with;
use sheppard_core::univariate::correction_matrix_with;
use sheppard_core::verify::{random_rational, random_width, run_suite, Suite, VerifyConfig};
use sheppard_core::{AxisSpecs, Direction, Exec, GroupingSpec, MomentTensor, Rational};

const POLICIES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn monte_carlo(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let samples: Vec<f64> = (0..5000).map(|_| rng.random_range(-3.0..3.0)).collect();
    let mut group = c.benchmark_group("randomized_lattice_mean");
    for (name, exec) in POLICIES {
        group.bench_function(BenchmarkId::new(name, "5000 samples x 256 trials"), |b| {
            b.iter(|| randomized_lattice_mean_with(&samples, 0.25, 6, 256, 42, exec).unwrap())
        });
    }
    group.finish();
}

fn tensor(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let orders = vec![5, 5, 5];
    let mut values = vec![Rational::one()];
    values.extend((1..216).map(|_| random_rational(&mut rng)));
    let t = MomentTensor::new(orders, values).unwrap();
    let specs = AxisSpecs::new(vec![
        GroupingSpec::continuous(random_width(&mut rng)).unwrap(),
        GroupingSpec::discrete(random_width(&mut rng), 3).unwrap(),
        GroupingSpec::discrete(random_width(&mut rng), 5).unwrap(),
    ])
    .unwrap();
    let mut group = c.benchmark_group("correct_mv");
    for (name, exec) in POLICIES {
        group.bench_function(BenchmarkId::new(name, "3 axes, orders (5,5,5)"), |b| {
            b.iter(|| correct_mv_with(&t, &specs, exec).unwrap())
        });
    }
    group.finish();
}

fn matrix(c: &mut Criterion) {
    let spec = GroupingSpec::discrete(Rational::new(7.into(), 3.into()), 4).unwrap();
    let mut group = c.benchmark_group("correction_matrix");
    for (name, exec) in POLICIES {
        group.bench_function(BenchmarkId::new(name, "discrete, N=24"), |b| {
            b.iter(|| correction_matrix_with(&spec, 24, Direction::ToRaw, exec))
        });
    }
    group.finish();
}

fn verify(c: &mut Criterion) {
    let mut group = c.benchmark_group("verify");
    group.sample_size(10);
    for (name, exec) in POLICIES {
        let config = VerifyConfig { seed: 42, tol: 1e-8, exec };
        group.bench_function(BenchmarkId::new(name, "oracle-discrete"), |b| {
            b.iter(|| assert!(run_suite(Suite::OracleDiscrete, &config).passed()))
        });
    }
    group.finish();
}

criterion_group!(benches, monte_carlo, tensor, matrix, verify);
criterion_main!(benches);
