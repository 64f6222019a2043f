use akfit::projection::{cut_lp_projection, Canonical};
use akfit::{compute_ak, discrete_ak, test_nonneg, Interval, Polynomial};
use akfit_bench::{alternating_sequence, gmm_empirical, random_polynomial};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn ak(c: &mut Criterion) {
    let mut group = c.benchmark_group("discrete_ak");
    for len in [1_001, 10_001, 100_001] {
        let seq = alternating_sequence(len, 1);
        group.bench_with_input(BenchmarkId::from_parameter(len), &seq, |b, seq| b.iter(|| discrete_ak(seq, 5).unwrap()));
    }
    group.finish();

    let f = gmm_empirical(20_000, 2);
    let j = f.domain();
    let p = Polynomial::new(vec![0.4, 0.1], Interval::closed(j.left, j.right));
    c.bench_function("compute_ak/n=20000,k=3", |b| b.iter(|| compute_ak(&p, &f, &j, 3, 1e-6).unwrap()));
}

fn nonneg(c: &mut Criterion) {
    let mut group = c.benchmark_group("test_nonneg");
    for d in [2, 5, 8] {
        let p = random_polynomial(d, d as u64);
        group.bench_with_input(BenchmarkId::from_parameter(d), &p, |b, p| b.iter(|| test_nonneg(p, 1e-3)));
    }
    group.finish();
}

fn projection(c: &mut Criterion) {
    let f = gmm_empirical(2_000, 3);
    let mut group = c.benchmark_group("cut_lp_projection");
    for d in [0, 1, 2] {
        let geom = Canonical::new(&f, d);
        group.bench_with_input(BenchmarkId::from_parameter(d), &geom, |b, g| {
            b.iter(|| cut_lp_projection(g, d + 2, 1e-3).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, ak, nonneg, projection);
criterion_main!(benches);
