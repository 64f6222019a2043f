use akfit::experiment::{fit_samples, FitSpec};
use akfit_bench::{gmm_samples, SIZES};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};

fn fits(c: &mut Criterion) {
    for (name, spec) in [("histogram80", FitSpec::histogram()), ("linear40", FitSpec::linear())] {
        let mut group = c.benchmark_group(name);
        group.sample_size(10);
        for n in SIZES {
            let xs = gmm_samples(n, 7);
            group.throughput(Throughput::Elements(n as u64));
            group.bench_with_input(BenchmarkId::from_parameter(n), &xs, |b, xs| {
                b.iter(|| fit_samples(xs, &spec).unwrap())
            });
        }
        group.finish();
    }
}

criterion_group!(benches, fits);
criterion_main!(benches);
