use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use hirschlab::cech::comparison_suite;
use hirschlab::hirsch::{stabilized_cohomology, StabilizeParams, TruncatedHirschExtension};
use hirschlab::linalg::{dense_rref, rank, sparse_rref};
use hirschlab::models::{build_component_diagram, build_log_dga, canned};
use hirschlab::random::Sampler;

fn bench_elimination(c: &mut Criterion) {
    let mut group = c.benchmark_group("rref");
    let mut s = Sampler::new(1);
    for n in [16, 48, 96] {
        let a = s.matrix_of_rank(n, n, n * 3 / 4);
        group.bench_with_input(BenchmarkId::new("sparse", n), &a, |b, a| b.iter(|| sparse_rref(black_box(a))));
        if n <= 64 {
            group.bench_with_input(BenchmarkId::new("dense", n), &a, |b, a| b.iter(|| dense_rref(black_box(a))));
        }
    }
    group.finish();
}

fn bench_extension(c: &mut Criterion) {
    let mut group = c.benchmark_group("hirsch");
    group.sample_size(10);
    for name in ["xy_snc", "two_log_vars"] {
        let h = build_log_dga(&canned(name).unwrap().with_degree_bound(2)).unwrap();
        group.bench_with_input(BenchmarkId::new("truncate_n6_rank", name), &h, |b, h| {
            b.iter(|| {
                let ext = TruncatedHirschExtension::new(h, 6);
                rank(&ext.complex().d(1))
            })
        });
        group.bench_with_input(BenchmarkId::new("stabilized_h1", name), &h, |b, h| {
            b.iter(|| stabilized_cohomology(h, 1, StabilizeParams::default()).unwrap())
        });
    }
    group.finish();
}

fn bench_comparison(c: &mut Criterion) {
    let mut group = c.benchmark_group("cech");
    group.sample_size(10);
    let d = build_component_diagram(&canned("xy_snc").unwrap().with_degree_bound(2)).unwrap();
    group.bench_function("comparison_xy_n4", |b| b.iter(|| comparison_suite(&d, 4, 2, 3).unwrap()));
    group.finish();
}

criterion_group!(benches, bench_elimination, bench_extension, bench_comparison);
criterion_main!(benches);
