use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use pervol_bench::alpha;
use pervol_core::merge_tree::diagram_from_forest;
use pervol_core::synthetic::{triangle_strip, uniform_cloud};
use pervol_core::{build_alpha_filtration, compute_forest, persistence_tree, reduce};

fn alpha_builder(c: &mut Criterion) {
    let mut g = c.benchmark_group("build_alpha");
    g.sample_size(10);
    for (n, dim) in [(1000, 2), (200, 3)] {
        let pc = uniform_cloud(n, dim, 1);
        g.bench_with_input(BenchmarkId::new(format!("{dim}d"), n), &pc, |b, pc| {
            b.iter(|| build_alpha_filtration(black_box(pc)).unwrap())
        });
    }
    g.finish();
}

fn engines(c: &mut Criterion) {
    let mut g = c.benchmark_group("codim1_diagram");
    g.sample_size(10);
    for n in [500, 2000] {
        let f = alpha(n, 2, 2);
        g.bench_with_input(BenchmarkId::new("reduction", n), &f, |b, f| b.iter(|| reduce(black_box(f)).diagram(f, 1)));
        g.bench_with_input(BenchmarkId::new("mergetree", n), &f, |b, f| {
            b.iter(|| diagram_from_forest(&compute_forest(black_box(f)).unwrap(), f))
        });
    }
    g.finish();
}

fn strip(c: &mut Criterion) {
    let mut g = c.benchmark_group("triangle_strip");
    g.sample_size(10);
    for m in [10_000, 100_000] {
        let f = triangle_strip(m, 3).unwrap();
        g.bench_with_input(BenchmarkId::new("forest", 2 * m), &f, |b, f| b.iter(|| compute_forest(black_box(f)).unwrap()));
        let forest = compute_forest(&f).unwrap();
        g.bench_with_input(BenchmarkId::new("tree", 2 * m), &f, |b, f| b.iter(|| persistence_tree(black_box(&forest), f)));
    }
    g.finish();
}

fn reduction_3d(c: &mut Criterion) {
    let f = alpha(300, 3, 4);
    c.bench_function("reduce/3d/300", |b| b.iter(|| reduce(black_box(&f))));
}

criterion_group!(benches, alpha_builder, engines, strip, reduction_3d);
criterion_main!(benches);
