use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use kprox_bench::{congruent_scene, lattice_queries};
use kprox_core::graph::bfs;
use kprox_core::index::{build_index, IndexConfig};
use kprox_core::oracle::AdjacencyOracle;
use kprox_core::IndexKind;

const KINDS: [IndexKind; 4] = [IndexKind::Fast, IndexKind::Grouped, IndexKind::Linear, IndexKind::Oracle];

fn build(c: &mut Criterion) {
    let mut group = c.benchmark_group("build");
    group.sample_size(10);
    for n in [500, 2000] {
        let scene = congruent_scene(n, 8.0, 1);
        for kind in KINDS {
            let cfg = IndexConfig::of_kind(kind);
            group.bench_with_input(BenchmarkId::new(kind.to_string(), n), &scene, |b, s| {
                b.iter(|| build_index(black_box(s), &cfg))
            });
        }
    }
    group.finish();
}

fn queries(c: &mut Criterion) {
    let mut group = c.benchmark_group("queries");
    let n = 2000;
    let scene = congruent_scene(n, 8.0, 2);
    let qs = lattice_queries(&scene, 256);
    for kind in KINDS {
        let index = build_index(&scene, &IndexConfig::of_kind(kind));
        group.bench_function(BenchmarkId::new(format!("detect/{kind}"), n), |b| {
            b.iter(|| qs.iter().filter(|q| index.detect(q).is_some()).count())
        });
        group.bench_function(BenchmarkId::new(format!("report/{kind}"), n), |b| {
            b.iter(|| qs.iter().map(|q| index.report(q).len()).sum::<usize>())
        });
        group.bench_function(BenchmarkId::new(format!("nn/{kind}"), n), |b| {
            b.iter(|| qs.iter().take(32).map(|q| index.nn(q).unwrap().1).sum::<f64>())
        });
    }
    group.finish();
}

fn traversal(c: &mut Criterion) {
    let mut group = c.benchmark_group("bfs");
    group.sample_size(10);
    for n in [2000, 8000, 32000] {
        let scene = congruent_scene(n, 8.0, 3);
        let cfg = IndexConfig::of_kind(IndexKind::Linear);
        group.bench_with_input(BenchmarkId::new("linear", n), &scene, |b, s| b.iter(|| bfs(s, 0, &cfg).unwrap()));
        if n <= 8000 {
            group.bench_with_input(BenchmarkId::new("oracle-adjacency", n), &scene, |b, s| {
                b.iter(|| AdjacencyOracle::build(s, 0.0).bfs(0))
            });
        }
    }
    group.finish();
}

criterion_group!(benches, build, queries, traversal);
criterion_main!(benches);
