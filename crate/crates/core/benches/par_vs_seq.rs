//! Rayon vs sequential comparison for the batch-parallel entry points:
//! height counting, spanning sums over conjugacy classes, and subgroup
//! search with per-sample enumeration.

use criterion::{criterion_group, criterion_main, Criterion};
use spadeq_core::liealg::{spanning_sum_a, ClassicalLieData};
use spadeq_core::matgrp::{enumerate, random_subgroup_search};
use spadeq_core::{fixtures, heights, Parallelism};
use std::hint::black_box;
use std::sync::Arc;

fn bench_heights(c: &mut Criterion) {
    let mut g = c.benchmark_group("heights_count_x600");
    for (name, par) in [("sequential", Parallelism::Sequential), ("rayon", Parallelism::Rayon)] {
        g.bench_function(name, |b| {
            b.iter(|| heights::brute_count_q(black_box(&[2, 3]), black_box(600), par))
        });
    }
    g.finish();
}

fn bench_spanning(c: &mut Criterion) {
    let group = Arc::new(enumerate(fixtures::sp4(3).unwrap(), 60_000, true).unwrap());
    let lie = ClassicalLieData::for_group(&group).unwrap();
    // force the class computation outside the timing loop
    let _ = group.conjugacy_classes();
    let mut g = c.benchmark_group("spanning_sum_sp4_f3");
    g.sample_size(10);
    for (name, par) in [("sequential", Parallelism::Sequential), ("rayon", Parallelism::Rayon)] {
        g.bench_function(name, |b| {
            b.iter(|| spanning_sum_a(black_box(&group), black_box(&lie), par).unwrap())
        });
    }
    g.finish();
}

fn bench_search(c: &mut Criterion) {
    let group = Arc::new(enumerate(fixtures::sp4(3).unwrap(), 60_000, false).unwrap());
    let mut g = c.benchmark_group("subgroup_search_20_samples");
    g.sample_size(10);
    for (name, par) in [("sequential", Parallelism::Sequential), ("rayon", Parallelism::Rayon)] {
        g.bench_function(name, |b| {
            b.iter(|| random_subgroup_search(black_box(&group), 7, 2, 20, 60_000, par))
        });
    }
    g.finish();
}

criterion_group!(benches, bench_heights, bench_spanning, bench_search);
criterion_main!(benches);
