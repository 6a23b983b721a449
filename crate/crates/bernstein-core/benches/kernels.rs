//! Sequential-versus-parallel timings for the sweep kernels.
//!
//! The crate is built with the `parallel` feature here; the sequential path
//! is forced through `exec::set_force_sequential`, so one binary measures
//! both sides of the feature flag.

use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use bernstein_core::constructions::special_bernstein;
use bernstein_core::exec::set_force_sequential;
use bernstein_core::mermin::{find_contradictions, verify_relation_table};
use bernstein_core::qstate::Axis;
use bernstein_core::reductions::{fragility_report, partial_trace_state};
use bernstein_core::stats::kwise_independence_report;

fn bench_pair(c: &mut Criterion, name: &str, mut f: impl FnMut()) {
    let mut group = c.benchmark_group(name);
    group.sample_size(10);
    group.bench_function("seq", |b| {
        set_force_sequential(true);
        b.iter(&mut f);
        set_force_sequential(false);
    });
    group.bench_function("par", |b| {
        set_force_sequential(false);
        b.iter(&mut f);
    });
    group.finish();
}

fn independence_sweep(c: &mut Criterion) {
    let s = special_bernstein(10).unwrap();
    let axes = vec![Axis::Z; 10];
    bench_pair(c, "independence_sweep_n10", || {
        black_box(kwise_independence_report(black_box(&s), &axes, 10).unwrap());
    });
}

fn fragility(c: &mut Criterion) {
    let s = special_bernstein(6).unwrap();
    bench_pair(c, "fragility_n6", || {
        black_box(fragility_report(black_box(&s)).unwrap());
    });
}

fn relation_table(c: &mut Criterion) {
    bench_pair(c, "mermin_relation_table_n10", || {
        black_box(verify_relation_table(black_box(10)).unwrap());
    });
}

fn contradictions(c: &mut Criterion) {
    bench_pair(c, "mermin_contradictions_n6_size6", || {
        black_box(find_contradictions(black_box(6), 6).unwrap());
    });
}

fn partial_trace_kernel(c: &mut Criterion) {
    let s = special_bernstein(12).unwrap();
    let keep: Vec<usize> = (1..=11).collect();
    let mut group = c.benchmark_group("partial_trace_n12_keep11");
    group.sample_size(10);
    group.bench_function("dense", |b| {
        b.iter(|| black_box(partial_trace_state(black_box(&s), &keep).unwrap()));
    });
    group.finish();
}

criterion_group!(
    benches,
    independence_sweep,
    fragility,
    relation_table,
    contradictions,
    partial_trace_kernel
);
criterion_main!(benches);
