use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use wtp_core::group::{BoxKind, Dim, FolnerSchedule, Window};
use wtp_core::measures::{entropy_rate, MeasureSpec};
use wtp_core::potential::Potential;
use wtp_core::pressure::{nested_partition_function, CylinderScheme, ExponentVector};
use wtp_core::symbolic::{for_each_pattern, Subshift, SystemChain, DEFAULT_BUDGET};

fn partition_function(c: &mut Criterion) {
    let chain = SystemChain::full_collapse(&[0, 0, 1, 1], Dim::One).unwrap();
    let f = Potential::single_site("f", &[0.0, 0.3, -0.2, 1.0], Dim::One).unwrap();
    let a = ExponentVector::new(vec![0.5]).unwrap();
    let mut group = c.benchmark_group("log_z/collapse_4_2");
    for k in [0usize, 1] {
        let scheme = CylinderScheme::standard(&chain, k).unwrap();
        for n in [4i64, 6, 8] {
            let w = Window::interval(0, n).unwrap();
            group.bench_with_input(BenchmarkId::new(format!("k{k}"), n), &w, |b, w| {
                b.iter(|| nested_partition_function(&chain, &f, &a, black_box(w), &scheme, DEFAULT_BUDGET).unwrap())
            });
        }
    }
    group.finish();
}

fn enumeration(c: &mut Criterion) {
    let golden = Subshift::golden_mean();
    let plane = Subshift::full(2, Dim::Two).unwrap();
    let mut group = c.benchmark_group("enumerate");
    for n in [10i64, 16, 20] {
        let w = Window::interval(0, n).unwrap();
        group.bench_with_input(BenchmarkId::new("golden", n), &w, |b, w| {
            b.iter(|| for_each_pattern(&golden, black_box(w), DEFAULT_BUDGET, |p| _ = black_box(p)).unwrap())
        });
    }
    for side in [2i64, 3, 4] {
        let w = Window::cube(Dim::Two, 0, side).unwrap();
        group.bench_with_input(BenchmarkId::new("plane", side), &w, |b, w| {
            b.iter(|| for_each_pattern(&plane, black_box(w), DEFAULT_BUDGET, |p| _ = black_box(p)).unwrap())
        });
    }
    group.finish();
}

fn entropy(c: &mut Criterion) {
    let golden = Subshift::golden_mean();
    let parry = MeasureSpec::parry(&golden).unwrap();
    let base = Window::origin(Dim::One);
    let mut group = c.benchmark_group("entropy/parry");
    for n in [6usize, 10, 14] {
        let sched = FolnerSchedule::new(BoxKind::Origin, Dim::One, 1, n).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &sched, |b, s| {
            b.iter(|| entropy_rate(&parry, &golden, black_box(s), &base, DEFAULT_BUDGET).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, partition_function, enumeration, entropy);
criterion_main!(benches);
