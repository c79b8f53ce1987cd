use barron_bench::sample_sum;
use barron_core::fixtures::{benchmark_1d, benchmark_2d, scaling_template};
use barron_core::{
    apply_elliptic, galerkin_solve, optimal_step, product, sample_network, step, AtomSum,
    IterationState,
};
use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

fn bench_product(c: &mut Criterion) {
    let mut group = c.benchmark_group("product");
    for n in [10, 50, 200] {
        let s1 = sample_sum(1, 3, n);
        let s2 = sample_sum(2, 3, n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| product(black_box(&s1), black_box(&s2)).unwrap())
        });
    }
    group.finish();
}

fn bench_apply_elliptic(c: &mut Criterion) {
    let mut group = c.benchmark_group("apply_elliptic");
    for d in [2, 8, 16] {
        let p = scaling_template(d);
        let u = sample_sum(3, d, 40);
        group.bench_with_input(BenchmarkId::new("diag_cos", d), &d, |b, _| {
            b.iter(|| apply_elliptic(black_box(&p), black_box(&u)).unwrap())
        });
    }
    group.finish();
}

fn bench_step(c: &mut Criterion) {
    let p = benchmark_2d();
    let (alpha, _) = optimal_step(p.lambda_min(), p.lambda_max()).unwrap();
    let mut state = IterationState::new(AtomSum::zero(2, true));
    for _ in 0..10 {
        state = step(&p, &state, alpha, 0.0).unwrap();
    }
    c.bench_function("step_d2_after_10", |b| {
        b.iter(|| step(black_box(&p), black_box(&state), alpha, 1e-8).unwrap())
    });
}

fn bench_galerkin(c: &mut Criterion) {
    let mut group = c.benchmark_group("galerkin");
    group.sample_size(10);
    let p1 = benchmark_1d();
    group.bench_function("d1_K48", |b| {
        b.iter(|| galerkin_solve(black_box(&p1), 48).unwrap())
    });
    let p2 = benchmark_2d();
    group.bench_function("d2_K24", |b| {
        b.iter(|| galerkin_solve(black_box(&p2), 24).unwrap())
    });
    group.finish();
}

fn bench_sample_network(c: &mut Criterion) {
    let g = sample_sum(4, 2, 10);
    let mut group = c.benchmark_group("sample_network");
    for k in [64, 1024, 4096] {
        group.bench_with_input(BenchmarkId::from_parameter(k), &k, |b, &k| {
            b.iter(|| sample_network(black_box(&g), k, 7).unwrap())
        });
    }
    group.finish();
}

criterion_group!(
    benches,
    bench_product,
    bench_apply_elliptic,
    bench_step,
    bench_galerkin,
    bench_sample_network
);
criterion_main!(benches);
