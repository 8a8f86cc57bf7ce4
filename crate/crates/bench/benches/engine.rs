use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use maxlat::descent::{w_poly_multinomial, w_poly_stanley};
use maxlat::globalzeta::{dirichlet_coeffs, pole_report};
use maxlat::latoracle::count_maximal;
use maxlat::localzeta::local_series_coeffs;
use maxlat::totalash::w_total;
use maxlat::ash::w_eps;
use maxlat_bench::{c2, global_specs, odd_subset, ramified_local, total_spec};

fn descent(c: &mut Criterion) {
    let mut g = c.benchmark_group("w_poly");
    for ell in [4u32, 6, 8] {
        let k = odd_subset(ell);
        g.bench_with_input(BenchmarkId::new("stanley", ell), &k, |b, k| b.iter(|| w_poly_stanley(ell, black_box(k)).unwrap()));
        g.bench_with_input(BenchmarkId::new("multinomial", ell), &k, |b, k| {
            b.iter(|| w_poly_multinomial(ell, black_box(k)).unwrap())
        });
    }
    g.finish();
}

fn polynomials(c: &mut Criterion) {
    c.bench_function("w_eps/5", |b| b.iter(|| w_eps(black_box(5), 1).unwrap()));
    let spec = total_spec(4);
    c.bench_function("w_total/4", |b| b.iter(|| w_total(black_box(&spec)).unwrap()));
}

fn local(c: &mut Criterion) {
    let inv = ramified_local(3, 3);
    c.bench_function("local_series/l3_400", |b| b.iter(|| local_series_coeffs(black_box(&inv), 400).unwrap()));
}

fn global(c: &mut Criterion) {
    let mut g = c.benchmark_group("global");
    g.sample_size(10);
    for (name, spec) in global_specs() {
        g.bench_function(BenchmarkId::new("dirichlet_coeffs_2000", name), |b| {
            b.iter(|| dirichlet_coeffs(black_box(&spec), 2000).unwrap())
        });
        g.bench_function(BenchmarkId::new("pole_report", name), |b| b.iter(|| pole_report(black_box(&spec)).unwrap()));
    }
    g.finish();
}

fn oracle(c: &mut Criterion) {
    let lattice = c2();
    let mut g = c.benchmark_group("count_maximal");
    g.sample_size(10);
    g.bench_function("c2_p2_norm2", |b| b.iter(|| count_maximal(black_box(&lattice), 2, 2, 10_000_000).unwrap()));
    g.finish();
}

criterion_group!(benches, descent, polynomials, local, global, oracle);
criterion_main!(benches);
