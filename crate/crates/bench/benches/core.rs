use criterion::{black_box, criterion_group, criterion_main, Criterion};

use graphlim_core::metrics::{self, DeltaSConfig, SearchMode};
use graphlim_core::partition::{partition_ball_carving, partition_path_like};
use graphlim_core::seqgen;
use graphlim_core::spectral::{assemble, spectral_cdf, BuiltinKernel, Kernel, SpectralConfig};
use graphlim_core::stats;

fn bench_canonical_census(c: &mut Criterion) {
    let torus = seqgen::gen_torus(30, 2).unwrap();
    c.bench_function("census/torus-30x30/r2", |b| {
        b.iter(|| stats::class_census(black_box(&torus), 2).unwrap())
    });
    let tree = seqgen::gen_tree_ball(9).unwrap();
    c.bench_function("census/tree-depth-9/r3", |b| {
        b.iter(|| stats::class_census(black_box(&tree), 3).unwrap())
    });
}

fn bench_delta_s(c: &mut Criterion) {
    let cfg = DeltaSConfig::default();
    let g = seqgen::gen_random_regular(8, 3, 1).unwrap();
    let h = seqgen::gen_random_regular(8, 3, 2).unwrap();
    c.bench_function("delta_s/exact/n8", |b| {
        b.iter(|| metrics::delta_s(black_box(&g), black_box(&h), SearchMode::Exact, &cfg).unwrap())
    });
    let p = seqgen::gen_path(400).unwrap();
    let q = seqgen::gen_cycle(400).unwrap();
    c.bench_function("delta_s/heuristic/n400", |b| {
        b.iter(|| {
            metrics::delta_s(black_box(&p), black_box(&q), SearchMode::Heuristic, &cfg).unwrap()
        })
    });
}

fn bench_partition(c: &mut Criterion) {
    let p = seqgen::gen_path(10_000).unwrap();
    c.bench_function("partition/path-10000/eps0.1", |b| {
        b.iter(|| partition_path_like(black_box(&p), 0.1).unwrap())
    });
    let r = seqgen::gen_random_regular(500, 3, 3).unwrap();
    c.bench_function("partition/carve-regular-500", |b| {
        b.iter(|| partition_ball_carving(black_box(&r), 0.05, 1, Some(20)).unwrap())
    });
}

fn bench_spectral(c: &mut Criterion) {
    let cfg = SpectralConfig::default();
    let kernel = Kernel::Builtin(BuiltinKernel::Laplacian);
    let p = seqgen::gen_path(2000).unwrap();
    c.bench_function("spectral/assemble-path-2000", |b| {
        b.iter(|| assemble(black_box(&p), &kernel).unwrap())
    });
    let m = assemble(&p, &kernel).unwrap();
    c.bench_function("spectral/cdf-tridiag-2000", |b| {
        b.iter(|| spectral_cdf(black_box(&m), &cfg).unwrap())
    });
}

criterion_group!(
    benches,
    bench_canonical_census,
    bench_delta_s,
    bench_partition,
    bench_spectral
);
criterion_main!(benches);
