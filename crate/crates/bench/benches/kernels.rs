use criterion::{black_box, criterion_group, criterion_main, BatchSize, Criterion};

use cyclewalk::holes::metropolis_step;
use cyclewalk::rng::stream;
use cyclewalk::spectral::{boundary_matrix, smith_normal_form, up_extremes};
use cyclewalk::walk::enumerate_transitions;
use cyclewalk::{energy, simulate, WalkConfig};
use cyclewalk_bench::{annulus, torus};

fn boundary_matvec(c: &mut Criterion) {
    let (cx, _) = torus(32);
    let d2 = boundary_matrix(&cx, 2).to_f64();
    let x: Vec<f64> = (0..d2.cols()).map(|i| (i as f64).sin()).collect();
    c.bench_function("boundary matvec, torus n=32", |b| {
        b.iter(|| d2.matvec(black_box(&x)))
    });
}

fn snf(c: &mut Criterion) {
    let (cx, _) = torus(8);
    let d1 = boundary_matrix(&cx, 1);
    c.bench_function("smith normal form of d1, torus n=8", |b| {
        b.iter(|| smith_normal_form(black_box(&d1), true))
    });
}

fn walk(c: &mut Criterion) {
    let (cx, s1) = torus(16);
    c.bench_function("walk 10k jumps, torus n=16", |b| {
        b.iter(|| {
            simulate(
                &cx,
                &s1,
                &WalkConfig::new(1, f64::MAX).with_max_jumps(10_000),
            )
        })
    });
    c.bench_function("enumerate transitions, torus n=16", |b| {
        b.iter(|| enumerate_transitions(&cx, black_box(&s1)))
    });
}

fn anneal_step(c: &mut Criterion) {
    let (cx, seed) = annulus(24);
    let u0 = energy(&seed).unwrap();
    c.bench_function("metropolis step, annulus 24x3", |b| {
        b.iter_batched(
            || (seed.clone(), u0, stream(3, 0)),
            |(mut sigma, mut u, mut rng)| metropolis_step(&cx, &mut sigma, &mut u, 0.5, &mut rng),
            BatchSize::SmallInput,
        )
    });
}

fn spectral_gap(c: &mut Criterion) {
    let (cx, _) = torus(12);
    c.bench_function("up-Laplacian extremes, torus n=12", |b| {
        b.iter(|| up_extremes(&cx, 1))
    });
}

criterion_group!(
    kernels,
    boundary_matvec,
    snf,
    walk,
    anneal_step,
    spectral_gap
);
criterion_main!(kernels);
