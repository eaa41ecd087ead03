use criterion::{criterion_group, criterion_main, Criterion};
use gpequi_core::dist::{box_discrepancy_kd, star_discrepancy_1d, weyl_sum};
use std::hint::black_box;

fn bench_stats(c: &mut Criterion) {
    let pts: Vec<f64> = (1..=100_000u64)
        .map(|n| (n as f64 * std::f64::consts::SQRT_2).fract())
        .collect();
    c.bench_function("star_discrepancy_100k", |b| {
        b.iter(|| star_discrepancy_1d(black_box(&pts)))
    });
    c.bench_function("weyl_sum_100k", |b| b.iter(|| weyl_sum(black_box(&pts), 1)));
    let cube: Vec<Vec<f64>> = (1..=20_000u64)
        .map(|n| {
            let x = (n as f64 * std::f64::consts::SQRT_2).fract();
            let y = (n as f64 * 1.732_050_807_568_877).fract();
            let z = (x * y + 0.37 * n as f64).fract();
            vec![x, y, z]
        })
        .collect();
    c.bench_function("box_discrepancy_3d_20k", |b| {
        b.iter(|| box_discrepancy_kd(black_box(&cube), 10))
    });
}

criterion_group!(benches, bench_stats);
criterion_main!(benches);
