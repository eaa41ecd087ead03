use criterion::{criterion_group, criterion_main, Criterion};
use gpequi_core::gp::{parse, sturmian_diff_expr};
use gpequi_core::{PrecisionConfig, RealConst};
use std::hint::black_box;

fn bench_eval(c: &mut Criterion) {
    let cfg = PrecisionConfig::default();
    let u = sturmian_diff_expr(RealConst::sqrt_int(2));
    c.bench_function("eval_sturmian_point", |b| {
        b.iter(|| u.eval(black_box(123_456), &cfg).unwrap())
    });
    let frac = parse("{sqrt(2)*n^2 + pi*n}").unwrap();
    c.bench_function("eval_frac_quadratic_point", |b| {
        b.iter(|| frac.eval(black_box(98_765), &cfg).unwrap())
    });
    c.bench_function("eval_range_sturmian_10k", |b| {
        b.iter(|| u.eval_range(1, 10_000, &cfg).unwrap())
    });
}

criterion_group!(benches, bench_eval);
criterion_main!(benches);
