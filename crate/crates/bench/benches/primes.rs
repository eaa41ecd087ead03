use criterion::{criterion_group, criterion_main, Criterion};
use gpequi_core::primes::{residues_coprime, sieve};
use std::hint::black_box;

fn bench_primes(c: &mut Criterion) {
    c.bench_function("sieve_1e6", |b| b.iter(|| sieve(black_box(1_000_000))));
    let t = sieve(1_000_000);
    c.bench_function("pi_query", |b| b.iter(|| t.count_up_to(black_box(999_999))));
    c.bench_function("residues_coprime_210", |b| {
        b.iter(|| residues_coprime(black_box(210)))
    });
}

criterion_group!(benches, bench_primes);
criterion_main!(benches);
