use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use tangleforge::equiv::{simplify, SplittingTuple, DEFAULT_BUDGET};
use tangleforge::folding::generates_full;
use tangleforge::realize;
use tangleforge_bench::{hom_of_length, nielsen_basis, stabilized_pushout};

fn bench_realize(c: &mut Criterion) {
    let mut g = c.benchmark_group("realize");
    for len in [100, 1_000, 10_000] {
        let h = hom_of_length(len);
        g.bench_with_input(BenchmarkId::from_parameter(len), &h, |b, h| {
            b.iter(|| realize(black_box(h)).unwrap())
        });
    }
    g.finish();
}

fn bench_fold(c: &mut Criterion) {
    let mut g = c.benchmark_group("generates_full");
    for n in [2, 4, 8] {
        let ws = nielsen_basis(n, 200);
        g.bench_with_input(BenchmarkId::from_parameter(n), &ws, |b, ws| {
            b.iter(|| assert!(generates_full(black_box(ws), n as usize)))
        });
    }
    g.finish();
}

fn bench_simplify(c: &mut Criterion) {
    let text = include_str!("../../../fixtures/rp2_minus.tuple");
    let t: SplittingTuple = text.parse().unwrap();
    let mut g = c.benchmark_group("simplify");
    for rounds in [0, 1, 2] {
        let p = stabilized_pushout(&t, rounds);
        g.bench_with_input(BenchmarkId::from_parameter(rounds), &p, |b, p| {
            b.iter(|| simplify(black_box(p), DEFAULT_BUDGET))
        });
    }
    g.finish();
}

criterion_group!(benches, bench_realize, bench_fold, bench_simplify);
criterion_main!(benches);
