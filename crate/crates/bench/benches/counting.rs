use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;
use swapcount::bribery::{
    count_borda_shift_constructive, count_plurality_shift_constructive,
    count_plurality_swap_bribery,
};
use swapcount::{CandidateId, CostFunction, Culture, CultureSpec, ElectionCountTable, Guards, MahonianTable};

fn tables(c: &mut Criterion) {
    let mut g = c.benchmark_group("tables");
    for m in [10, 20] {
        g.bench_with_input(BenchmarkId::new("mahonian", m), &m, |b, &m| {
            b.iter(|| MahonianTable::build(black_box(m)))
        });
    }
    let mahonian = MahonianTable::build(10);
    g.sample_size(10);
    g.bench_function("election-count m=10 n=100", |b| {
        b.iter(|| ElectionCountTable::build(&mahonian, 10, black_box(100)).unwrap())
    });
    g.finish();
}

fn counters(c: &mut Criterion) {
    let guards = Guards::default();
    let p = CandidateId(0);
    let mut g = c.benchmark_group("counters");
    g.sample_size(10);
    for n in [4, 6, 8] {
        let e = CultureSpec { culture: Culture::Ic, m: 5, n, seed: 3 }.generate().unwrap();
        g.bench_with_input(BenchmarkId::new("swap-plurality r=6", n), &e, |b, e| {
            b.iter(|| count_plurality_swap_bribery(e, p, black_box(6), &guards).unwrap())
        });
    }
    let e = CultureSpec { culture: Culture::Ic, m: 8, n: 40, seed: 4 }.generate().unwrap();
    g.bench_function("shift-plurality m=8 n=40 r=20", |b| {
        b.iter(|| count_plurality_shift_constructive(&e, p, black_box(20), &CostFunction::Unit).unwrap())
    });
    for r in [4, 8] {
        g.bench_with_input(BenchmarkId::new("shift-borda m=8 n=40", r), &r, |b, &r| {
            b.iter(|| count_borda_shift_constructive(&e, p, r, &CostFunction::Unit, &guards).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, tables, counters);
criterion_main!(benches);
