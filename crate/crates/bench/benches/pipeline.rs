use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use orm2dlr_bench::{chain, HOSPITAL};
use orm2dlr_core::dlr::text::{parse_kb, serialize_kb};
use orm2dlr_core::{
    concept_satisfiable_bounded, cross_check, parse_orm, translate, ConceptExpr, CrossConfig, SearchConfig, TranslateOptions,
};

fn front_end(c: &mut Criterion) {
    let mut g = c.benchmark_group("parse+translate");
    for n in [4, 16, 64] {
        let src = chain(n);
        g.bench_with_input(BenchmarkId::new("chain", n), &src, |b, src| {
            b.iter(|| {
                let m = parse_orm(black_box(src)).unwrap();
                translate(&m, TranslateOptions::default()).unwrap()
            })
        });
    }
    g.finish();

    let m = parse_orm(&chain(64)).unwrap();
    let kb = translate(&m, TranslateOptions::default()).unwrap().0;
    let text = serialize_kb(&kb);
    c.bench_function("kb text round trip/chain 64", |b| b.iter(|| parse_kb(black_box(&text)).unwrap()));
}

fn search(c: &mut Criterion) {
    let mut g = c.benchmark_group("concept search");
    g.sample_size(20);
    for n in [4, 8, 16] {
        let m = parse_orm(&chain(n)).unwrap();
        let kb = translate(&m, TranslateOptions::default()).unwrap().0;
        let q = ConceptExpr::atomic("T0");
        for d in [2, 3] {
            g.bench_with_input(BenchmarkId::new(format!("chain {n}"), d), &d, |b, &d| {
                b.iter(|| concept_satisfiable_bounded(&kb, &q, &SearchConfig::new(d)).unwrap())
            });
        }
    }
    g.finish();

    let mut g = c.benchmark_group("cross-check");
    g.sample_size(10);
    let hospital = parse_orm(HOSPITAL).unwrap();
    g.bench_function("hospital d=3", |b| b.iter(|| cross_check(&hospital, &CrossConfig::new(3)).unwrap()));
    let m = parse_orm(&chain(6)).unwrap();
    g.bench_function("chain 6 d=2", |b| b.iter(|| cross_check(&m, &CrossConfig::new(2)).unwrap()));
    g.finish();
}

criterion_group!(benches, front_end, search);
criterion_main!(benches);
