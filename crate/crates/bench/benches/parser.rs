use criterion::{BenchmarkId, Criterion, Throughput};
use syllo_bench::latex_corpus;
use syllo_core::fol::{parse_latex_formula, render_prover9};

fn parse(c: &mut Criterion) {
    let mut group = c.benchmark_group("latex");
    for depth in [2, 4, 6] {
        let corpus = latex_corpus(500, depth, 3);
        let bytes: usize = corpus.iter().map(String::len).sum();
        group.throughput(Throughput::Bytes(bytes as u64));
        group.bench_with_input(BenchmarkId::new("parse", depth), &corpus, |b, corpus| {
            b.iter(|| corpus.iter().map(|t| parse_latex_formula(t).unwrap()).count())
        });
        let parsed: Vec<_> = corpus.iter().map(|t| parse_latex_formula(t).unwrap()).collect();
        group.bench_with_input(BenchmarkId::new("to-prover9", depth), &parsed, |b, parsed| {
            b.iter(|| parsed.iter().map(render_prover9).map(|s| s.len()).sum::<usize>())
        });
    }
    group.finish();
}

criterion::criterion_group!(benches, parse);
criterion::criterion_main!(benches);
