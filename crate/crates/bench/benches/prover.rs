use criterion::{BenchmarkId, Criterion};
use syllo_bench::monadic_problems;
use syllo_core::aristotle::{augment_existential_import, figure_mood_problems};
use syllo_core::prover::{decide_by_domain_enumeration, decide_entailment};

fn engines(c: &mut Criterion) {
    let problems = monadic_problems(200, 7);
    let mut group = c.benchmark_group("random-monadic");
    group.bench_function(BenchmarkId::from_parameter("type-space"), |b| {
        b.iter(|| problems.iter().filter(|p| decide_entailment(p).unwrap().is_entailed()).count())
    });
    group.bench_function(BenchmarkId::from_parameter("domain-enumeration"), |b| {
        b.iter(|| {
            problems
                .iter()
                .filter(|p| decide_by_domain_enumeration(p, 1 << p.predicates().len()).unwrap().is_entailed())
                .count()
        })
    });
    group.finish();
}

fn census(c: &mut Criterion) {
    let problems = figure_mood_problems();
    c.bench_function("mood-census-with-import", |b| {
        b.iter(|| {
            problems
                .iter()
                .filter(|m| {
                    let mut p = m.problem.clone();
                    p.premises = augment_existential_import(&p.premises).unwrap();
                    decide_entailment(&p).unwrap().is_entailed()
                })
                .count()
        })
    });
}

criterion::criterion_group!(benches, engines, census);
criterion::criterion_main!(benches);
