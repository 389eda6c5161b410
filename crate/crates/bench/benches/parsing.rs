use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use typecyk_bench::{sentence, synthetic_corpus, synthetic_grammar, synthetic_spec};
use typecyk_core::experiment::{run_experiment, ExperimentConfig, HookMode};
use typecyk_core::pcfg::{binarize_tree, induce};
use typecyk_core::chart::parse;
use typecyk_core::{ParseConfig, TypedPruningHook};

fn bench_length(c: &mut Criterion) {
    let (merged, grammar) = synthetic_grammar(500, 11, false);
    let hook = TypedPruningHook::new(merged);
    let cfg = ParseConfig {
        root: Some("real".into()),
        ..ParseConfig::default()
    };
    let mut group = c.benchmark_group("parse");
    group.sample_size(10);
    for n in [5, 10, 20, 40] {
        let tokens = sentence(n);
        group.bench_with_input(BenchmarkId::new("untyped", n), &tokens, |b, t| {
            b.iter(|| parse(&grammar, t, &cfg, None).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("typed", n), &tokens, |b, t| {
            b.iter(|| parse(&grammar, t, &cfg, Some(&hook)).unwrap())
        });
    }
    group.finish();
}

fn bench_induce(c: &mut Criterion) {
    let (_, corpus) = synthetic_corpus(500, 11, false);
    let trees: Vec<_> = corpus.iter().map(|e| binarize_tree(&e.gold_tree)).collect();
    c.bench_function("induce 500", |b| b.iter(|| induce(&trees).unwrap()));
}

fn bench_experiment(c: &mut Criterion) {
    let (sig, corpus) = synthetic_corpus(500, 11, false);
    let spec = synthetic_spec();
    let cfg = ExperimentConfig {
        hook: HookMode::Typed,
        ..ExperimentConfig::default()
    };
    let mut group = c.benchmark_group("experiment");
    group.sample_size(10);
    group.bench_function("synthetic 500", |b| {
        b.iter(|| run_experiment(&corpus, &spec, &sig, &cfg).unwrap())
    });
    group.finish();
}

criterion_group!(benches, bench_length, bench_induce, bench_experiment);
criterion_main!(benches);
