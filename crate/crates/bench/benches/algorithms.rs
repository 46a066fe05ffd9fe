use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;
use trendguard::features::minute_entropy;
use trendguard::graph::{k_core, louvain, LouvainOptions};
use trendguard::sim::{gen_lexicon_text, gen_sentence, Wordlist};
use trendguard::{count_features, detect_attack_windows, normalize_keyword, AttackParams, ContentClassifier, Locale};
use trendguard_bench::{random_graph, records};

fn features(c: &mut Criterion) {
    let mut group = c.benchmark_group("features");
    for n in [100, 1_000, 10_000] {
        let r = records(n, 1);
        group.bench_with_input(BenchmarkId::new("count_features", n), &r, |b, r| b.iter(|| count_features(black_box(r))));
        let ts: Vec<_> = r.iter().map(|r| r.created).collect();
        group.bench_with_input(BenchmarkId::new("minute_entropy", n), &ts, |b, ts| b.iter(|| minute_entropy(black_box(ts))));
    }
    group.finish();
}

fn attack_windows(c: &mut Criterion) {
    let mut group = c.benchmark_group("attack_windows");
    let params = AttackParams::default();
    for n in [100, 1_000, 5_000] {
        let r = records(n, 2);
        group.bench_with_input(BenchmarkId::from_parameter(n), &r, |b, r| {
            b.iter(|| detect_attack_windows(black_box(r), &params))
        });
    }
    group.finish();
}

fn classifier(c: &mut Criterion) {
    let words = Wordlist::bundled();
    let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(3);
    let texts: Vec<String> = (0..1_000)
        .map(|i| {
            let body = if i % 2 == 0 { gen_lexicon_text(&words, &mut rng) } else { gen_sentence(&words, &mut rng) };
            format!("{body} #KalemDeniz17")
        })
        .collect();
    let keyword = normalize_keyword("#KalemDeniz17", Locale::Tr).unwrap();
    let clf = ContentClassifier::new(Locale::Tr);
    c.bench_function("lexicon_classifier/1000_texts", |b| {
        b.iter(|| texts.iter().filter(|t| clf.is_lexicon_tweet(t, &keyword)).count())
    });
}

fn graphs(c: &mut Criterion) {
    let mut group = c.benchmark_group("graph");
    for n in [200, 1_000] {
        let g = random_graph(n, 8.0 / n as f64, 4);
        group.bench_with_input(BenchmarkId::new("k_core", n), &g, |b, g| b.iter(|| k_core(black_box(g), 4)));
        group.bench_with_input(BenchmarkId::new("louvain", n), &g, |b, g| {
            b.iter(|| louvain(black_box(g), &LouvainOptions::default()).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, features, attack_windows, classifier, graphs);
criterion_main!(benches);
