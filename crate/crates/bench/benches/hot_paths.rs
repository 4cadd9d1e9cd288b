//! Benchmarks for the paths that dominate long scans: the sequence engine,
//! sieve construction, prime counting in progressions, and classification.

use criterion::{black_box, criterion_group, criterion_main, Criterion};

use lcmseq_core::{
    all_witnesses, b_values, build_spf_sieve, classify_range, minimal_s_search, OddComposite,
    PrimeCounter, SearchBudget,
};

fn engine(c: &mut Criterion) {
    let sieve = build_spf_sieve(100_002).unwrap();
    c.bench_function("engine_run_s1_to_100k", |b| {
        b.iter(|| b_values(black_box(1), 100_000, &sieve).unwrap())
    });
    c.bench_function("engine_run_s720_to_100k", |b| {
        b.iter(|| b_values(black_box(720), 100_000, &sieve).unwrap())
    });
}

fn sieves(c: &mut Criterion) {
    c.bench_function("spf_sieve_build_1m", |b| {
        b.iter(|| build_spf_sieve(black_box(1_000_000)).unwrap())
    });
}

fn prime_counting(c: &mut Criterion) {
    let resident = PrimeCounter::new(1_000_001);
    c.bench_function("pi_ap_resident_1m", |b| {
        b.iter(|| resident.pi_ap(black_box(1_000_000), 19, 18).unwrap())
    });

    // Tiny resident table forces the segmented path over the same range.
    let segmented = PrimeCounter::new(10_000).with_segment_size(1 << 18);
    c.bench_function("pi_ap_segmented_1m", |b| {
        b.iter(|| segmented.pi_ap(black_box(1_000_000), 19, 18).unwrap())
    });
}

fn classification(c: &mut Criterion) {
    c.bench_function("classify_range_10k", |b| {
        b.iter(|| classify_range(black_box(10_000)))
    });

    let m = OddComposite::new(105).unwrap();
    c.bench_function("all_witnesses_105", |b| b.iter(|| all_witnesses(black_box(&m))));

    let sieve = build_spf_sieve(512).unwrap();
    let m = OddComposite::new(121).unwrap();
    c.bench_function("minimal_seed_search_121", |b| {
        b.iter(|| {
            minimal_s_search(black_box(&m), SearchBudget { max_verifications: 256 }, &sieve)
                .unwrap()
        })
    });
}

criterion_group!(benches, engine, sieves, prime_counting, classification);
criterion_main!(benches);
