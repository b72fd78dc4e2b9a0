use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use csei_core::analysis::find_peaks;
use csei_core::index::pc1_loadings;
use csei_core::outliers::fit_isolation_forest;
use csei_core::scoring::lexicon::Lexicon;
use csei_core::scoring::sentiment::compound_sentiment;
use csei_core::Matrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_matrix(n: usize, p: usize, seed: u64) -> Matrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = (0..n * p).map(|_| rng.random::<f64>()).collect();
    Matrix::from_row_major(n, p, data).unwrap()
}

fn pca(c: &mut Criterion) {
    let m = random_matrix(623, 13, 1);
    c.bench_function("pc1 623x13", |b| {
        b.iter(|| pc1_loadings(black_box(&m)).unwrap())
    });
}

fn forest(c: &mut Criterion) {
    let m = random_matrix(623, 13, 2);
    c.bench_function("isolation forest 100 trees", |b| {
        b.iter(|| fit_isolation_forest(black_box(&m), 100, 256, 42).unwrap())
    });
}

fn peaks(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let x: Vec<f64> = (0..5000).map(|_| rng.random::<f64>()).collect();
    c.bench_function("find_peaks n=5000 d=7", |b| {
        b.iter(|| find_peaks(black_box(&x), 7, 0.1))
    });
}

fn sentiment(c: &mut Criterion) {
    let lexicon = Lexicon::bundled();
    let text = "Honestly the new vaccine rollout is NOT bad at all, really great news!! \
                Still worried about the lockdown though, it feels so hopeless sometimes.";
    c.bench_function("compound sentiment", |b| {
        b.iter(|| compound_sentiment(black_box(text), &lexicon, 15.0))
    });
}

criterion_group!(benches, pca, forest, peaks, sentiment);
criterion_main!(benches);
