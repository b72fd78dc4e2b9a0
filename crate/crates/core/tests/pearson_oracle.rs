mod common;

use common::oracles::pearson as oracle;
use csei_core::analysis::pearson;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

#[test]
fn r_and_p_match_numerical_integration() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for case in 0..50 {
        let n = rng.random_range(3..=500);
        let slope = rng.random_range(-1.0..1.0) * if case % 3 == 0 { 0.05 } else { 1.0 };
        let x: Vec<f64> = (0..n)
            .map(|_| -> f64 { StandardNormal.sample(&mut rng) })
            .collect();
        let y: Vec<f64> = x
            .iter()
            .map(|a| {
                let e: f64 = StandardNormal.sample(&mut rng);
                slope * a + e
            })
            .collect();
        let got = pearson(&x, &y).unwrap();
        let r = oracle::r(&x, &y);
        let p = oracle::p_value(r, n);
        assert!(
            (got.r - r).abs() < 1e-9,
            "case {case} n={n}: r {} vs {r}",
            got.r
        );
        assert!(
            (got.p_value - p).abs() < 1e-6,
            "case {case} n={n}: p {} vs {p}",
            got.p_value
        );
    }
}

#[test]
fn perfect_correlation_is_exact() {
    let x = [0.3, 1.7, -2.2, 5.0, 0.01, 9.5];
    let neg: Vec<f64> = x.iter().map(|v| -v).collect();
    let same = pearson(&x, &x).unwrap();
    assert_eq!(same.r, 1.0);
    assert_eq!(same.p_value, 0.0);
    assert_eq!(pearson(&x, &neg).unwrap().r, -1.0);
}
