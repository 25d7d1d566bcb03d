//! Loose p-value calibration check: two independent samples from the same
//! distribution should rarely test as significant.

mod common;

use common::*;
use lexbias::corpus::Corpus;
use lexbias::significance::{bootstrap_compare, BootstrapConfig, LdMetric};

#[test]
fn same_distribution_is_rarely_significant() {
    for metric in [LdMetric::Ttr, LdMetric::Mtld] {
        let mut r = rng(77);
        let mut rejections = 0;
        for trial in 0..100 {
            let a = Corpus::from_sentences("a", random_sentences(&mut r, 80, 15, 150));
            let b = Corpus::from_sentences("b", random_sentences(&mut r, 80, 15, 150));
            let cfg = BootstrapConfig {
                iterations: 200,
                seed: trial,
                metric,
                ..Default::default()
            };
            if bootstrap_compare(&a, &b, &cfg).unwrap().significant {
                rejections += 1;
            }
        }
        if rejections > 10 {
            eprintln!("note: {metric:?} rejected {rejections}/100 same-distribution pairs (expected about 5)");
        }
        // Bootstrap variance makes the exact rate noisy; only gross
        // miscalibration fails the test.
        assert!(rejections <= 25, "{metric:?}: {rejections}/100 rejections");
    }
}
