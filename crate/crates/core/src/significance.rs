//! Paired bootstrap comparison of a diversity metric between two corpora.
//!
//! Each iteration resamples whole sentences with replacement from both
//! corpora and records the metric difference. Iteration `i` draws from
//! ChaCha8 substream `i` of the configured seed (corpus A first, then B), so
//! results do not depend on thread scheduling.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, TypeId};
use crate::diversity::{check_threshold, FrequencySpectrum, MtldPass, DEFAULT_MTLD_THRESHOLD};
use crate::error::{Error, Result, Undefined};
use crate::rng;

/// Iteration counts below this are reported with a warning.
pub const MIN_RECOMMENDED_ITERATIONS: usize = 100;
pub const SIGNIFICANCE_LEVEL: f64 = 0.05;
pub const P_VALUE_METHOD: &str = "two-sided-sign-proportion";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum LdMetric {
    Ttr,
    YulesI,
    Mtld,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BootstrapConfig {
    pub iterations: usize,
    pub seed: u64,
    pub metric: LdMetric,
    pub mtld_threshold: f64,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        BootstrapConfig {
            iterations: 1000,
            seed: 0,
            metric: LdMetric::Ttr,
            mtld_threshold: DEFAULT_MTLD_THRESHOLD,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BootstrapResult {
    pub metric: LdMetric,
    /// metric(A) - metric(B) on the full corpora.
    pub observed_delta: f64,
    pub p_value: f64,
    /// 2.5th percentile of the resampled deltas.
    pub ci_low: f64,
    /// 97.5th percentile of the resampled deltas.
    pub ci_high: f64,
    pub iterations: usize,
    pub seed: u64,
    /// Resamples on which the metric was undefined; excluded from the statistics.
    pub degenerate_samples: usize,
    pub significant: bool,
    pub p_value_method: &'static str,
    pub prng: &'static str,
    pub warnings: Vec<String>,
}

/// Reusable per-thread buffers for metric evaluation on a resample.
struct Scratch {
    counts: Vec<u64>,
    touched: Vec<TypeId>,
    stream: Vec<TypeId>,
}

impl Scratch {
    fn new() -> Self {
        Scratch {
            counts: Vec::new(),
            touched: Vec::new(),
            stream: Vec::new(),
        }
    }
}

fn metric_on(
    corpus: &Corpus,
    sentences: &[usize],
    config: &BootstrapConfig,
    scratch: &mut Scratch,
) -> std::result::Result<f64, Undefined> {
    let vocab = corpus.vocabulary().len();
    if scratch.counts.len() < vocab {
        scratch.counts.resize(vocab, 0);
    }
    match config.metric {
        LdMetric::Ttr | LdMetric::YulesI => {
            let mut tokens = 0u64;
            for &s in sentences {
                for &id in corpus.sentence_ids(s) {
                    let c = &mut scratch.counts[id as usize];
                    if *c == 0 {
                        scratch.touched.push(id);
                    }
                    *c += 1;
                    tokens += 1;
                }
            }
            let value = if tokens == 0 {
                Err(Undefined::EmptyText)
            } else if config.metric == LdMetric::Ttr {
                Ok(scratch.touched.len() as f64 / tokens as f64)
            } else {
                FrequencySpectrum::from_counts(
                    scratch
                        .touched
                        .iter()
                        .map(|&id| scratch.counts[id as usize]),
                )
                .yules_i()
            };
            for &id in &scratch.touched {
                scratch.counts[id as usize] = 0;
            }
            scratch.touched.clear();
            value
        }
        LdMetric::Mtld => {
            scratch.stream.clear();
            for &s in sentences {
                scratch.stream.extend_from_slice(corpus.sentence_ids(s));
            }
            let mut forward = MtldPass::new(config.mtld_threshold);
            let mut backward = MtldPass::new(config.mtld_threshold);
            for &id in &scratch.stream {
                forward.push(id);
            }
            for &id in scratch.stream.iter().rev() {
                backward.push(id);
            }
            Ok((forward.value()? + backward.value()?) / 2.0)
        }
    }
}

/// Value of `metric` on a whole corpus.
pub fn metric_value(corpus: &Corpus, metric: LdMetric, mtld_threshold: f64) -> Result<f64> {
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus(corpus.label().to_string()));
    }
    let config = BootstrapConfig {
        metric,
        mtld_threshold,
        ..Default::default()
    };
    let all: Vec<usize> = (0..corpus.sentence_count()).collect();
    metric_on(corpus, &all, &config, &mut Scratch::new()).map_err(Error::Undefined)
}

/// Linear-interpolation percentile of sorted data, `q` in [0, 1].
fn percentile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

fn draw(rng: &mut impl rand::RngCore, n: usize, out: &mut Vec<usize>) {
    out.clear();
    out.extend((0..n).map(|_| rng::bounded(rng, n as u64) as usize));
}

struct Summary {
    p_value: f64,
    ci_low: f64,
    ci_high: f64,
    degenerate: usize,
}

/// Aggregates resampled deltas; `None` marks a resample with an undefined
/// metric.
fn summarize(observed_delta: f64, samples: &[Option<f64>]) -> Result<Summary> {
    let iterations = samples.len();
    let mut deltas: Vec<f64> = samples.iter().flatten().copied().collect();
    let degenerate = iterations - deltas.len();
    if degenerate * 10 > iterations || deltas.is_empty() {
        return Err(Error::DegenerateBootstrap {
            degenerate,
            iterations,
        });
    }

    // Resamples that do not share the observed sign are evidence for the
    // null hypothesis; a zero observed delta makes every resample count.
    let against = deltas
        .iter()
        .filter(|&&d| {
            if observed_delta > 0.0 {
                d <= 0.0
            } else if observed_delta < 0.0 {
                d >= 0.0
            } else {
                true
            }
        })
        .count();
    let p_value = (2.0 * against as f64 / deltas.len() as f64).min(1.0);

    deltas.sort_by(f64::total_cmp);
    Ok(Summary {
        p_value,
        ci_low: percentile(&deltas, 0.025),
        ci_high: percentile(&deltas, 0.975),
        degenerate,
    })
}

pub fn bootstrap_compare(
    a: &Corpus,
    b: &Corpus,
    config: &BootstrapConfig,
) -> Result<BootstrapResult> {
    if config.iterations == 0 {
        return Err(Error::Domain("iterations must be positive".into()));
    }
    check_threshold(config.mtld_threshold)?;
    let observed_delta = metric_value(a, config.metric, config.mtld_threshold)?
        - metric_value(b, config.metric, config.mtld_threshold)?;

    let (na, nb) = (a.sentence_count(), b.sentence_count());
    let samples: Vec<Option<f64>> = (0..config.iterations)
        .into_par_iter()
        .map_init(
            || (Scratch::new(), Vec::new(), Vec::new()),
            |(scratch, ia, ib), i| {
                let mut r = rng::substream(config.seed, i as u64);
                draw(&mut r, na, ia);
                draw(&mut r, nb, ib);
                let ma = metric_on(a, ia, config, scratch).ok()?;
                let mb = metric_on(b, ib, config, scratch).ok()?;
                Some(ma - mb)
            },
        )
        .collect();

    let summary = summarize(observed_delta, &samples)?;
    let mut warnings = Vec::new();
    if config.iterations < MIN_RECOMMENDED_ITERATIONS {
        warnings.push(format!(
            "only {} bootstrap iterations; at least {MIN_RECOMMENDED_ITERATIONS} are recommended for a reported p-value",
            config.iterations
        ));
    }
    Ok(BootstrapResult {
        metric: config.metric,
        observed_delta,
        p_value: summary.p_value,
        ci_low: summary.ci_low,
        ci_high: summary.ci_high,
        iterations: config.iterations,
        seed: config.seed,
        degenerate_samples: summary.degenerate,
        significant: summary.p_value < SIGNIFICANCE_LEVEL,
        p_value_method: P_VALUE_METHOD,
        prng: rng::PRNG_SCHEME,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rich(n: usize) -> Corpus {
        // Every sentence uses 26 distinct types, shared across sentences.
        let letters: Vec<String> = ('a'..='z').map(|c| c.to_string()).collect();
        Corpus::from_sentences("rich", (0..n).map(|_| letters.clone()))
    }

    fn poor(n: usize) -> Corpus {
        Corpus::from_sentences("poor", (0..n).map(|_| vec!["the"; 26]))
    }

    fn varied(n: usize, seed: u64) -> Corpus {
        let mut r = rng::seeded(seed);
        Corpus::from_sentences(
            "varied",
            (0..n).map(|_| {
                let len = 3 + rng::bounded(&mut r, 10) as usize;
                (0..len)
                    .map(|_| format!("w{}", rng::bounded(&mut r, 40)))
                    .collect::<Vec<_>>()
            }),
        )
    }

    #[test]
    fn identical_corpora_are_not_significant() {
        let c = varied(200, 3);
        for metric in [LdMetric::Ttr, LdMetric::YulesI, LdMetric::Mtld] {
            let cfg = BootstrapConfig {
                metric,
                iterations: 300,
                seed: 5,
                ..Default::default()
            };
            let r = bootstrap_compare(&c, &c, &cfg).unwrap();
            assert_eq!(r.observed_delta, 0.0);
            assert!(r.p_value >= 0.95, "{metric:?}: {}", r.p_value);
            assert!(!r.significant);
            assert!(r.ci_low <= r.ci_high);
        }
    }

    #[test]
    fn separated_corpora_are_significant() {
        let cfg = BootstrapConfig {
            iterations: 1000,
            seed: 11,
            ..Default::default()
        };
        let r = bootstrap_compare(&rich(500), &poor(500), &cfg).unwrap();
        assert!(r.observed_delta > 0.0);
        assert!(r.ci_low > 0.0);
        assert_eq!(r.p_value, 0.0);
        assert!(r.significant);
    }

    #[test]
    fn deterministic_under_seed() {
        let a = varied(120, 1);
        let b = varied(120, 2);
        let cfg = BootstrapConfig {
            iterations: 200,
            seed: 99,
            metric: LdMetric::Mtld,
            ..Default::default()
        };
        let r1 = bootstrap_compare(&a, &b, &cfg).unwrap();
        let r2 = bootstrap_compare(&a, &b, &cfg).unwrap();
        assert_eq!(r1, r2);
        assert_eq!(r1.p_value.to_bits(), r2.p_value.to_bits());
    }

    #[test]
    fn low_iterations_warn() {
        let c = varied(50, 1);
        let cfg = BootstrapConfig {
            iterations: 50,
            ..Default::default()
        };
        let r = bootstrap_compare(&c, &c, &cfg).unwrap();
        assert_eq!(r.warnings.len(), 1);
    }

    #[test]
    fn undefined_metric_on_full_corpus_is_an_error() {
        let distinct = Corpus::from_sentences("d", [["a", "b", "c"]]);
        let cfg = BootstrapConfig {
            metric: LdMetric::YulesI,
            ..Default::default()
        };
        assert!(matches!(
            bootstrap_compare(&distinct, &distinct, &cfg),
            Err(Error::Undefined(Undefined::NoRepeatedTypes))
        ));
    }

    #[test]
    fn summary_statistics() {
        let samples: Vec<Option<f64>> = (0..100).map(|i| Some(i as f64 - 9.5)).collect();
        let s = summarize(1.0, &samples).unwrap();
        // 10 of 100 deltas are <= 0.
        assert!((s.p_value - 0.2).abs() < 1e-12);
        assert!((s.ci_low - (-9.5 + 0.025 * 99.0)).abs() < 1e-12);
        assert!((s.ci_high - (-9.5 + 0.975 * 99.0)).abs() < 1e-12);
        assert_eq!(s.degenerate, 0);

        let s = summarize(-1.0, &samples).unwrap();
        assert_eq!(s.p_value, 1.0);
    }

    #[test]
    fn degenerate_limit() {
        let mut samples = vec![Some(1.0); 90];
        samples.extend([None; 10]);
        assert_eq!(summarize(1.0, &samples).unwrap().degenerate, 10);
        samples.push(None);
        assert!(matches!(
            summarize(1.0, &samples),
            Err(Error::DegenerateBootstrap {
                degenerate: 11,
                iterations: 101
            })
        ));
    }

    #[test]
    fn metric_value_matches_diversity_module() {
        let c = varied(80, 4);
        let r = crate::diversity::diversity_report(&c, 0.72).unwrap();
        assert_eq!(metric_value(&c, LdMetric::Ttr, 0.72).unwrap(), r.ttr);
        assert_eq!(
            Some(metric_value(&c, LdMetric::YulesI, 0.72).unwrap()),
            r.yules_i
        );
        assert_eq!(
            Some(metric_value(&c, LdMetric::Mtld, 0.72).unwrap()),
            r.mtld
        );
    }
}
