//! Brute-force reference implementations and random corpus generators
//! shared by the integration and acceptance tests. Nothing here calls into
//! the library's metric code.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Sentences of 1..=max_len tokens drawn from `types` single-word forms,
/// with a skewed distribution so repeats are common.
pub fn random_sentences(
    r: &mut ChaCha8Rng,
    sentences: usize,
    max_len: usize,
    types: usize,
) -> Vec<Vec<String>> {
    (0..sentences)
        .map(|_| {
            let len = r.random_range(1..=max_len);
            (0..len)
                .map(|_| {
                    let a = r.random_range(0..types);
                    let b = r.random_range(0..types);
                    format!("t{}", a.min(b))
                })
                .collect()
        })
        .collect()
}

/// A text of at most `max_tokens` tokens over at most `max_types` types,
/// cut into sentences of random length.
pub fn random_text(r: &mut ChaCha8Rng, max_tokens: usize, max_types: usize) -> Vec<Vec<String>> {
    let n = r.random_range(1..=max_tokens);
    let types = r.random_range(1..=max_types);
    let mut tokens: Vec<String> = (0..n)
        .map(|_| format!("w{}", r.random_range(0..types)))
        .collect();
    let mut out = Vec::new();
    while !tokens.is_empty() {
        let take = r.random_range(1..=tokens.len().min(25));
        let rest = tokens.split_off(take);
        out.push(tokens);
        tokens = rest;
    }
    out
}

pub fn flatten(sentences: &[Vec<String>]) -> Vec<&str> {
    sentences.iter().flatten().map(String::as_str).collect()
}

pub fn oracle_ttr(tokens: &[&str]) -> f64 {
    let types: BTreeSet<&str> = tokens.iter().copied().collect();
    types.len() as f64 / tokens.len() as f64
}

/// (M1, M2) from the frequency spectrum, counting each type by a full scan.
pub fn oracle_moments(tokens: &[&str]) -> (f64, f64) {
    let types: BTreeSet<&str> = tokens.iter().copied().collect();
    let freq: Vec<usize> = types
        .iter()
        .map(|t| tokens.iter().filter(|x| *x == t).count())
        .collect();
    let mut m1 = 0.0;
    let mut m2 = 0.0;
    for m in 1..=tokens.len() {
        let v_m = freq.iter().filter(|&&f| f == m).count() as f64;
        m1 += m as f64 * v_m;
        m2 += (m * m) as f64 * v_m;
    }
    (m1, m2)
}

/// Yule's K is only defined for texts of at least two tokens.
pub fn oracle_yules_k(tokens: &[&str]) -> Option<f64> {
    let (m1, m2) = oracle_moments(tokens);
    if m1 < 2.0 {
        return None;
    }
    Some(10_000.0 * (m2 - m1) / (m1 * m1))
}

pub fn oracle_yules_i(tokens: &[&str]) -> Option<f64> {
    let (m1, m2) = oracle_moments(tokens);
    if m1 < 2.0 || m2 - m1 == 0.0 {
        return None;
    }
    Some(m1 * m1 / (m2 - m1))
}

fn oracle_mtld_pass(tokens: &[&str], threshold: f64) -> Option<f64> {
    let mut factors = 0.0;
    let mut segment: Vec<&str> = Vec::new();
    for &t in tokens {
        segment.push(t);
        if oracle_ttr(&segment) < threshold {
            factors += 1.0;
            segment.clear();
        }
    }
    if !segment.is_empty() {
        factors += (1.0 - oracle_ttr(&segment)) / (1.0 - threshold);
    }
    if factors == 0.0 {
        None
    } else {
        Some(tokens.len() as f64 / factors)
    }
}

pub fn oracle_mtld(tokens: &[&str], threshold: f64) -> Option<(f64, f64, f64)> {
    let forward = oracle_mtld_pass(tokens, threshold)?;
    let reversed: Vec<&str> = tokens.iter().rev().copied().collect();
    let backward = oracle_mtld_pass(&reversed, threshold)?;
    Some(((forward + backward) / 2.0, forward, backward))
}

/// Length-weighted relative frequencies: each occurrence counts 1/|sentence|.
pub fn oracle_profile(sentences: &[Vec<String>]) -> BTreeMap<String, f64> {
    let mut weights = BTreeMap::new();
    for s in sentences.iter().filter(|s| !s.is_empty()) {
        for t in s {
            *weights.entry(t.clone()).or_insert(0.0) += 1.0 / s.len() as f64;
        }
    }
    let total: f64 = weights.values().sum();
    weights.values_mut().for_each(|w| *w /= total);
    weights
}

/// Length weights as exact integers: every occurrence in a sentence of
/// length `l` contributes `unit / l`, where `unit` is divisible by every
/// sentence length. Returns the weights and their total.
pub fn exact_weights(sentences: &[Vec<String>], unit: u64) -> (BTreeMap<String, u64>, u64) {
    let mut weights = BTreeMap::new();
    for s in sentences.iter().filter(|s| !s.is_empty()) {
        assert_eq!(unit % s.len() as u64, 0);
        for t in s {
            *weights.entry(t.clone()).or_insert(0) += unit / s.len() as u64;
        }
    }
    let total = weights.values().sum();
    (weights, total)
}

/// Six-class symbol of one HT word in exact arithmetic, with `p_ht = w_ht / total_ht`,
/// `p_mt = w_mt / total_mt` and the frequency threshold `1 / ht_types`.
pub fn oracle_class(
    w_ht: u64,
    total_ht: u64,
    w_mt: u64,
    total_mt: u64,
    ht_types: u64,
) -> &'static str {
    let frequent = u128::from(w_ht) * u128::from(ht_types) > u128::from(total_ht);
    let increased =
        u128::from(w_mt) * u128::from(total_ht) > u128::from(w_ht) * u128::from(total_mt);
    match (frequent, w_mt) {
        (true, 0) => "+0",
        (false, 0) => "-0",
        (true, _) if increased => "++",
        (false, _) if increased => "-+",
        (true, _) => "+-",
        (false, _) => "--",
    }
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}
