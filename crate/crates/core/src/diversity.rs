//! Lexical diversity: type/token ratio, Yule's K and I, and MTLD.
//!
//! Undefined results (a text whose types all occur once has K = 0, so I has
//! no finite value; a text MTLD cannot segment has zero factors) are returned
//! as [`Undefined`] reasons and never as NaN or infinity.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::corpus::{Corpus, TypeId};
use crate::error::{Error, Result, Undefined};

pub const DEFAULT_MTLD_THRESHOLD: f64 = 0.72;

/// `V(m)`: how many types occur exactly `m` times.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FrequencySpectrum {
    spectrum: BTreeMap<u64, u64>,
    /// M1, the number of tokens.
    m1: u64,
    /// M2 = sum of m^2 V(m).
    m2: u128,
}

impl FrequencySpectrum {
    /// Builds the spectrum from per-type occurrence counts. Zero counts are
    /// ignored.
    pub fn from_counts<I: IntoIterator<Item = u64>>(counts: I) -> Self {
        let mut spectrum = BTreeMap::new();
        for c in counts.into_iter().filter(|&c| c > 0) {
            *spectrum.entry(c).or_insert(0) += 1;
        }
        let m1 = spectrum.iter().map(|(&m, &v)| m * v).sum();
        let m2 = spectrum
            .iter()
            .map(|(&m, &v)| u128::from(m) * u128::from(m) * u128::from(v))
            .sum();
        FrequencySpectrum { spectrum, m1, m2 }
    }

    pub fn get(&self, m: u64) -> u64 {
        self.spectrum.get(&m).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.spectrum.iter().map(|(&m, &v)| (m, v))
    }

    pub fn m1(&self) -> u64 {
        self.m1
    }

    pub fn m2(&self) -> u128 {
        self.m2
    }

    pub fn type_count(&self) -> u64 {
        self.spectrum.values().sum()
    }

    /// K = 10^4 (M2 - M1) / M1^2.
    pub fn yules_k(&self) -> std::result::Result<f64, Undefined> {
        if self.m1 < 2 {
            return Err(if self.m1 == 0 {
                Undefined::EmptyText
            } else {
                Undefined::TooFewTokens
            });
        }
        let m1 = self.m1 as f64;
        Ok(1e4 * (self.m2 - u128::from(self.m1)) as f64 / (m1 * m1))
    }

    /// I = M1^2 / (M2 - M1), the reciprocal of K scaled by 10^4.
    pub fn yules_i(&self) -> std::result::Result<f64, Undefined> {
        self.yules_k()?;
        let excess = self.m2 - u128::from(self.m1);
        if excess == 0 {
            return Err(Undefined::NoRepeatedTypes);
        }
        let m1 = self.m1 as f64;
        Ok(m1 * m1 / excess as f64)
    }
}

fn nonempty(corpus: &Corpus) -> Result<()> {
    if corpus.is_empty() {
        Err(Error::EmptyCorpus(corpus.label().to_string()))
    } else {
        Ok(())
    }
}

pub fn frequency_spectrum(corpus: &Corpus) -> Result<FrequencySpectrum> {
    nonempty(corpus)?;
    Ok(FrequencySpectrum::from_counts(corpus.type_counts()))
}

pub fn ttr(corpus: &Corpus) -> Result<f64> {
    nonempty(corpus)?;
    Ok(corpus.vocabulary().len() as f64 / corpus.token_count() as f64)
}

pub fn yules_k(corpus: &Corpus) -> Result<f64> {
    frequency_spectrum(corpus)?
        .yules_k()
        .map_err(Error::Undefined)
}

pub fn yules_i(corpus: &Corpus) -> Result<f64> {
    frequency_spectrum(corpus)?
        .yules_i()
        .map_err(Error::Undefined)
}

/// One directional MTLD pass over a token stream.
///
/// Tokens are fed one at a time, so a pass can run over a file without the
/// file being in memory. Each type needs only a segment stamp, making the
/// state proportional to the vocabulary.
#[derive(Debug, Clone)]
pub struct MtldPass {
    threshold: f64,
    full_factors: u64,
    tokens: u64,
    seg_tokens: u64,
    seg_types: u64,
    epoch: u32,
    stamps: Vec<u32>,
}

impl MtldPass {
    pub fn new(threshold: f64) -> Self {
        MtldPass {
            threshold,
            full_factors: 0,
            tokens: 0,
            seg_tokens: 0,
            seg_types: 0,
            epoch: 1,
            stamps: Vec::new(),
        }
    }

    #[inline]
    pub fn push(&mut self, id: TypeId) {
        let id = id as usize;
        if id >= self.stamps.len() {
            self.stamps.resize(id + 1, 0);
        }
        self.tokens += 1;
        self.seg_tokens += 1;
        if self.stamps[id] != self.epoch {
            self.stamps[id] = self.epoch;
            self.seg_types += 1;
        }
        if (self.seg_types as f64 / self.seg_tokens as f64) < self.threshold {
            self.full_factors += 1;
            self.seg_tokens = 0;
            self.seg_types = 0;
            if self.epoch == u32::MAX {
                self.stamps.fill(0);
                self.epoch = 0;
            }
            self.epoch += 1;
        }
    }

    pub fn tokens(&self) -> u64 {
        self.tokens
    }

    /// Completed factors plus the fractional credit of the trailing segment.
    pub fn factors(&self) -> f64 {
        let partial = if self.seg_tokens > 0 {
            let seg_ttr = self.seg_types as f64 / self.seg_tokens as f64;
            (1.0 - seg_ttr) / (1.0 - self.threshold)
        } else {
            0.0
        };
        self.full_factors as f64 + partial
    }

    /// Tokens per factor.
    pub fn value(&self) -> std::result::Result<f64, Undefined> {
        if self.tokens == 0 {
            return Err(Undefined::EmptyText);
        }
        let factors = self.factors();
        if factors == 0.0 {
            return Err(Undefined::ZeroFactors);
        }
        Ok(self.tokens as f64 / factors)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Mtld {
    pub value: f64,
    pub forward: f64,
    pub backward: f64,
}

pub(crate) fn check_threshold(threshold: f64) -> Result<()> {
    if threshold > 0.0 && threshold < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "MTLD threshold must lie strictly between 0 and 1, got {threshold}"
        )))
    }
}

/// Runs both MTLD passes over `stream` (forward, then reversed).
pub fn mtld_of_stream(stream: &[TypeId], threshold: f64) -> std::result::Result<Mtld, Undefined> {
    let mut forward = MtldPass::new(threshold);
    let mut backward = MtldPass::new(threshold);
    for &id in stream {
        forward.push(id);
    }
    for &id in stream.iter().rev() {
        backward.push(id);
    }
    combine_passes(&forward, &backward)
}

pub(crate) fn combine_passes(
    forward: &MtldPass,
    backward: &MtldPass,
) -> std::result::Result<Mtld, Undefined> {
    let f = forward.value()?;
    let b = backward.value()?;
    Ok(Mtld {
        value: (f + b) / 2.0,
        forward: f,
        backward: b,
    })
}

/// MTLD over the corpus flattened into one token stream, sentence order
/// preserved.
pub fn mtld(corpus: &Corpus, threshold: f64) -> Result<Mtld> {
    check_threshold(threshold)?;
    nonempty(corpus)?;
    mtld_of_stream(corpus.token_ids(), threshold).map_err(Error::Undefined)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiversityReport {
    pub label: String,
    pub token_count: u64,
    pub type_count: u64,
    pub ttr: f64,
    /// TTR x 1000.
    pub ttr_scaled: f64,
    pub yules_k: Option<f64>,
    pub yules_i: Option<f64>,
    pub mtld: Option<f64>,
    pub mtld_forward: Option<f64>,
    pub mtld_backward: Option<f64>,
    pub mtld_threshold: f64,
    /// Reason for every metric above that is `None`.
    pub undefined: BTreeMap<String, Undefined>,
}

impl DiversityReport {
    pub(crate) fn from_parts(
        label: &str,
        spectrum: &FrequencySpectrum,
        forward: &MtldPass,
        backward: &MtldPass,
        threshold: f64,
    ) -> Result<Self> {
        if spectrum.m1() == 0 {
            return Err(Error::EmptyCorpus(label.to_string()));
        }
        let mut undefined = BTreeMap::new();
        let mut note = |name: &str, r: std::result::Result<f64, Undefined>| match r {
            Ok(v) => Some(v),
            Err(why) => {
                undefined.insert(name.to_string(), why);
                None
            }
        };
        let yules_k = note("yules_k", spectrum.yules_k());
        let yules_i = note("yules_i", spectrum.yules_i());
        let forward_value = note("mtld_forward", forward.value());
        let backward_value = note("mtld_backward", backward.value());
        let mtld = match (forward_value, backward_value) {
            (Some(f), Some(b)) => Some((f + b) / 2.0),
            _ => {
                let why = combine_passes(forward, backward).unwrap_err();
                undefined.insert("mtld".to_string(), why);
                None
            }
        };
        let ttr = spectrum.type_count() as f64 / spectrum.m1() as f64;
        Ok(DiversityReport {
            label: label.to_string(),
            token_count: spectrum.m1(),
            type_count: spectrum.type_count(),
            ttr,
            ttr_scaled: ttr * 1000.0,
            yules_k,
            yules_i,
            mtld,
            mtld_forward: forward_value,
            mtld_backward: backward_value,
            mtld_threshold: threshold,
            undefined,
        })
    }
}

pub fn diversity_report(corpus: &Corpus, mtld_threshold: f64) -> Result<DiversityReport> {
    check_threshold(mtld_threshold)?;
    nonempty(corpus)?;
    let spectrum = FrequencySpectrum::from_counts(corpus.type_counts());
    let mut forward = MtldPass::new(mtld_threshold);
    let mut backward = MtldPass::new(mtld_threshold);
    for &id in corpus.token_ids() {
        forward.push(id);
    }
    for &id in corpus.token_ids().iter().rev() {
        backward.push(id);
    }
    DiversityReport::from_parts(
        corpus.label(),
        &spectrum,
        &forward,
        &backward,
        mtld_threshold,
    )
}
