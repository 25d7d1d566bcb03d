//! Relative frequencies of translation-variant sets across corpora.
//!
//! A variant set lists the surface forms one source word may be translated
//! into. Counting is exact matching on tokenized forms, so inflected variants
//! stay distinct.

use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::tokenize::{tokenize, TokenizerConfig};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariantSet {
    pub source_word: String,
    pub variants: Vec<String>,
}

impl VariantSet {
    pub fn new(source_word: impl Into<String>, variants: Vec<String>) -> Result<Self> {
        let set = VariantSet {
            source_word: source_word.into(),
            variants,
        };
        set.validate()?;
        Ok(set)
    }

    fn invalid(&self, reason: impl Into<String>) -> Error {
        Error::VariantSet {
            source_word: self.source_word.clone(),
            reason: reason.into(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.variants.is_empty() {
            return Err(self.invalid("no variants listed"));
        }
        let mut seen = HashSet::new();
        for v in &self.variants {
            if !seen.insert(v.as_str()) {
                return Err(self.invalid(format!("variant '{v}' listed twice")));
            }
        }
        Ok(())
    }

    /// Applies the tokenizer's normalization to every variant. Each variant
    /// must remain a single token and the set must stay duplicate-free.
    pub fn normalized(&self, config: &TokenizerConfig) -> Result<Self> {
        let mut variants = Vec::with_capacity(self.variants.len());
        for v in &self.variants {
            let mut toks = tokenize(v, config);
            if toks.len() != 1 {
                return Err(self.invalid(format!(
                    "variant '{v}' does not normalize to exactly one token"
                )));
            }
            variants.push(toks.pop().unwrap());
        }
        VariantSet::new(self.source_word.clone(), variants)
    }
}

/// Reads a JSON array of `{"source_word": .., "variants": [..]}` objects.
pub fn load_variant_sets(path: impl AsRef<Path>) -> Result<Vec<VariantSet>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let sets: Vec<VariantSet> = serde_json::from_str(&text).map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    for s in &sets {
        s.validate()?;
    }
    Ok(sets)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VariantCount {
    pub variant: String,
    pub raw_count: u64,
    pub relative_frequency: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusVariants {
    pub label: String,
    pub total: u64,
    /// One entry per variant, in variant-set order, including absent ones.
    pub counts: Vec<VariantCount>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VariantProfile {
    pub source_word: String,
    pub per_corpus: Vec<CorpusVariants>,
}

impl VariantProfile {
    /// Builds a profile from any per-corpus count lookup.
    pub fn from_counts<'a, I, F>(set: &VariantSet, sources: I) -> Self
    where
        I: IntoIterator<Item = (&'a str, F)>,
        F: Fn(&str) -> u64,
    {
        let per_corpus = sources
            .into_iter()
            .map(|(label, count_of)| {
                let raw: Vec<u64> = set.variants.iter().map(|v| count_of(v)).collect();
                let total: u64 = raw.iter().sum();
                let counts = set
                    .variants
                    .iter()
                    .zip(raw)
                    .map(|(v, c)| VariantCount {
                        variant: v.clone(),
                        raw_count: c,
                        relative_frequency: if total > 0 {
                            c as f64 / total as f64
                        } else {
                            0.0
                        },
                    })
                    .collect();
                CorpusVariants {
                    label: label.to_string(),
                    total,
                    counts,
                }
            })
            .collect();
        VariantProfile {
            source_word: set.source_word.clone(),
            per_corpus,
        }
    }

    pub fn corpus(&self, label: &str) -> Option<&CorpusVariants> {
        self.per_corpus.iter().find(|c| c.label == label)
    }
}

impl CorpusVariants {
    pub fn relative_frequency(&self, variant: &str) -> f64 {
        self.counts
            .iter()
            .find(|c| c.variant == variant)
            .map_or(0.0, |c| c.relative_frequency)
    }
}

pub fn variant_profile(corpora: &[&Corpus], set: &VariantSet) -> VariantProfile {
    VariantProfile::from_counts(
        set,
        corpora.iter().map(|c| {
            let counts = c.type_counts();
            let vocab = c.vocabulary();
            (c.label(), move |v: &str| {
                vocab.get(v).map_or(0, |id| counts[id as usize])
            })
        }),
    )
}
