//! Two-pass streaming analysis of corpus files.
//!
//! The forward pass reads lines in order and accumulates per-type counts,
//! length-weighted frequencies and the forward MTLD pass. The second pass
//! reads the same file from the end for the backward MTLD pass. Memory is
//! proportional to the vocabulary plus one line; the token stream itself is
//! never materialized.

use std::path::Path;

use crate::corpus::{Corpus, VocabProfile, Vocabulary};
use crate::diversity::{check_threshold, DiversityReport, FrequencySpectrum, MtldPass};
use crate::error::Result;
use crate::tokenize::{for_each_token, LineReader, ReverseLineReader, TokenizerConfig};

/// Everything the report tables need from one corpus.
#[derive(Debug, Clone)]
pub struct CorpusSummary {
    label: String,
    vocab: Vocabulary,
    counts: Vec<u64>,
    weights: Vec<f64>,
    sentences: u64,
    lines: u64,
    dropped_lines: u64,
    forward: MtldPass,
    backward: MtldPass,
    threshold: f64,
}

impl CorpusSummary {
    fn empty(label: &str, threshold: f64) -> Self {
        CorpusSummary {
            label: label.to_string(),
            vocab: Vocabulary::default(),
            counts: Vec::new(),
            weights: Vec::new(),
            sentences: 0,
            lines: 0,
            dropped_lines: 0,
            forward: MtldPass::new(threshold),
            backward: MtldPass::new(threshold),
            threshold,
        }
    }

    fn add_sentence(&mut self, ids: &[u32]) {
        self.lines += 1;
        if ids.is_empty() {
            self.dropped_lines += 1;
            return;
        }
        self.sentences += 1;
        let w = 1.0 / ids.len() as f64;
        for &id in ids {
            let i = id as usize;
            if i >= self.counts.len() {
                self.counts.resize(i + 1, 0);
                self.weights.resize(i + 1, 0.0);
            }
            self.counts[i] += 1;
            self.weights[i] += w;
            self.forward.push(id);
        }
    }

    pub fn from_corpus(corpus: &Corpus, mtld_threshold: f64) -> Result<Self> {
        check_threshold(mtld_threshold)?;
        let mut s = CorpusSummary::empty(corpus.label(), mtld_threshold);
        s.vocab = corpus.vocabulary().clone();
        for sentence in corpus.sentences() {
            s.add_sentence(sentence);
        }
        s.lines += corpus.dropped_lines() as u64;
        s.dropped_lines = corpus.dropped_lines() as u64;
        for &id in corpus.token_ids().iter().rev() {
            s.backward.push(id);
        }
        Ok(s)
    }

    /// Analyzes a one-sentence-per-line file in two streaming passes.
    pub fn from_file(
        path: impl AsRef<Path>,
        config: &TokenizerConfig,
        label: &str,
        mtld_threshold: f64,
    ) -> Result<Self> {
        check_threshold(mtld_threshold)?;
        let path = path.as_ref();
        let mut s = CorpusSummary::empty(label, mtld_threshold);
        let mut ids = Vec::with_capacity(128);

        let mut reader = LineReader::open(path)?;
        while let Some((_, line)) = reader.next_line()? {
            ids.clear();
            let vocab = &mut s.vocab;
            for_each_token(line, config, |t| ids.push(vocab.intern(&t)));
            s.add_sentence(&ids);
        }

        let mut reverse = ReverseLineReader::open(path, s.lines as usize)?;
        while let Some((_, line)) = reverse.prev_line()? {
            ids.clear();
            let vocab = &s.vocab;
            for_each_token(line, config, |t| {
                ids.push(vocab.get(&t).expect("file changed between passes"))
            });
            for &id in ids.iter().rev() {
                s.backward.push(id);
            }
        }
        debug_assert_eq!(s.backward.tokens(), s.forward.tokens());
        Ok(s)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn set_label(&mut self, label: impl Into<String>) {
        self.label = label.into();
    }

    pub fn sentence_count(&self) -> u64 {
        self.sentences
    }

    pub fn token_count(&self) -> u64 {
        self.forward.tokens()
    }

    pub fn type_count(&self) -> usize {
        self.vocab.len()
    }

    pub fn dropped_lines(&self) -> u64 {
        self.dropped_lines
    }

    pub fn count_of(&self, form: &str) -> u64 {
        self.vocab
            .get(form)
            .map_or(0, |id| self.counts[id as usize])
    }

    pub fn spectrum(&self) -> FrequencySpectrum {
        FrequencySpectrum::from_counts(self.counts.iter().copied())
    }

    pub fn diversity_report(&self) -> Result<DiversityReport> {
        DiversityReport::from_parts(
            &self.label,
            &self.spectrum(),
            &self.forward,
            &self.backward,
            self.threshold,
        )
    }

    pub fn vocab_profile(&self) -> Result<VocabProfile> {
        VocabProfile::from_weights(
            &self.label,
            self.vocab
                .iter()
                .map(|(id, form)| (form, self.counts[id as usize], self.weights[id as usize])),
        )
    }
}
