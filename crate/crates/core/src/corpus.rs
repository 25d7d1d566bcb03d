//! Corpora, parallel corpora, train/test/dev splitting and vocabulary profiles.
//!
//! A [`Corpus`] stores its tokens interned: each distinct word form gets a
//! dense [`TypeId`] and sentences are ranges into one flat id vector. This
//! keeps a multi-million-token corpus at four bytes per token.

use std::collections::BTreeMap;
use std::path::Path;

use indexmap::IndexSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;
use crate::tokenize::{for_each_token, LineReader, TokenizerConfig};

pub type TypeId = u32;

/// Interned word forms, indexed by [`TypeId`] in first-seen order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vocabulary {
    forms: IndexSet<Box<str>>,
}

impl Vocabulary {
    pub fn intern(&mut self, form: &str) -> TypeId {
        if let Some(id) = self.forms.get_index_of(form) {
            return id as TypeId;
        }
        let (id, _) = self.forms.insert_full(form.into());
        TypeId::try_from(id).expect("more than 2^32 distinct types")
    }

    pub fn get(&self, form: &str) -> Option<TypeId> {
        self.forms.get_index_of(form).map(|i| i as TypeId)
    }

    pub fn form(&self, id: TypeId) -> &str {
        &self.forms[id as usize]
    }

    pub fn len(&self) -> usize {
        self.forms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (TypeId, &str)> {
        self.forms
            .iter()
            .enumerate()
            .map(|(i, f)| (i as TypeId, &**f))
    }
}

/// An ordered sequence of non-empty tokenized sentences.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    label: String,
    vocab: Vocabulary,
    tokens: Vec<TypeId>,
    /// `bounds[i]..bounds[i + 1]` is sentence `i`.
    bounds: Vec<usize>,
    dropped_lines: usize,
}

impl Corpus {
    pub fn new(label: impl Into<String>) -> Self {
        Corpus {
            label: label.into(),
            vocab: Vocabulary::default(),
            tokens: Vec::new(),
            bounds: vec![0],
            dropped_lines: 0,
        }
    }

    /// Builds a corpus from pre-tokenized sentences, skipping empty ones.
    pub fn from_sentences<I, S, T>(label: impl Into<String>, sentences: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: IntoIterator<Item = T>,
        T: AsRef<str>,
    {
        let mut corpus = Corpus::new(label);
        for sentence in sentences {
            let before = corpus.tokens.len();
            for token in sentence {
                let id = corpus.vocab.intern(token.as_ref());
                corpus.tokens.push(id);
            }
            corpus.close_sentence(before);
        }
        corpus
    }

    /// Tokenizes `text` one line per sentence.
    pub fn from_text(label: impl Into<String>, text: &str, config: &TokenizerConfig) -> Self {
        let mut corpus = Corpus::new(label);
        for line in text.lines() {
            corpus.push_line(line, config);
        }
        corpus
    }

    /// Loads a one-sentence-per-line UTF-8 file. Lines without tokens are
    /// dropped and counted in [`Corpus::dropped_lines`].
    pub fn load(
        path: impl AsRef<Path>,
        config: &TokenizerConfig,
        label: impl Into<String>,
    ) -> Result<Self> {
        let mut reader = LineReader::open(path)?;
        let mut corpus = Corpus::new(label);
        while let Some((_, line)) = reader.next_line()? {
            corpus.push_line(line, config);
        }
        Ok(corpus)
    }

    /// Tokenizes and appends one line; returns whether a sentence was added.
    pub fn push_line(&mut self, line: &str, config: &TokenizerConfig) -> bool {
        let before = self.tokens.len();
        let Corpus { vocab, tokens, .. } = self;
        for_each_token(line, config, |t| tokens.push(vocab.intern(&t)));
        self.close_sentence(before)
    }

    fn close_sentence(&mut self, start: usize) -> bool {
        if self.tokens.len() == start {
            self.dropped_lines += 1;
            false
        } else {
            self.bounds.push(self.tokens.len());
            true
        }
    }

    fn push_ids_from(&mut self, other: &Corpus, sentence: usize) {
        let start = self.tokens.len();
        for &id in other.sentence_ids(sentence) {
            let mapped = self.vocab.intern(other.vocab.form(id));
            self.tokens.push(mapped);
        }
        self.close_sentence(start);
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn set_label(&mut self, label: impl Into<String>) {
        self.label = label.into();
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn sentence_count(&self) -> usize {
        self.bounds.len() - 1
    }

    pub fn token_count(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Number of lines that were skipped because they held no tokens.
    pub fn dropped_lines(&self) -> usize {
        self.dropped_lines
    }

    pub fn sentence_ids(&self, i: usize) -> &[TypeId] {
        &self.tokens[self.bounds[i]..self.bounds[i + 1]]
    }

    pub fn sentences(&self) -> impl ExactSizeIterator<Item = &[TypeId]> + DoubleEndedIterator + '_ {
        self.bounds.windows(2).map(|w| &self.tokens[w[0]..w[1]])
    }

    pub fn sentence(&self, i: usize) -> impl Iterator<Item = &str> + '_ {
        self.sentence_ids(i).iter().map(|&id| self.vocab.form(id))
    }

    /// The whole corpus as one token stream, in sentence order.
    pub fn token_ids(&self) -> &[TypeId] {
        &self.tokens
    }

    /// Occurrence count of every type, indexed by [`TypeId`].
    pub fn type_counts(&self) -> Vec<u64> {
        let mut counts = vec![0u64; self.vocab.len()];
        for &id in &self.tokens {
            counts[id as usize] += 1;
        }
        counts
    }

    pub fn count_of(&self, form: &str) -> u64 {
        match self.vocab.get(form) {
            Some(id) => self.tokens.iter().filter(|&&t| t == id).count() as u64,
            None => 0,
        }
    }

    /// Sentences re-joined with single spaces, one per line.
    pub fn write_lines<W: std::io::Write>(&self, mut out: W) -> std::io::Result<()> {
        for i in 0..self.sentence_count() {
            let mut first = true;
            for form in self.sentence(i) {
                if !first {
                    out.write_all(b" ")?;
                }
                out.write_all(form.as_bytes())?;
                first = false;
            }
            out.write_all(b"\n")?;
        }
        Ok(())
    }
}

/// Number of distinct types.
pub fn vocab_size(corpus: &Corpus) -> usize {
    corpus.vocabulary().len()
}

/// Sentence-aligned source and target corpora.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParallelCorpus {
    source: Corpus,
    target: Corpus,
    dropped_pairs: usize,
}

impl ParallelCorpus {
    pub fn new(source: Corpus, target: Corpus) -> Result<Self> {
        if source.sentence_count() != target.sentence_count() {
            return Err(Error::Misaligned {
                source_lines: source.sentence_count(),
                target_lines: target.sentence_count(),
            });
        }
        Ok(ParallelCorpus {
            source,
            target,
            dropped_pairs: 0,
        })
    }

    /// Aligns two line sequences, dropping every pair where either side
    /// tokenizes to nothing.
    pub fn from_line_pairs<'a, I>(label: &str, pairs: I, config: &TokenizerConfig) -> Self
    where
        I: IntoIterator<Item = (&'a str, &'a str)>,
    {
        let mut builder = ParallelBuilder::new(label, *config);
        for (s, t) in pairs {
            builder.push(s, t);
        }
        builder.finish()
    }

    /// Reads two line-aligned files.
    pub fn load(
        src: impl AsRef<Path>,
        trg: impl AsRef<Path>,
        config: &TokenizerConfig,
        label: &str,
    ) -> Result<Self> {
        let mut rs = LineReader::open(src.as_ref())?;
        let mut rt = LineReader::open(trg.as_ref())?;
        let mut builder = ParallelBuilder::new(label, *config);
        let (mut ns, mut nt) = (0, 0);
        loop {
            let s = rs.next_line()?.map(|(n, l)| (n, l.to_owned()));
            let t = rt.next_line()?;
            match (s, t) {
                (Some((n, s)), Some((m, t))) => {
                    ns = n;
                    nt = m;
                    builder.push(&s, t);
                }
                (None, None) => break,
                (s, t) => {
                    ns += usize::from(s.is_some());
                    nt += usize::from(t.is_some());
                    while rs.next_line()?.is_some() {
                        ns += 1;
                    }
                    while rt.next_line()?.is_some() {
                        nt += 1;
                    }
                    return Err(Error::Misaligned {
                        source_lines: ns,
                        target_lines: nt,
                    });
                }
            }
        }
        Ok(builder.finish())
    }

    pub fn source(&self) -> &Corpus {
        &self.source
    }

    pub fn target(&self) -> &Corpus {
        &self.target
    }

    pub fn len(&self) -> usize {
        self.source.sentence_count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Pairs removed because one side was empty.
    pub fn dropped_pairs(&self) -> usize {
        self.dropped_pairs
    }

    fn subset(&self, label: &str, indices: &[usize]) -> ParallelCorpus {
        let mut source = Corpus::new(format!("{label}.src"));
        let mut target = Corpus::new(format!("{label}.trg"));
        for &i in indices {
            source.push_ids_from(&self.source, i);
            target.push_ids_from(&self.target, i);
        }
        ParallelCorpus {
            source,
            target,
            dropped_pairs: 0,
        }
    }
}

struct ParallelBuilder {
    config: TokenizerConfig,
    source: Corpus,
    target: Corpus,
    dropped: usize,
    scratch: Vec<String>,
}

impl ParallelBuilder {
    fn new(label: &str, config: TokenizerConfig) -> Self {
        ParallelBuilder {
            config,
            source: Corpus::new(format!("{label}.src")),
            target: Corpus::new(format!("{label}.trg")),
            dropped: 0,
            scratch: Vec::new(),
        }
    }

    fn push(&mut self, s: &str, t: &str) {
        self.scratch.clear();
        let scratch = &mut self.scratch;
        for_each_token(s, &self.config, |tok| scratch.push(tok.into_owned()));
        let mut has_target = false;
        for_each_token(t, &self.config, |_| has_target = true);
        if self.scratch.is_empty() || !has_target {
            self.dropped += 1;
            return;
        }
        let start = self.source.tokens.len();
        for tok in &self.scratch {
            let id = self.source.vocab.intern(tok);
            self.source.tokens.push(id);
        }
        self.source.close_sentence(start);
        self.target.push_line(t, &self.config);
    }

    fn finish(self) -> ParallelCorpus {
        ParallelCorpus {
            source: self.source,
            target: self.target,
            dropped_pairs: self.dropped,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub train_size: usize,
    pub test_size: usize,
    pub dev_size: usize,
    pub seed: u64,
}

impl SplitSpec {
    pub fn total(&self) -> usize {
        self.train_size + self.test_size + self.dev_size
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Splits {
    pub train: ParallelCorpus,
    pub test: ParallelCorpus,
    pub dev: ParallelCorpus,
}

/// Shuffles the aligned pairs with a seeded permutation and cuts the result
/// into train, test and dev, in that order. Pairs left over after the three
/// requested sizes are not used.
pub fn split_parallel(pc: &ParallelCorpus, spec: &SplitSpec) -> Result<Splits> {
    let available = pc.len();
    if spec.train_size == 0 || spec.test_size == 0 || spec.dev_size == 0 {
        return Err(Error::Domain("split sizes must be positive".into()));
    }
    if spec.total() > available {
        return Err(Error::SplitSize {
            requested: spec.total(),
            available,
        });
    }
    let mut order: Vec<usize> = (0..available).collect();
    rng::shuffle(&mut rng::seeded(spec.seed), &mut order);
    let (train, rest) = order.split_at(spec.train_size);
    let (test, rest) = rest.split_at(spec.test_size);
    let dev = &rest[..spec.dev_size];
    let base = pc.source.label().trim_end_matches(".src");
    Ok(Splits {
        train: pc.subset(&format!("{base}.train"), train),
        test: pc.subset(&format!("{base}.test"), test),
        dev: pc.subset(&format!("{base}.dev"), dev),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VocabEntry {
    pub raw_count: u64,
    /// Sum over occurrences of `1 / length of the containing sentence`.
    pub length_weighted: f64,
    pub probability: f64,
}

/// Per-type counts with sentence-length-normalized probabilities.
///
/// Each occurrence of a word contributes `1 / len(sentence)` to its weight,
/// so the weights of all types sum to the number of sentences. Weights are
/// then divided by their total to give a probability distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VocabProfile {
    entries: BTreeMap<String, VocabEntry>,
    token_count: u64,
}

impl VocabProfile {
    /// Builds a profile from `(form, raw_count, length_weighted)` triples.
    pub fn from_weights<I, S>(label: &str, weights: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, u64, f64)>,
        S: Into<String>,
    {
        let mut entries = BTreeMap::new();
        let mut total = 0.0;
        let mut token_count = 0;
        for (form, raw, weighted) in weights {
            if raw == 0 {
                continue;
            }
            total += weighted;
            token_count += raw;
            entries.insert(
                form.into(),
                VocabEntry {
                    raw_count: raw,
                    length_weighted: weighted,
                    probability: 0.0,
                },
            );
        }
        if entries.is_empty() {
            return Err(Error::EmptyCorpus(label.to_string()));
        }
        for e in entries.values_mut() {
            e.probability = e.length_weighted / total;
        }
        Ok(VocabProfile {
            entries,
            token_count,
        })
    }

    pub fn get(&self, form: &str) -> Option<&VocabEntry> {
        self.entries.get(form)
    }

    pub fn probability(&self, form: &str) -> f64 {
        self.entries.get(form).map_or(0.0, |e| e.probability)
    }

    pub fn raw_count(&self, form: &str) -> u64 {
        self.entries.get(form).map_or(0, |e| e.raw_count)
    }

    /// Entries in lexicographic order of their word form.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &VocabEntry)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn type_count(&self) -> usize {
        self.entries.len()
    }

    pub fn token_count(&self) -> u64 {
        self.token_count
    }
}

pub fn build_vocab_profile(corpus: &Corpus) -> Result<VocabProfile> {
    let mut counts = vec![0u64; corpus.vocab.len()];
    let mut weights = vec![0.0f64; corpus.vocab.len()];
    for sentence in corpus.sentences() {
        let w = 1.0 / sentence.len() as f64;
        for &id in sentence {
            counts[id as usize] += 1;
            weights[id as usize] += w;
        }
    }
    VocabProfile::from_weights(
        corpus.label(),
        corpus
            .vocab
            .iter()
            .map(|(id, form)| (form, counts[id as usize], weights[id as usize])),
    )
}
