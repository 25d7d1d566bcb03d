//! Synthetic HT/MT corpus pairs with planted translation-variant sets.
//!
//! The "human" text samples concepts from a Zipf distribution; a planted
//! subset of concepts can be realized by several surface variants, which are
//! themselves Zipf-distributed. The "machine" text is the human text with
//! every variant replaced by the variant of its set that is most frequent in
//! the human text, mimicking greedy decoding over the human distribution.
//!
//! Generation is deterministic in the seed and can be streamed to files.

use std::collections::HashMap;
use std::io::{self, Write};

use rand::RngCore;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::Corpus;
use crate::rng;
use crate::variants::VariantSet;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthConfig {
    pub sentences: usize,
    /// Number of distinct concepts.
    pub concepts: usize,
    pub zipf_exponent: f64,
    pub min_len: usize,
    pub max_len: usize,
    /// Number of concepts that get several surface variants.
    pub variant_groups: usize,
    pub min_variants: usize,
    pub max_variants: usize,
    /// Planted groups are spread over the `group_rank_span` most frequent concepts.
    pub group_rank_span: usize,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            sentences: 2000,
            concepts: 5000,
            zipf_exponent: 1.07,
            min_len: 10,
            max_len: 46,
            variant_groups: 40,
            min_variants: 3,
            max_variants: 6,
            group_rank_span: 800,
            seed: 1,
        }
    }
}

const ONSETS: &[u8] = b"bdfgklmnprstvz";
const VOWELS: &[u8] = b"aeiou";
/// Single-letter suffixes give variants an odd length, which never collides
/// with the even-length concept words.
const SUFFIXES: &[u8] = b"snrxlt";

fn concept_word(rank: usize) -> String {
    let mut n = rank;
    let mut out = String::new();
    loop {
        let syl = n % (ONSETS.len() * VOWELS.len());
        out.push(ONSETS[syl / VOWELS.len()] as char);
        out.push(VOWELS[syl % VOWELS.len()] as char);
        n /= ONSETS.len() * VOWELS.len();
        if n == 0 {
            break;
        }
    }
    out
}

fn uniform01(r: &mut impl RngCore) -> f64 {
    (r.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Cumulative weights `1 / (rank + 1)^s`, sampled by binary search.
struct Zipf {
    cdf: Vec<f64>,
}

impl Zipf {
    fn new(n: usize, s: f64) -> Self {
        let mut acc = 0.0;
        let cdf = (0..n)
            .map(|k| {
                acc += 1.0 / ((k + 1) as f64).powf(s);
                acc
            })
            .collect();
        Zipf { cdf }
    }

    fn sample(&self, r: &mut impl RngCore) -> usize {
        let u = uniform01(r) * self.cdf[self.cdf.len() - 1];
        self.cdf
            .partition_point(|&c| c <= u)
            .min(self.cdf.len() - 1)
    }
}

struct Group {
    forms: Vec<String>,
    dist: Zipf,
}

/// Deterministic sentence source for one configuration.
pub struct Synthesizer {
    config: SynthConfig,
    concepts: Zipf,
    groups: HashMap<usize, Group>,
}

impl Synthesizer {
    pub fn new(config: SynthConfig) -> Self {
        assert!(config.concepts > 0 && config.min_len > 0 && config.min_len <= config.max_len);
        assert!(config.min_variants >= 2 && config.min_variants <= config.max_variants);
        assert!(config.max_variants <= SUFFIXES.len() + 1);
        let mut setup = rng::substream(config.seed, 1);
        let span = config.group_rank_span.min(config.concepts);
        let mut ranks: Vec<usize> = (0..span).collect();
        rng::shuffle(&mut setup, &mut ranks);
        ranks.truncate(config.variant_groups.min(span));
        ranks.sort_unstable();
        let groups = ranks
            .into_iter()
            .map(|rank| {
                let extra = config.max_variants - config.min_variants + 1;
                let k = config.min_variants + rng::bounded(&mut setup, extra as u64) as usize;
                let base = concept_word(rank);
                let mut forms = vec![base.clone()];
                forms.extend(
                    SUFFIXES[..k - 1]
                        .iter()
                        .map(|&s| format!("{base}{}", s as char)),
                );
                (
                    rank,
                    Group {
                        forms,
                        dist: Zipf::new(k, 1.0),
                    },
                )
            })
            .collect();
        Synthesizer {
            concepts: Zipf::new(config.concepts, config.zipf_exponent),
            groups,
            config,
        }
    }

    pub fn config(&self) -> &SynthConfig {
        &self.config
    }

    /// The planted sets, ordered by concept rank.
    pub fn variant_sets(&self) -> Vec<VariantSet> {
        let mut ranks: Vec<&usize> = self.groups.keys().collect();
        ranks.sort();
        ranks
            .into_iter()
            .map(|r| VariantSet {
                source_word: format!("concept-{r}"),
                variants: self.groups[r].forms.clone(),
            })
            .collect()
    }

    /// Calls `f` with every human-text sentence in order.
    pub fn for_each_sentence(&self, mut f: impl FnMut(&[&str])) {
        let mut r: ChaCha8Rng = rng::substream(self.config.seed, 0);
        let words: Vec<String> = (0..self.config.concepts).map(concept_word).collect();
        let span = (self.config.max_len - self.config.min_len + 1) as u64;
        let mut sentence: Vec<&str> = Vec::with_capacity(self.config.max_len);
        for _ in 0..self.config.sentences {
            sentence.clear();
            let len = self.config.min_len + rng::bounded(&mut r, span) as usize;
            for _ in 0..len {
                let c = self.concepts.sample(&mut r);
                match self.groups.get(&c) {
                    Some(g) => sentence.push(&g.forms[g.dist.sample(&mut r)]),
                    None => sentence.push(&words[c]),
                }
            }
            f(&sentence);
        }
    }

    /// Maps every variant to the member of its set that is most frequent in
    /// the human text (ties go to the earlier variant).
    pub fn greedy_map(&self) -> HashMap<String, String> {
        let forms: Vec<&str> = self
            .groups
            .values()
            .flat_map(|g| g.forms.iter().map(String::as_str))
            .collect();
        let index: HashMap<&str, usize> = forms.iter().enumerate().map(|(i, f)| (*f, i)).collect();
        let mut counts = vec![0u64; forms.len()];
        self.for_each_sentence(|s| {
            for t in s {
                if let Some(&i) = index.get(t) {
                    counts[i] += 1;
                }
            }
        });
        let sets = self.variant_sets();
        greedy_map_from_counts(&sets, |v| index.get(v).map_or(0, |&i| counts[i]))
    }

    /// Writes the human text, the greedy machine text and the variant sets.
    pub fn write(&self, ht: impl Write, mt: impl Write, sets: impl Write) -> io::Result<()> {
        let map = self.greedy_map();
        let mut ht = io::BufWriter::new(ht);
        let mut mt = io::BufWriter::new(mt);
        let mut result = Ok(());
        self.for_each_sentence(|s| {
            if result.is_err() {
                return;
            }
            result = write_sentence(&mut ht, s.iter().copied()).and_then(|_| {
                write_sentence(
                    &mut mt,
                    s.iter().map(|t| map.get(*t).map_or(*t, String::as_str)),
                )
            });
        });
        result?;
        ht.flush()?;
        mt.flush()?;
        serde_json::to_writer_pretty(sets, &self.variant_sets())?;
        Ok(())
    }

    /// In-memory human text, machine text and variant sets.
    pub fn generate(&self) -> SyntheticPair {
        let map = self.greedy_map();
        let mut ht_sents = Vec::with_capacity(self.config.sentences);
        self.for_each_sentence(|s| {
            ht_sents.push(s.iter().map(|t| t.to_string()).collect::<Vec<_>>())
        });
        let ht = Corpus::from_sentences("synthetic-ht", &ht_sents);
        let mt = Corpus::from_sentences(
            "synthetic-mt",
            ht_sents.iter().map(|s| {
                s.iter()
                    .map(|t| map.get(t).unwrap_or(t).as_str())
                    .collect::<Vec<_>>()
            }),
        );
        SyntheticPair {
            ht,
            mt,
            variant_sets: self.variant_sets(),
        }
    }
}

fn write_sentence<'a>(w: &mut impl Write, tokens: impl Iterator<Item = &'a str>) -> io::Result<()> {
    for (i, t) in tokens.enumerate() {
        if i > 0 {
            w.write_all(b" ")?;
        }
        w.write_all(t.as_bytes())?;
    }
    w.write_all(b"\n")
}

fn greedy_map_from_counts(
    sets: &[VariantSet],
    count: impl Fn(&str) -> u64,
) -> HashMap<String, String> {
    let mut map = HashMap::new();
    for set in sets {
        let mut best = &set.variants[0];
        for v in &set.variants[1..] {
            if count(v) > count(best) {
                best = v;
            }
        }
        for v in &set.variants {
            if v != best {
                map.insert(v.clone(), best.clone());
            }
        }
    }
    map
}

pub struct SyntheticPair {
    pub ht: Corpus,
    pub mt: Corpus,
    pub variant_sets: Vec<VariantSet>,
}

/// Greedy decoding of an arbitrary human text: every token that belongs to
/// a variant set becomes the set's most frequent member in `ht`.
pub fn greedy_decode(ht: &Corpus, sets: &[VariantSet], label: &str) -> Corpus {
    let counts = ht.type_counts();
    let vocab = ht.vocabulary();
    let map = greedy_map_from_counts(sets, |v| vocab.get(v).map_or(0, |id| counts[id as usize]));
    Corpus::from_sentences(
        label,
        (0..ht.sentence_count()).map(|i| {
            ht.sentence(i)
                .map(|t| map.get(t).map_or(t, String::as_str))
                .collect::<Vec<_>>()
        }),
    )
}
