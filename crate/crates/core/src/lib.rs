//! Lexical diversity and frequency-bias analysis of machine-translated text
//! against a human reference translation.
//!
//! - [`corpus`]: loading, parallel splitting, length-weighted vocabulary profiles
//! - [`diversity`]: TTR, Yule's K / I, MTLD
//! - [`freqbias`]: six-class frequency exacerbation/decay analysis
//! - [`significance`]: paired sentence-level bootstrap
//! - [`variants`]: translation-variant frequency profiles
//! - [`stream`]: the same analyses over files, in memory proportional to the vocabulary
//! - [`report`], [`output`], [`cli`]: tables, manifests and the `lexbias` binary

pub mod cli;
pub mod corpus;
pub mod diversity;
pub mod error;
pub mod freqbias;
pub mod output;
pub mod report;
pub mod rng;
pub mod significance;
pub mod stream;
pub mod synth;
pub mod tokenize;
pub mod variants;

pub use corpus::{
    build_vocab_profile, split_parallel, vocab_size, Corpus, ParallelCorpus, SplitSpec,
    VocabProfile,
};
pub use diversity::{
    diversity_report, frequency_spectrum, mtld, ttr, yules_i, yules_k, DiversityReport,
};
pub use error::{Error, Result, Undefined};
pub use freqbias::{
    accumulated_differences, classify_corpora, classify_word, BiasClass, BiasClassConfig,
    BiasClassification,
};
pub use significance::{bootstrap_compare, BootstrapConfig, BootstrapResult, LdMetric};
pub use stream::CorpusSummary;
pub use tokenize::{tokenize, TokenizerConfig};
pub use variants::{variant_profile, VariantProfile, VariantSet};
