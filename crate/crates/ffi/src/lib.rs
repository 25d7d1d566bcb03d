//! C ABI for the `lexbias` library.
//!
//! Conventions:
//! - Every fallible function returns a [`LexbiasStatus`]; on failure a
//!   message is available from [`lexbias_last_error`] on the same thread.
//! - Corpora and vocabulary profiles are opaque handles created by
//!   `*_load` / `*_build` functions and released with the matching `*_free`.
//! - Strings passed in are NUL-terminated UTF-8. Strings handed out by
//!   `*_json` functions must be released with [`lexbias_string_free`].
//! - Panics never cross the boundary; they surface as `LEXBIAS_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use lexbias::corpus::{build_vocab_profile, Corpus, VocabProfile};
use lexbias::diversity::diversity_report;
use lexbias::freqbias::{classify_corpora, BiasClass, BiasClassConfig, ThresholdRule};
use lexbias::report::{run_report, ReportConfig};
use lexbias::significance::{bootstrap_compare, BootstrapConfig, LdMetric};
use lexbias::tokenize::{SplitRule, TokenizerConfig};
use lexbias::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LexbiasStatus {
    Ok = 0,
    /// A required pointer argument was NULL.
    NullArgument = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// A file could not be read or written.
    Io = 3,
    /// A file was not valid UTF-8 text or not a valid config / variant file.
    Parse = 4,
    /// The corpus had no tokens.
    EmptyCorpus = 5,
    /// A metric is undefined for this input (e.g. no repeated types).
    Undefined = 6,
    /// An argument was out of range.
    InvalidArgument = 7,
    /// Too many bootstrap resamples were degenerate.
    DegenerateBootstrap = 8,
    /// The report ran but at least one analysis failed.
    PartialFailure = 9,
    /// Internal error; the library panicked.
    Panic = 10,
}

/// Diversity metric used by the bootstrap test.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LexbiasMetric {
    Ttr = 0,
    YulesI = 1,
    Mtld = 2,
}

impl From<LexbiasMetric> for LdMetric {
    fn from(m: LexbiasMetric) -> Self {
        match m {
            LexbiasMetric::Ttr => LdMetric::Ttr,
            LexbiasMetric::YulesI => LdMetric::YulesI,
            LexbiasMetric::Mtld => LdMetric::Mtld,
        }
    }
}

/// Tokenization options. Tokens are always split on whitespace.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct LexbiasTokenizer {
    pub lowercase: bool,
    pub strip_punctuation: bool,
}

impl From<LexbiasTokenizer> for TokenizerConfig {
    fn from(t: LexbiasTokenizer) -> Self {
        TokenizerConfig {
            lowercase: t.lowercase,
            strip_punctuation: t.strip_punctuation,
            split_rule: SplitRule::Whitespace,
        }
    }
}

/// Diversity metrics of one corpus. A `has_*` flag of `false` means the
/// metric is undefined for this corpus and the value field is 0.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct LexbiasDiversity {
    pub token_count: u64,
    pub type_count: u64,
    pub ttr: f64,
    pub ttr_scaled: f64,
    pub has_yules_k: bool,
    pub yules_k: f64,
    pub has_yules_i: bool,
    pub yules_i: f64,
    pub has_mtld: bool,
    pub mtld: f64,
    pub mtld_forward: f64,
    pub mtld_backward: f64,
    pub mtld_threshold: f64,
}

/// Number of frequency-bias classes.
pub const LEXBIAS_CLASS_COUNT: usize = 6;

/// Six-class frequency-bias result. Arrays are indexed in the order
/// `++`, `+-`, `-+`, `--`, `+0`, `-0`.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct LexbiasBias {
    pub counts: [u64; LEXBIAS_CLASS_COUNT],
    pub acc_diffs: [f64; LEXBIAS_CLASS_COUNT],
    pub novel_count: u64,
    pub novel_mass: f64,
    pub threshold: f64,
    pub diff_scale: f64,
    pub ht_types: u64,
}

/// Bootstrap comparison of `metric(a) - metric(b)`.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct LexbiasBootstrap {
    pub observed_delta: f64,
    pub p_value: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub iterations: u64,
    pub seed: u64,
    pub degenerate_samples: u64,
    pub significant: bool,
}

/// Opaque tokenized corpus.
pub struct LexbiasCorpus(Corpus);

/// Opaque length-weighted vocabulary profile.
pub struct LexbiasVocabProfile(VocabProfile);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("NUL bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> LexbiasStatus {
    match e {
        Error::Io { .. } => LexbiasStatus::Io,
        Error::Decode { .. } | Error::Parse { .. } | Error::Json(_) | Error::Csv(_) => {
            LexbiasStatus::Parse
        }
        Error::EmptyCorpus(_) => LexbiasStatus::EmptyCorpus,
        Error::Undefined(_) => LexbiasStatus::Undefined,
        Error::DegenerateBootstrap { .. } => LexbiasStatus::DegenerateBootstrap,
        _ => LexbiasStatus::InvalidArgument,
    }
}

struct Fail(LexbiasStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

/// Runs `f`, converting errors and panics into a status plus last-error message.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> LexbiasStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => LexbiasStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(panic) => {
            let msg = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("internal error: {msg}"));
            LexbiasStatus::Panic
        }
    }
}

fn null(what: &str) -> Fail {
    Fail(
        LexbiasStatus::NullArgument,
        format!("{what} must not be NULL"),
    )
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        Fail(
            LexbiasStatus::InvalidUtf8,
            format!("{what} is not valid UTF-8"),
        )
    })
}

unsafe fn ref_arg<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn out_arg<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn tokenizer_arg(p: *const LexbiasTokenizer) -> TokenizerConfig {
    p.as_ref().copied().unwrap_or_default().into()
}

/// Message of the last failed call on this thread, or NULL. The pointer is
/// valid until the next library call on the same thread.
#[no_mangle]
pub extern "C" fn lexbias_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn lexbias_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Loads a one-sentence-per-line UTF-8 file. `tokenizer` may be NULL for
/// the defaults. On success `*out` receives a handle to free with
/// [`lexbias_corpus_free`].
///
/// # Safety
/// String arguments must be NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lexbias_corpus_load(
    path: *const c_char,
    tokenizer: *const LexbiasTokenizer,
    label: *const c_char,
    out: *mut *mut LexbiasCorpus,
) -> LexbiasStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let path = str_arg(path, "path")?;
        let label = str_arg(label, "label")?;
        let corpus = Corpus::load(Path::new(path), &tokenizer_arg(tokenizer), label)?;
        *out = Box::into_raw(Box::new(LexbiasCorpus(corpus)));
        Ok(())
    })
}

/// Builds a corpus from in-memory text, one sentence per line.
///
/// # Safety
/// As [`lexbias_corpus_load`].
#[no_mangle]
pub unsafe extern "C" fn lexbias_corpus_from_text(
    text: *const c_char,
    tokenizer: *const LexbiasTokenizer,
    label: *const c_char,
    out: *mut *mut LexbiasCorpus,
) -> LexbiasStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let text = str_arg(text, "text")?;
        let label = str_arg(label, "label")?;
        let corpus = Corpus::from_text(label, text, &tokenizer_arg(tokenizer));
        *out = Box::into_raw(Box::new(LexbiasCorpus(corpus)));
        Ok(())
    })
}

/// Releases a corpus. NULL is ignored.
///
/// # Safety
/// `corpus` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn lexbias_corpus_free(corpus: *mut LexbiasCorpus) {
    if !corpus.is_null() {
        drop(Box::from_raw(corpus));
    }
}

/// Number of non-empty sentences, or 0 for NULL.
///
/// # Safety
/// `corpus` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn lexbias_corpus_sentence_count(corpus: *const LexbiasCorpus) -> u64 {
    corpus.as_ref().map_or(0, |c| c.0.sentence_count() as u64)
}

/// Number of tokens, or 0 for NULL.
///
/// # Safety
/// `corpus` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn lexbias_corpus_token_count(corpus: *const LexbiasCorpus) -> u64 {
    corpus.as_ref().map_or(0, |c| c.0.token_count() as u64)
}

/// Number of distinct types, or 0 for NULL.
///
/// # Safety
/// `corpus` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn lexbias_corpus_type_count(corpus: *const LexbiasCorpus) -> u64 {
    corpus.as_ref().map_or(0, |c| c.0.vocabulary().len() as u64)
}

/// Computes TTR, Yule's K / I and MTLD with the given MTLD threshold.
///
/// # Safety
/// `corpus` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lexbias_diversity(
    corpus: *const LexbiasCorpus,
    mtld_threshold: f64,
    out: *mut LexbiasDiversity,
) -> LexbiasStatus {
    guard(|| {
        let corpus = ref_arg(corpus, "corpus")?;
        let out = out_arg(out, "out")?;
        let r = diversity_report(&corpus.0, mtld_threshold)?;
        *out = LexbiasDiversity {
            token_count: r.token_count,
            type_count: r.type_count,
            ttr: r.ttr,
            ttr_scaled: r.ttr_scaled,
            has_yules_k: r.yules_k.is_some(),
            yules_k: r.yules_k.unwrap_or(0.0),
            has_yules_i: r.yules_i.is_some(),
            yules_i: r.yules_i.unwrap_or(0.0),
            has_mtld: r.mtld.is_some(),
            mtld: r.mtld.unwrap_or(0.0),
            mtld_forward: r.mtld_forward.unwrap_or(0.0),
            mtld_backward: r.mtld_backward.unwrap_or(0.0),
            mtld_threshold: r.mtld_threshold,
        };
        Ok(())
    })
}

/// The full diversity report as a JSON object; free with [`lexbias_string_free`].
///
/// # Safety
/// `corpus` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lexbias_diversity_json(
    corpus: *const LexbiasCorpus,
    mtld_threshold: f64,
    out: *mut *mut c_char,
) -> LexbiasStatus {
    guard(|| {
        let corpus = ref_arg(corpus, "corpus")?;
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let report = diversity_report(&corpus.0, mtld_threshold)?;
        let json = serde_json::to_string(&report).map_err(Error::from)?;
        *out = CString::new(json)
            .expect("JSON has no NUL bytes")
            .into_raw();
        Ok(())
    })
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from a `*_json` function and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn lexbias_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds the length-weighted vocabulary profile of a corpus.
///
/// # Safety
/// `corpus` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lexbias_vocab_profile_build(
    corpus: *const LexbiasCorpus,
    out: *mut *mut LexbiasVocabProfile,
) -> LexbiasStatus {
    guard(|| {
        let corpus = ref_arg(corpus, "corpus")?;
        let out = out_arg(out, "out")?;
        *out = ptr::null_mut();
        let profile = build_vocab_profile(&corpus.0)?;
        *out = Box::into_raw(Box::new(LexbiasVocabProfile(profile)));
        Ok(())
    })
}

/// Releases a profile. NULL is ignored.
///
/// # Safety
/// `profile` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn lexbias_vocab_profile_free(profile: *mut LexbiasVocabProfile) {
    if !profile.is_null() {
        drop(Box::from_raw(profile));
    }
}

/// Number of types in the profile, or 0 for NULL.
///
/// # Safety
/// `profile` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn lexbias_vocab_profile_type_count(
    profile: *const LexbiasVocabProfile,
) -> u64 {
    profile.as_ref().map_or(0, |p| p.0.type_count() as u64)
}

/// Normalized probability of `word` (0 if absent).
///
/// # Safety
/// `profile` must be a live handle, `word` NUL-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn lexbias_vocab_profile_probability(
    profile: *const LexbiasVocabProfile,
    word: *const c_char,
    out: *mut f64,
) -> LexbiasStatus {
    guard(|| {
        let profile = ref_arg(profile, "profile")?;
        let word = str_arg(word, "word")?;
        *out_arg(out, "out")? = profile.0.probability(word);
        Ok(())
    })
}

/// Six-class frequency-bias analysis of an MT profile against an HT
/// profile. Accumulated differences are multiplied by `diff_scale`.
///
/// # Safety
/// Both profiles must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lexbias_freqbias(
    ht: *const LexbiasVocabProfile,
    mt: *const LexbiasVocabProfile,
    diff_scale: f64,
    out: *mut LexbiasBias,
) -> LexbiasStatus {
    guard(|| {
        let ht = ref_arg(ht, "ht")?;
        let mt = ref_arg(mt, "mt")?;
        let out = out_arg(out, "out")?;
        let config = BiasClassConfig {
            threshold_rule: ThresholdRule::HtMean,
            diff_scale,
        };
        let c = classify_corpora(&ht.0, &mt.0, &config)?;
        let mut r = LexbiasBias {
            novel_count: c.novel_count,
            novel_mass: c.novel_mass,
            threshold: c.threshold,
            diff_scale: c.diff_scale,
            ht_types: c.ht_types,
            ..Default::default()
        };
        for (i, class) in BiasClass::ALL.into_iter().enumerate() {
            r.counts[i] = c.counts[class];
            r.acc_diffs[i] = c.acc_diffs[class];
        }
        *out = r;
        Ok(())
    })
}

/// Paired sentence-level bootstrap of `metric(a) - metric(b)`.
///
/// # Safety
/// Both corpora must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn lexbias_bootstrap(
    a: *const LexbiasCorpus,
    b: *const LexbiasCorpus,
    metric: LexbiasMetric,
    iterations: u64,
    seed: u64,
    mtld_threshold: f64,
    out: *mut LexbiasBootstrap,
) -> LexbiasStatus {
    guard(|| {
        let a = ref_arg(a, "a")?;
        let b = ref_arg(b, "b")?;
        let out = out_arg(out, "out")?;
        let iterations = usize::try_from(iterations).map_err(|_| {
            Fail(
                LexbiasStatus::InvalidArgument,
                "iterations too large".into(),
            )
        })?;
        let config = BootstrapConfig {
            iterations,
            seed,
            metric: metric.into(),
            mtld_threshold,
        };
        let r = bootstrap_compare(&a.0, &b.0, &config)?;
        *out = LexbiasBootstrap {
            observed_delta: r.observed_delta,
            p_value: r.p_value,
            ci_low: r.ci_low,
            ci_high: r.ci_high,
            iterations: r.iterations as u64,
            seed: r.seed,
            degenerate_samples: r.degenerate_samples as u64,
            significant: r.significant,
        };
        Ok(())
    })
}

/// Runs the full report for a JSON bundle file into `out_dir`. Returns
/// `LEXBIAS_STATUS_PARTIAL_FAILURE` if some analyses failed; their errors
/// are in the written tables and the last-error message.
///
/// # Safety
/// Both paths must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn lexbias_report(
    config_path: *const c_char,
    out_dir: *const c_char,
) -> LexbiasStatus {
    guard(|| {
        let config_path = Path::new(str_arg(config_path, "config_path")?);
        let out_dir = Path::new(str_arg(out_dir, "out_dir")?);
        let config = ReportConfig::load(config_path)?;
        let base = config_path.parent().unwrap_or(Path::new("."));
        let outcome = run_report(&config, base, out_dir)?;
        if outcome.failures.is_empty() {
            Ok(())
        } else {
            Err(Fail(
                LexbiasStatus::PartialFailure,
                outcome.failures.join("; "),
            ))
        }
    })
}
