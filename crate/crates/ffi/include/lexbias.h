#ifndef LEXBIAS_H
#define LEXBIAS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Number of frequency-bias classes.
 */
#define LEXBIAS_CLASS_COUNT 6

/**
 * Result code of every fallible call.
 */
typedef enum LexbiasStatus {
  LEXBIAS_STATUS_OK = 0,
  /**
   * A required pointer argument was NULL.
   */
  LEXBIAS_STATUS_NULL_ARGUMENT = 1,
  /**
   * A string argument was not valid UTF-8.
   */
  LEXBIAS_STATUS_INVALID_UTF8 = 2,
  /**
   * A file could not be read or written.
   */
  LEXBIAS_STATUS_IO = 3,
  /**
   * A file was not valid UTF-8 text or not a valid config / variant file.
   */
  LEXBIAS_STATUS_PARSE = 4,
  /**
   * The corpus had no tokens.
   */
  LEXBIAS_STATUS_EMPTY_CORPUS = 5,
  /**
   * A metric is undefined for this input (e.g. no repeated types).
   */
  LEXBIAS_STATUS_UNDEFINED = 6,
  /**
   * An argument was out of range.
   */
  LEXBIAS_STATUS_INVALID_ARGUMENT = 7,
  /**
   * Too many bootstrap resamples were degenerate.
   */
  LEXBIAS_STATUS_DEGENERATE_BOOTSTRAP = 8,
  /**
   * The report ran but at least one analysis failed.
   */
  LEXBIAS_STATUS_PARTIAL_FAILURE = 9,
  /**
   * Internal error; the library panicked.
   */
  LEXBIAS_STATUS_PANIC = 10,
} LexbiasStatus;

/**
 * Diversity metric used by the bootstrap test.
 */
typedef enum LexbiasMetric {
  LEXBIAS_METRIC_TTR = 0,
  LEXBIAS_METRIC_YULES_I = 1,
  LEXBIAS_METRIC_MTLD = 2,
} LexbiasMetric;

/**
 * Opaque tokenized corpus.
 */
typedef struct LexbiasCorpus LexbiasCorpus;

/**
 * Opaque length-weighted vocabulary profile.
 */
typedef struct LexbiasVocabProfile LexbiasVocabProfile;

/**
 * Tokenization options. Tokens are always split on whitespace.
 */
typedef struct LexbiasTokenizer {
  bool lowercase;
  bool strip_punctuation;
} LexbiasTokenizer;

/**
 * Diversity metrics of one corpus. A `has_*` flag of `false` means the
 * metric is undefined for this corpus and the value field is 0.
 */
typedef struct LexbiasDiversity {
  uint64_t token_count;
  uint64_t type_count;
  double ttr;
  double ttr_scaled;
  bool has_yules_k;
  double yules_k;
  bool has_yules_i;
  double yules_i;
  bool has_mtld;
  double mtld;
  double mtld_forward;
  double mtld_backward;
  double mtld_threshold;
} LexbiasDiversity;

/**
 * Six-class frequency-bias result. Arrays are indexed in the order
 * `++`, `+-`, `-+`, `--`, `+0`, `-0`.
 */
typedef struct LexbiasBias {
  uint64_t counts[LEXBIAS_CLASS_COUNT];
  double acc_diffs[LEXBIAS_CLASS_COUNT];
  uint64_t novel_count;
  double novel_mass;
  double threshold;
  double diff_scale;
  uint64_t ht_types;
} LexbiasBias;

/**
 * Bootstrap comparison of `metric(a) - metric(b)`.
 */
typedef struct LexbiasBootstrap {
  double observed_delta;
  double p_value;
  double ci_low;
  double ci_high;
  uint64_t iterations;
  uint64_t seed;
  uint64_t degenerate_samples;
  bool significant;
} LexbiasBootstrap;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. The pointer is
 * valid until the next library call on the same thread.
 */
const char *lexbias_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *lexbias_version(void);

/**
 * Loads a one-sentence-per-line UTF-8 file. `tokenizer` may be NULL for
 * the defaults. On success `*out` receives a handle to free with
 * [`lexbias_corpus_free`].
 *
 * # Safety
 * String arguments must be NUL-terminated; `out` must be writable.
 */
enum LexbiasStatus lexbias_corpus_load(const char *path,
                                       const struct LexbiasTokenizer *tokenizer,
                                       const char *label,
                                       struct LexbiasCorpus **out);

/**
 * Builds a corpus from in-memory text, one sentence per line.
 *
 * # Safety
 * As [`lexbias_corpus_load`].
 */
enum LexbiasStatus lexbias_corpus_from_text(const char *text,
                                            const struct LexbiasTokenizer *tokenizer,
                                            const char *label,
                                            struct LexbiasCorpus **out);

/**
 * Releases a corpus. NULL is ignored.
 *
 * # Safety
 * `corpus` must come from this library and not be used afterwards.
 */
void lexbias_corpus_free(struct LexbiasCorpus *corpus);

/**
 * Number of non-empty sentences, or 0 for NULL.
 *
 * # Safety
 * `corpus` must be NULL or a live handle.
 */
uint64_t lexbias_corpus_sentence_count(const struct LexbiasCorpus *corpus);

/**
 * Number of tokens, or 0 for NULL.
 *
 * # Safety
 * `corpus` must be NULL or a live handle.
 */
uint64_t lexbias_corpus_token_count(const struct LexbiasCorpus *corpus);

/**
 * Number of distinct types, or 0 for NULL.
 *
 * # Safety
 * `corpus` must be NULL or a live handle.
 */
uint64_t lexbias_corpus_type_count(const struct LexbiasCorpus *corpus);

/**
 * Computes TTR, Yule's K / I and MTLD with the given MTLD threshold.
 *
 * # Safety
 * `corpus` must be a live handle; `out` must be writable.
 */
enum LexbiasStatus lexbias_diversity(const struct LexbiasCorpus *corpus,
                                     double mtld_threshold,
                                     struct LexbiasDiversity *out);

/**
 * The full diversity report as a JSON object; free with [`lexbias_string_free`].
 *
 * # Safety
 * `corpus` must be a live handle; `out` must be writable.
 */
enum LexbiasStatus lexbias_diversity_json(const struct LexbiasCorpus *corpus,
                                          double mtld_threshold,
                                          char **out);

/**
 * Releases a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must come from a `*_json` function and not be used afterwards.
 */
void lexbias_string_free(char *s);

/**
 * Builds the length-weighted vocabulary profile of a corpus.
 *
 * # Safety
 * `corpus` must be a live handle; `out` must be writable.
 */
enum LexbiasStatus lexbias_vocab_profile_build(const struct LexbiasCorpus *corpus,
                                               struct LexbiasVocabProfile **out);

/**
 * Releases a profile. NULL is ignored.
 *
 * # Safety
 * `profile` must come from this library and not be used afterwards.
 */
void lexbias_vocab_profile_free(struct LexbiasVocabProfile *profile);

/**
 * Number of types in the profile, or 0 for NULL.
 *
 * # Safety
 * `profile` must be NULL or a live handle.
 */
uint64_t lexbias_vocab_profile_type_count(const struct LexbiasVocabProfile *profile);

/**
 * Normalized probability of `word` (0 if absent).
 *
 * # Safety
 * `profile` must be a live handle, `word` NUL-terminated, `out` writable.
 */
enum LexbiasStatus lexbias_vocab_profile_probability(const struct LexbiasVocabProfile *profile,
                                                     const char *word,
                                                     double *out);

/**
 * Six-class frequency-bias analysis of an MT profile against an HT
 * profile. Accumulated differences are multiplied by `diff_scale`.
 *
 * # Safety
 * Both profiles must be live handles; `out` must be writable.
 */
enum LexbiasStatus lexbias_freqbias(const struct LexbiasVocabProfile *ht,
                                    const struct LexbiasVocabProfile *mt,
                                    double diff_scale,
                                    struct LexbiasBias *out);

/**
 * Paired sentence-level bootstrap of `metric(a) - metric(b)`.
 *
 * # Safety
 * Both corpora must be live handles; `out` must be writable.
 */
enum LexbiasStatus lexbias_bootstrap(const struct LexbiasCorpus *a,
                                     const struct LexbiasCorpus *b,
                                     enum LexbiasMetric metric,
                                     uint64_t iterations,
                                     uint64_t seed,
                                     double mtld_threshold,
                                     struct LexbiasBootstrap *out);

/**
 * Runs the full report for a JSON bundle file into `out_dir`. Returns
 * `LEXBIAS_STATUS_PARTIAL_FAILURE` if some analyses failed; their errors
 * are in the written tables and the last-error message.
 *
 * # Safety
 * Both paths must be NUL-terminated.
 */
enum LexbiasStatus lexbias_report(const char *config_path, const char *out_dir);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LEXBIAS_H */
