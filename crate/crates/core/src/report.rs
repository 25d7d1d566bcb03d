//! One-shot pipeline producing every table for a reference plus N system
//! outputs, driven by a JSON bundle file:
//!
//! ```json
//! {
//!   "reference": {"label": "en-fr-HT", "path": "ht.fr"},
//!   "systems": [{"label": "en-fr-rnn-ff", "path": "rnn.fr"}],
//!   "tokenizer": {"lowercase": false, "strip_punctuation": false},
//!   "mtld_threshold": 0.72,
//!   "bias": {"diff_scale": 10000},
//!   "variant_sets": "sets.json",
//!   "significance": {"metric": "ttr", "iterations": 1000, "seed": 7}
//! }
//! ```
//!
//! Relative paths are resolved against the bundle file's directory. Only
//! `reference` is required. Significance testing is the one analysis that
//! loads whole corpora into memory; everything else streams.

use std::fs::File;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Deserialize;

use crate::corpus::Corpus;
use crate::diversity::DEFAULT_MTLD_THRESHOLD;
use crate::error::{Error, Result};
use crate::freqbias::{classify_corpora, BiasClassConfig};
use crate::output::{
    self, BiasRow, Envelope, InputDigest, Row, RunManifest, SignificanceRow, VocabRow,
};
use crate::significance::{bootstrap_compare, BootstrapConfig};
use crate::stream::CorpusSummary;
use crate::tokenize::TokenizerConfig;
use crate::variants::{load_variant_sets, VariantProfile, VariantSet};

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputSpec {
    pub label: String,
    pub path: PathBuf,
}

fn default_threshold() -> f64 {
    DEFAULT_MTLD_THRESHOLD
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportConfig {
    pub reference: InputSpec,
    #[serde(default)]
    pub systems: Vec<InputSpec>,
    #[serde(default)]
    pub tokenizer: TokenizerConfig,
    #[serde(default = "default_threshold")]
    pub mtld_threshold: f64,
    #[serde(default)]
    pub bias: BiasClassConfig,
    #[serde(default)]
    pub variant_sets: Option<PathBuf>,
    #[serde(default)]
    pub significance: Option<BootstrapConfig>,
}

impl ReportConfig {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportOutcome {
    /// Files written, relative to the output directory.
    pub outputs: Vec<String>,
    /// Individual analyses that failed; their rows carry the error.
    pub failures: Vec<String>,
}

struct Analyzed {
    spec: InputSpec,
    resolved: PathBuf,
    summary: Result<CorpusSummary>,
    digest: Result<InputDigest>,
}

fn create(dir: &Path, name: &str, outputs: &mut Vec<String>) -> Result<File> {
    let path = dir.join(name);
    outputs.push(name.to_string());
    File::create(&path).map_err(|e| Error::io(path, e))
}

/// Runs every analysis and writes `diversity`, `vocab`, `freqbias`,
/// optional `variants` and `significance` tables (JSON and CSV each) plus
/// `manifest.json` into `out_dir`.
pub fn run_report(config: &ReportConfig, base_dir: &Path, out_dir: &Path) -> Result<ReportOutcome> {
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let tokenizer = config.tokenizer;
    let threshold = config.mtld_threshold;

    let specs: Vec<InputSpec> = std::iter::once(config.reference.clone())
        .chain(config.systems.iter().cloned())
        .collect();
    let analyzed: Vec<Analyzed> = specs
        .into_par_iter()
        .map(|spec| {
            let resolved = base_dir.join(&spec.path);
            let summary = CorpusSummary::from_file(&resolved, &tokenizer, &spec.label, threshold);
            let digest = InputDigest::of_file(&spec.label, &resolved, &spec.path.to_string_lossy());
            Analyzed {
                spec,
                resolved,
                summary,
                digest,
            }
        })
        .collect();

    let mut failures = Vec::new();
    let mut note = |what: &str, label: &str, row_ok: bool, err: Option<String>| {
        if !row_ok {
            failures.push(format!("{what} {label}: {}", err.unwrap_or_default()));
        }
    };

    let diversity: Vec<Row<_>> = analyzed
        .iter()
        .map(|a| {
            let r = match &a.summary {
                Ok(s) => s.diversity_report(),
                Err(e) => Err(Error::Domain(e.to_string())),
            };
            Row::from_result(&a.spec.label, r)
        })
        .collect();
    for r in &diversity {
        if let Row::Failed { label, error } = r {
            note("diversity", label, false, Some(error.clone()));
        }
    }

    let vocab: Vec<Row<VocabRow>> = analyzed
        .iter()
        .map(|a| match &a.summary {
            Ok(s) => Row::Ok(VocabRow {
                label: a.spec.label.clone(),
                types: s.type_count() as u64,
                tokens: s.token_count(),
                sentences: s.sentence_count(),
                dropped_lines: s.dropped_lines(),
            }),
            Err(e) => Row::Failed {
                label: a.spec.label.clone(),
                error: e.to_string(),
            },
        })
        .collect();

    let reference = &analyzed[0];
    let ht_profile = reference
        .summary
        .as_ref()
        .map_err(|e| e.to_string())
        .and_then(|s| s.vocab_profile().map_err(|e| e.to_string()));
    let bias: Vec<Row<BiasRow>> = analyzed[1..]
        .par_iter()
        .map(|a| {
            let label = &a.spec.label;
            let r = ht_profile
                .as_ref()
                .map_err(|e| Error::Domain(format!("reference unavailable: {e}")))
                .and_then(|ht| {
                    let s = a
                        .summary
                        .as_ref()
                        .map_err(|e| Error::Domain(e.to_string()))?;
                    let mt = s.vocab_profile()?;
                    Ok(BiasRow {
                        label: label.clone(),
                        reference: reference.spec.label.clone(),
                        classification: classify_corpora(ht, &mt, &config.bias)?,
                    })
                });
            Row::from_result(label, r)
        })
        .collect();
    for r in &bias {
        if let Row::Failed { label, error } = r {
            note("freqbias", label, false, Some(error.clone()));
        }
    }

    let variants = match &config.variant_sets {
        None => None,
        Some(p) => {
            let sets = load_variant_sets(base_dir.join(p)).and_then(|sets| {
                sets.iter()
                    .map(|s| s.normalized(&tokenizer))
                    .collect::<Result<Vec<VariantSet>>>()
            });
            match sets {
                Ok(sets) => Some(
                    sets.iter()
                        .map(|set| {
                            VariantProfile::from_counts(
                                set,
                                analyzed.iter().filter_map(|a| {
                                    let s = a.summary.as_ref().ok()?;
                                    Some((a.spec.label.as_str(), |v: &str| s.count_of(v)))
                                }),
                            )
                        })
                        .collect::<Vec<_>>(),
                ),
                Err(e) => {
                    note("variants", &p.to_string_lossy(), false, Some(e.to_string()));
                    None
                }
            }
        }
    };

    let significance = config.significance.map(|bcfg| {
        let bcfg = BootstrapConfig {
            mtld_threshold: threshold,
            ..bcfg
        };
        let ht = Corpus::load(&reference.resolved, &tokenizer, &reference.spec.label);
        analyzed[1..]
            .iter()
            .map(|a| {
                let r = ht
                    .as_ref()
                    .map_err(|e| Error::Domain(format!("reference unavailable: {e}")))
                    .and_then(|ht| {
                        let sys = Corpus::load(&a.resolved, &tokenizer, &a.spec.label)?;
                        let result = bootstrap_compare(&sys, ht, &bcfg)?;
                        Ok(SignificanceRow::new(&a.spec.label, ht.label(), result))
                    });
                Row::from_result(&a.spec.label, r)
            })
            .collect::<Vec<_>>()
    });
    if let Some(rows) = &significance {
        for r in rows {
            if let Row::Failed { label, error } = r {
                note("significance", label, false, Some(error.clone()));
            }
        }
    }

    let mut manifest = RunManifest::new("report", tokenizer);
    for a in &analyzed {
        if let Ok(d) = &a.digest {
            manifest.inputs.push(d.clone());
        }
    }
    manifest.set("mtld_threshold", threshold);
    manifest.set("bias", config.bias);
    if let Some(p) = &config.variant_sets {
        manifest.set("variant_sets", p.to_string_lossy());
    }
    if let Some(b) = &config.significance {
        manifest.seeds.insert("significance".into(), b.seed);
        manifest.set("significance", b);
    }

    let mut outputs = Vec::new();
    output::write_json(
        &Envelope {
            manifest: &manifest,
            rows: &diversity,
        },
        create(out_dir, "diversity.json", &mut outputs)?,
    )?;
    output::write_diversity_csv(&diversity, create(out_dir, "diversity.csv", &mut outputs)?)?;
    output::write_json(
        &Envelope {
            manifest: &manifest,
            rows: &vocab,
        },
        create(out_dir, "vocab.json", &mut outputs)?,
    )?;
    output::write_vocab_csv(&vocab, create(out_dir, "vocab.csv", &mut outputs)?)?;
    output::write_json(
        &Envelope {
            manifest: &manifest,
            rows: &bias,
        },
        create(out_dir, "freqbias.json", &mut outputs)?,
    )?;
    output::write_bias_csv(&bias, create(out_dir, "freqbias.csv", &mut outputs)?)?;
    if let Some(v) = &variants {
        output::write_json(
            &Envelope {
                manifest: &manifest,
                rows: v,
            },
            create(out_dir, "variants.json", &mut outputs)?,
        )?;
        output::write_variants_csv(v, create(out_dir, "variants.csv", &mut outputs)?)?;
    }
    if let Some(s) = &significance {
        output::write_json(
            &Envelope {
                manifest: &manifest,
                rows: s,
            },
            create(out_dir, "significance.json", &mut outputs)?,
        )?;
        output::write_significance_csv(s, create(out_dir, "significance.csv", &mut outputs)?)?;
    }
    manifest.outputs = outputs.clone();
    manifest.set("failures", &failures);
    output::write_json(&manifest, create(out_dir, "manifest.json", &mut outputs)?)?;

    Ok(ReportOutcome { outputs, failures })
}
