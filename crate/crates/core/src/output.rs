//! Report serialization: CSV tables, JSON envelopes and run manifests.
//!
//! CSV cells hold metric values with 4 decimal places; JSON keeps full
//! precision. Undefined metrics are empty CSV cells and JSON nulls, with the
//! reason in the `undefined` column / object.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::corpus::VocabProfile;
use crate::diversity::DiversityReport;
use crate::error::{Error, Result};
use crate::freqbias::{BiasClass, BiasClassification};
use crate::rng::PRNG_SCHEME;
use crate::significance::BootstrapResult;
use crate::tokenize::TokenizerConfig;
use crate::variants::VariantProfile;

pub const TOOL_NAME: &str = "lexbias";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InputDigest {
    pub label: String,
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

impl InputDigest {
    pub fn of_file(label: &str, path: &Path, display_path: &str) -> Result<Self> {
        let mut file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut hasher = Sha256::new();
        let bytes = io::copy(&mut file, &mut hasher).map_err(|e| Error::io(path, e))?;
        Ok(InputDigest {
            label: label.to_string(),
            path: display_path.to_string(),
            sha256: hex::encode(hasher.finalize()),
            bytes,
        })
    }
}

/// Provenance of one run. Two runs with equal manifests produce identical
/// reports, so nothing time- or host-dependent is recorded unless
/// `SOURCE_DATE_EPOCH` is set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub tokenizer: TokenizerConfig,
    pub inputs: Vec<InputDigest>,
    pub prng: &'static str,
    pub seeds: BTreeMap<String, u64>,
    pub config: BTreeMap<String, serde_json::Value>,
    pub outputs: Vec<String>,
    pub generated_at: Option<String>,
}

impl RunManifest {
    pub fn new(command: &str, tokenizer: TokenizerConfig) -> Self {
        RunManifest {
            tool: TOOL_NAME,
            version: TOOL_VERSION,
            command: command.to_string(),
            tokenizer,
            inputs: Vec::new(),
            prng: PRNG_SCHEME,
            seeds: BTreeMap::new(),
            config: BTreeMap::new(),
            outputs: Vec::new(),
            generated_at: std::env::var("SOURCE_DATE_EPOCH").ok(),
        }
    }

    pub fn set<V: Serialize>(&mut self, key: &str, value: V) {
        let v = serde_json::to_value(value).expect("config values serialize");
        self.config.insert(key.to_string(), v);
    }
}

pub fn fmt4(v: f64) -> String {
    format!("{v:.4}")
}

fn opt4(v: Option<f64>) -> String {
    v.map(fmt4).unwrap_or_default()
}

/// A row that either holds a result or records why its input failed.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Row<T> {
    Ok(T),
    Failed { label: String, error: String },
}

impl<T> Row<T> {
    pub fn from_result(label: &str, r: Result<T>) -> Self {
        match r {
            Ok(v) => Row::Ok(v),
            Err(e) => Row::Failed {
                label: label.to_string(),
                error: e.to_string(),
            },
        }
    }

    pub fn is_ok(&self) -> bool {
        matches!(self, Row::Ok(_))
    }
}

pub const DIVERSITY_COLUMNS: [&str; 13] = [
    "label",
    "yules_i",
    "ttr_x1000",
    "mtld",
    "yules_k",
    "ttr",
    "mtld_forward",
    "mtld_backward",
    "token_count",
    "type_count",
    "mtld_threshold",
    "undefined",
    "error",
];

pub fn write_diversity_csv<W: Write>(rows: &[Row<DiversityReport>], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(DIVERSITY_COLUMNS)?;
    for row in rows {
        match row {
            Row::Ok(r) => {
                let undefined = r
                    .undefined
                    .iter()
                    .map(|(k, v)| format!("{k}={v}"))
                    .collect::<Vec<_>>()
                    .join(";");
                w.write_record([
                    r.label.clone(),
                    opt4(r.yules_i),
                    fmt4(r.ttr_scaled),
                    opt4(r.mtld),
                    opt4(r.yules_k),
                    fmt4(r.ttr),
                    opt4(r.mtld_forward),
                    opt4(r.mtld_backward),
                    r.token_count.to_string(),
                    r.type_count.to_string(),
                    fmt4(r.mtld_threshold),
                    undefined,
                    String::new(),
                ])?;
            }
            Row::Failed { label, error } => {
                let mut rec = vec![String::new(); DIVERSITY_COLUMNS.len()];
                rec[0] = label.clone();
                rec[DIVERSITY_COLUMNS.len() - 1] = error.clone();
                w.write_record(&rec)?;
            }
        }
    }
    w.flush().map_err(|e| Error::Csv(e.into()))?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BiasRow {
    pub label: String,
    pub reference: String,
    #[serde(flatten)]
    pub classification: BiasClassification,
}

pub const BIAS_COLUMNS: [&str; 13] = [
    "label",
    "row",
    "++",
    "+-",
    "-+",
    "--",
    "+0",
    "-0",
    "novel_count",
    "novel_mass",
    "threshold",
    "diff_scale",
    "error",
];

pub fn write_bias_csv<W: Write>(rows: &[Row<BiasRow>], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(BIAS_COLUMNS)?;
    for row in rows {
        match row {
            Row::Ok(r) => {
                let c = &r.classification;
                let tail = |rec: &mut Vec<String>| {
                    rec.push(c.novel_count.to_string());
                    rec.push(fmt4(c.novel_mass));
                    rec.push(format!("{:.4e}", c.threshold));
                    rec.push(fmt4(c.diff_scale));
                    rec.push(String::new());
                };
                let mut rec = vec![r.label.clone(), "counts".into()];
                rec.extend(BiasClass::ALL.iter().map(|&k| c.counts[k].to_string()));
                tail(&mut rec);
                w.write_record(&rec)?;

                let mut rec = vec![r.label.clone(), "counts_normalized".into()];
                rec.extend(BiasClass::ALL.iter().map(|&k| fmt4(c.counts_normalized[k])));
                tail(&mut rec);
                w.write_record(&rec)?;

                let mut rec = vec![r.label.clone(), "acc_diffs".into()];
                rec.extend(BiasClass::ALL.iter().map(|&k| fmt4(c.acc_diffs[k])));
                tail(&mut rec);
                w.write_record(&rec)?;
            }
            Row::Failed { label, error } => {
                let mut rec = vec![String::new(); BIAS_COLUMNS.len()];
                rec[0] = label.clone();
                rec[BIAS_COLUMNS.len() - 1] = error.clone();
                w.write_record(&rec)?;
            }
        }
    }
    w.flush().map_err(|e| Error::Csv(e.into()))?;
    Ok(())
}

pub fn write_variants_csv<W: Write>(profiles: &[VariantProfile], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "source_word",
        "variant",
        "corpus_label",
        "count",
        "relative_frequency",
    ])?;
    for p in profiles {
        for c in &p.per_corpus {
            for v in &c.counts {
                w.write_record([
                    p.source_word.as_str(),
                    &v.variant,
                    &c.label,
                    &v.raw_count.to_string(),
                    &fmt4(v.relative_frequency),
                ])?;
            }
        }
    }
    w.flush().map_err(|e| Error::Csv(e.into()))?;
    Ok(())
}

/// Vocabulary table row.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VocabRow {
    pub label: String,
    pub types: u64,
    pub tokens: u64,
    pub sentences: u64,
    pub dropped_lines: u64,
}

pub fn write_vocab_csv<W: Write>(rows: &[Row<VocabRow>], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "label",
        "types",
        "tokens",
        "sentences",
        "dropped_lines",
        "error",
    ])?;
    for row in rows {
        match row {
            Row::Ok(r) => w.write_record([
                r.label.clone(),
                r.types.to_string(),
                r.tokens.to_string(),
                r.sentences.to_string(),
                r.dropped_lines.to_string(),
                String::new(),
            ])?,
            Row::Failed { label, error } => {
                w.write_record([label.as_str(), "", "", "", "", error])?
            }
        }
    }
    w.flush().map_err(|e| Error::Csv(e.into()))?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VocabEntryRow {
    pub label: String,
    #[serde(rename = "type")]
    pub form: String,
    pub raw_count: u64,
    pub length_weighted: f64,
    pub probability: f64,
}

/// Profile entries by decreasing probability (ties by form), at most `top`.
pub fn vocab_entries(
    label: &str,
    profile: &VocabProfile,
    top: Option<usize>,
) -> Vec<VocabEntryRow> {
    let mut entries: Vec<_> = profile.iter().collect();
    entries.sort_by(|a, b| {
        b.1.probability
            .total_cmp(&a.1.probability)
            .then(a.0.cmp(b.0))
    });
    entries
        .into_iter()
        .take(top.unwrap_or(usize::MAX))
        .map(|(form, e)| VocabEntryRow {
            label: label.to_string(),
            form: form.to_string(),
            raw_count: e.raw_count,
            length_weighted: e.length_weighted,
            probability: e.probability,
        })
        .collect()
}

pub fn write_vocab_entries_csv<W: Write>(rows: &[VocabEntryRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "label",
        "type",
        "raw_count",
        "length_weighted",
        "probability",
    ])?;
    for r in rows {
        w.write_record([
            r.label.as_str(),
            &r.form,
            &r.raw_count.to_string(),
            &fmt4(r.length_weighted),
            &format!("{:.4e}", r.probability),
        ])?;
    }
    w.flush().map_err(|e| Error::Csv(e.into()))?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignificanceRow {
    pub label_a: String,
    pub label_b: String,
    pub status: &'static str,
    #[serde(flatten)]
    pub result: BootstrapResult,
}

impl SignificanceRow {
    pub fn new(label_a: &str, label_b: &str, result: BootstrapResult) -> Self {
        SignificanceRow {
            label_a: label_a.to_string(),
            label_b: label_b.to_string(),
            status: if result.significant {
                "significant"
            } else {
                "not_significant"
            },
            result,
        }
    }
}

pub const SIGNIFICANCE_COLUMNS: [&str; 12] = [
    "label_a",
    "label_b",
    "metric",
    "observed_delta",
    "p_value",
    "ci_low",
    "ci_high",
    "iterations",
    "seed",
    "degenerate_samples",
    "status",
    "error",
];

pub fn write_significance_csv<W: Write>(rows: &[Row<SignificanceRow>], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SIGNIFICANCE_COLUMNS)?;
    for row in rows {
        match row {
            Row::Ok(r) => {
                let metric = serde_json::to_value(r.result.metric)?;
                w.write_record([
                    r.label_a.clone(),
                    r.label_b.clone(),
                    metric.as_str().unwrap_or_default().to_string(),
                    fmt4(r.result.observed_delta),
                    fmt4(r.result.p_value),
                    fmt4(r.result.ci_low),
                    fmt4(r.result.ci_high),
                    r.result.iterations.to_string(),
                    r.result.seed.to_string(),
                    r.result.degenerate_samples.to_string(),
                    r.status.to_string(),
                    String::new(),
                ])?;
            }
            Row::Failed { label, error } => {
                let mut rec = vec![String::new(); SIGNIFICANCE_COLUMNS.len()];
                rec[0] = label.clone();
                rec[SIGNIFICANCE_COLUMNS.len() - 2] = "error".into();
                rec[SIGNIFICANCE_COLUMNS.len() - 1] = error.clone();
                w.write_record(&rec)?;
            }
        }
    }
    w.flush().map_err(|e| Error::Csv(e.into()))?;
    Ok(())
}

/// JSON document carrying its manifest alongside the rows.
#[derive(Debug, Serialize)]
pub struct Envelope<'a, T: Serialize> {
    pub manifest: &'a RunManifest,
    pub rows: &'a [T],
}

pub fn write_json<W: Write, T: Serialize + ?Sized>(value: &T, mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, value)?;
    out.write_all(b"\n").map_err(|e| Error::io("<output>", e))?;
    Ok(())
}
