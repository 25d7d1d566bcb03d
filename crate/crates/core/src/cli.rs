//! Command-line front end.
//!
//! Exit codes: 0 success, 1 partial failure (some `report` analyses failed),
//! 2 usage or input error. `signif` follows the `diff(1)` convention
//! instead: 0 not significant, 1 significant, 2 error.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use crate::corpus::{split_parallel, Corpus, ParallelCorpus, SplitSpec};
use crate::diversity::DEFAULT_MTLD_THRESHOLD;
use crate::error::{Error, Result};
use crate::freqbias::{classify_corpora, BiasClassConfig, ThresholdRule};
use crate::output::{
    self, BiasRow, Envelope, InputDigest, Row, RunManifest, SignificanceRow, VocabRow,
};
use crate::report::{run_report, ReportConfig};
use crate::significance::{
    bootstrap_compare, BootstrapConfig, LdMetric, MIN_RECOMMENDED_ITERATIONS,
};
use crate::stream::CorpusSummary;
use crate::synth::{SynthConfig, Synthesizer};
use crate::tokenize::{SplitRule, TokenizerConfig};
use crate::variants::{load_variant_sets, VariantProfile, VariantSet};

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARTIAL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NOT_SIGNIFICANT: i32 = 0;
pub const EXIT_SIGNIFICANT: i32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(
    name = "lexbias",
    version,
    about = "Lexical diversity and frequency-bias analysis of MT output"
)]
pub struct Cli {
    #[command(flatten)]
    common: CommonArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// Lowercase tokens.
    #[arg(long, global = true)]
    lowercase: bool,
    /// Trim punctuation from token edges and drop punctuation-only tokens.
    #[arg(long = "strip-punct", global = true)]
    strip_punct: bool,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Also write the run manifest to this file.
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
}

impl CommonArgs {
    fn tokenizer(&self) -> TokenizerConfig {
        TokenizerConfig {
            lowercase: self.lowercase,
            strip_punctuation: self.strip_punct,
            split_rule: SplitRule::Whitespace,
        }
    }
}

#[derive(Debug, Args)]
struct Inputs {
    /// Corpus files, one sentence per line.
    #[arg(required = true)]
    files: Vec<PathBuf>,
    /// Label for each file, in order (default: file stem).
    #[arg(long = "label")]
    labels: Vec<String>,
}

impl Inputs {
    fn labeled(&self) -> Result<Vec<(String, PathBuf)>> {
        labeled(&self.files, &self.labels)
    }
}

fn labeled(files: &[PathBuf], labels: &[String]) -> Result<Vec<(String, PathBuf)>> {
    if !labels.is_empty() && labels.len() != files.len() {
        return Err(Error::Domain(format!(
            "got {} --label values for {} files",
            labels.len(),
            files.len()
        )));
    }
    Ok(files
        .iter()
        .enumerate()
        .map(|(i, f)| {
            let label = labels.get(i).cloned().unwrap_or_else(|| default_label(f));
            (label, f.clone())
        })
        .collect())
}

fn default_label(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Shuffle a parallel corpus and cut it into train/test/dev files.
    Split {
        #[arg(long)]
        src: PathBuf,
        #[arg(long)]
        trg: PathBuf,
        #[arg(long)]
        train: usize,
        #[arg(long)]
        test: usize,
        #[arg(long)]
        dev: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output prefix; files are `<prefix>.{train,test,dev}.{src,trg}`.
        #[arg(long, default_value = "split")]
        prefix: PathBuf,
    },
    /// Vocabulary sizes, or per-type profiles with --entries.
    Vocab {
        #[command(flatten)]
        inputs: Inputs,
        /// Emit one row per type instead of one per corpus.
        #[arg(long)]
        entries: bool,
        /// With --entries, keep only the N most probable types.
        #[arg(long)]
        top: Option<usize>,
    },
    /// Lexical diversity table: Yule's I, TTR x 1000, MTLD.
    Ld {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long, default_value_t = DEFAULT_MTLD_THRESHOLD)]
        mtld_threshold: f64,
    },
    /// Frequency exacerbation/decay classes of reference words in MT outputs.
    Freqbias {
        /// Human reference translation.
        #[arg(long)]
        reference: PathBuf,
        #[arg(long)]
        reference_label: Option<String>,
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long, default_value_t = 1e4)]
        diff_scale: f64,
    },
    /// Bootstrap significance of a diversity difference between two corpora.
    Signif {
        a: PathBuf,
        b: PathBuf,
        #[arg(long = "label")]
        labels: Vec<String>,
        #[arg(long, value_enum, default_value_t = LdMetric::Ttr)]
        metric: LdMetric,
        #[arg(long, default_value_t = 1000)]
        iterations: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_MTLD_THRESHOLD)]
        mtld_threshold: f64,
    },
    /// Relative frequencies of translation-variant sets.
    Variants {
        /// JSON file: [{"source_word": .., "variants": [..]}, ..]
        #[arg(long)]
        sets: PathBuf,
        #[command(flatten)]
        inputs: Inputs,
    },
    /// Run every analysis for a reference + systems bundle.
    Report {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate a synthetic HT/MT pair with planted variant sets.
    Synth {
        /// Writes `<prefix>.ht.txt`, `<prefix>.mt.txt`, `<prefix>.variants.json`.
        #[arg(long)]
        prefix: PathBuf,
        #[arg(long, default_value_t = 2000)]
        sentences: usize,
        #[arg(long, default_value_t = 5000)]
        concepts: usize,
        #[arg(long, default_value_t = 40)]
        variant_groups: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
    }
}

fn sink(common: &CommonArgs) -> Result<Box<dyn Write>> {
    match &common.output {
        Some(p) => Ok(Box::new(io::BufWriter::new(
            File::create(p).map_err(|e| Error::io(p, e))?,
        ))),
        None => Ok(Box::new(io::stdout().lock())),
    }
}

fn emit<T: Serialize>(
    common: &CommonArgs,
    manifest: &RunManifest,
    rows: &[T],
    csv: impl FnOnce(&mut dyn Write) -> Result<()>,
) -> Result<()> {
    let mut out = sink(common)?;
    match common.format {
        Format::Json => output::write_json(&Envelope { manifest, rows }, &mut out)?,
        Format::Csv => csv(&mut out)?,
    }
    out.flush().map_err(|e| Error::io("<output>", e))?;
    if let Some(p) = &common.manifest {
        output::write_json(manifest, File::create(p).map_err(|e| Error::io(p, e))?)?;
    }
    Ok(())
}

fn digests(inputs: &[(String, PathBuf)]) -> Result<Vec<InputDigest>> {
    inputs
        .iter()
        .map(|(l, p)| InputDigest::of_file(l, p, &p.to_string_lossy()))
        .collect()
}

fn summarize_all(
    inputs: &[(String, PathBuf)],
    tok: &TokenizerConfig,
    threshold: f64,
) -> Result<Vec<CorpusSummary>> {
    inputs
        .par_iter()
        .map(|(l, p)| CorpusSummary::from_file(p, tok, l, threshold))
        .collect()
}

fn execute(cli: &Cli) -> Result<i32> {
    let common = &cli.common;
    let tok = common.tokenizer();
    match &cli.command {
        Command::Split {
            src,
            trg,
            train,
            test,
            dev,
            seed,
            prefix,
        } => cmd_split(
            common,
            src,
            trg,
            SplitSpec {
                train_size: *train,
                test_size: *test,
                dev_size: *dev,
                seed: *seed,
            },
            prefix,
        ),
        Command::Vocab {
            inputs,
            entries,
            top,
        } => {
            let inputs = inputs.labeled()?;
            let summaries = summarize_all(&inputs, &tok, DEFAULT_MTLD_THRESHOLD)?;
            let mut manifest = RunManifest::new("vocab", tok);
            manifest.inputs = digests(&inputs)?;
            if *entries {
                let mut rows = Vec::new();
                for s in &summaries {
                    rows.extend(output::vocab_entries(s.label(), &s.vocab_profile()?, *top));
                }
                manifest.set("top", top);
                emit(common, &manifest, &rows, |w| {
                    output::write_vocab_entries_csv(&rows, w)
                })?;
            } else {
                let rows: Vec<Row<VocabRow>> = summaries
                    .iter()
                    .map(|s| {
                        Row::Ok(VocabRow {
                            label: s.label().to_string(),
                            types: s.type_count() as u64,
                            tokens: s.token_count(),
                            sentences: s.sentence_count(),
                            dropped_lines: s.dropped_lines(),
                        })
                    })
                    .collect();
                emit(common, &manifest, &rows, |w| {
                    output::write_vocab_csv(&rows, w)
                })?;
            }
            Ok(EXIT_OK)
        }
        Command::Ld {
            inputs,
            mtld_threshold,
        } => {
            let inputs = inputs.labeled()?;
            let summaries = summarize_all(&inputs, &tok, *mtld_threshold)?;
            let rows = summaries
                .iter()
                .map(|s| s.diversity_report().map(Row::Ok))
                .collect::<Result<Vec<_>>>()?;
            let mut manifest = RunManifest::new("ld", tok);
            manifest.inputs = digests(&inputs)?;
            manifest.set("mtld_threshold", mtld_threshold);
            emit(common, &manifest, &rows, |w| {
                output::write_diversity_csv(&rows, w)
            })?;
            Ok(EXIT_OK)
        }
        Command::Freqbias {
            reference,
            reference_label,
            inputs,
            diff_scale,
        } => {
            let ref_label = reference_label
                .clone()
                .unwrap_or_else(|| default_label(reference));
            let mut all = vec![(ref_label.clone(), reference.clone())];
            all.extend(inputs.labeled()?);
            let summaries = summarize_all(&all, &tok, DEFAULT_MTLD_THRESHOLD)?;
            let config = BiasClassConfig {
                threshold_rule: ThresholdRule::HtMean,
                diff_scale: *diff_scale,
            };
            let ht = summaries[0].vocab_profile()?;
            let rows = summaries[1..]
                .iter()
                .map(|s| {
                    Ok(Row::Ok(BiasRow {
                        label: s.label().to_string(),
                        reference: ref_label.clone(),
                        classification: classify_corpora(&ht, &s.vocab_profile()?, &config)?,
                    }))
                })
                .collect::<Result<Vec<_>>>()?;
            let mut manifest = RunManifest::new("freqbias", tok);
            manifest.inputs = digests(&all)?;
            manifest.set("bias", config);
            emit(common, &manifest, &rows, |w| {
                output::write_bias_csv(&rows, w)
            })?;
            Ok(EXIT_OK)
        }
        Command::Signif {
            a,
            b,
            labels,
            metric,
            iterations,
            seed,
            mtld_threshold,
        } => {
            let inputs = labeled(&[a.clone(), b.clone()], labels)?;
            if *iterations < MIN_RECOMMENDED_ITERATIONS {
                eprintln!(
                    "warning: {iterations} iterations is below the recommended minimum of {MIN_RECOMMENDED_ITERATIONS}"
                );
            }
            let ca = Corpus::load(&inputs[0].1, &tok, &inputs[0].0)?;
            let cb = Corpus::load(&inputs[1].1, &tok, &inputs[1].0)?;
            let config = BootstrapConfig {
                iterations: *iterations,
                seed: *seed,
                metric: *metric,
                mtld_threshold: *mtld_threshold,
            };
            let result = bootstrap_compare(&ca, &cb, &config)?;
            let significant = result.significant;
            let rows = vec![Row::Ok(SignificanceRow::new(
                ca.label(),
                cb.label(),
                result,
            ))];
            let mut manifest = RunManifest::new("signif", tok);
            manifest.inputs = digests(&inputs)?;
            manifest.seeds.insert("bootstrap".into(), *seed);
            manifest.set("bootstrap", config);
            emit(common, &manifest, &rows, |w| {
                output::write_significance_csv(&rows, w)
            })?;
            Ok(if significant {
                EXIT_SIGNIFICANT
            } else {
                EXIT_NOT_SIGNIFICANT
            })
        }
        Command::Variants { sets, inputs } => {
            let inputs = inputs.labeled()?;
            let sets = load_variant_sets(sets)?
                .iter()
                .map(|s| s.normalized(&tok))
                .collect::<Result<Vec<VariantSet>>>()?;
            let summaries = summarize_all(&inputs, &tok, DEFAULT_MTLD_THRESHOLD)?;
            let profiles: Vec<VariantProfile> = sets
                .iter()
                .map(|set| {
                    VariantProfile::from_counts(
                        set,
                        summaries
                            .iter()
                            .map(|s| (s.label(), |v: &str| s.count_of(v))),
                    )
                })
                .collect();
            let mut manifest = RunManifest::new("variants", tok);
            manifest.inputs = digests(&inputs)?;
            emit(common, &manifest, &profiles, |w| {
                output::write_variants_csv(&profiles, w)
            })?;
            Ok(EXIT_OK)
        }
        Command::Report { config, out } => {
            let mut cfg = ReportConfig::load(config)?;
            cfg.tokenizer.lowercase |= common.lowercase;
            cfg.tokenizer.strip_punctuation |= common.strip_punct;
            let base = config.parent().unwrap_or(Path::new("."));
            let outcome = run_report(&cfg, base, out)?;
            for f in &outcome.failures {
                eprintln!("failed: {f}");
            }
            Ok(if outcome.failures.is_empty() {
                EXIT_OK
            } else {
                EXIT_PARTIAL
            })
        }
        Command::Synth {
            prefix,
            sentences,
            concepts,
            variant_groups,
            seed,
        } => {
            let cfg = SynthConfig {
                sentences: *sentences,
                concepts: *concepts,
                variant_groups: *variant_groups,
                seed: *seed,
                ..Default::default()
            };
            if cfg.concepts == 0 || cfg.sentences == 0 {
                return Err(Error::Domain(
                    "sentences and concepts must be positive".into(),
                ));
            }
            let path = |ext: &str| {
                let mut p = prefix.clone().into_os_string();
                p.push(ext);
                PathBuf::from(p)
            };
            let open = |p: &PathBuf| File::create(p).map_err(|e| Error::io(p, e));
            let (ht, mt, sets) = (path(".ht.txt"), path(".mt.txt"), path(".variants.json"));
            Synthesizer::new(cfg)
                .write(open(&ht)?, open(&mt)?, open(&sets)?)
                .map_err(|e| Error::io(&ht, e))?;
            println!("{}\n{}\n{}", ht.display(), mt.display(), sets.display());
            Ok(EXIT_OK)
        }
    }
}

fn cmd_split(
    common: &CommonArgs,
    src: &Path,
    trg: &Path,
    spec: SplitSpec,
    prefix: &Path,
) -> Result<i32> {
    let tok = common.tokenizer();
    let label = default_label(src);
    let pc = ParallelCorpus::load(src, trg, &tok, &label)?;
    let splits = split_parallel(&pc, &spec)?;
    let file = |part: &str, side: &str| {
        let mut p = prefix.as_os_str().to_owned();
        p.push(format!(".{part}.{side}"));
        PathBuf::from(p)
    };
    let mut outputs = Vec::new();
    for (part, corpus) in [
        ("train", &splits.train),
        ("test", &splits.test),
        ("dev", &splits.dev),
    ] {
        for (side, c) in [("src", corpus.source()), ("trg", corpus.target())] {
            let p = file(part, side);
            let f = File::create(&p).map_err(|e| Error::io(&p, e))?;
            let mut w = io::BufWriter::new(f);
            c.write_lines(&mut w)
                .and_then(|_| w.flush())
                .map_err(|e| Error::io(&p, e))?;
            outputs.push(p.to_string_lossy().into_owned());
        }
    }
    let mut manifest = RunManifest::new("split", tok);
    manifest.inputs = digests(&[
        ("src".into(), src.to_path_buf()),
        ("trg".into(), trg.to_path_buf()),
    ])?;
    manifest.seeds.insert("split".into(), spec.seed);
    manifest.set("sizes", spec);
    manifest.set("available_pairs", pc.len());
    manifest.set("dropped_pairs", pc.dropped_pairs());
    manifest.outputs = outputs;
    let manifest_path = common.manifest.clone().unwrap_or_else(|| {
        let mut p = prefix.as_os_str().to_owned();
        p.push(".manifest.json");
        PathBuf::from(p)
    });
    output::write_json(
        &manifest,
        File::create(&manifest_path).map_err(|e| Error::io(&manifest_path, e))?,
    )?;

    let mut out = sink(common)?;
    let w = &mut out;
    let table = (|| -> io::Result<()> {
        writeln!(w, "{:<8} {:>12}", "split", "pairs")?;
        writeln!(w, "{:<8} {:>12}", "train", splits.train.len())?;
        writeln!(w, "{:<8} {:>12}", "test", splits.test.len())?;
        writeln!(w, "{:<8} {:>12}", "dev", splits.dev.len())?;
        writeln!(w, "{:<8} {:>12}", "dropped", pc.dropped_pairs())?;
        w.flush()
    })();
    table.map_err(|e| Error::io("<output>", e))?;
    Ok(EXIT_OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(run(["lexbias", "freqbias", "mt.txt"]), EXIT_USAGE);
        assert_eq!(run(["lexbias", "nonsense"]), EXIT_USAGE);
        assert_eq!(run(["lexbias", "--version"]), EXIT_OK);
    }

    #[test]
    fn label_count_must_match() {
        let files = vec![PathBuf::from("a.txt"), PathBuf::from("b.txt")];
        assert!(labeled(&files, &["x".into()]).is_err());
        let l = labeled(&files, &[]).unwrap();
        assert_eq!(l[0].0, "a");
    }
}
