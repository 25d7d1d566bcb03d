//! Acceptance criteria 1-9. Prints one PASS/FAIL line per criterion and
//! exits non-zero if a hard criterion fails. Criterion 9 (throughput) is
//! reported but never fails the run.

mod common;

use std::fs;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use common::*;
use lexbias::corpus::{build_vocab_profile, Corpus};
use lexbias::diversity::{diversity_report, mtld, DEFAULT_MTLD_THRESHOLD};
use lexbias::freqbias::{classify_corpora, BiasClass, BiasClassConfig};
use lexbias::significance::{bootstrap_compare, BootstrapConfig, LdMetric};
use lexbias::synth::{SynthConfig, Synthesizer};
use lexbias::variants::variant_profile;
use lexbias::{frequency_spectrum, ttr, yules_i, yules_k};
use rand::Rng;

type Outcome = Result<String, String>;

/// Number, name, check, and whether a failure fails the run.
type Criterion = (u32, &'static str, fn() -> Outcome, bool);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn approx(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut r = rng(1);
    let mut compared = 0;
    for case in 0..200 {
        let n = r.random_range(1..=200);
        let types = r.random_range(1..=20);
        let tokens: Vec<String> = (0..n)
            .map(|_| format!("w{}", r.random_range(0..types)))
            .collect();
        let refs: Vec<&str> = tokens.iter().map(String::as_str).collect();
        let corpus = Corpus::from_sentences("t", [&tokens]);
        let report =
            diversity_report(&corpus, DEFAULT_MTLD_THRESHOLD).map_err(|e| e.to_string())?;

        ensure(approx(report.ttr, oracle_ttr(&refs), 1e-9), || {
            format!("case {case}: TTR")
        })?;
        let pairs = [
            ("K", report.yules_k, oracle_yules_k(&refs)),
            ("I", report.yules_i, oracle_yules_i(&refs)),
            (
                "MTLD",
                report.mtld,
                oracle_mtld(&refs, DEFAULT_MTLD_THRESHOLD).map(|m| m.0),
            ),
        ];
        for (name, got, want) in pairs {
            match (got, want) {
                (Some(g), Some(w)) => {
                    ensure(approx(g, w, 1e-9), || {
                        format!("case {case}: {name} {g} vs oracle {w}")
                    })?;
                    compared += 1;
                }
                (None, None) => {}
                (g, w) => {
                    return Err(format!(
                        "case {case}: {name} defined-ness differs: {g:?} vs oracle {w:?}"
                    ))
                }
            }
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(5), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!(
        "200 texts, {compared} defined metric values within 1e-9, {elapsed:.2?}"
    ))
}

fn criterion_2() -> Outcome {
    let abab = Corpus::from_sentences("x", [["a", "a", "b", "b"]]);
    let k = yules_k(&abab).map_err(|e| e.to_string())?;
    let i = yules_i(&abab).map_err(|e| e.to_string())?;
    let t = ttr(&abab).map_err(|e| e.to_string())?;
    let spectrum = frequency_spectrum(&abab).map_err(|e| e.to_string())?;
    ensure(k == 2500.0 && i == 4.0 && t == 0.5, || {
        format!("K={k} I={i} TTR={t}")
    })?;
    ensure(spectrum.m1() == 4 && spectrum.m2() == 8, || {
        "spectrum".into()
    })?;

    let six = Corpus::from_sentences("x", [["a"; 6]]);
    let m = mtld(&six, DEFAULT_MTLD_THRESHOLD).map_err(|e| e.to_string())?;
    ensure(
        m.value == 2.0 && m.forward == 2.0 && m.backward == 2.0,
        || format!("MTLD {m:?}"),
    )?;

    let ht = build_vocab_profile(&Corpus::from_sentences("ht", [vec!["a", "b"], vec!["a"]]))
        .map_err(|e| e.to_string())?;
    let mt =
        build_vocab_profile(&Corpus::from_sentences("mt", [["a"]])).map_err(|e| e.to_string())?;
    ensure(
        ht.probability("a") == 0.75 && ht.probability("b") == 0.25,
        || "HT profile".into(),
    )?;
    let config = BiasClassConfig::default();
    let c = classify_corpora(&ht, &mt, &config).map_err(|e| e.to_string())?;
    let scale = config.diff_scale;
    ensure(c.threshold == 0.5, || format!("threshold {}", c.threshold))?;
    ensure(
        c.counts[BiasClass::PP] == 1 && c.counts[BiasClass::MZ] == 1,
        || format!("{:?}", c.counts),
    )?;
    ensure(c.counts.iter().map(|(_, n)| n).sum::<u64>() == 2, || {
        "other classes non-empty".into()
    })?;
    ensure(
        c.acc_diffs[BiasClass::PP] == 0.25 * scale && c.acc_diffs[BiasClass::MZ] == 0.25 * scale,
        || format!("{:?}", c.acc_diffs),
    )?;
    Ok("K=2500 I=4 TTR=0.5; MTLD=2.0; PP=1 MZ=1 with diffs 2500 each".into())
}

fn criterion_3() -> Outcome {
    let mut r = rng(3);
    let config = BiasClassConfig::default();
    let mut worst: f64 = 0.0;
    for case in 0..100 {
        let n_ht = r.random_range(1..40);
        let n_mt = r.random_range(1..40);
        let ht_types = r.random_range(1..60);
        let mt_types = r.random_range(1..60);
        let ht = random_sentences(&mut r, n_ht, 15, ht_types);
        let mt = random_sentences(&mut r, n_mt, 15, mt_types);
        let hp =
            build_vocab_profile(&Corpus::from_sentences("ht", &ht)).map_err(|e| e.to_string())?;
        let mp =
            build_vocab_profile(&Corpus::from_sentences("mt", &mt)).map_err(|e| e.to_string())?;
        let c = classify_corpora(&hp, &mp, &config).map_err(|e| e.to_string())?;
        let v = hp.type_count();
        let total: u64 = c.counts.iter().map(|(_, n)| n).sum();
        ensure(total == v as u64, || {
            format!("case {case}: counts sum {total} != |V_HT| {v}")
        })?;
        ensure((c.threshold - 1.0 / v as f64).abs() <= 1e-12, || {
            format!("case {case}: threshold")
        })?;
        let gap = (c.increase_mass() - c.decrease_mass()).abs();
        worst = worst.max(gap / config.diff_scale);
        ensure(gap <= 1e-6 * config.diff_scale, || {
            format!("case {case}: mass gap {gap}")
        })?;
    }
    Ok(format!("100 pairs; worst relative mass gap {worst:.2e}"))
}

fn criterion_4() -> Outcome {
    let mut r = rng(4);
    let mut worst: f64 = 0.0;
    for case in 0..100 {
        let sentences = match case {
            0 => vec![vec!["solo".to_string()]],
            1 => vec![vec!["same".to_string(); 7]; 5],
            2 => vec![(0..30).map(|i| format!("x{i}")).collect()],
            _ => {
                let n = if case % 10 == 3 {
                    1
                } else {
                    r.random_range(1..80)
                };
                let types = if case % 10 == 4 {
                    1
                } else {
                    r.random_range(1..100)
                };
                random_sentences(&mut r, n, 20, types)
            }
        };
        let p = build_vocab_profile(&Corpus::from_sentences("c", &sentences))
            .map_err(|e| e.to_string())?;
        let sum: f64 = p.iter().map(|(_, e)| e.probability).sum();
        worst = worst.max((sum - 1.0).abs());
        ensure((sum - 1.0).abs() <= 1e-9, || {
            format!("case {case}: sum {sum}")
        })?;
    }
    Ok(format!(
        "100 corpora incl. single-sentence/single-type; worst |sum-1| {worst:.2e}"
    ))
}

fn criterion_5() -> Outcome {
    let letters: Vec<String> = ('a'..='z').map(String::from).collect();
    let rich = Corpus::from_sentences("rich", (0..500).map(|_| letters.clone()));
    let poor = Corpus::from_sentences("poor", (0..500).map(|_| vec!["the"; 26]));
    let mut r = rng(5);
    let varied = Corpus::from_sentences("varied", random_sentences(&mut r, 300, 20, 200));
    let mut details = Vec::new();
    for metric in [LdMetric::Ttr, LdMetric::YulesI, LdMetric::Mtld] {
        let cfg = BootstrapConfig {
            iterations: 1000,
            seed: 17,
            metric,
            ..Default::default()
        };
        let same = bootstrap_compare(&varied, &varied, &cfg).map_err(|e| e.to_string())?;
        ensure(same.p_value >= 0.95, || {
            format!("{metric:?}: identical p={}", same.p_value)
        })?;
        details.push(format!("{metric:?} identical p={}", same.p_value));
    }
    let cfg = BootstrapConfig {
        iterations: 1000,
        seed: 17,
        ..Default::default()
    };
    let sep = bootstrap_compare(&rich, &poor, &cfg).map_err(|e| e.to_string())?;
    ensure(sep.p_value <= 0.05, || {
        format!("separated p={}", sep.p_value)
    })?;
    details.push(format!("disjoint-structure p={}", sep.p_value));
    let again = bootstrap_compare(&rich, &poor, &cfg).map_err(|e| e.to_string())?;
    let a = bootstrap_compare(&varied, &rich, &cfg).map_err(|e| e.to_string())?;
    let b = bootstrap_compare(&varied, &rich, &cfg).map_err(|e| e.to_string())?;
    ensure(sep == again && a == b, || "rerun differs".into())?;
    ensure(
        a.ci_low.to_bits() == b.ci_low.to_bits() && a.p_value.to_bits() == b.p_value.to_bits(),
        || "rerun not bit-identical".into(),
    )?;
    details.push("reruns bit-identical".into());
    Ok(details.join("; "))
}

fn lexbias(dir: &Path, args: &[&str]) -> Result<std::process::Output, String> {
    Command::new(env!("CARGO_BIN_EXE_lexbias"))
        .current_dir(dir)
        .args(args)
        .output()
        .map_err(|e| e.to_string())
}

fn criterion_6() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut r = rng(6);
    let src = random_sentences(&mut r, 1000, 25, 3000);
    let trg = random_sentences(&mut r, 1000, 25, 3000);
    let join = |s: &[Vec<String>]| s.iter().map(|l| l.join(" ") + "\n").collect::<String>();
    fs::write(dir.path().join("c.src"), join(&src)).map_err(|e| e.to_string())?;
    fs::write(dir.path().join("c.trg"), join(&trg)).map_err(|e| e.to_string())?;
    let sizes = [("train", 800), ("test", 150), ("dev", 50)];
    for prefix in ["first", "second"] {
        let o = lexbias(
            dir.path(),
            &[
                "split", "--src", "c.src", "--trg", "c.trg", "--train", "800", "--test", "150",
                "--dev", "50", "--seed", "2018", "--prefix", prefix,
            ],
        )?;
        ensure(o.status.success(), || {
            String::from_utf8_lossy(&o.stderr).into_owned()
        })?;
    }
    for (part, n) in sizes {
        for side in ["src", "trg"] {
            let a = fs::read(dir.path().join(format!("first.{part}.{side}")))
                .map_err(|e| e.to_string())?;
            let b = fs::read(dir.path().join(format!("second.{part}.{side}")))
                .map_err(|e| e.to_string())?;
            ensure(a == b, || format!("{part}.{side} differs"))?;
            let lines = a.iter().filter(|&&c| c == b'\n').count();
            ensure(lines == n, || {
                format!("{part}.{side}: {lines} lines, wanted {n}")
            })?;
        }
    }
    Ok("1000 pairs -> 800/150/50, two runs byte-identical".into())
}

const SYNTH_SEEDS: [u64; 5] = [1, 2, 3, 4, 5];

fn synth(seed: u64) -> lexbias::synth::SyntheticPair {
    Synthesizer::new(SynthConfig {
        seed,
        ..Default::default()
    })
    .generate()
}

fn criterion_7() -> Outcome {
    let mut details = Vec::new();
    for seed in SYNTH_SEEDS {
        let pair = synth(seed);
        let ht = diversity_report(&pair.ht, DEFAULT_MTLD_THRESHOLD).map_err(|e| e.to_string())?;
        let mt = diversity_report(&pair.mt, DEFAULT_MTLD_THRESHOLD).map_err(|e| e.to_string())?;
        let lower = |a: Option<f64>, b: Option<f64>| matches!((a, b), (Some(m), Some(h)) if m < h);
        ensure(lower(mt.yules_i, ht.yules_i), || {
            format!("seed {seed}: Yule's I {:?} vs {:?}", mt.yules_i, ht.yules_i)
        })?;
        ensure(mt.ttr < ht.ttr, || format!("seed {seed}: TTR"))?;
        ensure(lower(mt.mtld, ht.mtld), || {
            format!("seed {seed}: MTLD {:?} vs {:?}", mt.mtld, ht.mtld)
        })?;
        let c = classify_corpora(
            &build_vocab_profile(&pair.ht).map_err(|e| e.to_string())?,
            &build_vocab_profile(&pair.mt).map_err(|e| e.to_string())?,
            &BiasClassConfig::default(),
        )
        .map_err(|e| e.to_string())?;
        let (mz, pz) = (c.counts[BiasClass::MZ], c.counts[BiasClass::PZ]);
        ensure(mz >= pz, || format!("seed {seed}: -0 {mz} < +0 {pz}"))?;
        details.push(format!(
            "seed {seed}: TTRx1000 {:.1}->{:.1}, -0 {mz} >= +0 {pz}",
            ht.ttr_scaled, mt.ttr_scaled
        ));
    }
    Ok(details.join("; "))
}

fn criterion_8() -> Outcome {
    let mut sets_checked = 0;
    for seed in SYNTH_SEEDS {
        let pair = synth(seed);
        for set in &pair.variant_sets {
            let profile = variant_profile(&[&pair.ht, &pair.mt], set);
            let ht = profile.corpus(pair.ht.label()).ok_or("missing HT")?;
            let mt = profile.corpus(pair.mt.label()).ok_or("missing MT")?;
            let top = ht
                .counts
                .iter()
                .fold(
                    None::<&lexbias::variants::VariantCount>,
                    |best, c| match best {
                        Some(b) if b.raw_count >= c.raw_count => Some(b),
                        _ => Some(c),
                    },
                )
                .ok_or("empty set")?;
            let (h, m) = (
                ht.relative_frequency(&top.variant),
                mt.relative_frequency(&top.variant),
            );
            ensure(m > h, || {
                format!(
                    "seed {seed}, {}: {} HT {h} vs MT {m}",
                    set.source_word, top.variant
                )
            })?;
            sets_checked += 1;
        }
    }
    Ok(format!(
        "{sets_checked} planted sets over {} seeds",
        SYNTH_SEEDS.len()
    ))
}

/// Peak resident set of a running process, polled until it exits.
fn run_with_peak_rss(
    mut cmd: Command,
) -> Result<(std::process::ExitStatus, u64, Duration), String> {
    let start = Instant::now();
    let mut child = cmd.spawn().map_err(|e| e.to_string())?;
    let status_path = format!("/proc/{}/status", child.id());
    let mut peak_kb = 0;
    loop {
        if let Ok(status) = fs::read_to_string(&status_path) {
            if let Some(kb) = status
                .lines()
                .find_map(|l| l.strip_prefix("VmHWM:"))
                .and_then(|v| v.trim().trim_end_matches("kB").trim().parse::<u64>().ok())
            {
                peak_kb = peak_kb.max(kb);
            }
        }
        if let Some(status) = child.try_wait().map_err(|e| e.to_string())? {
            return Ok((status, peak_kb, start.elapsed()));
        }
        std::thread::sleep(Duration::from_millis(20));
    }
}

fn criterion_9() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let synth = Synthesizer::new(SynthConfig {
        sentences: 500_000,
        concepts: 200_000,
        variant_groups: 200,
        seed: 9,
        ..Default::default()
    });
    let create = |n: &str| fs::File::create(dir.path().join(n)).map_err(|e| e.to_string());
    synth
        .write(create("ht.txt")?, create("mt.txt")?, create("sets.json")?)
        .map_err(|e| e.to_string())?;
    fs::write(
        dir.path().join("bundle.json"),
        r#"{
  "reference": {"label": "HT", "path": "ht.txt"},
  "systems": [{"label": "MT", "path": "mt.txt"}],
  "variant_sets": "sets.json",
  "significance": {"metric": "ttr", "iterations": 100, "seed": 1}
}"#,
    )
    .map_err(|e| e.to_string())?;
    let tokens: usize = fs::read(dir.path().join("ht.txt"))
        .map_err(|e| e.to_string())?
        .split(|&b| b == b'\n' || b == b' ')
        .filter(|t| !t.is_empty())
        .count();
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_lexbias"));
    cmd.current_dir(dir.path())
        .args(["report", "--config", "bundle.json", "--out", "out"]);
    let (status, peak_kb, elapsed) = run_with_peak_rss(cmd)?;
    ensure(status.success(), || format!("report exited with {status}"))?;
    let peak_mb = peak_kb / 1024;

    let mut ld = Command::new(env!("CARGO_BIN_EXE_lexbias"));
    ld.current_dir(dir.path())
        .args(["ld", "ht.txt", "--output", "ld.json"]);
    let (ld_status, ld_peak_kb, ld_elapsed) = run_with_peak_rss(ld)?;
    ensure(ld_status.success(), || {
        format!("ld exited with {ld_status}")
    })?;

    let detail = format!(
        "500000 sentences / {:.1}M tokens per file; report (HT + MT + variants + 100-iteration bootstrap) {elapsed:.1?}, peak RSS {peak_mb} MB; streaming ld {ld_elapsed:.1?}, peak RSS {} MB",
        tokens as f64 / 1e6,
        ld_peak_kb / 1024
    );
    ensure(elapsed < Duration::from_secs(120) && peak_mb < 2048, || {
        detail.clone()
    })?;
    Ok(detail)
}

fn main() {
    let criteria: [Criterion; 9] = [
        (1, "metric oracle equivalence", criterion_1, true),
        (2, "hand-derived fixtures", criterion_2, true),
        (3, "partition and mass balance", criterion_3, true),
        (4, "probability conservation", criterion_4, true),
        (5, "bootstrap behavior", criterion_5, true),
        (6, "split determinism", criterion_6, true),
        (7, "greedy-decoding diversity loss", criterion_7, true),
        (8, "variant exacerbation", criterion_8, true),
        (9, "throughput (soft)", criterion_9, false),
    ];
    let mut hard_failures = 0;
    for (n, name, check, hard) in criteria {
        match check() {
            Ok(detail) => println!("PASS criterion {n} ({name}): {detail}"),
            Err(detail) => {
                println!("FAIL criterion {n} ({name}): {detail}");
                if hard {
                    hard_failures += 1;
                }
            }
        }
    }
    if hard_failures > 0 {
        std::process::exit(1);
    }
}
