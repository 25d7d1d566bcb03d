//! Frequency exacerbation and decay of reference words in MT output.
//!
//! Every type of the human-translated reference (HT) is placed in one of six
//! classes according to whether it is frequent in the HT and whether its
//! probability in the MT output went up, went down, or dropped to zero.
//! Probabilities come from length-weighted [`VocabProfile`]s. Types found
//! only in the MT output are reported separately as novel words.

use std::fmt;

use serde::ser::SerializeMap;
use serde::{Deserialize, Serialize, Serializer};

use crate::corpus::VocabProfile;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BiasClass {
    /// Frequent in HT, more frequent in MT (`+ +`).
    PP,
    /// Frequent in HT, less frequent (but present) in MT (`+ -`).
    PM,
    /// Non-frequent in HT, more frequent in MT (`- +`).
    MP,
    /// Non-frequent in HT, less frequent (but present) in MT (`- -`).
    MM,
    /// Frequent in HT, absent from MT (`+ 0`).
    PZ,
    /// Non-frequent in HT, absent from MT (`- 0`).
    MZ,
}

impl BiasClass {
    pub const ALL: [BiasClass; 6] = [
        BiasClass::PP,
        BiasClass::PM,
        BiasClass::MP,
        BiasClass::MM,
        BiasClass::PZ,
        BiasClass::MZ,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            BiasClass::PP => "++",
            BiasClass::PM => "+-",
            BiasClass::MP => "-+",
            BiasClass::MM => "--",
            BiasClass::PZ => "+0",
            BiasClass::MZ => "-0",
        }
    }

    fn index(self) -> usize {
        self as usize
    }

    /// Classes whose members gained probability mass in the MT output.
    pub fn is_increase(self) -> bool {
        matches!(self, BiasClass::PP | BiasClass::MP)
    }
}

impl fmt::Display for BiasClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

/// One value per [`BiasClass`]; serialized as a map keyed by class symbol.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ClassTable<T>([T; 6]);

impl<T: Copy> ClassTable<T> {
    pub fn get(&self, class: BiasClass) -> T {
        self.0[class.index()]
    }

    pub fn iter(&self) -> impl Iterator<Item = (BiasClass, T)> + '_ {
        BiasClass::ALL.iter().map(move |&c| (c, self.0[c.index()]))
    }
}

impl<T> std::ops::Index<BiasClass> for ClassTable<T> {
    type Output = T;
    fn index(&self, class: BiasClass) -> &T {
        &self.0[class.index()]
    }
}

impl<T> std::ops::IndexMut<BiasClass> for ClassTable<T> {
    fn index_mut(&mut self, class: BiasClass) -> &mut T {
        &mut self.0[class.index()]
    }
}

impl<T: Serialize> Serialize for ClassTable<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(6))?;
        for c in BiasClass::ALL {
            map.serialize_entry(c.symbol(), &self.0[c.index()])?;
        }
        map.end()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdRule {
    /// A word is frequent iff its HT probability exceeds the mean HT
    /// probability, which is `1 / |V_HT|`.
    #[default]
    HtMean,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BiasClassConfig {
    pub threshold_rule: ThresholdRule,
    /// Multiplier applied to accumulated probability differences.
    pub diff_scale: f64,
}

impl Default for BiasClassConfig {
    fn default() -> Self {
        BiasClassConfig {
            threshold_rule: ThresholdRule::HtMean,
            diff_scale: 1e4,
        }
    }
}

/// Relative tolerance under which two probabilities count as equal. Ties are
/// common with small counts (a word at exactly `1 / |V_HT|`, or with the same
/// share in both texts), and the normalized probabilities carry rounding
/// noise that would otherwise decide the class at random.
pub const TIE_TOLERANCE: f64 = 1e-9;

fn exceeds(a: f64, b: f64) -> bool {
    a > b * (1.0 + TIE_TOLERANCE)
}

/// Classifies one HT word.
///
/// `p_mt == p_ht` counts as a decrease: it contributes nothing to the
/// accumulated differences either way, and keeping it inside the six classes
/// keeps the partition exact. A word exactly at the threshold is non-frequent.
/// Both comparisons treat values within [`TIE_TOLERANCE`] as equal.
pub fn classify_word(p_ht: f64, p_mt: f64, threshold: f64) -> Result<BiasClass> {
    if p_ht.is_nan() || p_ht <= 0.0 {
        return Err(Error::Domain(format!(
            "HT probability must be positive, got {p_ht}; words absent from the HT are novel words"
        )));
    }
    if p_mt.is_nan() || p_mt < 0.0 {
        return Err(Error::Domain(format!(
            "MT probability must be non-negative, got {p_mt}"
        )));
    }
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(Error::Domain(format!(
            "threshold must lie in (0, 1], got {threshold}"
        )));
    }
    let frequent = exceeds(p_ht, threshold);
    Ok(match (frequent, p_mt) {
        (true, 0.0) => BiasClass::PZ,
        (false, 0.0) => BiasClass::MZ,
        (true, m) if exceeds(m, p_ht) => BiasClass::PP,
        (false, m) if exceeds(m, p_ht) => BiasClass::MP,
        (true, _) => BiasClass::PM,
        (false, _) => BiasClass::MM,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BiasClassification {
    pub counts: ClassTable<u64>,
    /// Counts divided by `|V_HT|`.
    pub counts_normalized: ClassTable<f64>,
    /// Sum of `|p_MT(w) - p_HT(w)| * diff_scale` over each class.
    pub acc_diffs: ClassTable<f64>,
    /// MT types that never occur in the HT.
    pub novel_count: u64,
    /// Sum of `p_MT(w) * diff_scale` over novel types.
    pub novel_mass: f64,
    pub threshold: f64,
    pub diff_scale: f64,
    pub ht_types: u64,
}

impl BiasClassification {
    /// Probability mass gained by HT words plus the mass of novel words.
    pub fn increase_mass(&self) -> f64 {
        self.acc_diffs[BiasClass::PP] + self.acc_diffs[BiasClass::MP] + self.novel_mass
    }

    /// Probability mass lost by HT words, including vanished ones.
    pub fn decrease_mass(&self) -> f64 {
        [BiasClass::PM, BiasClass::MM, BiasClass::PZ, BiasClass::MZ]
            .iter()
            .map(|&c| self.acc_diffs[c])
            .sum()
    }
}

fn threshold_for(ht: &VocabProfile, rule: ThresholdRule) -> f64 {
    match rule {
        ThresholdRule::HtMean => {
            let total: f64 = ht.iter().map(|(_, e)| e.probability).sum();
            total / ht.type_count() as f64
        }
    }
}

pub fn classify_corpora(
    ht: &VocabProfile,
    mt: &VocabProfile,
    config: &BiasClassConfig,
) -> Result<BiasClassification> {
    if ht.type_count() == 0 || mt.type_count() == 0 {
        return Err(Error::Domain(
            "cannot classify against an empty profile".into(),
        ));
    }
    if config.diff_scale.is_nan() || config.diff_scale <= 0.0 {
        return Err(Error::Domain(format!(
            "diff_scale must be positive, got {}",
            config.diff_scale
        )));
    }
    let threshold = threshold_for(ht, config.threshold_rule);
    let mut counts = ClassTable::<u64>::default();
    let mut acc_diffs = ClassTable::<f64>::default();
    for (form, entry) in ht.iter() {
        let p_mt = mt.probability(form);
        let class = classify_word(entry.probability, p_mt, threshold)?;
        counts[class] += 1;
        acc_diffs[class] += (p_mt - entry.probability).abs() * config.diff_scale;
    }
    let mut novel_count = 0;
    let mut novel_mass = 0.0;
    for (form, entry) in mt.iter() {
        if ht.get(form).is_none() {
            novel_count += 1;
            novel_mass += entry.probability * config.diff_scale;
        }
    }
    let n = ht.type_count() as f64;
    let mut counts_normalized = ClassTable::<f64>::default();
    for c in BiasClass::ALL {
        counts_normalized[c] = counts[c] as f64 / n;
    }
    Ok(BiasClassification {
        counts,
        counts_normalized,
        acc_diffs,
        novel_count,
        novel_mass,
        threshold,
        diff_scale: config.diff_scale,
        ht_types: ht.type_count() as u64,
    })
}

pub fn accumulated_differences(
    ht: &VocabProfile,
    mt: &VocabProfile,
    config: &BiasClassConfig,
) -> Result<ClassTable<f64>> {
    classify_corpora(ht, mt, config).map(|c| c.acc_diffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{build_vocab_profile, Corpus};
    use proptest::prelude::*;

    #[test]
    fn classify_word_examples() {
        assert_eq!(classify_word(0.4, 0.5, 0.2).unwrap(), BiasClass::PP);
        assert_eq!(classify_word(0.01, 0.0, 0.2).unwrap(), BiasClass::MZ);
        assert_eq!(classify_word(0.3, 0.3, 0.2).unwrap(), BiasClass::PM);
        assert_eq!(classify_word(0.3, 0.0, 0.2).unwrap(), BiasClass::PZ);
        assert_eq!(classify_word(0.1, 0.15, 0.2).unwrap(), BiasClass::MP);
        assert_eq!(classify_word(0.1, 0.05, 0.2).unwrap(), BiasClass::MM);
        // At the threshold a word is non-frequent.
        assert_eq!(classify_word(0.2, 0.25, 0.2).unwrap(), BiasClass::MP);
        assert!(matches!(
            classify_word(0.0, 0.1, 0.2),
            Err(Error::Domain(_))
        ));
    }

    fn profile(sents: &[&[&str]]) -> VocabProfile {
        build_vocab_profile(&Corpus::from_sentences("p", sents.iter().copied())).unwrap()
    }

    #[test]
    fn toy_pair() {
        // ht: a = 0.75, b = 0.25; mt: a = 1.0
        let ht = profile(&[&["a", "b"], &["a"]]);
        let mt = profile(&[&["a"]]);
        let c = classify_corpora(&ht, &mt, &BiasClassConfig::default()).unwrap();
        assert_eq!(c.threshold, 0.5);
        assert_eq!(c.counts[BiasClass::PP], 1);
        assert_eq!(c.counts[BiasClass::MZ], 1);
        assert_eq!(c.acc_diffs[BiasClass::PP], 0.25 * 1e4);
        assert_eq!(c.acc_diffs[BiasClass::MZ], 0.25 * 1e4);
        for cls in [BiasClass::PM, BiasClass::MP, BiasClass::MM, BiasClass::PZ] {
            assert_eq!(c.counts[cls], 0);
            assert_eq!(c.acc_diffs[cls], 0.0);
        }
        assert_eq!(c.increase_mass(), c.decrease_mass());
        assert_eq!(
            accumulated_differences(&ht, &mt, &BiasClassConfig::default()).unwrap(),
            c.acc_diffs
        );
    }

    #[test]
    fn identity_pair() {
        let ht = profile(&[&["a", "b", "c"], &["a", "a"], &["d"]]);
        let c = classify_corpora(&ht, &ht, &BiasClassConfig::default()).unwrap();
        assert!(c.acc_diffs.iter().all(|(_, d)| d == 0.0));
        assert_eq!(c.counts[BiasClass::PP] + c.counts[BiasClass::MP], 0);
        assert_eq!(c.counts[BiasClass::PZ] + c.counts[BiasClass::MZ], 0);
        assert_eq!(c.counts[BiasClass::PM] + c.counts[BiasClass::MM], 4);
        assert_eq!(c.novel_count, 0);
    }

    #[test]
    fn serializes_with_symbols() {
        let ht = profile(&[&["a", "b"], &["a"]]);
        let mt = profile(&[&["a", "z"]]);
        let c = classify_corpora(&ht, &mt, &BiasClassConfig::default()).unwrap();
        let v = serde_json::to_value(&c).unwrap();
        assert_eq!(v["counts"]["-0"], 1);
        assert_eq!(v["novel_count"], 1);
    }

    fn corpus_strategy() -> impl Strategy<Value = Vec<Vec<u8>>> {
        prop::collection::vec(prop::collection::vec(0u8..30, 1..10), 1..15)
    }

    fn to_profile(s: &[Vec<u8>]) -> VocabProfile {
        build_vocab_profile(&Corpus::from_sentences(
            "p",
            s.iter()
                .map(|x| x.iter().map(|t| format!("w{t}")).collect::<Vec<_>>()),
        ))
        .unwrap()
    }

    proptest! {
        #[test]
        fn adding_mt_occurrences_never_zeroes_an_increase(
            ht in corpus_strategy(),
            mt in corpus_strategy(),
            word in 0u8..30,
            at in any::<prop::sample::Index>(),
        ) {
            let ht_p = to_profile(&ht);
            let form = format!("w{word}");
            prop_assume!(ht_p.get(&form).is_some());
            let before = classify_corpora(&ht_p, &to_profile(&mt), &BiasClassConfig::default()).unwrap();
            let p_ht = ht_p.probability(&form);
            let class_before = classify_word(p_ht, to_profile(&mt).probability(&form), before.threshold).unwrap();
            // Replace one MT token by `word`, keeping sentence lengths.
            let mut mt2 = mt.clone();
            let flat: Vec<(usize, usize)> = mt2.iter().enumerate()
                .flat_map(|(i, s)| (0..s.len()).map(move |j| (i, j))).collect();
            let (i, j) = flat[at.index(flat.len())];
            mt2[i][j] = word;
            let class_after = classify_word(p_ht, to_profile(&mt2).probability(&form), before.threshold).unwrap();
            if matches!(class_before, BiasClass::PP | BiasClass::MP) {
                prop_assert!(!matches!(class_after, BiasClass::PZ | BiasClass::MZ));
            }
            prop_assert!(!matches!(class_after, BiasClass::PZ | BiasClass::MZ));
        }
    }
}
