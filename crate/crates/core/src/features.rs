//! Frequency tables, length distributions and the paired samples fed to the
//! two-sample tests.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::num::Scalar;
use crate::script::{units_key, ParsedWord};
use crate::syllable::Syllable;

/// Separator between the parts of a syllable or word n-gram key.
pub const KEY_SEPARATOR: char = ' ';

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FeatureError {
    #[error("n-gram order {order} is not available at the {level} level")]
    InvalidOrder { level: Level, order: u8 },
    #[error("frequency table is empty")]
    EmptyTable,
    #[error("length distribution is empty")]
    EmptyDistribution,
    #[error("lengths must be positive")]
    NonPositiveLength,
    #[error("tables differ in level or order: {0}/{1} vs {2}/{3}")]
    Incompatible(Level, u8, Level, u8),
    #[error("distributions differ in level: {0} vs {1}")]
    IncompatibleLevels(Level, Level),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Level {
    Character,
    Syllable,
    Morpheme,
    Word,
}

impl Level {
    /// Highest n-gram order computed at this level.
    pub fn max_order(self) -> u8 {
        match self {
            Level::Character => 3,
            Level::Syllable => 2,
            Level::Morpheme => 1,
            Level::Word => 2,
        }
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Level::Character => "character",
            Level::Syllable => "syllable",
            Level::Morpheme => "morpheme",
            Level::Word => "word",
        })
    }
}

/// The twelve feature families: n-gram frequencies and lengths at each
/// level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FeatureFamily {
    #[serde(rename = "char-1gram")]
    CharUnigram,
    #[serde(rename = "char-2gram")]
    CharBigram,
    #[serde(rename = "char-3gram")]
    CharTrigram,
    #[serde(rename = "char-length")]
    CharLength,
    #[serde(rename = "syllable-1gram")]
    SyllableUnigram,
    #[serde(rename = "syllable-2gram")]
    SyllableBigram,
    #[serde(rename = "syllable-length")]
    SyllableLength,
    #[serde(rename = "morpheme-1gram")]
    MorphemeUnigram,
    #[serde(rename = "segment-length")]
    SegmentLength,
    #[serde(rename = "word-1gram")]
    WordUnigram,
    #[serde(rename = "word-2gram")]
    WordBigram,
    #[serde(rename = "sentence-length")]
    SentenceLength,
}

impl FeatureFamily {
    pub const ALL: [FeatureFamily; 12] = [
        FeatureFamily::CharUnigram,
        FeatureFamily::CharBigram,
        FeatureFamily::CharTrigram,
        FeatureFamily::CharLength,
        FeatureFamily::SyllableUnigram,
        FeatureFamily::SyllableBigram,
        FeatureFamily::SyllableLength,
        FeatureFamily::MorphemeUnigram,
        FeatureFamily::SegmentLength,
        FeatureFamily::WordUnigram,
        FeatureFamily::WordBigram,
        FeatureFamily::SentenceLength,
    ];

    pub fn frequency_families() -> impl Iterator<Item = FeatureFamily> {
        Self::ALL.into_iter().filter(|f| f.order().is_some())
    }

    pub fn length_families() -> impl Iterator<Item = FeatureFamily> {
        Self::ALL.into_iter().filter(|f| f.order().is_none())
    }

    pub fn level(self) -> Level {
        use FeatureFamily::*;
        match self {
            CharUnigram | CharBigram | CharTrigram | CharLength => Level::Character,
            SyllableUnigram | SyllableBigram | SyllableLength => Level::Syllable,
            MorphemeUnigram | SegmentLength => Level::Morpheme,
            WordUnigram | WordBigram | SentenceLength => Level::Word,
        }
    }

    /// n-gram order, `None` for length families.
    pub fn order(self) -> Option<u8> {
        use FeatureFamily::*;
        match self {
            CharUnigram | SyllableUnigram | MorphemeUnigram | WordUnigram => Some(1),
            CharBigram | SyllableBigram | WordBigram => Some(2),
            CharTrigram => Some(3),
            CharLength | SyllableLength | SegmentLength | SentenceLength => None,
        }
    }

    pub fn frequency(level: Level, order: u8) -> Option<FeatureFamily> {
        Self::ALL
            .into_iter()
            .find(|f| f.level() == level && f.order() == Some(order))
    }

    pub fn length(level: Level) -> FeatureFamily {
        Self::ALL
            .into_iter()
            .find(|f| f.level() == level && f.order().is_none())
            .expect("every level has a length family")
    }

    /// Length comparisons are symmetric; frequency comparisons depend on
    /// which corpus supplies the ranking.
    pub fn is_symmetric(self) -> bool {
        self.order().is_none()
    }

    pub fn slug(self) -> &'static str {
        use FeatureFamily::*;
        match self {
            CharUnigram => "char-1gram",
            CharBigram => "char-2gram",
            CharTrigram => "char-3gram",
            CharLength => "char-length",
            SyllableUnigram => "syllable-1gram",
            SyllableBigram => "syllable-2gram",
            SyllableLength => "syllable-length",
            MorphemeUnigram => "morpheme-1gram",
            SegmentLength => "segment-length",
            WordUnigram => "word-1gram",
            WordBigram => "word-2gram",
            SentenceLength => "sentence-length",
        }
    }

    pub fn from_slug(slug: &str) -> Option<FeatureFamily> {
        Self::ALL.into_iter().find(|f| f.slug() == slug)
    }

    pub fn title(self) -> &'static str {
        use FeatureFamily::*;
        match self {
            CharUnigram => "Frequency of character uni-grams",
            CharBigram => "Frequency of character bi-grams",
            CharTrigram => "Frequency of character tri-grams",
            CharLength => "Word length in characters",
            SyllableUnigram => "Frequency of syllable uni-grams",
            SyllableBigram => "Frequency of syllable bi-grams",
            SyllableLength => "Word length in syllables",
            MorphemeUnigram => "Frequency of morpheme uni-grams",
            SegmentLength => "Word length in segments (morphemes plus root)",
            WordUnigram => "Frequency of word uni-grams",
            WordBigram => "Frequency of word bi-grams",
            SentenceLength => "Sentence length in words",
        }
    }
}

impl fmt::Display for FeatureFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.slug())
    }
}

/// How syllables and morphemes are counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CountMode {
    /// Every occurrence in every running word.
    #[default]
    Tokens,
    /// Once per distinct word type that contains the item.
    Types,
}

fn check_order(level: Level, order: u8) -> Result<(), FeatureError> {
    if (1..=level.max_order()).contains(&order) {
        Ok(())
    } else {
        Err(FeatureError::InvalidOrder { level, order })
    }
}

/// Occurrence counts of n-gram keys.
///
/// `total` is the number of occurrences counted. It equals the sum of
/// `counts` unless the table was truncated with [`FrequencyTable::retain_top`],
/// in which case the removed mass is kept in `dropped` so normalization still
/// divides by the full total.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrequencyTable {
    level: Level,
    order: u8,
    total: u64,
    #[serde(default, skip_serializing_if = "is_zero")]
    dropped: u64,
    counts: BTreeMap<String, u64>,
}

fn is_zero(v: &u64) -> bool {
    *v == 0
}

impl FrequencyTable {
    pub fn new(level: Level, order: u8) -> Result<FrequencyTable, FeatureError> {
        check_order(level, order)?;
        Ok(FrequencyTable {
            level,
            order,
            total: 0,
            dropped: 0,
            counts: BTreeMap::new(),
        })
    }

    /// Exact multiset count of a finite stream of keys.
    pub fn build<I, K>(items: I, level: Level, order: u8) -> Result<FrequencyTable, FeatureError>
    where
        I: IntoIterator<Item = K>,
        K: Into<String>,
    {
        let mut table = FrequencyTable::new(level, order)?;
        for item in items {
            table.add(item);
        }
        Ok(table)
    }

    pub fn level(&self) -> Level {
        self.level
    }

    pub fn order(&self) -> u8 {
        self.order
    }

    pub fn family(&self) -> FeatureFamily {
        FeatureFamily::frequency(self.level, self.order).expect("validated on construction")
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn counts(&self) -> &BTreeMap<String, u64> {
        &self.counts
    }

    pub fn count(&self, key: &str) -> u64 {
        self.counts.get(key).copied().unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    pub fn is_truncated(&self) -> bool {
        self.dropped > 0
    }

    pub fn add(&mut self, key: impl Into<String>) {
        self.add_n(key, 1);
    }

    pub fn add_n(&mut self, key: impl Into<String>, n: u64) {
        if n == 0 {
            return;
        }
        *self.counts.entry(key.into()).or_default() += n;
        self.total += n;
    }

    pub fn merge(&mut self, other: &FrequencyTable) -> Result<(), FeatureError> {
        if (self.level, self.order) != (other.level, other.order) {
            return Err(FeatureError::Incompatible(
                self.level,
                self.order,
                other.level,
                other.order,
            ));
        }
        for (k, &v) in &other.counts {
            *self.counts.entry(k.clone()).or_default() += v;
        }
        self.total += other.total;
        self.dropped += other.dropped;
        Ok(())
    }

    /// Relative frequency of `key`; zero when absent.
    pub fn normalize<T: Scalar>(&self, key: &str) -> Result<T, FeatureError> {
        if self.total == 0 {
            return Err(FeatureError::EmptyTable);
        }
        Ok(T::ratio(self.count(key), self.total))
    }

    /// Keys by descending count, ties broken by ascending key.
    pub fn ranked(&self) -> Vec<(&str, u64)> {
        let mut v: Vec<(&str, u64)> = self.counts.iter().map(|(k, &c)| (k.as_str(), c)).collect();
        v.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        v
    }

    /// Keeps only the `n` highest-ranked keys.
    pub fn retain_top(&mut self, n: usize) {
        if self.counts.len() <= n {
            return;
        }
        let keep: BTreeSet<String> = self
            .ranked()
            .into_iter()
            .take(n)
            .map(|(k, _)| k.to_string())
            .collect();
        let before: u64 = self.counts.values().sum();
        self.counts.retain(|k, _| keep.contains(k));
        let after: u64 = self.counts.values().sum();
        self.dropped += before - after;
    }
}

/// Histogram of positive lengths.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LengthDistribution {
    level: Level,
    counts: BTreeMap<u32, u64>,
}

impl LengthDistribution {
    pub fn new(level: Level) -> LengthDistribution {
        LengthDistribution {
            level,
            counts: BTreeMap::new(),
        }
    }

    pub fn build<I>(lengths: I, level: Level) -> Result<LengthDistribution, FeatureError>
    where
        I: IntoIterator<Item = usize>,
    {
        let mut d = LengthDistribution::new(level);
        for len in lengths {
            d.add_n(len, 1)?;
        }
        Ok(d)
    }

    pub fn level(&self) -> Level {
        self.level
    }

    pub fn family(&self) -> FeatureFamily {
        FeatureFamily::length(self.level)
    }

    pub fn counts(&self) -> &BTreeMap<u32, u64> {
        &self.counts
    }

    pub fn count(&self, length: u32) -> u64 {
        self.counts.get(&length).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn add_n(&mut self, length: usize, n: u64) -> Result<(), FeatureError> {
        if length == 0 {
            return Err(FeatureError::NonPositiveLength);
        }
        if n > 0 {
            let length = u32::try_from(length).map_err(|_| FeatureError::NonPositiveLength)?;
            *self.counts.entry(length).or_default() += n;
        }
        Ok(())
    }

    pub fn merge(&mut self, other: &LengthDistribution) -> Result<(), FeatureError> {
        if self.level != other.level {
            return Err(FeatureError::IncompatibleLevels(self.level, other.level));
        }
        for (&k, &v) in &other.counts {
            *self.counts.entry(k).or_default() += v;
        }
        Ok(())
    }
}

/// Where the keys of a paired sample came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Pairing {
    /// Top-K keys ranked in the first table.
    TopOfFirst,
    /// Union of the lengths seen in either distribution.
    LengthUnion,
}

/// Two aligned value vectors over a shared key list.
#[derive(Debug, Clone, PartialEq)]
pub struct PairedSample<K, T> {
    pub keys: Vec<K>,
    pub values1: Vec<T>,
    pub values2: Vec<T>,
    pub pairing: Pairing,
}

impl<K, T> PairedSample<K, T> {
    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }
}

/// Ranks the keys of `t1`, keeps the top `k`, and looks up the same keys in
/// both tables. Keys absent from `t2` get zero.
pub fn top_k_pair<T: Scalar>(
    t1: &FrequencyTable,
    t2: &FrequencyTable,
    k: usize,
) -> Result<PairedSample<String, T>, FeatureError> {
    if (t1.level, t1.order) != (t2.level, t2.order) {
        return Err(FeatureError::Incompatible(
            t1.level, t1.order, t2.level, t2.order,
        ));
    }
    if t1.is_empty() || t2.is_empty() {
        return Err(FeatureError::EmptyTable);
    }
    let keys: Vec<String> = t1
        .ranked()
        .into_iter()
        .take(k)
        .map(|(key, _)| key.to_string())
        .collect();
    let values1 = keys
        .iter()
        .map(|key| T::ratio(t1.count(key), t1.total))
        .collect();
    let values2 = keys
        .iter()
        .map(|key| T::ratio(t2.count(key), t2.total))
        .collect();
    Ok(PairedSample {
        keys,
        values1,
        values2,
        pairing: Pairing::TopOfFirst,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LengthMode {
    #[default]
    Relative,
    Raw,
}

/// Aligns two length distributions over the sorted union of their lengths.
pub fn length_pair<T: Scalar>(
    d1: &LengthDistribution,
    d2: &LengthDistribution,
    mode: LengthMode,
) -> Result<PairedSample<u32, T>, FeatureError> {
    if d1.level != d2.level {
        return Err(FeatureError::IncompatibleLevels(d1.level, d2.level));
    }
    if d1.is_empty() || d2.is_empty() {
        return Err(FeatureError::EmptyDistribution);
    }
    let keys: Vec<u32> = d1
        .counts
        .keys()
        .chain(d2.counts.keys())
        .copied()
        .collect::<BTreeSet<u32>>()
        .into_iter()
        .collect();
    let values = |d: &LengthDistribution| -> Vec<T> {
        let total = d.total();
        keys.iter()
            .map(|&len| match mode {
                LengthMode::Relative => T::ratio(d.count(len), total),
                LengthMode::Raw => T::from_count(d.count(len)),
            })
            .collect()
    };
    Ok(PairedSample {
        values1: values(d1),
        values2: values(d2),
        keys,
        pairing: Pairing::LengthUnion,
    })
}

/// All contiguous `n`-unit windows of a word, as keys. Never crosses the word
/// boundary.
pub fn char_ngrams(parsed: &ParsedWord, n: u8) -> Result<Vec<String>, FeatureError> {
    check_order(Level::Character, n)?;
    Ok(parsed.units().windows(n as usize).map(units_key).collect())
}

/// Contiguous windows over a word's syllables.
pub fn syllable_ngrams(syllables: &[Syllable], n: u8) -> Result<Vec<String>, FeatureError> {
    check_order(Level::Syllable, n)?;
    Ok(syllables
        .windows(n as usize)
        .map(|w| join_key(w.iter().map(Syllable::surface)))
        .collect())
}

/// Contiguous windows over the words of one sentence.
pub fn word_ngrams<S: AsRef<str>>(words: &[S], n: u8) -> Result<Vec<String>, FeatureError> {
    check_order(Level::Word, n)?;
    Ok(words
        .windows(n as usize)
        .map(|w| join_key(w.iter().map(|s| s.as_ref())))
        .collect())
}

fn join_key<'a>(parts: impl Iterator<Item = &'a str>) -> String {
    let mut out = String::new();
    for (i, p) in parts.enumerate() {
        if i > 0 {
            out.push(KEY_SEPARATOR);
        }
        out.push_str(p);
    }
    out
}
