//! Prefix/root/suffix segmentation.
//!
//! Any [`Segmenter`] can feed the morpheme features. Two are provided: a
//! transparent affix-stripping baseline trained from a word-frequency
//! vocabulary ([`SegmenterModel`]), and a lexicon read from an external
//! segmentation file ([`SegmentationLexicon`]).
//!
//! Lengths are measured in Unicode scalar values of the NFC form.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::num::Scalar;
use crate::script::normalize_word;

#[derive(Debug, Error)]
pub enum MorphologyError {
    #[error("vocabulary is empty")]
    EmptyVocabulary,
    #[error("affix {affix:?} has non-positive score")]
    NonPositiveScore { affix: String },
    #[error("minimum stem length must be at least 2, got {0}")]
    StemTooShort(usize),
    #[error("root must be non-empty")]
    EmptyRoot,
    #[error("segment must be non-empty")]
    EmptySegment,
    #[error("predicted and gold word sets differ")]
    KeyMismatch,
    #[error("no words to evaluate")]
    NothingToEvaluate,
    #[error("segmentation of {word:?} does not concatenate back to the word")]
    ConcatenationMismatch { word: String },
    #[error("{}:{line}: {reason}", .path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        reason: String,
    },
    #[error("reading {}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

fn char_len(s: &str) -> usize {
    s.chars().count()
}

/// Split of a word into prefixes, a root and suffixes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Segmentation {
    prefixes: Vec<String>,
    root: String,
    suffixes: Vec<String>,
}

impl Segmentation {
    pub fn new(
        prefixes: Vec<String>,
        root: impl Into<String>,
        suffixes: Vec<String>,
    ) -> Result<Segmentation, MorphologyError> {
        let root = root.into();
        if root.is_empty() {
            return Err(MorphologyError::EmptyRoot);
        }
        if prefixes.iter().chain(&suffixes).any(String::is_empty) {
            return Err(MorphologyError::EmptySegment);
        }
        Ok(Segmentation {
            prefixes,
            root,
            suffixes,
        })
    }

    /// Unsegmented word.
    pub fn root_only(word: impl Into<String>) -> Segmentation {
        Segmentation {
            prefixes: Vec::new(),
            root: word.into(),
            suffixes: Vec::new(),
        }
    }

    pub fn prefixes(&self) -> &[String] {
        &self.prefixes
    }

    pub fn root(&self) -> &str {
        &self.root
    }

    pub fn suffixes(&self) -> &[String] {
        &self.suffixes
    }

    /// Number of segments, root included.
    pub fn segment_length(&self) -> usize {
        self.prefixes.len() + 1 + self.suffixes.len()
    }

    /// Segments in surface order.
    pub fn segments(&self) -> impl Iterator<Item = &str> {
        self.prefixes
            .iter()
            .map(String::as_str)
            .chain(std::iter::once(self.root.as_str()))
            .chain(self.suffixes.iter().map(String::as_str))
    }

    pub fn word(&self) -> String {
        self.segments().collect()
    }

    /// Character offsets of the internal segment boundaries.
    pub fn boundaries(&self) -> BTreeSet<usize> {
        let mut offset = 0;
        let mut out = BTreeSet::new();
        let n = self.segment_length();
        for (i, seg) in self.segments().enumerate() {
            offset += char_len(seg);
            if i + 1 < n {
                out.insert(offset);
            }
        }
        out
    }

    /// Line format of segmentation files: `pre+<root>+suf`.
    pub fn to_field(&self) -> String {
        let mut parts: Vec<String> = self.prefixes.clone();
        parts.push(format!("<{}>", self.root));
        parts.extend(self.suffixes.iter().cloned());
        parts.join("+")
    }

    fn parse_field(field: &str) -> Result<Segmentation, String> {
        let mut prefixes = Vec::new();
        let mut suffixes = Vec::new();
        let mut root: Option<String> = None;
        for part in field.split('+') {
            if let Some(inner) = part.strip_prefix('<').and_then(|p| p.strip_suffix('>')) {
                if root.is_some() {
                    return Err("more than one bracketed root".into());
                }
                if inner.is_empty() {
                    return Err("empty root".into());
                }
                root = Some(normalize_word(inner));
            } else if part.is_empty() {
                return Err("empty segment".into());
            } else if part.contains(['<', '>']) {
                return Err(format!("malformed segment {part:?}"));
            } else if root.is_none() {
                prefixes.push(normalize_word(part));
            } else {
                suffixes.push(normalize_word(part));
            }
        }
        let root = root.ok_or_else(|| "no bracketed root".to_string())?;
        Ok(Segmentation {
            prefixes,
            root,
            suffixes,
        })
    }
}

/// Anything that can split a word into segments.
pub trait Segmenter {
    fn segment(&self, word: &str) -> Segmentation;
}

/// Limits on the baseline stripper.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StripLimits {
    pub min_stem_len: usize,
    pub min_affix_count: u32,
    pub max_affix_len: usize,
    pub max_prefixes: usize,
    pub max_suffixes: usize,
}

impl Default for StripLimits {
    fn default() -> Self {
        StripLimits {
            min_stem_len: 2,
            min_affix_count: 2,
            max_affix_len: 4,
            max_prefixes: 2,
            max_suffixes: 3,
        }
    }
}

/// Affix inventory with scores plus the vocabulary it was trained on.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SegmenterModel {
    prefixes: BTreeMap<String, u32>,
    suffixes: BTreeMap<String, u32>,
    vocabulary: BTreeMap<String, u64>,
    limits: StripLimits,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Side {
    Prefix,
    Suffix,
}

impl SegmenterModel {
    pub fn new(
        prefixes: BTreeMap<String, u32>,
        suffixes: BTreeMap<String, u32>,
        vocabulary: BTreeMap<String, u64>,
        limits: StripLimits,
    ) -> Result<SegmenterModel, MorphologyError> {
        if limits.min_stem_len < 2 {
            return Err(MorphologyError::StemTooShort(limits.min_stem_len));
        }
        if let Some((affix, _)) = prefixes.iter().chain(&suffixes).find(|(_, &s)| s == 0) {
            return Err(MorphologyError::NonPositiveScore {
                affix: affix.clone(),
            });
        }
        Ok(SegmenterModel {
            prefixes,
            suffixes,
            vocabulary,
            limits,
        })
    }

    pub fn prefixes(&self) -> &BTreeMap<String, u32> {
        &self.prefixes
    }

    pub fn suffixes(&self) -> &BTreeMap<String, u32> {
        &self.suffixes
    }

    pub fn vocabulary(&self) -> &BTreeMap<String, u64> {
        &self.vocabulary
    }

    pub fn limits(&self) -> StripLimits {
        self.limits
    }

    /// Affixes of `side` that can be stripped from `stem`, best first:
    /// higher score, then longer affix, then lexicographically smaller.
    fn candidates<'a>(&'a self, stem: &str, side: Side) -> Vec<(&'a str, String)> {
        let table = match side {
            Side::Prefix => &self.prefixes,
            Side::Suffix => &self.suffixes,
        };
        let chars: Vec<char> = stem.chars().collect();
        let mut found: Vec<(&str, u32, String)> = Vec::new();
        let max = self
            .limits
            .max_affix_len
            .min(chars.len().saturating_sub(self.limits.min_stem_len));
        for len in 1..=max {
            let (affix, rest): (String, String) = match side {
                Side::Suffix => (
                    chars[chars.len() - len..].iter().collect(),
                    chars[..chars.len() - len].iter().collect(),
                ),
                Side::Prefix => (chars[..len].iter().collect(), chars[len..].iter().collect()),
            };
            if let Some((key, &score)) = table.get_key_value(&affix) {
                found.push((key.as_str(), score, rest));
            }
        }
        found.sort_by(|a, b| {
            b.1.cmp(&a.1)
                .then_with(|| char_len(b.0).cmp(&char_len(a.0)))
                .then_with(|| a.0.cmp(b.0))
        });
        found.into_iter().map(|(a, _, rest)| (a, rest)).collect()
    }

    /// Whether some sequence of further strips starting at `stem` reaches a
    /// vocabulary word (the stem itself counts).
    fn rooted(
        &self,
        stem: &str,
        suffixes_used: usize,
        prefixes_used: usize,
        memo: &mut HashMap<(String, usize, usize), bool>,
    ) -> bool {
        if self.vocabulary.contains_key(stem) {
            return true;
        }
        let key = (stem.to_string(), suffixes_used, prefixes_used);
        if let Some(&r) = memo.get(&key) {
            return r;
        }
        let mut result = false;
        // suffix moves stay available only until the first prefix is taken
        if prefixes_used == 0 && suffixes_used < self.limits.max_suffixes {
            result = self
                .candidates(stem, Side::Suffix)
                .iter()
                .any(|(_, rest)| self.rooted(rest, suffixes_used + 1, 0, memo));
        }
        if !result && prefixes_used < self.limits.max_prefixes {
            result = self
                .candidates(stem, Side::Prefix)
                .iter()
                .any(|(_, rest)| self.rooted(rest, suffixes_used, prefixes_used + 1, memo));
        }
        memo.insert(key, result);
        result
    }
}

impl Segmenter for SegmenterModel {
    /// Greedy stripping: suffixes first, then prefixes, each step taking the
    /// best-ranked affix whose remainder is long enough and still leads to a
    /// vocabulary word.
    fn segment(&self, word: &str) -> Segmentation {
        let word = normalize_word(word);
        let mut memo = HashMap::new();
        let mut stem = word.clone();
        let mut suffixes: Vec<String> = Vec::new();
        let mut prefixes: Vec<String> = Vec::new();

        while suffixes.len() < self.limits.max_suffixes {
            let pick = self
                .candidates(&stem, Side::Suffix)
                .into_iter()
                .find(|(_, rest)| self.rooted(rest, suffixes.len() + 1, 0, &mut memo));
            match pick {
                Some((affix, rest)) => {
                    suffixes.push(affix.to_string());
                    stem = rest;
                }
                None => break,
            }
        }
        while prefixes.len() < self.limits.max_prefixes {
            let pick = self
                .candidates(&stem, Side::Prefix)
                .into_iter()
                .find(|(_, rest)| self.rooted(rest, suffixes.len(), prefixes.len() + 1, &mut memo));
            match pick {
                Some((affix, rest)) => {
                    prefixes.push(affix.to_string());
                    stem = rest;
                }
                None => break,
            }
        }
        suffixes.reverse();
        Segmentation {
            prefixes,
            root: stem,
            suffixes,
        }
    }
}

/// Learns affixes from a vocabulary.
///
/// A suffix `s` is admitted when at least `min_affix_count` distinct words
/// `x·s` exist whose stem `x` is itself in the vocabulary and at least
/// `min_stem_len` long; its score is that number of stems. Prefixes are
/// symmetric.
pub fn train_baseline(
    vocabulary: &BTreeMap<String, u64>,
    limits: StripLimits,
) -> Result<SegmenterModel, MorphologyError> {
    if vocabulary.is_empty() {
        return Err(MorphologyError::EmptyVocabulary);
    }
    if limits.min_stem_len < 2 {
        return Err(MorphologyError::StemTooShort(limits.min_stem_len));
    }
    let mut suffix_support: BTreeMap<String, u32> = BTreeMap::new();
    let mut prefix_support: BTreeMap<String, u32> = BTreeMap::new();
    for word in vocabulary.keys() {
        let chars: Vec<char> = word.chars().collect();
        let n = chars.len();
        for len in 1..=limits
            .max_affix_len
            .min(n.saturating_sub(limits.min_stem_len))
        {
            let stem: String = chars[..n - len].iter().collect();
            if vocabulary.contains_key(&stem) {
                *suffix_support
                    .entry(chars[n - len..].iter().collect())
                    .or_default() += 1;
            }
            let stem: String = chars[len..].iter().collect();
            if vocabulary.contains_key(&stem) {
                *prefix_support
                    .entry(chars[..len].iter().collect())
                    .or_default() += 1;
            }
        }
    }
    let admit = |m: BTreeMap<String, u32>| -> BTreeMap<String, u32> {
        m.into_iter()
            .filter(|&(_, c)| c >= limits.min_affix_count.max(1))
            .collect()
    };
    SegmenterModel::new(
        admit(prefix_support),
        admit(suffix_support),
        vocabulary.clone(),
        limits,
    )
}

/// Segmentations supplied by an external tool. Words missing from the
/// lexicon are left unsegmented.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SegmentationLexicon {
    entries: BTreeMap<String, Segmentation>,
}

impl SegmentationLexicon {
    pub fn new(entries: BTreeMap<String, Segmentation>) -> Self {
        SegmentationLexicon { entries }
    }

    pub fn load(path: &Path) -> Result<Self, MorphologyError> {
        load_segmentation_file(path).map(SegmentationLexicon::new)
    }

    pub fn entries(&self) -> &BTreeMap<String, Segmentation> {
        &self.entries
    }

    pub fn contains(&self, word: &str) -> bool {
        self.entries.contains_key(&normalize_word(word))
    }
}

impl Segmenter for SegmentationLexicon {
    fn segment(&self, word: &str) -> Segmentation {
        let word = normalize_word(word);
        self.entries
            .get(&word)
            .cloned()
            .unwrap_or_else(|| Segmentation::root_only(word))
    }
}

/// Parses the text of a segmentation file (`word<TAB>pre+<root>+suf` per
/// line, blank lines ignored).
pub fn parse_segmentations(
    text: &str,
    path: &Path,
) -> Result<BTreeMap<String, Segmentation>, MorphologyError> {
    let mut out = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let err = |reason: String| MorphologyError::Parse {
            path: path.to_path_buf(),
            line,
            reason,
        };
        let raw = raw.trim_end_matches('\r');
        if raw.trim().is_empty() {
            continue;
        }
        let (word, field) = raw
            .split_once('\t')
            .ok_or_else(|| err("expected word<TAB>segmentation".into()))?;
        let word = normalize_word(word.trim());
        if word.is_empty() {
            return Err(err("empty word".into()));
        }
        let seg = Segmentation::parse_field(field.trim()).map_err(err)?;
        if seg.word() != word {
            return Err(err(format!(
                "segments {:?} do not concatenate to {word:?}",
                seg.to_field()
            )));
        }
        out.insert(word, seg);
    }
    Ok(out)
}

pub fn load_segmentation_file(
    path: &Path,
) -> Result<BTreeMap<String, Segmentation>, MorphologyError> {
    let text = fs::read_to_string(path).map_err(|source| MorphologyError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_segmentations(&text, path)
}

/// Boundary-based scores of a segmenter against gold data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalReport<T> {
    pub accuracy: T,
    pub precision: T,
    pub recall: T,
    pub fscore: T,
}

/// Scores predicted segmentations against gold ones.
///
/// Boundaries are the character offsets between segments. Precision and
/// recall are pooled over all words. Precision is 1 when nothing is
/// predicted, recall is 1 when the gold data has no boundaries.
pub fn evaluate<T: Scalar>(
    predicted: &BTreeMap<String, Segmentation>,
    gold: &BTreeMap<String, Segmentation>,
) -> Result<EvalReport<T>, MorphologyError> {
    if gold.is_empty() {
        return Err(MorphologyError::NothingToEvaluate);
    }
    if !predicted.keys().eq(gold.keys()) {
        return Err(MorphologyError::KeyMismatch);
    }
    let (mut exact, mut hits, mut n_pred, mut n_gold) = (0u64, 0u64, 0u64, 0u64);
    for ((word, p), g) in predicted.iter().zip(gold.values()) {
        if p.word() != g.word() {
            return Err(MorphologyError::ConcatenationMismatch { word: word.clone() });
        }
        let pb = p.boundaries();
        let gb = g.boundaries();
        if pb == gb {
            exact += 1;
        }
        hits += pb.intersection(&gb).count() as u64;
        n_pred += pb.len() as u64;
        n_gold += gb.len() as u64;
    }
    let frac = |num: u64, den: u64| {
        if den == 0 {
            T::one()
        } else {
            T::ratio(num, den)
        }
    };
    let precision = frac(hits, n_pred);
    let recall = frac(hits, n_gold);
    let sum = precision + recall;
    let fscore = if sum == T::zero() {
        T::zero()
    } else {
        (T::one() + T::one()) * precision * recall / sum
    };
    Ok(EvalReport {
        accuracy: T::ratio(exact, gold.len() as u64),
        precision,
        recall,
        fscore,
    })
}
