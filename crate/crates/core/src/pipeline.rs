//! End-to-end orchestration: ingest corpora from local files, build
//! [`CorpusProfile`]s, and run every pairwise test over the feature grid.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use log::{debug, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;
use walkdir::WalkDir;

use crate::features::{
    char_ngrams, length_pair, syllable_ngrams, top_k_pair, word_ngrams, CountMode, FeatureError,
    FeatureFamily, FrequencyTable, LengthDistribution, LengthMode, Level,
};
use crate::ks::{ks_test_with, Alternative, KsError, KsOutcome, PValueMethod};
use crate::morphology::{
    train_baseline, MorphologyError, SegmentationLexicon, Segmenter, SegmenterModel, StripLimits,
};
use crate::script::parse_word;
use crate::syllable::{syllabify, SyllableMode};
use crate::tokenizer::{is_bengali_token, split_sentences, Sentence, TokenizerConfig};

pub const PROFILE_FORMAT_VERSION: u32 = 1;

/// Keys kept per frequency table when a profile is written to disk.
pub const DEFAULT_RETAINED_KEYS: usize = 5000;

pub const DEFAULT_TOP_K: usize = 50;
pub const DEFAULT_ALPHA: f64 = 0.05;

/// Broad error classes, used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    Io,
    Encoding,
    Config,
    Data,
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("{}: {source}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: invalid UTF-8 at byte offset {offset}", .path.display())]
    Encoding { path: PathBuf, offset: usize },
    #[error("configuration: {0}")]
    Config(String),
    #[error("corpus {0:?} contains no Bengali words")]
    CorpusEmpty(String),
    #[error("corpus {name:?}: {skipped} of {total} Bengali tokens could not be parsed")]
    TooManyUnparseable {
        name: String,
        skipped: u64,
        total: u64,
    },
    #[error("profile {name:?} was built with configuration {found}, expected {expected}")]
    StaleProfile {
        name: String,
        expected: String,
        found: String,
    },
    #[error("profile {}: {source}", .path.display())]
    ProfileFormat {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error(transparent)]
    Ks(#[from] KsError),
    #[error(transparent)]
    Morphology(#[from] MorphologyError),
    #[error("writing CSV: {0}")]
    Csv(#[from] csv::Error),
}

impl PipelineError {
    pub fn category(&self) -> ErrorCategory {
        match self {
            PipelineError::Io { .. } => ErrorCategory::Io,
            PipelineError::Encoding { .. } => ErrorCategory::Encoding,
            PipelineError::Config(_) => ErrorCategory::Config,
            PipelineError::Morphology(MorphologyError::Io { .. }) => ErrorCategory::Io,
            PipelineError::Morphology(MorphologyError::Parse { .. }) => ErrorCategory::Config,
            PipelineError::Csv(e) if e.is_io_error() => ErrorCategory::Io,
            _ => ErrorCategory::Data,
        }
    }
}

pub(crate) fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> PipelineError + '_ {
    move |source| PipelineError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// A named corpus and the files or directories it is read from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusSpec {
    pub name: String,
    pub paths: Vec<PathBuf>,
}

impl CorpusSpec {
    pub fn new(name: impl Into<String>, paths: Vec<PathBuf>) -> Result<Self, PipelineError> {
        let name = name.into();
        validate_name(&name)?;
        if paths.is_empty() {
            return Err(PipelineError::Config(format!(
                "corpus {name:?} has no paths"
            )));
        }
        Ok(CorpusSpec { name, paths })
    }

    /// Parses `NAME=PATH[,PATH...]`.
    pub fn parse(arg: &str) -> Result<Self, PipelineError> {
        let (name, paths) = arg
            .split_once('=')
            .ok_or_else(|| PipelineError::Config(format!("expected NAME=PATH, got {arg:?}")))?;
        let paths = paths
            .split(',')
            .filter(|p| !p.is_empty())
            .map(PathBuf::from)
            .collect();
        CorpusSpec::new(name.trim(), paths)
    }
}

fn validate_name(name: &str) -> Result<(), PipelineError> {
    let bad = name.is_empty()
        || name.starts_with('.')
        || name
            .chars()
            .any(|c| c.is_control() || matches!(c, '/' | '\\' | '=' | ',' | ':'));
    if bad {
        Err(PipelineError::Config(format!(
            "invalid corpus name {name:?}"
        )))
    } else {
        Ok(())
    }
}

/// Merges specs that share a name, keeping first-seen order.
pub fn merge_specs(specs: Vec<CorpusSpec>) -> Vec<CorpusSpec> {
    let mut out: Vec<CorpusSpec> = Vec::new();
    for spec in specs {
        match out.iter_mut().find(|s| s.name == spec.name) {
            Some(existing) => existing.paths.extend(spec.paths),
            None => out.push(spec),
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum SegmenterSource {
    /// Affix stripper trained on the pooled vocabulary of the run.
    Baseline,
    /// External segmentation file.
    File(PathBuf),
}

/// Settings that change the content of a profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileOptions {
    pub tokenizer: TokenizerConfig,
    pub count_mode: CountMode,
    pub segmenter: SegmenterSource,
    pub strip_limits: StripLimits,
    pub min_sentence_len: usize,
    pub count_foreign_words: bool,
    pub morpheme_count_roots: bool,
    pub retained_keys: usize,
    /// Fraction of Bengali tokens that may fail to parse before the corpus
    /// is rejected.
    pub max_skip_rate: f64,
}

impl Default for ProfileOptions {
    fn default() -> Self {
        ProfileOptions {
            tokenizer: TokenizerConfig::default(),
            count_mode: CountMode::Tokens,
            segmenter: SegmenterSource::Baseline,
            strip_limits: StripLimits::default(),
            min_sentence_len: 1,
            count_foreign_words: false,
            morpheme_count_roots: true,
            retained_keys: DEFAULT_RETAINED_KEYS,
            max_skip_rate: 0.5,
        }
    }
}

/// Settings that only affect the comparison stage.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompareOptions {
    pub top_k: usize,
    pub length_mode: LengthMode,
    pub alpha: f64,
    pub pvalue_method: PValueMethod,
}

impl Default for CompareOptions {
    fn default() -> Self {
        CompareOptions {
            top_k: DEFAULT_TOP_K,
            length_mode: LengthMode::Relative,
            alpha: DEFAULT_ALPHA,
            pvalue_method: PValueMethod::Asymptotic,
        }
    }
}

impl CompareOptions {
    pub fn validate(&self) -> Result<(), PipelineError> {
        if self.top_k == 0 {
            return Err(PipelineError::Config("top-k must be at least 1".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(PipelineError::Config(format!(
                "significance level must lie strictly between 0 and 1, got {}",
                self.alpha
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub corpora: Vec<CorpusSpec>,
    pub profile: ProfileOptions,
    pub compare: CompareOptions,
    pub output_dir: PathBuf,
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), PipelineError> {
        if self.corpora.len() < 2 {
            return Err(PipelineError::Config(
                "at least two corpora are required".into(),
            ));
        }
        check_unique(self.corpora.iter().map(|c| c.name.as_str()))?;
        self.compare.validate()
    }
}

fn check_unique<'a>(names: impl Iterator<Item = &'a str>) -> Result<(), PipelineError> {
    let mut seen = BTreeSet::new();
    for n in names {
        if !seen.insert(n) {
            return Err(PipelineError::Config(format!(
                "corpus name {n:?} used twice"
            )));
        }
    }
    Ok(())
}

/// Sentences read from one file.
#[derive(Debug, Clone)]
pub struct FileText {
    pub path: PathBuf,
    pub sentences: Vec<Sentence>,
}

#[derive(Debug, Clone)]
pub struct IngestedCorpus {
    pub name: String,
    pub files: Vec<FileText>,
}

impl IngestedCorpus {
    /// Bengali tokens across all files.
    pub fn word_count(&self) -> usize {
        self.files
            .iter()
            .flat_map(|f| &f.sentences)
            .flat_map(|s| s.tokens())
            .filter(|t| is_bengali_token(t))
            .count()
    }

    pub fn sentence_count(&self) -> usize {
        self.files.iter().map(|f| f.sentences.len()).sum()
    }
}

fn collect_files(spec: &CorpusSpec) -> Result<Vec<PathBuf>, PipelineError> {
    let mut files = Vec::new();
    for root in &spec.paths {
        let meta = fs::metadata(root).map_err(io_err(root))?;
        if meta.is_file() {
            files.push(root.clone());
            continue;
        }
        for entry in WalkDir::new(root).sort_by_file_name() {
            let entry = entry.map_err(|e| {
                let path = e.path().unwrap_or(root).to_path_buf();
                let source = e
                    .into_io_error()
                    .unwrap_or_else(|| std::io::Error::other("directory walk failed"));
                PipelineError::Io { path, source }
            })?;
            let hidden = entry.file_name().to_string_lossy().starts_with('.');
            if entry.file_type().is_file() && !hidden {
                files.push(entry.into_path());
            }
        }
    }
    Ok(files)
}

fn read_text(path: &Path) -> Result<String, PipelineError> {
    let bytes = fs::read(path).map_err(io_err(path))?;
    let text = String::from_utf8(bytes).map_err(|e| PipelineError::Encoding {
        path: path.to_path_buf(),
        offset: e.utf8_error().valid_up_to(),
    })?;
    Ok(match text.strip_prefix('\u{FEFF}') {
        Some(rest) => rest.to_string(),
        None => text,
    })
}

/// Reads every file of a corpus as UTF-8 and splits it into sentences.
/// Files are tokenized independently so no sentence spans two files.
pub fn ingest(
    spec: &CorpusSpec,
    tokenizer: &TokenizerConfig,
) -> Result<IngestedCorpus, PipelineError> {
    let paths = collect_files(spec)?;
    let files = paths
        .par_iter()
        .map(|path| {
            let text = read_text(path)?;
            Ok(FileText {
                path: path.clone(),
                sentences: split_sentences(&text, tokenizer),
            })
        })
        .collect::<Result<Vec<_>, PipelineError>>()?;
    let corpus = IngestedCorpus {
        name: spec.name.clone(),
        files,
    };
    if corpus.word_count() == 0 {
        return Err(PipelineError::CorpusEmpty(spec.name.clone()));
    }
    debug!(
        "ingested {:?}: {} files, {} sentences, {} words",
        spec.name,
        corpus.files.len(),
        corpus.sentence_count(),
        corpus.word_count()
    );
    Ok(corpus)
}

/// Corpus size figures.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusTotals {
    pub files: u64,
    pub sentences: u64,
    pub bengali_tokens: u64,
    pub parsed_tokens: u64,
    pub skipped_tokens: u64,
    pub foreign_tokens: u64,
    pub word_types: u64,
}

impl CorpusTotals {
    fn merge(&mut self, o: &CorpusTotals) {
        self.files += o.files;
        self.sentences += o.sentences;
        self.bengali_tokens += o.bengali_tokens;
        self.parsed_tokens += o.parsed_tokens;
        self.skipped_tokens += o.skipped_tokens;
        self.foreign_tokens += o.foreign_tokens;
    }
}

/// Word-level counts of a corpus (or part of one). Merging is associative and
/// commutative, so files can be counted independently.
#[derive(Debug, Clone, PartialEq)]
pub struct WordCounts {
    pub unigrams: FrequencyTable,
    pub bigrams: FrequencyTable,
    pub sentence_lengths: LengthDistribution,
    pub totals: CorpusTotals,
    pub skipped_examples: Vec<String>,
}

const MAX_SKIPPED_EXAMPLES: usize = 5;

impl WordCounts {
    pub fn new() -> Self {
        WordCounts {
            unigrams: FrequencyTable::new(Level::Word, 1).expect("valid grid cell"),
            bigrams: FrequencyTable::new(Level::Word, 2).expect("valid grid cell"),
            sentence_lengths: LengthDistribution::new(Level::Word),
            totals: CorpusTotals::default(),
            skipped_examples: Vec::new(),
        }
    }

    /// Counts one file's sentences.
    pub fn from_sentences(sentences: &[Sentence], opts: &ProfileOptions) -> Self {
        let mut counts = WordCounts::new();
        counts.totals.files = 1;
        for sentence in sentences {
            counts.add_sentence(sentence, opts);
        }
        counts
    }

    fn add_sentence(&mut self, sentence: &Sentence, opts: &ProfileOptions) {
        // None marks a dropped token; bigrams never bridge it
        let mut words: Vec<Option<String>> = Vec::with_capacity(sentence.word_length());
        let mut foreign = 0usize;
        for token in sentence.tokens() {
            if !is_bengali_token(token) {
                foreign += 1;
                words.push(None);
                continue;
            }
            self.totals.bengali_tokens += 1;
            match parse_word(token) {
                Ok(parsed) => {
                    self.totals.parsed_tokens += 1;
                    words.push(Some(parsed.surface().to_string()));
                }
                Err(e) => {
                    self.totals.skipped_tokens += 1;
                    if self.skipped_examples.len() < MAX_SKIPPED_EXAMPLES {
                        self.skipped_examples.push(format!("{token} ({e})"));
                    }
                    words.push(None);
                }
            }
        }
        self.totals.foreign_tokens += foreign as u64;
        for w in words.iter().flatten() {
            self.unigrams.add(w.as_str());
        }
        for run in words.split(Option::is_none) {
            let run: Vec<&str> = run.iter().flatten().map(String::as_str).collect();
            for key in word_ngrams(&run, 2).expect("valid order") {
                self.bigrams.add(key);
            }
        }
        let kept = words.iter().flatten().count();
        let length = if opts.count_foreign_words {
            kept + foreign
        } else {
            kept
        };
        if kept > 0 && length >= opts.min_sentence_len.max(1) {
            self.totals.sentences += 1;
            self.sentence_lengths
                .add_n(length, 1)
                .expect("length is positive");
        }
    }

    pub fn merge(&mut self, other: &WordCounts) -> Result<(), FeatureError> {
        self.unigrams.merge(&other.unigrams)?;
        self.bigrams.merge(&other.bigrams)?;
        self.sentence_lengths.merge(&other.sentence_lengths)?;
        self.totals.merge(&other.totals);
        for ex in &other.skipped_examples {
            if self.skipped_examples.len() < MAX_SKIPPED_EXAMPLES {
                self.skipped_examples.push(ex.clone());
            }
        }
        Ok(())
    }

    pub fn from_corpus(
        corpus: &IngestedCorpus,
        opts: &ProfileOptions,
    ) -> Result<Self, FeatureError> {
        let parts: Vec<WordCounts> = corpus
            .files
            .par_iter()
            .map(|f| WordCounts::from_sentences(&f.sentences, opts))
            .collect();
        let mut total = WordCounts::new();
        for p in &parts {
            total.merge(p)?;
        }
        Ok(total)
    }
}

impl Default for WordCounts {
    fn default() -> Self {
        Self::new()
    }
}

/// All distributions of one corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusProfile {
    pub format_version: u32,
    pub name: String,
    pub fingerprint: String,
    pub count_mode: CountMode,
    pub totals: CorpusTotals,
    pub frequencies: BTreeMap<FeatureFamily, FrequencyTable>,
    pub lengths: BTreeMap<FeatureFamily, LengthDistribution>,
}

impl CorpusProfile {
    pub fn frequency(&self, family: FeatureFamily) -> Option<&FrequencyTable> {
        self.frequencies.get(&family)
    }

    pub fn length(&self, family: FeatureFamily) -> Option<&LengthDistribution> {
        self.lengths.get(&family)
    }

    /// Number of feature families present.
    pub fn family_count(&self) -> usize {
        self.frequencies.len() + self.lengths.len()
    }

    /// Adds another profile's counts into this one. Only meaningful for
    /// token counting; type counts are not additive.
    pub fn merge(&mut self, other: &CorpusProfile) -> Result<(), PipelineError> {
        if self.fingerprint != other.fingerprint {
            return Err(PipelineError::StaleProfile {
                name: other.name.clone(),
                expected: self.fingerprint.clone(),
                found: other.fingerprint.clone(),
            });
        }
        if self.count_mode != CountMode::Tokens {
            return Err(PipelineError::Config(
                "profiles counted by word type cannot be merged".into(),
            ));
        }
        for (family, table) in &other.frequencies {
            match self.frequencies.get_mut(family) {
                Some(t) => t.merge(table)?,
                None => {
                    self.frequencies.insert(*family, table.clone());
                }
            }
        }
        for (family, dist) in &other.lengths {
            match self.lengths.get_mut(family) {
                Some(d) => d.merge(dist)?,
                None => {
                    self.lengths.insert(*family, dist.clone());
                }
            }
        }
        self.totals.merge(&other.totals);
        self.totals.word_types = self
            .frequencies
            .get(&FeatureFamily::WordUnigram)
            .map_or(0, |t| t.counts().len() as u64);
        Ok(())
    }

    /// Writes `<dir>/<name>.json`, keeping the top `retained_keys` entries of
    /// each frequency table.
    pub fn save(&self, dir: &Path, retained_keys: usize) -> Result<PathBuf, PipelineError> {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
        let mut trimmed = self.clone();
        for table in trimmed.frequencies.values_mut() {
            table.retain_top(retained_keys);
        }
        let path = dir.join(format!("{}.json", self.name));
        let mut json = serde_json::to_string_pretty(&trimmed).expect("profile serializes");
        json.push('\n');
        fs::write(&path, json).map_err(io_err(&path))?;
        Ok(path)
    }

    pub fn load(path: &Path) -> Result<CorpusProfile, PipelineError> {
        let text = fs::read_to_string(path).map_err(io_err(path))?;
        let profile: CorpusProfile =
            serde_json::from_str(&text).map_err(|source| PipelineError::ProfileFormat {
                path: path.to_path_buf(),
                source,
            })?;
        if profile.format_version != PROFILE_FORMAT_VERSION {
            return Err(PipelineError::Config(format!(
                "{}: unsupported profile format version {}",
                path.display(),
                profile.format_version
            )));
        }
        Ok(profile)
    }
}

/// A segmenter ready for use, with the text that identifies it in the
/// configuration fingerprint.
pub struct PreparedSegmenter {
    pub segmenter: Box<dyn Segmenter + Send + Sync>,
    pub descriptor: String,
}

impl PreparedSegmenter {
    pub fn baseline(model: SegmenterModel, descriptor: impl Into<String>) -> Self {
        PreparedSegmenter {
            segmenter: Box::new(model),
            descriptor: descriptor.into(),
        }
    }
}

fn prepare_segmenter(
    opts: &ProfileOptions,
    names: &[&str],
    counts: &[WordCounts],
) -> Result<PreparedSegmenter, PipelineError> {
    match &opts.segmenter {
        SegmenterSource::Baseline => {
            let mut vocabulary: BTreeMap<String, u64> = BTreeMap::new();
            for c in counts {
                for (w, &n) in c.unigrams.counts() {
                    *vocabulary.entry(w.clone()).or_default() += n;
                }
            }
            let model = train_baseline(&vocabulary, opts.strip_limits)?;
            debug!(
                "baseline segmenter: {} prefixes, {} suffixes",
                model.prefixes().len(),
                model.suffixes().len()
            );
            Ok(PreparedSegmenter::baseline(
                model,
                format!("baseline:{}", names.join(",")),
            ))
        }
        SegmenterSource::File(path) => {
            let bytes = fs::read(path).map_err(io_err(path))?;
            let lexicon = SegmentationLexicon::load(path)?;
            Ok(PreparedSegmenter {
                segmenter: Box::new(lexicon),
                descriptor: format!("file:{}", hex::encode(Sha256::digest(&bytes))),
            })
        }
    }
}

#[derive(Serialize)]
struct FingerprintInput<'a> {
    format_version: u32,
    opts: &'a ProfileOptions,
    segmenter: &'a str,
}

/// Hash of everything that influences profile contents.
pub fn fingerprint(opts: &ProfileOptions, segmenter_descriptor: &str) -> String {
    let mut opts = opts.clone();
    // the file is identified by content in the descriptor instead
    if let SegmenterSource::File(_) = opts.segmenter {
        opts.segmenter = SegmenterSource::File(PathBuf::new());
    }
    let input = FingerprintInput {
        format_version: PROFILE_FORMAT_VERSION,
        opts: &opts,
        segmenter: segmenter_descriptor,
    };
    let json = serde_json::to_vec(&input).expect("fingerprint input serializes");
    hex::encode(&Sha256::digest(&json)[..16])
}

/// Derives every feature family from a corpus's word counts.
///
/// Word-internal features are computed once per word type and weighted by
/// the type's frequency, which equals counting every running word.
pub fn build_profile(
    name: &str,
    counts: &WordCounts,
    segmenter: &dyn Segmenter,
    opts: &ProfileOptions,
    fingerprint: &str,
) -> Result<CorpusProfile, PipelineError> {
    let mut char_tables =
        [1u8, 2, 3].map(|n| FrequencyTable::new(Level::Character, n).expect("valid"));
    let mut syl_tables = [1u8, 2].map(|n| FrequencyTable::new(Level::Syllable, n).expect("valid"));
    let mut morph_table = FrequencyTable::new(Level::Morpheme, 1)?;
    let mut char_len = LengthDistribution::new(Level::Character);
    let mut syl_len = LengthDistribution::new(Level::Syllable);
    let mut seg_len = LengthDistribution::new(Level::Morpheme);

    for (word, &count) in counts.unigrams.counts() {
        let parsed = parse_word(word).map_err(|e| {
            PipelineError::Config(format!("word {word:?} in counts does not parse: {e}"))
        })?;
        for (n, table) in (1u8..).zip(char_tables.iter_mut()) {
            for key in char_ngrams(&parsed, n)? {
                table.add_n(key, count);
            }
        }
        char_len.add_n(parsed.char_length(), count)?;

        let syllables = syllabify(&parsed, SyllableMode::Lenient)
            .map_err(|e| PipelineError::Config(format!("syllabifying {word:?}: {e}")))?;
        syl_len.add_n(syllables.len(), count)?;
        for (n, table) in (1u8..).zip(syl_tables.iter_mut()) {
            add_items(
                table,
                syllable_ngrams(&syllables, n)?,
                count,
                opts.count_mode,
            );
        }

        let seg = segmenter.segment(word);
        seg_len.add_n(seg.segment_length(), count)?;
        let morphemes: Vec<String> = seg
            .prefixes()
            .iter()
            .cloned()
            .chain(opts.morpheme_count_roots.then(|| seg.root().to_string()))
            .chain(seg.suffixes().iter().cloned())
            .collect();
        add_items(&mut morph_table, morphemes, count, opts.count_mode);
    }

    let [c1, c2, c3] = char_tables;
    let [s1, s2] = syl_tables;
    let mut frequencies = BTreeMap::new();
    for table in [
        c1,
        c2,
        c3,
        s1,
        s2,
        morph_table,
        counts.unigrams.clone(),
        counts.bigrams.clone(),
    ] {
        frequencies.insert(table.family(), table);
    }
    let mut lengths = BTreeMap::new();
    for dist in [char_len, syl_len, seg_len, counts.sentence_lengths.clone()] {
        lengths.insert(dist.family(), dist);
    }
    let mut totals = counts.totals;
    totals.word_types = counts.unigrams.counts().len() as u64;
    Ok(CorpusProfile {
        format_version: PROFILE_FORMAT_VERSION,
        name: name.to_string(),
        fingerprint: fingerprint.to_string(),
        count_mode: opts.count_mode,
        totals,
        frequencies,
        lengths,
    })
}

fn add_items(table: &mut FrequencyTable, items: Vec<String>, count: u64, mode: CountMode) {
    match mode {
        CountMode::Tokens => {
            for item in items {
                table.add_n(item, count);
            }
        }
        CountMode::Types => {
            let distinct: BTreeSet<String> = items.into_iter().collect();
            for item in distinct {
                table.add_n(item, 1);
            }
        }
    }
}

fn check_skip_rate(
    name: &str,
    counts: &WordCounts,
    opts: &ProfileOptions,
) -> Result<(), PipelineError> {
    let t = &counts.totals;
    if t.skipped_tokens > 0 {
        warn!(
            "corpus {name:?}: skipped {} of {} Bengali tokens that could not be parsed, e.g. {}",
            t.skipped_tokens,
            t.bengali_tokens,
            counts.skipped_examples.join("; ")
        );
    }
    if t.parsed_tokens == 0
        || t.skipped_tokens as f64 > opts.max_skip_rate * t.bengali_tokens as f64
    {
        return Err(PipelineError::TooManyUnparseable {
            name: name.to_string(),
            skipped: t.skipped_tokens,
            total: t.bengali_tokens,
        });
    }
    Ok(())
}

/// Profiles several corpora together. The baseline segmenter, when used, is
/// trained on the pooled vocabulary of all of them.
pub fn profile_corpora(
    specs: &[CorpusSpec],
    opts: &ProfileOptions,
) -> Result<Vec<CorpusProfile>, PipelineError> {
    check_unique(specs.iter().map(|s| s.name.as_str()))?;
    let mut counts = Vec::with_capacity(specs.len());
    for spec in specs {
        let corpus = ingest(spec, &opts.tokenizer)?;
        let c = WordCounts::from_corpus(&corpus, opts)?;
        check_skip_rate(&spec.name, &c, opts)?;
        counts.push(c);
    }
    let names: Vec<&str> = specs.iter().map(|s| s.name.as_str()).collect();
    let prepared = prepare_segmenter(opts, &names, &counts)?;
    let fp = fingerprint(opts, &prepared.descriptor);
    specs
        .iter()
        .zip(&counts)
        .map(|(spec, c)| build_profile(&spec.name, c, prepared.segmenter.as_ref(), opts, &fp))
        .collect()
}

/// Profiles a single corpus.
pub fn profile(spec: &CorpusSpec, opts: &ProfileOptions) -> Result<CorpusProfile, PipelineError> {
    Ok(profile_corpora(std::slice::from_ref(spec), opts)?.remove(0))
}

/// Test results for one corpus pair and feature family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportCell {
    pub family: FeatureFamily,
    pub source: String,
    pub target: String,
    /// In [`Alternative::ALL`] order.
    pub outcomes: [KsOutcome<f64>; 3],
    pub significant: [bool; 3],
}

impl ReportCell {
    pub fn outcome(&self, alt: Alternative) -> &KsOutcome<f64> {
        &self.outcomes[Alternative::ALL
            .iter()
            .position(|a| *a == alt)
            .expect("listed")]
    }

    pub fn p_values(&self) -> [f64; 3] {
        self.outcomes.map(|o| o.p_value)
    }
}

fn run_tests(
    family: FeatureFamily,
    source: &str,
    target: &str,
    values1: &[f64],
    values2: &[f64],
    opts: &CompareOptions,
) -> Result<ReportCell, PipelineError> {
    let mut outcomes = Vec::with_capacity(3);
    for alt in Alternative::ALL {
        let outcome = match ks_test_with(values1, values2, alt, opts.pvalue_method) {
            Err(KsError::TooManyLabelings(n)) => {
                debug!("{family} {source}/{target}: {n} labelings, using asymptotic p-value");
                ks_test_with(values1, values2, alt, PValueMethod::Asymptotic)?
            }
            other => other?,
        };
        outcomes.push(outcome);
    }
    let outcomes: [KsOutcome<f64>; 3] = outcomes.try_into().expect("three alternatives");
    Ok(ReportCell {
        family,
        source: source.to_string(),
        target: target.to_string(),
        significant: outcomes.map(|o| o.p_value <= opts.alpha),
        outcomes,
    })
}

/// Runs all three tests for every corpus pair and feature family.
///
/// Frequency families use every ordered pair, since the top-K ranking comes
/// from the first corpus. Length families use every unordered pair once.
/// Pairs where either side has no data are skipped with a warning.
pub fn compare_all(
    profiles: &[CorpusProfile],
    opts: &CompareOptions,
) -> Result<Vec<ReportCell>, PipelineError> {
    opts.validate()?;
    if profiles.len() < 2 {
        return Err(PipelineError::Config(
            "at least two profiles are required".into(),
        ));
    }
    check_unique(profiles.iter().map(|p| p.name.as_str()))?;
    let expected = &profiles[0].fingerprint;
    if let Some(p) = profiles.iter().find(|p| &p.fingerprint != expected) {
        return Err(PipelineError::StaleProfile {
            name: p.name.clone(),
            expected: expected.clone(),
            found: p.fingerprint.clone(),
        });
    }

    let mut cells = Vec::new();
    for family in FeatureFamily::ALL {
        if family.is_symmetric() {
            for (i, a) in profiles.iter().enumerate() {
                for b in &profiles[i + 1..] {
                    let (Some(da), Some(db)) = (a.length(family), b.length(family)) else {
                        warn!("{family}: missing from {:?} or {:?}", a.name, b.name);
                        continue;
                    };
                    match length_pair::<f64>(da, db, opts.length_mode) {
                        Ok(sample) => cells.push(run_tests(
                            family,
                            &a.name,
                            &b.name,
                            &sample.values1,
                            &sample.values2,
                            opts,
                        )?),
                        Err(FeatureError::EmptyDistribution) => {
                            warn!("{family}: no data for {:?} vs {:?}", a.name, b.name)
                        }
                        Err(e) => return Err(e.into()),
                    }
                }
            }
        } else {
            for a in profiles {
                for b in profiles {
                    if a.name == b.name {
                        continue;
                    }
                    let (Some(ta), Some(tb)) = (a.frequency(family), b.frequency(family)) else {
                        warn!("{family}: missing from {:?} or {:?}", a.name, b.name);
                        continue;
                    };
                    match top_k_pair::<f64>(ta, tb, opts.top_k) {
                        Ok(sample) => cells.push(run_tests(
                            family,
                            &a.name,
                            &b.name,
                            &sample.values1,
                            &sample.values2,
                            opts,
                        )?),
                        Err(FeatureError::EmptyTable) => {
                            warn!("{family}: no data for {:?} vs {:?}", a.name, b.name)
                        }
                        Err(e) => return Err(e.into()),
                    }
                }
            }
        }
    }
    Ok(cells)
}

/// Profiles, compares and renders in one go. Returns the written report
/// files.
pub fn analyze(cfg: &RunConfig) -> Result<Vec<PathBuf>, PipelineError> {
    cfg.validate()?;
    let profiles = profile_corpora(&cfg.corpora, &cfg.profile)?;
    let profile_dir = cfg.output_dir.join("profiles");
    for p in &profiles {
        p.save(&profile_dir, cfg.profile.retained_keys)?;
    }
    let cells = compare_all(&profiles, &cfg.compare)?;
    crate::report::render_report(
        &profiles,
        &cells,
        &cfg.compare,
        &cfg.output_dir.join("report"),
    )
}
