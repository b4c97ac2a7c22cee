//! Orthographic sentence and word splitting.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::script::is_bengali_char;

pub const DANDA: char = '\u{0964}';

const DEFAULT_TERMINATORS: [char; 4] = ['?', '!', '.', DANDA];

const DEFAULT_PUNCTUATION: [char; 27] = [
    ',', ';', ':', '"', '\'', '(', ')', '[', ']', '{', '}', '<', '>', '-', '/', '|', '*',
    '\u{2013}', '\u{2014}', '\u{2018}', '\u{2019}', '\u{201C}', '\u{201D}', '\u{2026}', '\u{0965}',
    '\u{00AB}', '\u{00BB}',
];

/// Which codepoints end sentences and which separate words.
///
/// Whitespace always separates words. Terminators separate words as well, so
/// `terminators ⊆ separators` holds for every configuration.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenizerConfig {
    terminators: BTreeSet<char>,
    punctuation: BTreeSet<char>,
}

impl Default for TokenizerConfig {
    fn default() -> Self {
        TokenizerConfig {
            terminators: DEFAULT_TERMINATORS.into_iter().collect(),
            punctuation: DEFAULT_PUNCTUATION.into_iter().collect(),
        }
    }
}

impl TokenizerConfig {
    pub fn new(
        terminators: impl IntoIterator<Item = char>,
        punctuation: impl IntoIterator<Item = char>,
    ) -> Self {
        TokenizerConfig {
            terminators: terminators.into_iter().collect(),
            punctuation: punctuation.into_iter().collect(),
        }
    }

    pub fn terminators(&self) -> &BTreeSet<char> {
        &self.terminators
    }

    pub fn is_terminator(&self, c: char) -> bool {
        self.terminators.contains(&c)
    }

    pub fn is_separator(&self, c: char) -> bool {
        c.is_whitespace() || self.terminators.contains(&c) || self.punctuation.contains(&c)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sentence {
    tokens: Vec<String>,
}

impl Sentence {
    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    /// Number of tokens, including ones without Bengali codepoints.
    pub fn word_length(&self) -> usize {
        self.tokens.len()
    }

    pub fn into_tokens(self) -> Vec<String> {
        self.tokens
    }
}

/// Splits text at terminators into sentences of separator-free tokens.
/// Sentences without tokens are dropped.
pub fn split_sentences(text: &str, cfg: &TokenizerConfig) -> Vec<Sentence> {
    let mut sentences = Vec::new();
    let mut tokens: Vec<String> = Vec::new();
    let mut current = String::new();
    for c in text.chars() {
        if cfg.is_separator(c) {
            if !current.is_empty() {
                tokens.push(std::mem::take(&mut current));
            }
            if cfg.is_terminator(c) && !tokens.is_empty() {
                sentences.push(Sentence {
                    tokens: std::mem::take(&mut tokens),
                });
            }
        } else {
            current.push(c);
        }
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    if !tokens.is_empty() {
        sentences.push(Sentence { tokens });
    }
    sentences
}

/// True when the token has at least one Bengali-block codepoint.
pub fn is_bengali_token(token: &str) -> bool {
    token.chars().any(is_bengali_char)
}

/// All Bengali tokens of the text, in order.
pub fn word_tokens(text: &str, cfg: &TokenizerConfig) -> Vec<String> {
    split_sentences(text, cfg)
        .into_iter()
        .flat_map(Sentence::into_tokens)
        .filter(|t| is_bengali_token(t))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn toks(s: &Sentence) -> Vec<&str> {
        s.tokens().iter().map(String::as_str).collect()
    }

    #[test]
    fn sentences_split_at_danda_and_question_mark() {
        let cfg = TokenizerConfig::default();
        let s = split_sentences("আমি ভাত খাই। তুমি?", &cfg);
        assert_eq!(s.len(), 2);
        assert_eq!(toks(&s[0]), ["আমি", "ভাত", "খাই"]);
        assert_eq!(toks(&s[1]), ["তুমি"]);
        assert_eq!(s[0].word_length(), 3);
    }

    #[test]
    fn empty_inputs() {
        let cfg = TokenizerConfig::default();
        assert!(split_sentences("", &cfg).is_empty());
        assert!(split_sentences("।।।", &cfg).is_empty());
        assert!(word_tokens("।", &cfg).is_empty());
    }

    #[test]
    fn trailing_sentence_without_terminator() {
        let cfg = TokenizerConfig::default();
        let s = split_sentences("এক দুই", &cfg);
        assert_eq!(s.len(), 1);
        assert_eq!(toks(&s[0]), ["এক", "দুই"]);
    }

    #[test]
    fn punctuation_separates_but_does_not_terminate() {
        let cfg = TokenizerConfig::default();
        let s = split_sentences("“রাম, শ্যাম” (যদু)।", &cfg);
        assert_eq!(s.len(), 1);
        assert_eq!(toks(&s[0]), ["রাম", "শ্যাম", "যদু"]);
    }

    #[test]
    fn word_tokens_filter_foreign() {
        let cfg = TokenizerConfig::default();
        assert_eq!(word_tokens("বাংলা ব্লগ।", &cfg), ["বাংলা", "ব্লগ"]);
        assert!(word_tokens("a b c", &cfg).is_empty());
        assert_eq!(word_tokens("ব্লগ www.example.com ১২", &cfg), ["ব্লগ", "১২"]);
    }

    #[test]
    fn custom_terminators() {
        let cfg = TokenizerConfig::new([';'], []);
        let s = split_sentences("ক খ; গ. ঘ", &cfg);
        assert_eq!(s.len(), 2);
        assert_eq!(toks(&s[1]), ["গ.", "ঘ"]);
    }

    fn text_strategy() -> impl Strategy<Value = String> {
        let alphabet: Vec<char> = "কখগআইা্ ং।?!., ;\n\tab১".chars().collect();
        proptest::collection::vec(proptest::sample::select(alphabet), 0..60)
            .prop_map(|v| v.into_iter().collect())
    }

    proptest! {
        #[test]
        fn sentence_lengths_sum_to_token_count(text in text_strategy()) {
            let cfg = TokenizerConfig::default();
            let total: usize = split_sentences(&text, &cfg)
                .iter()
                .map(|s| s.tokens().iter().filter(|t| is_bengali_token(t)).count())
                .sum();
            prop_assert_eq!(total, word_tokens(&text, &cfg).len());
        }

        #[test]
        fn tokenization_is_idempotent(text in text_strategy()) {
            let cfg = TokenizerConfig::default();
            let tokens = word_tokens(&text, &cfg);
            prop_assert_eq!(word_tokens(&tokens.join(" "), &cfg), tokens);
        }

        #[test]
        fn tokens_never_contain_separators(text in text_strategy()) {
            let cfg = TokenizerConfig::default();
            for s in split_sentences(&text, &cfg) {
                prop_assert!(s.word_length() >= 1);
                for t in s.tokens() {
                    prop_assert!(!t.is_empty());
                    prop_assert!(!t.chars().any(|c| cfg.is_separator(c)));
                }
            }
        }
    }
}
