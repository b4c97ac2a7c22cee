#![allow(dead_code)]

use std::fs;
use std::path::PathBuf;

use bhasha::tokenizer::{is_bengali_token, word_tokens, TokenizerConfig};
use proptest::prelude::*;

pub const TOY_CORPORA: [&str; 2] = ["classical", "modern"];

pub fn toy_dir(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures/toy")
        .join(name)
}

/// Every Bengali token of a toy corpus, in file order.
pub fn toy_words(name: &str) -> Vec<String> {
    let mut paths: Vec<PathBuf> = fs::read_dir(toy_dir(name))
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    paths.sort();
    let cfg = TokenizerConfig::default();
    paths
        .iter()
        .flat_map(|p| word_tokens(&fs::read_to_string(p).unwrap(), &cfg))
        .filter(|t| is_bengali_token(t))
        .collect()
}

pub const VIRAMA: char = '\u{09CD}';
pub const INDEPENDENT: &str = "অআইঈউঊঋএঐওঔ";
pub const CONSONANTS: &str = "কখগঘঙচছজঝঞটঠডঢণতথদধনপফবভমযরলশষসহ\u{09DC}\u{09DD}\u{09DF}";
pub const SIGNS: &str =
    "\u{09BE}\u{09BF}\u{09C0}\u{09C1}\u{09C2}\u{09C3}\u{09C7}\u{09C8}\u{09CB}\u{09CC}";
/// ৎ ং ঃ close a syllable of their own; ঁ does not.
pub const CLOSING_SPECIALS: &str = "\u{09CE}\u{0982}\u{0983}";
pub const CHANDRABINDU: char = '\u{0981}';

fn pick(set: &'static str) -> impl Strategy<Value = char> {
    let chars: Vec<char> = set.chars().collect();
    proptest::sample::select(chars)
}

/// One written piece of a generated word.
#[derive(Debug, Clone)]
pub enum Piece {
    Vowel(char),
    /// Conjunct chain with an optional vowel sign.
    Cluster(Vec<char>, Option<char>),
    Special(char),
}

impl Piece {
    pub fn text(&self) -> String {
        match self {
            Piece::Vowel(c) | Piece::Special(c) => c.to_string(),
            Piece::Cluster(chain, sign) => {
                let mut s: String = chain
                    .iter()
                    .map(|c| c.to_string())
                    .collect::<Vec<_>>()
                    .join(&VIRAMA.to_string());
                s.extend(sign);
                s
            }
        }
    }

    /// Units this piece decomposes into.
    pub fn unit_count(&self) -> usize {
        match self {
            Piece::Vowel(_) | Piece::Special(_) => 1,
            Piece::Cluster(chain, _) => chain.len() + 1,
        }
    }

    /// Syllables this piece opens.
    pub fn syllable_count(&self) -> usize {
        match self {
            Piece::Vowel(_) | Piece::Cluster(..) => 1,
            Piece::Special(c) => usize::from(*c != CHANDRABINDU),
        }
    }
}

fn nucleus() -> impl Strategy<Value = Piece> {
    prop_oneof![
        1 => pick(INDEPENDENT).prop_map(Piece::Vowel),
        3 => (proptest::collection::vec(pick(CONSONANTS), 1..=3), proptest::option::of(pick(SIGNS)))
            .prop_map(|(chain, sign)| Piece::Cluster(chain, sign)),
    ]
}

fn special() -> impl Strategy<Value = Piece> {
    prop_oneof![pick(CLOSING_SPECIALS), Just(CHANDRABINDU)].prop_map(Piece::Special)
}

/// A well-formed word: nuclei, each optionally followed by one special, and
/// optionally a final consonant with an explicit hasanta.
#[derive(Debug, Clone)]
pub struct GeneratedWord {
    pub pieces: Vec<Piece>,
    pub final_hasanta: Option<char>,
}

impl GeneratedWord {
    pub fn text(&self) -> String {
        let mut s: String = self.pieces.iter().map(Piece::text).collect();
        if let Some(c) = self.final_hasanta {
            s.push(c);
            s.push(VIRAMA);
        }
        s
    }

    pub fn unit_count(&self) -> usize {
        self.pieces.iter().map(Piece::unit_count).sum::<usize>()
            + usize::from(self.final_hasanta.is_some())
    }

    pub fn syllable_count(&self) -> usize {
        self.pieces.iter().map(Piece::syllable_count).sum()
    }
}

pub fn generated_word() -> impl Strategy<Value = GeneratedWord> {
    (
        proptest::collection::vec(
            (nucleus(), proptest::option::weighted(0.2, special())),
            1..6,
        ),
        proptest::option::weighted(0.15, pick(CONSONANTS)),
    )
        .prop_map(|(groups, final_hasanta)| GeneratedWord {
            pieces: groups
                .into_iter()
                .flat_map(|(n, s)| std::iter::once(n).chain(s))
                .collect(),
            final_hasanta,
        })
}
