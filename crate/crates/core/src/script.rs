//! Bengali script model.
//!
//! A written word is decomposed into a sequence of [`ScriptUnit`]s drawn from a
//! closed inventory of 61 units: 11 independent vowels, 35 regular consonants,
//! 4 special consonants and 11 vowel diacritics. The eleventh diacritic is the
//! invisible inherent vowel mark that a consonant carries when no explicit
//! vowel sign, virama or conjunct partner follows it.
//!
//! Conjuncts are flattened: every consonant of a cluster is emitted bare and
//! only the last one takes a diacritic. The virama itself is structural and
//! never becomes a unit.

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;
use unicode_normalization::UnicodeNormalization;

pub const VIRAMA: char = '\u{09CD}';
pub const NUKTA: char = '\u{09BC}';
pub const ZWJ: char = '\u{200D}';
pub const ZWNJ: char = '\u{200C}';

/// Identifier used for the inherent vowel mark. Lies outside the Unicode
/// scalar range so it can never collide with a real codepoint.
pub const INHERENT_MARK_CODE: u32 = 0x11_0000;

/// Display and key symbol for the inherent vowel mark.
pub const INHERENT_MARK_SYMBOL: char = '\u{00B7}';

const INDEPENDENT_VOWELS: [(char, &str); 11] = [
    ('অ', "a"),
    ('আ', "A"),
    ('ই', "i"),
    ('ঈ', "I"),
    ('উ', "u"),
    ('ঊ', "U"),
    ('ঋ', "RRi"),
    ('এ', "e"),
    ('ঐ', "ai"),
    ('ও', "o"),
    ('ঔ', "au"),
];

const CONSONANTS: [(char, &str); 35] = [
    ('ক', "k"),
    ('খ', "kh"),
    ('গ', "g"),
    ('ঘ', "gh"),
    ('ঙ', "~N"),
    ('চ', "ch"),
    ('ছ', "Ch"),
    ('জ', "j"),
    ('ঝ', "jh"),
    ('ঞ', "~n"),
    ('ট', "T"),
    ('ঠ', "Th"),
    ('ড', "D"),
    ('ঢ', "Dh"),
    ('ণ', "N"),
    ('ত', "t"),
    ('থ', "th"),
    ('দ', "d"),
    ('ধ', "dh"),
    ('ন', "n"),
    ('প', "p"),
    ('ফ', "ph"),
    ('ব', "b"),
    ('ভ', "bh"),
    ('ম', "m"),
    ('য', "J"),
    ('র', "r"),
    ('ল', "l"),
    ('শ', "sh"),
    ('ষ', "Sh"),
    ('স', "s"),
    ('হ', "h"),
    ('\u{09DC}', ".D"),
    ('\u{09DD}', ".Dh"),
    ('\u{09DF}', "y"),
];

const SPECIAL_CONSONANTS: [(char, &str); 4] = [
    ('\u{09CE}', "t.h"),
    ('\u{0982}', ".n"),
    ('\u{0983}', "H"),
    ('\u{0981}', ".N"),
];

const VOWEL_SIGNS: [(char, &str); 10] = [
    ('\u{09BE}', "A"),
    ('\u{09BF}', "i"),
    ('\u{09C0}', "I"),
    ('\u{09C1}', "u"),
    ('\u{09C2}', "U"),
    ('\u{09C3}', "RRi"),
    ('\u{09C7}', "e"),
    ('\u{09C8}', "ai"),
    ('\u{09CB}', "o"),
    ('\u{09CC}', "au"),
];

/// Consonants with a nukta that NFC keeps decomposed (composition exclusions).
const NUKTA_FORMS: [(char, char); 3] = [
    ('\u{09A1}', '\u{09DC}'),
    ('\u{09A2}', '\u{09DD}'),
    ('\u{09AF}', '\u{09DF}'),
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum UnitKind {
    IndependentVowel,
    Consonant,
    SpecialConsonant,
    VowelDiacritic,
}

/// One character of the decomposed word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ScriptUnit {
    kind: UnitKind,
    code: u32,
}

impl ScriptUnit {
    pub const INHERENT_MARK: ScriptUnit = ScriptUnit {
        kind: UnitKind::VowelDiacritic,
        code: INHERENT_MARK_CODE,
    };

    /// Looks up the unit for a single codepoint. Precomposed nukta consonants
    /// are accepted; the inherent mark has no codepoint and is never returned.
    pub fn from_char(c: char) -> Option<ScriptUnit> {
        let kind = classify(c)?;
        Some(ScriptUnit {
            kind,
            code: c as u32,
        })
    }

    pub fn kind(&self) -> UnitKind {
        self.kind
    }

    /// Codepoint, or [`INHERENT_MARK_CODE`] for the inherent mark.
    pub fn code(&self) -> u32 {
        self.code
    }

    pub fn as_char(&self) -> Option<char> {
        if self.is_inherent_mark() {
            None
        } else {
            char::from_u32(self.code)
        }
    }

    /// Single character used when the unit appears in an n-gram key.
    pub fn key_char(&self) -> char {
        self.as_char().unwrap_or(INHERENT_MARK_SYMBOL)
    }

    pub fn is_inherent_mark(&self) -> bool {
        self.code == INHERENT_MARK_CODE
    }

    /// Independent vowels and vowel diacritics close a syllable.
    pub fn is_vowel_bearing(&self) -> bool {
        matches!(
            self.kind,
            UnitKind::IndependentVowel | UnitKind::VowelDiacritic
        )
    }

    /// ITRANS-style label, informational only.
    pub fn transliteration(&self) -> &'static str {
        if self.is_inherent_mark() {
            return "a";
        }
        let c = char::from_u32(self.code).unwrap_or('\0');
        let table: &[(char, &'static str)] = match self.kind {
            UnitKind::IndependentVowel => &INDEPENDENT_VOWELS,
            UnitKind::Consonant => &CONSONANTS,
            UnitKind::SpecialConsonant => &SPECIAL_CONSONANTS,
            UnitKind::VowelDiacritic => &VOWEL_SIGNS,
        };
        table
            .iter()
            .find(|(ch, _)| *ch == c)
            .map(|(_, t)| *t)
            .unwrap_or("?")
    }
}

impl PartialOrd for ScriptUnit {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ScriptUnit {
    fn cmp(&self, other: &Self) -> Ordering {
        self.code
            .cmp(&other.code)
            .then_with(|| self.kind.cmp(&other.kind))
    }
}

impl fmt::Display for ScriptUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.key_char())
    }
}

fn classify(c: char) -> Option<UnitKind> {
    let in_table = |t: &[(char, &str)]| t.iter().any(|(ch, _)| *ch == c);
    if in_table(&INDEPENDENT_VOWELS) {
        Some(UnitKind::IndependentVowel)
    } else if in_table(&CONSONANTS) {
        Some(UnitKind::Consonant)
    } else if in_table(&SPECIAL_CONSONANTS) {
        Some(UnitKind::SpecialConsonant)
    } else if in_table(&VOWEL_SIGNS) {
        Some(UnitKind::VowelDiacritic)
    } else {
        None
    }
}

/// The closed inventory: 11 independent vowels, 35 consonants, 4 special
/// consonants, 10 vowel signs and the inherent mark.
pub fn unit_inventory() -> Vec<ScriptUnit> {
    let mut units = Vec::with_capacity(61);
    let groups: [(UnitKind, &[(char, &str)]); 4] = [
        (UnitKind::IndependentVowel, &INDEPENDENT_VOWELS),
        (UnitKind::Consonant, &CONSONANTS),
        (UnitKind::SpecialConsonant, &SPECIAL_CONSONANTS),
        (UnitKind::VowelDiacritic, &VOWEL_SIGNS),
    ];
    for (kind, table) in groups {
        units.extend(table.iter().map(|(c, _)| ScriptUnit {
            kind,
            code: *c as u32,
        }));
    }
    units.push(ScriptUnit::INHERENT_MARK);
    units
}

/// True for any codepoint in the Bengali block (U+0980..=U+09FF).
pub fn is_bengali_char(c: char) -> bool {
    ('\u{0980}'..='\u{09FF}').contains(&c)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScriptError {
    #[error("empty word")]
    EmptyWord,
    #[error("unknown codepoint U+{:04X} at position {position}", *.codepoint as u32)]
    UnknownCodepoint { codepoint: char, position: usize },
    #[error("vowel sign U+{:04X} at position {position} has no preceding consonant", *.codepoint as u32)]
    OrphanVowelSign { codepoint: char, position: usize },
    #[error("virama at position {position} neither joins two consonants nor ends the word")]
    DanglingVirama { position: usize },
    #[error("invalid unit sequence at index {index}: {reason}")]
    InvalidSequence { index: usize, reason: &'static str },
}

/// A word together with its unit decomposition.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ParsedWord {
    surface: String,
    units: Vec<ScriptUnit>,
}

impl ParsedWord {
    /// NFC surface with ZWJ/ZWNJ removed.
    pub fn surface(&self) -> &str {
        &self.surface
    }

    pub fn units(&self) -> &[ScriptUnit] {
        &self.units
    }

    /// Word length measured in script units.
    pub fn char_length(&self) -> usize {
        self.units.len()
    }

    /// Builds a parsed word from an explicit unit list, checking the
    /// sequencing rules.
    pub fn from_units(units: Vec<ScriptUnit>) -> Result<ParsedWord, ScriptError> {
        let surface = recompose_units(&units)?;
        Ok(ParsedWord { surface, units })
    }
}

/// NFC-normalizes and drops ZWJ/ZWNJ.
pub fn normalize_word(surface: &str) -> String {
    surface.nfc().filter(|&c| c != ZWJ && c != ZWNJ).collect()
}

/// Folds consonant + nukta into the precomposed consonant.
fn fold_nukta(chars: &[char]) -> Vec<(char, usize)> {
    let mut out = Vec::with_capacity(chars.len());
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if chars.get(i + 1) == Some(&NUKTA) {
            if let Some((_, composed)) = NUKTA_FORMS.iter().find(|(base, _)| *base == c) {
                out.push((*composed, i));
                i += 2;
                continue;
            }
        }
        out.push((c, i));
        i += 1;
    }
    out
}

/// Decomposes a single word into script units.
///
/// Positions in errors are character offsets into the normalized word.
pub fn parse_word(surface: &str) -> Result<ParsedWord, ScriptError> {
    let normalized = normalize_word(surface);
    let raw: Vec<char> = normalized.chars().collect();
    if raw.is_empty() {
        return Err(ScriptError::EmptyWord);
    }
    let chars = fold_nukta(&raw);
    let is_consonant = |idx: usize| {
        chars
            .get(idx)
            .and_then(|(c, _)| classify(*c))
            .is_some_and(|k| k == UnitKind::Consonant)
    };

    let mut units = Vec::with_capacity(chars.len() + 2);
    let mut i = 0;
    while i < chars.len() {
        let (c, position) = chars[i];
        match classify(c) {
            Some(UnitKind::IndependentVowel) | Some(UnitKind::SpecialConsonant) => {
                units.push(ScriptUnit::from_char(c).expect("classified"));
                i += 1;
            }
            Some(UnitKind::Consonant) => {
                units.push(ScriptUnit::from_char(c).expect("classified"));
                i += 1;
                match chars.get(i).map(|(n, _)| *n) {
                    Some(VIRAMA) => {
                        let virama_pos = chars[i].1;
                        if is_consonant(i + 1) {
                            // conjunct: bare consonant, chain continues
                            i += 1;
                        } else if i + 1 == chars.len() {
                            // explicit hasanta ends the word
                            i += 1;
                        } else {
                            return Err(ScriptError::DanglingVirama {
                                position: virama_pos,
                            });
                        }
                    }
                    Some(n) if classify(n) == Some(UnitKind::VowelDiacritic) => {
                        units.push(ScriptUnit::from_char(n).expect("classified"));
                        i += 1;
                    }
                    _ => units.push(ScriptUnit::INHERENT_MARK),
                }
            }
            Some(UnitKind::VowelDiacritic) => {
                return Err(ScriptError::OrphanVowelSign {
                    codepoint: c,
                    position,
                })
            }
            None if c == VIRAMA => return Err(ScriptError::DanglingVirama { position }),
            None => {
                return Err(ScriptError::UnknownCodepoint {
                    codepoint: c,
                    position,
                })
            }
        }
    }
    Ok(ParsedWord {
        surface: normalized,
        units,
    })
}

/// Rebuilds the NFC surface of a parsed word.
pub fn recompose(parsed: &ParsedWord) -> Result<String, ScriptError> {
    recompose_units(parsed.units())
}

/// Rebuilds a surface string from units, reinserting viramas between
/// conjunct members and after a word-final bare consonant.
pub fn recompose_units(units: &[ScriptUnit]) -> Result<String, ScriptError> {
    if units.is_empty() {
        return Err(ScriptError::EmptyWord);
    }
    let mut out = String::with_capacity(units.len() * 4);
    for (index, unit) in units.iter().enumerate() {
        let next = units.get(index + 1);
        match unit.kind {
            UnitKind::IndependentVowel | UnitKind::SpecialConsonant => {
                out.push(unit.as_char().expect("real codepoint"));
            }
            UnitKind::Consonant => {
                out.push(unit.as_char().expect("real codepoint"));
                match next.map(|n| n.kind) {
                    Some(UnitKind::Consonant) | None => out.push(VIRAMA),
                    Some(UnitKind::VowelDiacritic) => {}
                    Some(_) => {
                        return Err(ScriptError::InvalidSequence {
                            index,
                            reason: "bare consonant must precede a consonant or end the word",
                        })
                    }
                }
            }
            UnitKind::VowelDiacritic => {
                let prev = index.checked_sub(1).map(|p| units[p].kind);
                if prev != Some(UnitKind::Consonant) {
                    return Err(ScriptError::InvalidSequence {
                        index,
                        reason: "vowel diacritic must follow a consonant",
                    });
                }
                if let Some(c) = unit.as_char() {
                    out.push(c);
                }
            }
        }
    }
    Ok(out.nfc().collect())
}

/// Concatenated key characters of a unit slice.
pub fn units_key(units: &[ScriptUnit]) -> String {
    units.iter().map(ScriptUnit::key_char).collect()
}
