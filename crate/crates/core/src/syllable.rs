//! Vowel-boundary syllabification.
//!
//! Units accumulate until a vowel-bearing unit (independent vowel or vowel
//! diacritic, including the inherent mark) closes the syllable. Khanda-ta,
//! anusvara and visarga each form a syllable of their own. Chandrabindu and a
//! word-final bare consonant join the preceding syllable.

use thiserror::Error;

use crate::script::{recompose_units, ParsedWord, ScriptUnit, UnitKind};

pub const CHANDRABINDU: char = '\u{0981}';

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Syllable {
    units: Vec<ScriptUnit>,
    surface: String,
}

impl Syllable {
    fn new(units: Vec<ScriptUnit>) -> Syllable {
        let surface = surface_of(&units);
        Syllable { units, surface }
    }

    pub fn units(&self) -> &[ScriptUnit] {
        &self.units
    }

    pub fn surface(&self) -> &str {
        &self.surface
    }
}

/// Surface text of a syllable. A syllable-final bare consonant is written with
/// a virama, like a word-final one.
fn surface_of(units: &[ScriptUnit]) -> String {
    // A lone leading chandrabindu (lenient mode) is the only sequence
    // recompose rejects here; fall back to the raw characters.
    recompose_units(units).unwrap_or_else(|_| units.iter().filter_map(|u| u.as_char()).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SyllableMode {
    /// Malformed words are errors.
    #[default]
    Strict,
    /// Malformed words are split as well as possible.
    Lenient,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SyllableError {
    #[error("word has no units")]
    EmptyWord,
    #[error("word begins with the special consonant {0}")]
    LeadingSpecial(char),
    #[error("word has no vowel to carry a syllable")]
    NoVowel,
}

fn is_chandrabindu(u: &ScriptUnit) -> bool {
    u.as_char() == Some(CHANDRABINDU)
}

fn is_closing_special(u: &ScriptUnit) -> bool {
    u.kind() == UnitKind::SpecialConsonant && !is_chandrabindu(u)
}

/// Splits a parsed word into syllables.
pub fn syllabify(parsed: &ParsedWord, mode: SyllableMode) -> Result<Vec<Syllable>, SyllableError> {
    let units = parsed.units();
    let first = units.first().ok_or(SyllableError::EmptyWord)?;
    if mode == SyllableMode::Strict && first.kind() == UnitKind::SpecialConsonant {
        if let Some(c) = first.as_char().filter(|&c| c != '\u{09CE}') {
            return Err(SyllableError::LeadingSpecial(c));
        }
    }

    let mut closed: Vec<Vec<ScriptUnit>> = Vec::new();
    let mut open: Vec<ScriptUnit> = Vec::new();
    for unit in units {
        if is_chandrabindu(unit) && open.is_empty() {
            match closed.last_mut() {
                Some(prev) => prev.push(*unit),
                None => closed.push(vec![*unit]),
            }
        } else if is_closing_special(unit) && open.is_empty() {
            closed.push(vec![*unit]);
        } else {
            open.push(*unit);
            if unit.is_vowel_bearing() {
                closed.push(std::mem::take(&mut open));
            }
        }
    }
    if !open.is_empty() {
        // trailing bare consonant(s) after a hasanta
        match closed.last_mut() {
            Some(prev) => prev.extend(open),
            None if mode == SyllableMode::Strict => return Err(SyllableError::NoVowel),
            None => closed.push(open),
        }
    }
    Ok(closed.into_iter().map(Syllable::new).collect())
}

/// Closed-form syllable count of a well-formed word.
pub fn expected_syllable_count(parsed: &ParsedWord) -> usize {
    parsed
        .units()
        .iter()
        .filter(|u| u.is_vowel_bearing() || is_closing_special(u))
        .count()
}
