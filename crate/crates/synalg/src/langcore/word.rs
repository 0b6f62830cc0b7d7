use std::fmt;

use serde::{Deserialize, Serialize};

use super::LangError;

/// Symbols with a fixed meaning in the regex and free-element grammars.
/// They cannot double as alphabet letters.
const RESERVED: &[char] = &[
    '|', '*', '(', ')', '∅', 'ε', '{', '}', ',', '+', '~', '⊥', '_',
];

/// An explicit, ordered list of single-symbol letters.
///
/// The order is significant: transition tables, breadth-first numberings and
/// all rendered output follow it.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<char>", into = "Vec<char>")]
pub struct Alphabet {
    letters: Vec<char>,
}

impl Alphabet {
    pub fn new(letters: Vec<char>) -> Result<Self, LangError> {
        if letters.is_empty() {
            return Err(LangError::InvalidAlphabet("alphabet is empty".into()));
        }
        for (i, &c) in letters.iter().enumerate() {
            if RESERVED.contains(&c) || c.is_whitespace() {
                return Err(LangError::InvalidAlphabet(format!(
                    "letter '{c}' is reserved"
                )));
            }
            if letters[..i].contains(&c) {
                return Err(LangError::InvalidAlphabet(format!(
                    "duplicate letter '{c}'"
                )));
            }
        }
        Ok(Alphabet { letters })
    }

    /// Builds an alphabet from the characters of `s`, in order.
    pub fn from_str(s: &str) -> Result<Self, LangError> {
        Alphabet::new(s.chars().collect())
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> &[char] {
        &self.letters
    }

    pub fn letter(&self, idx: usize) -> char {
        self.letters[idx]
    }

    pub fn index_of(&self, c: char) -> Option<usize> {
        self.letters.iter().position(|&l| l == c)
    }
}

impl TryFrom<Vec<char>> for Alphabet {
    type Error = LangError;
    fn try_from(v: Vec<char>) -> Result<Self, LangError> {
        Alphabet::new(v)
    }
}

impl From<Alphabet> for Vec<char> {
    fn from(a: Alphabet) -> Vec<char> {
        a.letters
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.letters {
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// A finite sequence of alphabet letters; the empty sequence is ε.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(Vec<char>);

impl Serialize for Word {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl Word {
    pub fn epsilon() -> Self {
        Word(Vec::new())
    }

    pub fn new(letters: Vec<char>) -> Self {
        Word(letters)
    }

    /// Parses `s` as a word over `alphabet`. Both the empty string and the
    /// single symbol `ε` denote the empty word.
    pub fn parse(s: &str, alphabet: &Alphabet) -> Result<Self, LangError> {
        if s == "ε" {
            return Ok(Word::epsilon());
        }
        let mut letters = Vec::new();
        for c in s.chars() {
            if alphabet.index_of(c).is_none() {
                return Err(LangError::LetterOutsideAlphabet(c));
            }
            letters.push(c);
        }
        Ok(Word(letters))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[char] {
        &self.0
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn push(&mut self, c: char) {
        self.0.push(c);
    }

    pub fn reversed(&self) -> Word {
        Word(self.0.iter().rev().copied().collect())
    }

    /// Length-lexicographic order with letter ranks taken from `alphabet`.
    /// This is the order in which closures enumerate representative words.
    pub fn len_lex_key(&self, alphabet: &Alphabet) -> (usize, Vec<usize>) {
        (
            self.0.len(),
            self.0
                .iter()
                .map(|&c| alphabet.index_of(c).unwrap_or(usize::MAX))
                .collect(),
        )
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            write!(f, "ε")
        } else {
            for c in &self.0 {
                write!(f, "{c}")?;
            }
            Ok(())
        }
    }
}

/// Enumerates all words over `alphabet` of length at most `max_len`, in
/// length-lexicographic order.
pub fn words_up_to(alphabet: &Alphabet, max_len: usize) -> Vec<Word> {
    let mut out = vec![Word::epsilon()];
    let mut layer: Vec<Word> = vec![Word::epsilon()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for &c in alphabet.letters() {
                let mut v = w.clone();
                v.push(c);
                next.push(v);
            }
        }
        out.extend(next.iter().cloned());
        layer = next;
    }
    out
}
