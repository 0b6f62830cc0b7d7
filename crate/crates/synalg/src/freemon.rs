//! Elements of the free algebra on the alphabet, per variety, and evaluation
//! of a regular language on them.
//!
//! The free algebra over the letter set is: words for sets and posets; words
//! plus an absorbing ⊥ for pointed sets; plain and complemented words for
//! involution algebras; finite word sets for join-semilattices; and
//! polynomials (finite word-to-scalar maps over F_p) for vector spaces.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::fp;
use crate::langcore::{Alphabet, Dfa, LangError, Word};

/// The ambient commutative variety computations happen in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VarietyTag {
    /// Sets: plain monoids.
    Set,
    /// Posets: ordered monoids.
    Pos,
    /// Pointed sets: monoids with zero.
    PSet,
    /// Involution algebras: monoids with an involution.
    Inv,
    /// Join-semilattices: idempotent semirings.
    Jsl,
    /// Vector spaces over F_p: associative algebras. `p` must be prime.
    Vect(u32),
}

impl VarietyTag {
    /// All six varieties, with the default prime for the vector instance.
    pub const ALL_DEFAULT: [VarietyTag; 6] = [
        VarietyTag::Set,
        VarietyTag::Pos,
        VarietyTag::PSet,
        VarietyTag::Inv,
        VarietyTag::Jsl,
        VarietyTag::Vect(2),
    ];

    pub fn validate(&self) -> Result<(), FreemonError> {
        match self {
            VarietyTag::Vect(p) if !fp::is_prime(*p) => Err(FreemonError::NotPrime(*p)),
            _ => Ok(()),
        }
    }

    /// True for the ordered variety, where the congruence is a preorder.
    pub fn is_ordered(&self) -> bool {
        matches!(self, VarietyTag::Pos)
    }
}

impl serde::Serialize for VarietyTag {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl fmt::Display for VarietyTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VarietyTag::Set => write!(f, "set"),
            VarietyTag::Pos => write!(f, "pos"),
            VarietyTag::PSet => write!(f, "pset"),
            VarietyTag::Inv => write!(f, "inv"),
            VarietyTag::Jsl => write!(f, "jsl"),
            VarietyTag::Vect(p) => write!(f, "vect({p})"),
        }
    }
}

/// An element of the free algebra in some variety.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FreeElem {
    /// A plain word (sets, posets, and the non-⊥ part of pointed sets).
    Word(Word),
    /// The absorbing point of the pointed-set free algebra.
    Bottom,
    /// A word with a complement flag (involution algebras).
    Signed { word: Word, complemented: bool },
    /// A finite set of words (join-semilattices). The empty set is admitted:
    /// it is the additive zero.
    WordSet(BTreeSet<Word>),
    /// A polynomial: finite map from words to nonzero scalars in F_p.
    Poly(BTreeMap<Word, u32>),
}

/// A value of the output object of the variety.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OutputValue {
    /// 0 or 1 (sets, posets, involution algebras, semilattices).
    Bit(bool),
    /// The bottom output of pointed sets.
    Bottom,
    /// A scalar in F_p (vector spaces).
    Scalar(u32),
}

impl OutputValue {
    /// Order on the two-element chain 0 < 1; `None` when non-bit values are
    /// compared.
    pub fn le(&self, other: &OutputValue) -> Option<bool> {
        match (self, other) {
            (OutputValue::Bit(x), OutputValue::Bit(y)) => Some(!x | y),
            _ => None,
        }
    }
}

impl fmt::Display for OutputValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OutputValue::Bit(b) => write!(f, "{}", u8::from(*b)),
            OutputValue::Bottom => write!(f, "⊥"),
            OutputValue::Scalar(s) => write!(f, "{s}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FreemonError {
    #[error("element {found} is not a well-formed {tag} free element")]
    TagMismatch { tag: VarietyTag, found: String },
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("cannot parse free element: {0}")]
    Parse(String),
    #[error(transparent)]
    Lang(#[from] LangError),
}

impl FreeElem {
    pub fn epsilon() -> FreeElem {
        FreeElem::Word(Word::epsilon())
    }

    /// The multiplicative unit of the free algebra for `tag`.
    pub fn unit(tag: VarietyTag) -> FreeElem {
        match tag {
            VarietyTag::Set | VarietyTag::Pos | VarietyTag::PSet => FreeElem::epsilon(),
            VarietyTag::Inv => FreeElem::Signed {
                word: Word::epsilon(),
                complemented: false,
            },
            VarietyTag::Jsl => FreeElem::WordSet(BTreeSet::from([Word::epsilon()])),
            VarietyTag::Vect(_) => FreeElem::Poly(BTreeMap::from([(Word::epsilon(), 1)])),
        }
    }

    /// Encodes a plain word into the free algebra for `tag`.
    pub fn lift_word(tag: VarietyTag, w: Word) -> FreeElem {
        match tag {
            VarietyTag::Set | VarietyTag::Pos | VarietyTag::PSet => FreeElem::Word(w),
            VarietyTag::Inv => FreeElem::Signed {
                word: w,
                complemented: false,
            },
            VarietyTag::Jsl => FreeElem::WordSet(BTreeSet::from([w])),
            VarietyTag::Vect(_) => FreeElem::Poly(BTreeMap::from([(w, 1)])),
        }
    }

    pub fn well_formed(&self, tag: VarietyTag) -> Result<(), FreemonError> {
        tag.validate()?;
        let ok = match (tag, self) {
            (VarietyTag::Set | VarietyTag::Pos, FreeElem::Word(_)) => true,
            (VarietyTag::PSet, FreeElem::Word(_) | FreeElem::Bottom) => true,
            (VarietyTag::Inv, FreeElem::Signed { .. }) => true,
            (VarietyTag::Jsl, FreeElem::WordSet(_)) => true,
            (VarietyTag::Vect(p), FreeElem::Poly(terms)) => {
                terms.values().all(|&c| c != 0 && c < p)
            }
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(FreemonError::TagMismatch {
                tag,
                found: self.to_string(),
            })
        }
    }
}

/// The product of `u` and `v` in the free algebra of `tag`.
pub fn free_mul(tag: VarietyTag, u: &FreeElem, v: &FreeElem) -> Result<FreeElem, FreemonError> {
    u.well_formed(tag)?;
    v.well_formed(tag)?;
    Ok(match (u, v) {
        (FreeElem::Word(x), FreeElem::Word(y)) => FreeElem::Word(x.concat(y)),
        (FreeElem::Bottom, _) | (_, FreeElem::Bottom) => FreeElem::Bottom,
        (
            FreeElem::Signed {
                word: x,
                complemented: cx,
            },
            FreeElem::Signed {
                word: y,
                complemented: cy,
            },
        ) => FreeElem::Signed {
            word: x.concat(y),
            complemented: cx ^ cy,
        },
        (FreeElem::WordSet(xs), FreeElem::WordSet(ys)) => {
            let mut out = BTreeSet::new();
            for x in xs {
                for y in ys {
                    out.insert(x.concat(y));
                }
            }
            FreeElem::WordSet(out)
        }
        (FreeElem::Poly(xs), FreeElem::Poly(ys)) => {
            let p = match tag {
                VarietyTag::Vect(p) => p,
                _ => unreachable!("well_formed accepted Poly only for vect"),
            };
            let mut out: BTreeMap<Word, u32> = BTreeMap::new();
            for (x, &cx) in xs {
                for (y, &cy) in ys {
                    let w = x.concat(y);
                    let entry = out.entry(w).or_insert(0);
                    *entry = fp::add(p, *entry, fp::mul(p, cx, cy));
                }
            }
            out.retain(|_, c| *c != 0);
            FreeElem::Poly(out)
        }
        _ => {
            return Err(FreemonError::TagMismatch {
                tag,
                found: format!("{u} · {v}"),
            })
        }
    })
}

/// Evaluates the language morphism induced by `l0` on a free element:
/// membership bit for words, complemented membership for complemented words,
/// "does the set meet the language" for word sets, and the F_p-weighted
/// membership sum for polynomials. ⊥ evaluates to ⊥.
pub fn eval_language(
    tag: VarietyTag,
    l0: &Dfa,
    u: &FreeElem,
) -> Result<OutputValue, FreemonError> {
    u.well_formed(tag)?;
    Ok(match (tag, u) {
        (VarietyTag::Set | VarietyTag::Pos, FreeElem::Word(w)) => {
            OutputValue::Bit(l0.membership(w))
        }
        (VarietyTag::PSet, FreeElem::Bottom) => OutputValue::Bottom,
        (VarietyTag::PSet, FreeElem::Word(w)) => {
            if l0.membership(w) {
                OutputValue::Bit(true)
            } else {
                OutputValue::Bottom
            }
        }
        (VarietyTag::Inv, FreeElem::Signed { word, complemented }) => {
            OutputValue::Bit(l0.membership(word) != *complemented)
        }
        (VarietyTag::Jsl, FreeElem::WordSet(ws)) => {
            OutputValue::Bit(ws.iter().any(|w| l0.membership(w)))
        }
        (VarietyTag::Vect(p), FreeElem::Poly(terms)) => {
            let mut acc = 0u32;
            for (w, &c) in terms {
                if l0.membership(w) {
                    acc = fp::add(p, acc, c);
                }
            }
            OutputValue::Scalar(acc)
        }
        _ => unreachable!("well_formed filtered mismatches"),
    })
}

/// Enumerates free elements built from words of length at most `max_len`.
/// For sets and posets these are the words themselves; for involution
/// algebras both signs; for pointed sets also ⊥; for semilattices the sets
/// of at most two such words (including the empty set); for vector spaces
/// the sums of at most two monomials with coefficient 1 (including the zero
/// polynomial).
pub fn enumerate_bounded(tag: VarietyTag, alphabet: &Alphabet, max_len: usize) -> Vec<FreeElem> {
    let words = crate::langcore::words_up_to(alphabet, max_len);
    match tag {
        VarietyTag::Set | VarietyTag::Pos => {
            words.into_iter().map(FreeElem::Word).collect()
        }
        VarietyTag::PSet => {
            let mut out: Vec<FreeElem> = words.into_iter().map(FreeElem::Word).collect();
            out.push(FreeElem::Bottom);
            out
        }
        VarietyTag::Inv => {
            let mut out = Vec::with_capacity(2 * words.len());
            for complemented in [false, true] {
                for w in &words {
                    out.push(FreeElem::Signed {
                        word: w.clone(),
                        complemented,
                    });
                }
            }
            out
        }
        VarietyTag::Jsl => {
            let mut out = vec![FreeElem::WordSet(BTreeSet::new())];
            for (i, u) in words.iter().enumerate() {
                out.push(FreeElem::WordSet(BTreeSet::from([u.clone()])));
                for v in words.iter().skip(i + 1) {
                    out.push(FreeElem::WordSet(BTreeSet::from([u.clone(), v.clone()])));
                }
            }
            out
        }
        VarietyTag::Vect(_) => {
            let mut out = vec![FreeElem::Poly(BTreeMap::new())];
            for (i, u) in words.iter().enumerate() {
                out.push(FreeElem::Poly(BTreeMap::from([(u.clone(), 1)])));
                for v in words.iter().skip(i + 1) {
                    out.push(FreeElem::Poly(BTreeMap::from([
                        (u.clone(), 1),
                        (v.clone(), 1),
                    ])));
                }
            }
            out
        }
    }
}

/// Parses the textual free-element syntax for `tag`:
/// words `ab` (and `ε`); pointed `_|_` or `⊥`; involution `~ab`;
/// semilattice `{ab,ba}` (possibly `{}`); polynomial `ab+2*ba` (or `0`).
pub fn parse_free_elem(
    tag: VarietyTag,
    text: &str,
    alphabet: &Alphabet,
) -> Result<FreeElem, FreemonError> {
    tag.validate()?;
    let text = text.trim();
    match tag {
        VarietyTag::Set | VarietyTag::Pos => Ok(FreeElem::Word(Word::parse(text, alphabet)?)),
        VarietyTag::PSet => {
            if text == "_|_" || text == "⊥" {
                Ok(FreeElem::Bottom)
            } else {
                Ok(FreeElem::Word(Word::parse(text, alphabet)?))
            }
        }
        VarietyTag::Inv => {
            if let Some(rest) = text.strip_prefix('~') {
                Ok(FreeElem::Signed {
                    word: Word::parse(rest, alphabet)?,
                    complemented: true,
                })
            } else {
                Ok(FreeElem::Signed {
                    word: Word::parse(text, alphabet)?,
                    complemented: false,
                })
            }
        }
        VarietyTag::Jsl => {
            let inner = text
                .strip_prefix('{')
                .and_then(|t| t.strip_suffix('}'))
                .ok_or_else(|| {
                    FreemonError::Parse(format!("expected {{...}} for a word set, got '{text}'"))
                })?;
            let mut set = BTreeSet::new();
            if !inner.trim().is_empty() {
                for item in inner.split(',') {
                    set.insert(Word::parse(item.trim(), alphabet)?);
                }
            }
            Ok(FreeElem::WordSet(set))
        }
        VarietyTag::Vect(p) => {
            if text == "0" {
                return Ok(FreeElem::Poly(BTreeMap::new()));
            }
            if text.is_empty() {
                return Err(FreemonError::Parse("empty polynomial".into()));
            }
            let mut terms: BTreeMap<Word, u32> = BTreeMap::new();
            for term in text.split('+') {
                let term = term.trim();
                let (coeff, word_text) = match term.split_once('*') {
                    Some((c, w)) => {
                        let c: u32 = c.trim().parse().map_err(|_| {
                            FreemonError::Parse(format!("bad coefficient in '{term}'"))
                        })?;
                        (c % p, w.trim())
                    }
                    None => (1, term),
                };
                let w = Word::parse(word_text, alphabet)?;
                let entry = terms.entry(w).or_insert(0);
                *entry = fp::add(p, *entry, coeff);
            }
            terms.retain(|_, c| *c != 0);
            Ok(FreeElem::Poly(terms))
        }
    }
}

impl fmt::Display for FreeElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FreeElem::Word(w) => write!(f, "{w}"),
            FreeElem::Bottom => write!(f, "⊥"),
            FreeElem::Signed { word, complemented } => {
                if *complemented {
                    write!(f, "~{word}")
                } else {
                    write!(f, "{word}")
                }
            }
            FreeElem::WordSet(ws) => {
                let mut sorted: Vec<&Word> = ws.iter().collect();
                sorted.sort_by_key(|w| (w.len(), (*w).clone()));
                write!(f, "{{")?;
                for (i, w) in sorted.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{w}")?;
                }
                write!(f, "}}")
            }
            FreeElem::Poly(terms) => {
                if terms.is_empty() {
                    return write!(f, "0");
                }
                let mut sorted: Vec<(&Word, &u32)> = terms.iter().collect();
                sorted.sort_by_key(|(w, _)| (w.len(), (*w).clone()));
                for (i, (w, c)) in sorted.iter().enumerate() {
                    if i > 0 {
                        write!(f, "+")?;
                    }
                    if **c != 1 {
                        write!(f, "{c}*")?;
                    }
                    write!(f, "{w}")?;
                }
                Ok(())
            }
        }
    }
}
