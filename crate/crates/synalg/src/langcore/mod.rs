//! Classical substrate: regular expressions, canonical minimal DFAs,
//! derivatives, reversal and exact language comparison.
//!
//! Every DFA produced here is total. Minimization uses Moore partition
//! refinement followed by a breadth-first renumbering from the initial state
//! (letters taken in alphabet order), so two minimal DFAs accept the same
//! language if and only if they are identical values. That canonical form is
//! what the rest of the crate hashes and compares.

mod dfa;
mod nfa;
mod regex;
mod word;

pub use dfa::{regex_to_min_dfa, Dfa};
pub use regex::{parse_regex, Regex, RegexParseError};
pub use word::{words_up_to, Alphabet, Word};

use thiserror::Error;

/// Errors from DFA-level operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LangError {
    /// A letter was used that the alphabet does not contain.
    #[error("letter '{0}' is not in the alphabet")]
    LetterOutsideAlphabet(char),
    /// Two automata with different alphabets were compared.
    #[error("alphabet mismatch")]
    AlphabetMismatch,
    /// A deserialized or hand-built automaton violates the representation
    /// invariants (non-total transitions, out-of-range indices, ...).
    #[error("invalid automaton: {0}")]
    InvalidAutomaton(String),
    /// The alphabet is empty, contains duplicates, or uses reserved symbols.
    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),
}
