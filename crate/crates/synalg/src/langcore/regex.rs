use std::fmt;

use thiserror::Error;

use super::{Alphabet, LangError};

/// Abstract syntax of regular expressions over a declared alphabet.
///
/// Grammar: `e ::= ∅ | ε | a | e|e | ee | e*`, with parentheses. Union binds
/// weakest, then concatenation, then iteration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Regex {
    Empty,
    Epsilon,
    Literal(char),
    Union(Box<Regex>, Box<Regex>),
    Concat(Box<Regex>, Box<Regex>),
    Star(Box<Regex>),
}

/// A regex syntax error with the character position it occurred at.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at position {position}: {message}")]
pub struct RegexParseError {
    pub position: usize,
    pub message: String,
}

impl RegexParseError {
    fn new(position: usize, message: impl Into<String>) -> Self {
        RegexParseError {
            position,
            message: message.into(),
        }
    }
}

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    alphabet: &'a Alphabet,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek();
        if c.is_some() {
            self.pos += 1;
        }
        c
    }

    fn union(&mut self) -> Result<Regex, RegexParseError> {
        let mut left = self.concat()?;
        while self.peek() == Some('|') {
            self.bump();
            let right = self.concat()?;
            left = Regex::Union(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn concat(&mut self) -> Result<Regex, RegexParseError> {
        let mut left = self.postfix()?;
        while let Some(c) = self.peek() {
            if c == '|' || c == ')' {
                break;
            }
            let right = self.postfix()?;
            left = Regex::Concat(Box::new(left), Box::new(right));
        }
        Ok(left)
    }

    fn postfix(&mut self) -> Result<Regex, RegexParseError> {
        let mut e = self.atom()?;
        while self.peek() == Some('*') {
            self.bump();
            e = Regex::Star(Box::new(e));
        }
        Ok(e)
    }

    fn atom(&mut self) -> Result<Regex, RegexParseError> {
        match self.peek() {
            None => Err(RegexParseError::new(self.pos, "unexpected end of input")),
            Some('(') => {
                let open = self.pos;
                self.bump();
                let inner = self.union()?;
                if self.bump() != Some(')') {
                    return Err(RegexParseError::new(open, "unclosed '('"));
                }
                Ok(inner)
            }
            Some('∅') => {
                self.bump();
                Ok(Regex::Empty)
            }
            Some('ε') => {
                self.bump();
                Ok(Regex::Epsilon)
            }
            Some(c @ ('*' | '|' | ')')) => Err(RegexParseError::new(
                self.pos,
                format!("unexpected '{c}'"),
            )),
            Some(c) => {
                if self.alphabet.index_of(c).is_none() {
                    return Err(RegexParseError::new(
                        self.pos,
                        format!("letter '{c}' is not in the alphabet"),
                    ));
                }
                self.bump();
                Ok(Regex::Literal(c))
            }
        }
    }
}

/// Parses `text` into a [`Regex`] over `alphabet`.
///
/// The empty string is rejected (there is no empty expression; write `∅` or
/// `ε` explicitly). Whitespace is not allowed.
pub fn parse_regex(text: &str, alphabet: &Alphabet) -> Result<Regex, RegexParseError> {
    let mut p = Parser {
        chars: text.chars().collect(),
        pos: 0,
        alphabet,
    };
    if p.chars.is_empty() {
        return Err(RegexParseError::new(0, "empty expression"));
    }
    let e = p.union()?;
    if p.pos != p.chars.len() {
        return Err(RegexParseError::new(
            p.pos,
            format!("unexpected '{}'", p.chars[p.pos]),
        ));
    }
    Ok(e)
}

impl Regex {
    /// Reference semantics: decides membership by structural recursion,
    /// trying every split point for concatenations and iterations. Quadratic
    /// and slow, but entirely independent of the automaton pipeline; tests
    /// use it as the ground-truth matcher.
    pub fn matches_slow(&self, word: &[char]) -> bool {
        match self {
            Regex::Empty => false,
            Regex::Epsilon => word.is_empty(),
            Regex::Literal(c) => word.len() == 1 && word[0] == *c,
            Regex::Union(l, r) => l.matches_slow(word) || r.matches_slow(word),
            Regex::Concat(l, r) => (0..=word.len())
                .any(|k| l.matches_slow(&word[..k]) && r.matches_slow(&word[k..])),
            Regex::Star(inner) => {
                if word.is_empty() {
                    return true;
                }
                // First block nonempty, so recursion terminates.
                (1..=word.len()).any(|k| {
                    inner.matches_slow(&word[..k]) && self.matches_slow(&word[k..])
                })
            }
        }
    }

    /// Checks that every literal belongs to `alphabet`.
    pub fn check_alphabet(&self, alphabet: &Alphabet) -> Result<(), LangError> {
        match self {
            Regex::Empty | Regex::Epsilon => Ok(()),
            Regex::Literal(c) => {
                if alphabet.index_of(*c).is_some() {
                    Ok(())
                } else {
                    Err(LangError::LetterOutsideAlphabet(*c))
                }
            }
            Regex::Union(l, r) | Regex::Concat(l, r) => {
                l.check_alphabet(alphabet)?;
                r.check_alphabet(alphabet)
            }
            Regex::Star(inner) => inner.check_alphabet(alphabet),
        }
    }
}

impl fmt::Display for Regex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // Re-inserts the minimal parentheses.
        fn go(e: &Regex, f: &mut fmt::Formatter<'_>, prec: u8) -> fmt::Result {
            let my_prec = match e {
                Regex::Union(..) => 0,
                Regex::Concat(..) => 1,
                _ => 2,
            };
            if my_prec < prec {
                write!(f, "(")?;
            }
            match e {
                Regex::Empty => write!(f, "∅")?,
                Regex::Epsilon => write!(f, "ε")?,
                Regex::Literal(c) => write!(f, "{c}")?,
                Regex::Union(l, r) => {
                    go(l, f, 0)?;
                    write!(f, "|")?;
                    go(r, f, 0)?;
                }
                Regex::Concat(l, r) => {
                    go(l, f, 1)?;
                    go(r, f, 1)?;
                }
                Regex::Star(inner) => {
                    go(inner, f, 2)?;
                    write!(f, "*")?;
                }
            }
            if my_prec < prec {
                write!(f, ")")?;
            }
            Ok(())
        }
        go(self, f, 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ab() -> Alphabet {
        Alphabet::from_str("ab").unwrap()
    }

    #[test]
    fn parses_star_of_concat() {
        let r = parse_regex("(ab)*", &ab()).unwrap();
        assert_eq!(
            r,
            Regex::Star(Box::new(Regex::Concat(
                Box::new(Regex::Literal('a')),
                Box::new(Regex::Literal('b'))
            )))
        );
    }

    #[test]
    fn parses_union() {
        let r = parse_regex("a|b", &ab()).unwrap();
        assert_eq!(
            r,
            Regex::Union(
                Box::new(Regex::Literal('a')),
                Box::new(Regex::Literal('b'))
            )
        );
    }

    #[test]
    fn rejects_empty_expression() {
        let err = parse_regex("", &ab()).unwrap_err();
        assert_eq!(err.position, 0);
    }

    #[test]
    fn rejects_foreign_letter_with_position() {
        let err = parse_regex("ac", &ab()).unwrap_err();
        assert_eq!(err.position, 1);
        assert!(err.message.contains('c'));
    }

    #[test]
    fn rejects_unbalanced_parens() {
        assert!(parse_regex("((", &ab()).is_err());
        assert!(parse_regex("a)", &ab()).is_err());
        assert!(parse_regex("(a", &ab()).is_err());
    }

    #[test]
    fn precedence_union_concat_star() {
        // ab|b* parses as (ab)|(b*)
        let r = parse_regex("ab|b*", &ab()).unwrap();
        match r {
            Regex::Union(l, r) => {
                assert!(matches!(*l, Regex::Concat(..)));
                assert!(matches!(*r, Regex::Star(..)));
            }
            other => panic!("unexpected parse: {other:?}"),
        }
    }

    #[test]
    fn display_round_trips() {
        for s in ["(ab)*", "a|b", "∅", "ε", "(a|b)*a(a|b)*", "a**"] {
            let r = parse_regex(s, &ab()).unwrap();
            let shown = r.to_string();
            let again = parse_regex(&shown, &ab()).unwrap();
            assert_eq!(r, again, "{s} -> {shown}");
        }
    }

    #[test]
    fn slow_matcher_basics() {
        let r = parse_regex("(ab)*", &ab()).unwrap();
        assert!(r.matches_slow(&[]));
        assert!(r.matches_slow(&['a', 'b', 'a', 'b']));
        assert!(!r.matches_slow(&['a', 'a', 'b']));
        let e = parse_regex("∅", &ab()).unwrap();
        assert!(!e.matches_slow(&[]));
    }
}
