use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt::Write as _;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

use super::nfa::Nfa;
use super::regex::Regex;
use super::word::{Alphabet, Word};
use super::LangError;

/// A total deterministic finite automaton.
///
/// States are `0..states()`. `trans[q][l]` is the successor of `q` on the
/// `l`-th alphabet letter; the mapping is always total. Values produced by
/// [`Dfa::minimized`] are in *canonical form*: states are numbered by
/// breadth-first search from the initial state with letters in alphabet
/// order, so two canonical DFAs accept the same language iff they are equal.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "DfaRepr", into = "DfaRepr")]
pub struct Dfa {
    alphabet: Alphabet,
    initial: usize,
    finals: Vec<bool>,
    trans: Vec<Vec<usize>>,
    /// Set when Moore refinement produced the discrete partition, i.e. the
    /// value is known minimal (and canonical).
    minimal: bool,
}

/// Wire format: `{alphabet, states, initial, finals, trans}` with `finals` a
/// sorted list of state indices.
#[derive(Serialize, Deserialize)]
struct DfaRepr {
    alphabet: Vec<char>,
    states: usize,
    initial: usize,
    finals: Vec<usize>,
    trans: Vec<Vec<usize>>,
}

impl TryFrom<DfaRepr> for Dfa {
    type Error = LangError;
    fn try_from(r: DfaRepr) -> Result<Dfa, LangError> {
        let alphabet = Alphabet::new(r.alphabet)?;
        let mut finals = vec![false; r.states];
        for q in r.finals {
            if q >= r.states {
                return Err(LangError::InvalidAutomaton(format!(
                    "final state {q} out of range"
                )));
            }
            finals[q] = true;
        }
        Dfa::new(alphabet, r.initial, finals, r.trans)
    }
}

impl From<Dfa> for DfaRepr {
    fn from(d: Dfa) -> DfaRepr {
        DfaRepr {
            alphabet: d.alphabet.letters().to_vec(),
            states: d.states(),
            initial: d.initial,
            finals: (0..d.states()).filter(|&q| d.finals[q]).collect(),
            trans: d.trans,
        }
    }
}

impl PartialEq for Dfa {
    fn eq(&self, other: &Self) -> bool {
        self.alphabet == other.alphabet
            && self.initial == other.initial
            && self.finals == other.finals
            && self.trans == other.trans
    }
}

impl Eq for Dfa {}

impl Hash for Dfa {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.alphabet.hash(state);
        self.initial.hash(state);
        self.finals.hash(state);
        self.trans.hash(state);
    }
}

impl Dfa {
    /// Builds a DFA, validating totality and index ranges.
    pub fn new(
        alphabet: Alphabet,
        initial: usize,
        finals: Vec<bool>,
        trans: Vec<Vec<usize>>,
    ) -> Result<Dfa, LangError> {
        let n = trans.len();
        if n == 0 {
            return Err(LangError::InvalidAutomaton("no states".into()));
        }
        if finals.len() != n {
            return Err(LangError::InvalidAutomaton(
                "finals length does not match state count".into(),
            ));
        }
        if initial >= n {
            return Err(LangError::InvalidAutomaton("initial state out of range".into()));
        }
        for (q, row) in trans.iter().enumerate() {
            if row.len() != alphabet.len() {
                return Err(LangError::InvalidAutomaton(format!(
                    "state {q} has {} transitions, expected {}",
                    row.len(),
                    alphabet.len()
                )));
            }
            for &t in row {
                if t >= n {
                    return Err(LangError::InvalidAutomaton(format!(
                        "transition from state {q} out of range"
                    )));
                }
            }
        }
        Ok(Dfa {
            alphabet,
            initial,
            finals,
            trans,
            minimal: false,
        })
    }

    pub(crate) fn from_parts_unchecked(
        alphabet: Alphabet,
        initial: usize,
        finals: Vec<bool>,
        trans: Vec<Vec<usize>>,
    ) -> Dfa {
        Dfa {
            alphabet,
            initial,
            finals,
            trans,
            minimal: false,
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn states(&self) -> usize {
        self.trans.len()
    }

    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn is_final(&self, q: usize) -> bool {
        self.finals[q]
    }

    pub fn is_minimal(&self) -> bool {
        self.minimal
    }

    /// Successor of `q` on the letter with index `l`.
    pub fn step(&self, q: usize, l: usize) -> usize {
        self.trans[q][l]
    }

    /// Runs `letters` from state `q`.
    pub fn run_from(&self, q: usize, letters: &[char]) -> usize {
        let mut cur = q;
        for &c in letters {
            let l = self
                .alphabet
                .index_of(c)
                .expect("word letters must come from the automaton's alphabet");
            cur = self.trans[cur][l];
        }
        cur
    }

    /// True iff `w` is accepted.
    pub fn membership(&self, w: &Word) -> bool {
        self.finals[self.run_from(self.initial, w.letters())]
    }

    /// Membership for a word given as a string slice.
    pub fn accepts(&self, s: &str) -> Result<bool, LangError> {
        let w = Word::parse(s, &self.alphabet)?;
        Ok(self.membership(&w))
    }

    /// Restricts to the states reachable from the initial state.
    fn trimmed(&self) -> Dfa {
        let n = self.states();
        let mut order = Vec::new();
        let mut seen = vec![false; n];
        let mut queue = VecDeque::new();
        seen[self.initial] = true;
        queue.push_back(self.initial);
        while let Some(q) = queue.pop_front() {
            order.push(q);
            for l in 0..self.alphabet.len() {
                let t = self.trans[q][l];
                if !seen[t] {
                    seen[t] = true;
                    queue.push_back(t);
                }
            }
        }
        if order.len() == n {
            return self.clone();
        }
        let mut renumber = vec![usize::MAX; n];
        for (new, &old) in order.iter().enumerate() {
            renumber[old] = new;
        }
        let trans = order
            .iter()
            .map(|&old| {
                (0..self.alphabet.len())
                    .map(|l| renumber[self.trans[old][l]])
                    .collect()
            })
            .collect();
        let finals = order.iter().map(|&old| self.finals[old]).collect();
        Dfa {
            alphabet: self.alphabet.clone(),
            initial: renumber[self.initial],
            finals,
            trans,
            minimal: false,
        }
    }

    /// Moore partition refinement, then breadth-first canonical renumbering.
    ///
    /// The result accepts the same language, has no two states with equal
    /// state-languages, and is in canonical form.
    pub fn minimized(&self) -> Dfa {
        let d = self.trimmed();
        let n = d.states();
        let k = d.alphabet.len();

        // block[q] starts as final/non-final and is refined by transition
        // signatures until stable.
        let mut block: Vec<usize> = d.finals.iter().map(|&f| usize::from(f)).collect();
        let mut block_count = if d.finals.iter().any(|&f| f) && d.finals.iter().any(|&f| !f) {
            2
        } else {
            1
        };
        // Normalize the one-block case to ids starting at 0.
        if block_count == 1 {
            for b in block.iter_mut() {
                *b = 0;
            }
        }
        loop {
            let mut sig_ids: HashMap<Vec<usize>, usize> = HashMap::new();
            let mut next_block = vec![0usize; n];
            for q in 0..n {
                let mut sig = Vec::with_capacity(k + 1);
                sig.push(block[q]);
                for l in 0..k {
                    sig.push(block[d.trans[q][l]]);
                }
                let fresh = sig_ids.len();
                let id = *sig_ids.entry(sig).or_insert(fresh);
                next_block[q] = id;
            }
            let new_count = sig_ids.len();
            block = next_block;
            if new_count == block_count {
                break;
            }
            block_count = new_count;
        }

        // Quotient transition table on blocks.
        let mut block_trans = vec![vec![usize::MAX; k]; block_count];
        let mut block_final = vec![false; block_count];
        for q in 0..n {
            let b = block[q];
            block_final[b] = d.finals[q];
            for l in 0..k {
                block_trans[b][l] = block[d.trans[q][l]];
            }
        }

        // Canonical numbering: BFS from the initial block, letters in
        // alphabet order.
        let mut canon = vec![usize::MAX; block_count];
        let mut order = Vec::with_capacity(block_count);
        let mut queue = VecDeque::new();
        canon[block[d.initial]] = 0;
        order.push(block[d.initial]);
        queue.push_back(block[d.initial]);
        while let Some(b) = queue.pop_front() {
            for l in 0..k {
                let t = block_trans[b][l];
                if canon[t] == usize::MAX {
                    canon[t] = order.len();
                    order.push(t);
                    queue.push_back(t);
                }
            }
        }

        let trans = order
            .iter()
            .map(|&b| (0..k).map(|l| canon[block_trans[b][l]]).collect())
            .collect();
        let finals = order.iter().map(|&b| block_final[b]).collect();
        Dfa {
            alphabet: d.alphabet,
            initial: 0,
            finals,
            trans,
            minimal: true,
        }
    }

    /// The minimal DFA of `a⁻¹L = {w : aw ∈ L}`.
    pub fn left_derivative(&self, a: char) -> Result<Dfa, LangError> {
        let l = self
            .alphabet
            .index_of(a)
            .ok_or(LangError::LetterOutsideAlphabet(a))?;
        let mut d = self.clone();
        d.initial = d.trans[d.initial][l];
        d.minimal = false;
        Ok(d.minimized())
    }

    /// The minimal DFA of `La⁻¹ = {w : wa ∈ L}`.
    pub fn right_derivative(&self, a: char) -> Result<Dfa, LangError> {
        let l = self
            .alphabet
            .index_of(a)
            .ok_or(LangError::LetterOutsideAlphabet(a))?;
        let mut d = self.clone();
        d.finals = (0..d.states()).map(|q| self.finals[self.trans[q][l]]).collect();
        d.minimal = false;
        Ok(d.minimized())
    }

    /// The minimal DFA of the reversed language `{reverse(w) : w ∈ L}`.
    pub fn reversed(&self) -> Dfa {
        Nfa::reverse_of(self).determinize().minimized()
    }

    /// Exact language equality, decided by a synchronized product walk.
    pub fn language_equal(&self, other: &Dfa) -> Result<bool, LangError> {
        if self.alphabet != other.alphabet {
            return Err(LangError::AlphabetMismatch);
        }
        let k = self.alphabet.len();
        let mut seen = HashSet::new();
        let mut queue = VecDeque::new();
        let start = (self.initial, other.initial);
        seen.insert(start);
        queue.push_back(start);
        while let Some((p, q)) = queue.pop_front() {
            if self.finals[p] != other.finals[q] {
                return Ok(false);
            }
            for l in 0..k {
                let t = (self.trans[p][l], other.trans[q][l]);
                if seen.insert(t) {
                    queue.push_back(t);
                }
            }
        }
        Ok(true)
    }

    /// Exact language inclusion `L(self) ⊆ L(other)`.
    pub fn language_included(&self, other: &Dfa) -> Result<bool, LangError> {
        if self.alphabet != other.alphabet {
            return Err(LangError::AlphabetMismatch);
        }
        Ok(self.product_inclusion(self.initial, other, other.initial))
    }

    fn product_inclusion(&self, p0: usize, other: &Dfa, q0: usize) -> bool {
        let k = self.alphabet.len();
        let mut seen = HashSet::new();
        let mut queue = VecDeque::new();
        seen.insert((p0, q0));
        queue.push_back((p0, q0));
        while let Some((p, q)) = queue.pop_front() {
            if self.finals[p] && !other.finals[q] {
                return false;
            }
            for l in 0..k {
                let t = (self.trans[p][l], other.trans[q][l]);
                if seen.insert(t) {
                    queue.push_back(t);
                }
            }
        }
        true
    }

    /// Language inclusion between two states of this automaton:
    /// `L(p) ⊆ L(q)`.
    pub fn state_language_included(&self, p: usize, q: usize) -> bool {
        self.product_inclusion(p, self, q)
    }

    /// Language equality between two states of this automaton.
    pub fn state_language_equal(&self, p: usize, q: usize) -> bool {
        self.state_language_included(p, q) && self.state_language_included(q, p)
    }

    /// True iff `L(p)` is the set-complement of `L(q)`, i.e. every
    /// synchronously reachable pair has opposite acceptance.
    pub fn state_language_complement_equal(&self, p: usize, q: usize) -> bool {
        let k = self.alphabet.len();
        let mut seen = HashSet::new();
        let mut queue = VecDeque::new();
        seen.insert((p, q));
        queue.push_back((p, q));
        while let Some((s, t)) = queue.pop_front() {
            if self.finals[s] == self.finals[t] {
                return false;
            }
            for l in 0..k {
                let next = (self.trans[s][l], self.trans[t][l]);
                if seen.insert(next) {
                    queue.push_back(next);
                }
            }
        }
        true
    }

    /// True iff no final state is reachable from `q`.
    pub fn state_is_dead(&self, q: usize) -> bool {
        let mut seen = HashSet::new();
        let mut queue = VecDeque::new();
        seen.insert(q);
        queue.push_back(q);
        while let Some(s) = queue.pop_front() {
            if self.finals[s] {
                return false;
            }
            for l in 0..self.alphabet.len() {
                let t = self.trans[s][l];
                if seen.insert(t) {
                    queue.push_back(t);
                }
            }
        }
        true
    }

    /// Serializes to the documented JSON object.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("DFA serialization cannot fail")
    }

    pub fn from_json(s: &str) -> Result<Dfa, LangError> {
        serde_json::from_str(s)
            .map_err(|e| LangError::InvalidAutomaton(format!("bad DFA JSON: {e}")))
    }

    /// GraphViz rendering; final states are doublecircled.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph dfa {\n  rankdir=LR;\n  node [shape=circle];\n");
        let _ = writeln!(out, "  init [shape=point];");
        let _ = writeln!(out, "  init -> q{};", self.initial);
        for q in 0..self.states() {
            if self.finals[q] {
                let _ = writeln!(out, "  q{q} [shape=doublecircle];");
            }
        }
        for q in 0..self.states() {
            // Group parallel edges into one label.
            let mut by_target: HashMap<usize, Vec<char>> = HashMap::new();
            for l in 0..self.alphabet.len() {
                by_target
                    .entry(self.trans[q][l])
                    .or_default()
                    .push(self.alphabet.letter(l));
            }
            let mut targets: Vec<_> = by_target.into_iter().collect();
            targets.sort();
            for (t, letters) in targets {
                let label: String = letters
                    .iter()
                    .map(|c| c.to_string())
                    .collect::<Vec<_>>()
                    .join(",");
                let _ = writeln!(out, "  q{q} -> q{t} [label=\"{label}\"];");
            }
        }
        out.push_str("}\n");
        out
    }
}

/// Compiles a regex to the canonical minimal DFA over `alphabet`.
pub fn regex_to_min_dfa(regex: &Regex, alphabet: &Alphabet) -> Result<Dfa, LangError> {
    regex.check_alphabet(alphabet)?;
    Ok(Nfa::thompson(regex, alphabet).determinize().minimized())
}

#[cfg(test)]
mod tests {
    use super::super::regex::parse_regex;
    use super::super::word::words_up_to;
    use super::*;

    fn ab() -> Alphabet {
        Alphabet::from_str("ab").unwrap()
    }

    fn min(s: &str) -> Dfa {
        regex_to_min_dfa(&parse_regex(s, &ab()).unwrap(), &ab()).unwrap()
    }

    /// Independent state-count oracle: the number of distinct residual
    /// languages w⁻¹L, with both the residual prefixes and the probe suffixes
    /// enumerated up to `depth`.
    fn residual_count(regex: &Regex, depth: usize) -> usize {
        let words = words_up_to(&ab(), depth);
        let mut profiles = std::collections::HashSet::new();
        for w in &words {
            let profile: Vec<bool> = words
                .iter()
                .map(|v| {
                    let mut wv = w.letters().to_vec();
                    wv.extend_from_slice(v.letters());
                    regex.matches_slow(&wv)
                })
                .collect();
            profiles.insert(profile);
        }
        profiles.len()
    }

    #[test]
    fn min_dfa_state_counts_match_residual_oracle() {
        for (s, expect) in [
            ("(ab)*", 3),
            ("∅", 1),
            ("(a|b)*", 1),
            ("(a|b)*a(a|b)*", 2),
            ("a*", 2),
            ("(a|b)*a", 2),
        ] {
            let r = parse_regex(s, &ab()).unwrap();
            assert_eq!(residual_count(&r, 6), expect, "oracle for {s}");
            assert_eq!(min(s).states(), expect, "minimized {s}");
        }
    }

    #[test]
    fn membership_agrees_with_slow_matcher() {
        for s in ["(ab)*", "(a|b)*a(a|b)*", "a*b*", "(b|ab)*(ε|a)", "∅", "ε"] {
            let r = parse_regex(s, &ab()).unwrap();
            let d = min(s);
            for w in words_up_to(&ab(), 7) {
                assert_eq!(
                    d.membership(&w),
                    r.matches_slow(w.letters()),
                    "{s} on {w}"
                );
            }
        }
    }

    #[test]
    fn membership_examples() {
        let d = min("(ab)*");
        assert!(d.accepts("abab").unwrap());
        assert!(!d.accepts("aab").unwrap());
        assert!(!min("∅").accepts("").unwrap());
    }

    #[test]
    fn empty_and_full_language_shapes() {
        let e = min("∅");
        assert_eq!(e.states(), 1);
        assert!(!e.is_final(0));
        let f = min("(a|b)*");
        assert_eq!(f.states(), 1);
        assert!(f.is_final(0));
    }

    #[test]
    fn minimization_is_idempotent_and_canonical() {
        for s in ["(ab)*", "((ab)*)*", "(a|b)*a", "a*b*", "(aab)*"] {
            let d = min(s);
            assert_eq!(d, d.minimized(), "re-minimizing {s} changed the value");
        }
        // Equivalent regexes give identical canonical DFAs.
        assert_eq!(min("(ab)*"), min("((ab)*)*"));
        assert_eq!(min("a|b"), min("b|a"));
    }

    #[test]
    fn left_derivative_examples() {
        assert!(min("(ab)*")
            .left_derivative('a')
            .unwrap()
            .language_equal(&min("b(ab)*"))
            .unwrap());
        assert!(min("(ab)*")
            .left_derivative('b')
            .unwrap()
            .language_equal(&min("∅"))
            .unwrap());
        assert!(min("(a|b)*")
            .left_derivative('a')
            .unwrap()
            .language_equal(&min("(a|b)*"))
            .unwrap());
        assert!(min("(ab)*").left_derivative('c').is_err());
    }

    #[test]
    fn right_derivative_examples() {
        assert!(min("(ab)*")
            .right_derivative('b')
            .unwrap()
            .language_equal(&min("(ab)*a"))
            .unwrap());
        assert!(min("(ab)*")
            .right_derivative('a')
            .unwrap()
            .language_equal(&min("∅"))
            .unwrap());
        assert!(min("(a|b)*")
            .right_derivative('b')
            .unwrap()
            .language_equal(&min("(a|b)*"))
            .unwrap());
    }

    #[test]
    fn reversal_examples() {
        assert!(min("(ab)*").reversed().language_equal(&min("(ba)*")).unwrap());
        assert!(min("a(a|b)*")
            .reversed()
            .language_equal(&min("(a|b)*a"))
            .unwrap());
        assert!(min("(a|b)*").reversed().language_equal(&min("(a|b)*")).unwrap());
    }

    #[test]
    fn language_equal_examples() {
        assert!(min("(ab)*").language_equal(&min("((ab)*)*")).unwrap());
        assert!(!min("a").language_equal(&min("b")).unwrap());
        assert!(min("∅").language_equal(&min("∅")).unwrap());
        let other = regex_to_min_dfa(
            &parse_regex("a", &Alphabet::from_str("a").unwrap()).unwrap(),
            &Alphabet::from_str("a").unwrap(),
        )
        .unwrap();
        assert_eq!(
            min("a").language_equal(&other),
            Err(LangError::AlphabetMismatch)
        );
    }

    #[test]
    fn membership_via_iterated_left_derivatives() {
        // membership(d, w) equals ε-membership after deriving by each letter,
        // exhaustively for all words of length <= 8.
        for s in ["(ab)*", "(a|b)*a(a|b)*", "(b|ab)*(ε|a)"] {
            let d = min(s);
            for w in words_up_to(&ab(), 8) {
                let mut cur = d.clone();
                for &c in w.letters() {
                    cur = cur.left_derivative(c).unwrap();
                }
                assert_eq!(
                    cur.membership(&Word::epsilon()),
                    d.membership(&w),
                    "{s} on {w}"
                );
            }
        }
    }

    #[test]
    fn derivatives_commute_with_reversal() {
        // (a⁻¹L)^rev = (L^rev)a⁻¹
        for s in ["(ab)*", "(a|b)*a", "a*b*", "(aab)*"] {
            let d = min(s);
            for c in ['a', 'b'] {
                let lhs = d.left_derivative(c).unwrap().reversed();
                let rhs = d.reversed().right_derivative(c).unwrap();
                assert!(lhs.language_equal(&rhs).unwrap(), "{s} / {c}");
            }
        }
    }

    #[test]
    fn reversal_is_an_involution() {
        for s in ["(ab)*", "(a|b)*a", "a*b*", "(aab)*", "∅"] {
            let d = min(s);
            assert!(d.reversed().reversed().language_equal(&d).unwrap());
        }
    }

    #[test]
    fn myhill_nerode_residual_count_equals_states() {
        // Number of distinct languages among {w⁻¹L : |w| <= #states}, using
        // canonical minimal DFAs of iterated derivatives as identity.
        for s in ["(ab)*", "(a|b)*a(a|b)*", "(aab)*", "a*b*"] {
            let d = min(s);
            let mut distinct = HashSet::new();
            for w in words_up_to(&ab(), d.states()) {
                let mut cur = d.clone();
                for &c in w.letters() {
                    cur = cur.left_derivative(c).unwrap();
                }
                distinct.insert(cur);
            }
            assert_eq!(distinct.len(), d.states(), "{s}");
        }
    }

    #[test]
    fn json_round_trip_preserves_language_and_layout() {
        let d = min("(ab)*");
        let json = d.to_json();
        assert!(json.starts_with("{\"alphabet\":[\"a\",\"b\"],\"states\":3"));
        let back = Dfa::from_json(&json).unwrap();
        assert_eq!(d, back);
    }

    #[test]
    fn json_rejects_partial_transition_tables() {
        let bad = r#"{"alphabet":["a","b"],"states":2,"initial":0,"finals":[0],"trans":[[1],[0,1]]}"#;
        assert!(Dfa::from_json(bad).is_err());
        let oob = r#"{"alphabet":["a","b"],"states":2,"initial":5,"finals":[0],"trans":[[1,0],[0,1]]}"#;
        assert!(Dfa::from_json(oob).is_err());
    }

    #[test]
    fn dead_state_detection() {
        let d = min("(ab)*");
        let dead: Vec<usize> = (0..d.states()).filter(|&q| d.state_is_dead(q)).collect();
        assert_eq!(dead.len(), 1);
        assert!(min("(a|b)*").state_is_dead(0) == false);
    }
}
