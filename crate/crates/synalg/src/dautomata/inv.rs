use std::fmt::Write as _;

use serde::Serialize;

use crate::langcore::{Alphabet, Dfa};

/// An automaton in the involution variety: a carrier with an involution
/// `e ↦ ẽ`, transitions commuting with it, and output flipped by it.
#[derive(Debug, Clone, Serialize)]
pub struct InvAutomaton {
    pub alphabet: Alphabet,
    /// trans[element][letter]
    pub trans: Vec<Vec<usize>>,
    pub involution: Vec<usize>,
    pub output: Vec<bool>,
    pub initial: usize,
    /// Display labels: `q3` for plain states, `~q3` for complemented copies
    /// that did not merge with a plain state.
    pub labels: Vec<String>,
}

impl InvAutomaton {
    pub fn elements(&self) -> usize {
        self.trans.len()
    }

    /// Doubles the state set of the minimal DFA with complementary copies
    /// `q̃ →a (δ_a q)~`, `f(q̃) = 1−f(q)`, then merges `q̃` with the plain
    /// state `q'` whenever the language of `q'` is the complement of the
    /// language of `q`. The merge makes the automaton simple; reachability
    /// and simplicity are validated separately rather than assumed.
    pub fn minimal(l0: &Dfa) -> InvAutomaton {
        let n = l0.states();
        let k = l0.alphabet().len();
        // tilde_elem[q] = element id of q̃.
        let mut tilde_elem = vec![usize::MAX; n];
        let mut labels: Vec<String> = (0..n).map(|q| format!("q{q}")).collect();
        for q in 0..n {
            if let Some(partner) =
                (0..n).find(|&r| l0.state_language_complement_equal(r, q))
            {
                tilde_elem[q] = partner;
            }
        }
        for q in 0..n {
            if tilde_elem[q] == usize::MAX {
                tilde_elem[q] = labels.len();
                labels.push(format!("~q{q}"));
            }
        }
        let m = labels.len();

        let mut trans = vec![vec![usize::MAX; k]; m];
        let mut involution = vec![usize::MAX; m];
        let mut output = vec![false; m];
        for q in 0..n {
            involution[q] = tilde_elem[q];
            involution[tilde_elem[q]] = q;
            output[q] = l0.is_final(q);
            output[tilde_elem[q]] = !l0.is_final(q);
            for l in 0..k {
                let t = l0.step(q, l);
                trans[q][l] = t;
                trans[tilde_elem[q]][l] = tilde_elem[t];
            }
        }
        InvAutomaton {
            alphabet: l0.alphabet().clone(),
            trans,
            involution,
            output,
            initial: l0.initial(),
            labels,
        }
    }

    /// Reachability (closure under transitions and the involution from the
    /// initial element) and simplicity (behavior partition discrete).
    pub(crate) fn check(&self, violations: &mut Vec<String>) -> (bool, bool) {
        let m = self.elements();
        let mut seen = vec![false; m];
        let mut stack = vec![self.initial];
        seen[self.initial] = true;
        while let Some(e) = stack.pop() {
            for &t in self.trans[e].iter().chain([self.involution[e]].iter()) {
                if !seen[t] {
                    seen[t] = true;
                    stack.push(t);
                }
            }
        }
        let reachable = super::report_unreached(&seen, violations);

        let (block, count) = super::behavior_partition(
            m,
            self.alphabet.len(),
            |e, l| self.trans[e][l],
            |e| usize::from(self.output[e]),
        );
        let simple = count == m;
        if !simple {
            for x in 0..m {
                for y in x + 1..m {
                    if block[x] == block[y] {
                        violations.push(format!(
                            "elements {} and {} have equal behavior",
                            self.labels[x], self.labels[y]
                        ));
                    }
                }
            }
        }
        (reachable, simple)
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph inv_automaton {\n  rankdir=LR;\n  node [shape=circle];\n");
        let _ = writeln!(out, "  init [shape=point];");
        let _ = writeln!(out, "  init -> e{};", self.initial);
        for e in 0..self.elements() {
            let shape = if self.output[e] { "doublecircle" } else { "circle" };
            let _ = writeln!(
                out,
                "  e{e} [shape={shape}, label=\"{}\"];",
                self.labels[e]
            );
        }
        for e in 0..self.elements() {
            for (l, &t) in self.trans[e].iter().enumerate() {
                let _ = writeln!(
                    out,
                    "  e{e} -> e{t} [label=\"{}\"];",
                    self.alphabet.letter(l)
                );
            }
            // Complement pairing, rendered once per pair.
            let partner = self.involution[e];
            if e < partner {
                let _ = writeln!(out, "  e{e} -> e{partner} [style=dotted, dir=none];");
            }
        }
        out.push_str("}\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::langcore::{parse_regex, regex_to_min_dfa};

    fn min(s: &str) -> Dfa {
        let a = Alphabet::from_str("ab").unwrap();
        regex_to_min_dfa(&parse_regex(s, &a).unwrap(), &a).unwrap()
    }

    #[test]
    fn doubles_without_merge_for_ab_star() {
        // State languages of Min((ab)*) are (ab)*, b(ab)*, ∅; none is the
        // complement of another, so the carrier has 6 elements.
        let inv = InvAutomaton::minimal(&min("(ab)*"));
        assert_eq!(inv.elements(), 6);
        let mut violations = Vec::new();
        let (reach, simple) = inv.check(&mut violations);
        assert!(reach && simple, "{violations:?}");
    }

    #[test]
    fn merges_complementary_states() {
        // even-a: the two state languages (even #a, odd #a) are complements
        // of each other, so each q̃ merges with the other state and the
        // carrier stays at 2 elements.
        let inv = InvAutomaton::minimal(&min("(b|ab*a)*"));
        assert_eq!(inv.elements(), 2);
        assert_eq!(inv.involution, vec![1, 0]);
        let mut violations = Vec::new();
        let (reach, simple) = inv.check(&mut violations);
        assert!(reach && simple, "{violations:?}");
        // contains-an-a: complement of "contains an a" is b*, which is not a
        // state language, so nothing merges and the carrier doubles.
        let inv = InvAutomaton::minimal(&min("(a|b)*a(a|b)*"));
        assert_eq!(inv.elements(), 4);
        let mut violations = Vec::new();
        let (reach, simple) = inv.check(&mut violations);
        assert!(reach && simple, "{violations:?}");
    }

    #[test]
    fn involution_laws_hold_on_tables() {
        for s in ["(ab)*", "(a|b)*a(a|b)*", "a*b*", "(aab)*"] {
            let inv = InvAutomaton::minimal(&min(s));
            let m = inv.elements();
            for e in 0..m {
                let te = inv.involution[e];
                assert_eq!(inv.involution[te], e, "{s}: involution not involutive");
                assert_eq!(inv.output[te], !inv.output[e], "{s}: f(ẽ) != 1-f(e)");
                for l in 0..inv.alphabet.len() {
                    assert_eq!(
                        inv.trans[te][l], inv.involution[inv.trans[e][l]],
                        "{s}: δ_a(ẽ) != (δ_a e)~"
                    );
                }
            }
        }
    }
}
