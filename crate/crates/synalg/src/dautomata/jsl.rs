use std::fmt::Write as _;

use serde::Serialize;

use super::DautError;
use crate::langcore::{Alphabet, Dfa};
use crate::Limits;

/// An automaton in the join-semilattice variety: elements with a join table
/// and bottom, join-preserving transitions, and a prime-upset output
/// (`f(x ∨ y) = f(x) ∨ f(y)`, `f(⊥) = 0`).
///
/// Elements carry a representative subset of the base DFA's states, encoded
/// as a bitmask.
#[derive(Debug, Clone, Serialize)]
pub struct JslAutomaton {
    pub alphabet: Alphabet,
    pub n_base: usize,
    /// Representative subset (bitmask over base states) per element.
    pub reps: Vec<u64>,
    /// trans[element][letter]
    pub trans: Vec<Vec<usize>>,
    pub join: Vec<Vec<usize>>,
    pub bottom: usize,
    pub output: Vec<bool>,
    pub initial: usize,
}

fn guard_size(n: usize, limits: &Limits) -> Result<usize, DautError> {
    let size = 1usize.checked_shl(n as u32).unwrap_or(usize::MAX);
    if n >= 63 || size > limits.max_jsl_states {
        return Err(DautError::CapacityExceeded {
            what: "subset construction".into(),
            size,
            limit: limits.max_jsl_states,
        });
    }
    Ok(size)
}

fn subset_image(mask: u64, state_img: &[u64]) -> u64 {
    let mut out = 0u64;
    let mut rest = mask;
    while rest != 0 {
        let q = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        out |= state_img[q];
    }
    out
}

impl JslAutomaton {
    pub fn elements(&self) -> usize {
        self.reps.len()
    }

    /// The reachable-and-join-generated part of the powerset lifting,
    /// quotiented by union-language equality (decided by bisimulation on the
    /// subset automaton).
    pub fn minimal(l0: &Dfa, limits: &Limits) -> Result<JslAutomaton, DautError> {
        let n = l0.states();
        let k = l0.alphabet().len();
        let size = guard_size(n, limits)?;

        // Per-letter images of singleton states, as bitmasks.
        let state_img: Vec<Vec<u64>> = (0..k)
            .map(|l| (0..n).map(|q| 1u64 << l0.step(q, l)).collect())
            .collect();
        let final_mask: u64 = (0..n)
            .filter(|&q| l0.is_final(q))
            .fold(0, |acc, q| acc | (1u64 << q));

        // Bisimulation classes of subsets: masks with equal union-language
        // collapse. Since the base DFA is trimmed, every subset is the join
        // of reachable singletons, so the whole powerset is the reachable
        // part.
        let (block, count) = super::behavior_partition(
            size,
            k,
            |mask, l| subset_image(mask as u64, &state_img[l]) as usize,
            |mask| usize::from(mask as u64 & final_mask != 0),
        );

        // First mask per class, in numeric order, is the representative.
        let mut reps = vec![u64::MAX; count];
        for mask in 0..size {
            let b = block[mask];
            if reps[b] == u64::MAX {
                reps[b] = mask as u64;
            }
        }
        let trans = (0..count)
            .map(|c| {
                (0..k)
                    .map(|l| block[subset_image(reps[c], &state_img[l]) as usize])
                    .collect()
            })
            .collect();
        let join = (0..count)
            .map(|c| (0..count).map(|d| block[(reps[c] | reps[d]) as usize]).collect())
            .collect();
        let output = (0..count).map(|c| reps[c] & final_mask != 0).collect();
        Ok(JslAutomaton {
            alphabet: l0.alphabet().clone(),
            n_base: n,
            reps,
            trans,
            join,
            bottom: block[0],
            output,
            initial: block[1usize << l0.initial()],
        })
    }

    /// Reachability (closure of the initial element and ⊥ under transitions
    /// and binary joins) and simplicity (behavior partition discrete).
    pub(crate) fn check(&self, violations: &mut Vec<String>) -> (bool, bool) {
        let m = self.elements();
        let mut seen = vec![false; m];
        seen[self.initial] = true;
        seen[self.bottom] = true;
        // Saturate under transitions and pairwise joins.
        loop {
            let mut changed = false;
            let current: Vec<usize> = (0..m).filter(|&e| seen[e]).collect();
            for &e in &current {
                for l in 0..self.alphabet.len() {
                    let t = self.trans[e][l];
                    if !seen[t] {
                        seen[t] = true;
                        changed = true;
                    }
                }
                for &f in &current {
                    let j = self.join[e][f];
                    if !seen[j] {
                        seen[j] = true;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
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
                            "elements {{{}}} and {{{}}} have equal union-language",
                            mask_to_string(self.reps[x]),
                            mask_to_string(self.reps[y])
                        ));
                    }
                }
            }
        }
        (reachable, simple)
    }

    pub fn to_dot(&self) -> String {
        let mut out =
            String::from("digraph jsl_automaton {\n  rankdir=LR;\n  node [shape=circle];\n");
        let _ = writeln!(out, "  init [shape=point];");
        let _ = writeln!(out, "  init -> e{};", self.initial);
        for e in 0..self.elements() {
            let shape = if self.output[e] { "doublecircle" } else { "circle" };
            let mark = if e == self.bottom { " = ⊥" } else { "" };
            let _ = writeln!(
                out,
                "  e{e} [shape={shape}, label=\"{{{}}}{mark}\"];",
                mask_to_string(self.reps[e])
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
        }
        out.push_str("}\n");
        out
    }
}

fn mask_to_string(mask: u64) -> String {
    let mut parts = Vec::new();
    let mut rest = mask;
    while rest != 0 {
        let q = rest.trailing_zeros();
        rest &= rest - 1;
        parts.push(format!("q{q}"));
    }
    parts.join(",")
}

/// The full powerset lifting of a DFA, with no quotient: all `2^n` subsets,
/// union as join, pointwise image transitions, and "meets a final state" as
/// output. Used to exhibit non-simple automata; the join table is quadratic
/// in the element count, so keep the base automaton small.
pub fn jsl_powerset_lifting(l0: &Dfa, limits: &Limits) -> Result<JslAutomaton, DautError> {
    let n = l0.states();
    let k = l0.alphabet().len();
    let size = guard_size(n, limits)?;
    let state_img: Vec<Vec<u64>> = (0..k)
        .map(|l| (0..n).map(|q| 1u64 << l0.step(q, l)).collect())
        .collect();
    let final_mask: u64 = (0..n)
        .filter(|&q| l0.is_final(q))
        .fold(0, |acc, q| acc | (1u64 << q));
    let reps: Vec<u64> = (0..size as u64).collect();
    let trans = (0..size)
        .map(|mask| {
            (0..k)
                .map(|l| subset_image(mask as u64, &state_img[l]) as usize)
                .collect()
        })
        .collect();
    let join = (0..size)
        .map(|x| (0..size).map(|y| x | y).collect())
        .collect();
    let output = (0..size).map(|mask| mask as u64 & final_mask != 0).collect();
    Ok(JslAutomaton {
        alphabet: l0.alphabet().clone(),
        n_base: n,
        reps,
        trans,
        join,
        bottom: 0,
        output,
        initial: 1usize << l0.initial(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::langcore::{parse_regex, regex_to_min_dfa, words_up_to, Word};

    fn ab() -> Alphabet {
        Alphabet::from_str("ab").unwrap()
    }

    fn min(s: &str) -> Dfa {
        let a = ab();
        regex_to_min_dfa(&parse_regex(s, &a).unwrap(), &a).unwrap()
    }

    #[test]
    fn unreduced_powerset_fails_simplicity_for_ab_star() {
        // Min((ab)*) has a dead state, so {dead} and ∅ share the (empty)
        // union-language and the lifting is not simple.
        let lifting = jsl_powerset_lifting(&min("(ab)*"), &Limits::default()).unwrap();
        assert_eq!(lifting.elements(), 8);
        let mut violations = Vec::new();
        let (reach, simple) = lifting.check(&mut violations);
        assert!(reach);
        assert!(!simple);
        assert!(!violations.is_empty());
    }

    #[test]
    fn quotient_is_reachable_and_simple() {
        for s in ["(ab)*", "a*", "(a|b)*a", "(a|b)*abb"] {
            let jsl = JslAutomaton::minimal(&min(s), &Limits::default()).unwrap();
            let mut violations = Vec::new();
            let (reach, simple) = jsl.check(&mut violations);
            assert!(reach && simple, "{s}: {violations:?}");
        }
    }

    #[test]
    fn join_laws_hold_on_tables() {
        for s in ["(ab)*", "a*", "(a|b)*abb"] {
            let jsl = JslAutomaton::minimal(&min(s), &Limits::default()).unwrap();
            let m = jsl.elements();
            for x in 0..m {
                assert_eq!(jsl.join[x][x], x, "{s}: join not idempotent");
                assert_eq!(jsl.join[jsl.bottom][x], x, "{s}: ⊥ not neutral");
                for y in 0..m {
                    assert_eq!(jsl.join[x][y], jsl.join[y][x], "{s}: join not commutative");
                    // δ_a(x ∨ y) = δ_a(x) ∨ δ_a(y)
                    for l in 0..jsl.alphabet.len() {
                        assert_eq!(
                            jsl.trans[jsl.join[x][y]][l],
                            jsl.join[jsl.trans[x][l]][jsl.trans[y][l]],
                            "{s}: transition not join-preserving"
                        );
                    }
                    // f(x ∨ y) = f(x) ∨ f(y)
                    assert_eq!(
                        jsl.output[jsl.join[x][y]],
                        jsl.output[x] || jsl.output[y],
                        "{s}: output not a join-homomorphism"
                    );
                    for z in 0..m {
                        assert_eq!(
                            jsl.join[jsl.join[x][y]][z],
                            jsl.join[x][jsl.join[y][z]],
                            "{s}: join not associative"
                        );
                    }
                }
            }
            assert!(!jsl.output[jsl.bottom], "{s}: f(⊥) != 0");
        }
    }

    #[test]
    fn quotient_behavior_matches_union_language() {
        // The word-behavior of the initial element must be the language.
        let l0 = min("(ab)*");
        let jsl = JslAutomaton::minimal(&l0, &Limits::default()).unwrap();
        for w in words_up_to(&ab(), 6) {
            let mut e = jsl.initial;
            for &c in w.letters() {
                let l = jsl.alphabet.index_of(c).unwrap();
                e = jsl.trans[e][l];
            }
            assert_eq!(jsl.output[e], l0.membership(&Word::new(w.letters().to_vec())));
        }
    }

    #[test]
    fn capacity_guard_reports_size() {
        let limits = Limits {
            max_jsl_states: 4,
            ..Limits::default()
        };
        let err = JslAutomaton::minimal(&min("(ab)*"), &limits).unwrap_err();
        match err {
            DautError::CapacityExceeded { size, limit, .. } => {
                assert_eq!(size, 8);
                assert_eq!(limit, 4);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }
}
