//! Minimal automata in each variety, built from the classical minimal DFA.
//!
//! The carrier of the automaton depends on the variety: the plain state set
//! (sets), the state set with the pointwise language-inclusion order
//! (posets), the state set with the dead state as basepoint (pointed sets),
//! a doubled state set with complementary states merged where the complement
//! language already occurs (involution algebras), the quotient of the
//! powerset automaton by union-language equality (semilattices), and the
//! forward/backward-reduced linear lifting (vector spaces).
//!
//! Every construction is validated post-hoc by [`check_reachable_simple`]:
//! reachable means the carrier is generated from the initial element by
//! transitions and the variety's operations, simple means distinct carrier
//! elements have distinct behaviors.

mod inv;
mod jsl;
mod vect;

pub use inv::InvAutomaton;
pub use jsl::{jsl_powerset_lifting, JslAutomaton};
pub use vect::{vect_linear_lifting, VectAutomaton};

use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::freemon::VarietyTag;
use crate::langcore::{Alphabet, Dfa};
use crate::Limits;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DautError {
    #[error("capacity guard exceeded: {what} needs {size}, limit {limit}")]
    CapacityExceeded {
        what: String,
        size: usize,
        limit: usize,
    },
    #[error("{0} is not prime")]
    NotPrime(u32),
}

/// An automaton in the poset variety: a DFA whose states carry the
/// language-inclusion order. Finals form an upper set and transitions are
/// monotone.
#[derive(Debug, Clone, Serialize)]
pub struct PosAutomaton {
    pub dfa: Dfa,
    /// leq[p][q] iff the state-language of p is included in that of q.
    pub leq: Vec<Vec<bool>>,
}

/// An automaton in the pointed-set variety: a DFA with a designated ⊥ state
/// (a non-final sink). The ⊥ state may be unreachable by words; as the
/// basepoint it is part of the pointed carrier regardless.
#[derive(Debug, Clone, Serialize)]
pub struct PSetAutomaton {
    pub dfa: Dfa,
    pub bottom: usize,
}

/// A finite automaton in one of the six varieties.
#[derive(Debug, Clone, Serialize)]
pub enum DAutomaton {
    Set(Dfa),
    Pos(PosAutomaton),
    PSet(PSetAutomaton),
    Inv(InvAutomaton),
    Jsl(JslAutomaton),
    Vect(VectAutomaton),
}

impl DAutomaton {
    pub fn tag(&self) -> VarietyTag {
        match self {
            DAutomaton::Set(_) => VarietyTag::Set,
            DAutomaton::Pos(_) => VarietyTag::Pos,
            DAutomaton::PSet(_) => VarietyTag::PSet,
            DAutomaton::Inv(_) => VarietyTag::Inv,
            DAutomaton::Jsl(_) => VarietyTag::Jsl,
            DAutomaton::Vect(v) => VarietyTag::Vect(v.p),
        }
    }

    pub fn alphabet(&self) -> &Alphabet {
        match self {
            DAutomaton::Set(d) => d.alphabet(),
            DAutomaton::Pos(p) => p.dfa.alphabet(),
            DAutomaton::PSet(p) => p.dfa.alphabet(),
            DAutomaton::Inv(i) => &i.alphabet,
            DAutomaton::Jsl(j) => &j.alphabet,
            DAutomaton::Vect(v) => &v.alphabet,
        }
    }

    /// Number of carrier elements; for the vector variety this is the
    /// dimension of the carrier space.
    pub fn carrier_size(&self) -> usize {
        match self {
            DAutomaton::Set(d) => d.states(),
            DAutomaton::Pos(p) => p.dfa.states(),
            DAutomaton::PSet(p) => p.dfa.states(),
            DAutomaton::Inv(i) => i.elements(),
            DAutomaton::Jsl(j) => j.elements(),
            DAutomaton::Vect(v) => v.dim,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("automaton serialization cannot fail")
    }

    /// GraphViz rendering. Order edges are dashed (posets), complement
    /// pairings dotted (involution algebras).
    pub fn to_dot(&self) -> String {
        match self {
            DAutomaton::Set(d) => d.to_dot(),
            DAutomaton::PSet(p) => {
                let mut dot = p.dfa.to_dot();
                let marker = format!("  q{} [label=\"q{} = ⊥\"];\n}}\n", p.bottom, p.bottom);
                dot.truncate(dot.len() - 2);
                dot.push_str(&marker);
                dot
            }
            DAutomaton::Pos(p) => {
                let mut dot = p.dfa.to_dot();
                dot.truncate(dot.len() - 2);
                for (a, row) in p.leq.iter().enumerate() {
                    for (b, &le) in row.iter().enumerate() {
                        if le && a != b {
                            let _ = writeln!(
                                dot,
                                "  q{a} -> q{b} [style=dashed, constraint=false];"
                            );
                        }
                    }
                }
                dot.push_str("}\n");
                dot
            }
            DAutomaton::Inv(i) => i.to_dot(),
            DAutomaton::Jsl(j) => j.to_dot(),
            DAutomaton::Vect(v) => v.to_dot(),
        }
    }
}

/// Result of the reachability and simplicity checks.
#[derive(Debug, Clone, Serialize)]
pub struct MinimalityReport {
    pub reachable: bool,
    pub simple: bool,
    pub violations: Vec<String>,
}

impl MinimalityReport {
    pub fn passed(&self) -> bool {
        self.reachable && self.simple
    }
}

/// Builds the minimal automaton for the language of `l0` in the variety
/// `tag`. The input is re-minimized if it is not already canonical.
pub fn minimal_dautomaton(
    tag: VarietyTag,
    l0: &Dfa,
    limits: &Limits,
) -> Result<DAutomaton, DautError> {
    let min;
    let l0 = if l0.is_minimal() {
        l0
    } else {
        min = l0.minimized();
        &min
    };
    match tag {
        VarietyTag::Set => Ok(DAutomaton::Set(l0.clone())),
        VarietyTag::Pos => Ok(DAutomaton::Pos(pos_automaton(l0))),
        VarietyTag::PSet => Ok(DAutomaton::PSet(pset_automaton(l0))),
        VarietyTag::Inv => Ok(DAutomaton::Inv(InvAutomaton::minimal(l0))),
        VarietyTag::Jsl => Ok(DAutomaton::Jsl(JslAutomaton::minimal(l0, limits)?)),
        VarietyTag::Vect(p) => {
            if !crate::fp::is_prime(p) {
                return Err(DautError::NotPrime(p));
            }
            if l0.states() > limits.max_dim {
                return Err(DautError::CapacityExceeded {
                    what: "linear lifting dimension".into(),
                    size: l0.states(),
                    limit: limits.max_dim,
                });
            }
            Ok(DAutomaton::Vect(vect_linear_lifting(l0, p).reduced()))
        }
    }
}

fn pos_automaton(l0: &Dfa) -> PosAutomaton {
    let n = l0.states();
    let leq = (0..n)
        .map(|p| (0..n).map(|q| l0.state_language_included(p, q)).collect())
        .collect();
    PosAutomaton {
        dfa: l0.clone(),
        leq,
    }
}

/// Designates the dead state as ⊥; adjoins a fresh non-final sink when the
/// language has no dead state (then ⊥ is unreachable by words but still part
/// of the pointed carrier).
fn pset_automaton(l0: &Dfa) -> PSetAutomaton {
    let n = l0.states();
    if let Some(dead) = (0..n).find(|&q| l0.state_is_dead(q)) {
        return PSetAutomaton {
            dfa: l0.clone(),
            bottom: dead,
        };
    }
    let k = l0.alphabet().len();
    let mut trans: Vec<Vec<usize>> = (0..n)
        .map(|q| (0..k).map(|l| l0.step(q, l)).collect())
        .collect();
    trans.push(vec![n; k]);
    let mut finals: Vec<bool> = (0..n).map(|q| l0.is_final(q)).collect();
    finals.push(false);
    let dfa = Dfa::new(l0.alphabet().clone(), l0.initial(), finals, trans)
        .expect("sink extension preserves validity");
    PSetAutomaton { dfa, bottom: n }
}

/// Behavior-partition of the states of an output-labelled transition table:
/// Moore refinement until stable. Returns the block of each state and the
/// block count.
pub(crate) fn behavior_partition(
    n: usize,
    letters: usize,
    step: impl Fn(usize, usize) -> usize,
    output_class: impl Fn(usize) -> usize,
) -> (Vec<usize>, usize) {
    let mut block: Vec<usize> = (0..n).map(&output_class).collect();
    // Normalize ids by first occurrence.
    let mut ids = std::collections::HashMap::new();
    for b in block.iter_mut() {
        let fresh = ids.len();
        *b = *ids.entry(*b).or_insert(fresh);
    }
    let mut count = ids.len();
    loop {
        let mut sig_ids: std::collections::HashMap<Vec<usize>, usize> =
            std::collections::HashMap::new();
        let mut next = vec![0usize; n];
        for q in 0..n {
            let mut sig = Vec::with_capacity(letters + 1);
            sig.push(block[q]);
            for l in 0..letters {
                sig.push(block[step(q, l)]);
            }
            let fresh = sig_ids.len();
            next[q] = *sig_ids.entry(sig).or_insert(fresh);
        }
        let new_count = sig_ids.len();
        block = next;
        if new_count == count {
            return (block, count);
        }
        count = new_count;
    }
}

/// Checks that an automaton is reachable (carrier generated from the initial
/// element under transitions and variety operations) and simple (no two
/// carrier elements share a behavior).
pub fn check_reachable_simple(a: &DAutomaton) -> MinimalityReport {
    let mut violations = Vec::new();
    let (reachable, simple) = match a {
        DAutomaton::Set(d) => {
            let reach = dfa_reachable(d, &mut violations);
            let simple = dfa_simple(d, &mut violations);
            (reach, simple)
        }
        DAutomaton::Pos(p) => {
            let reach = dfa_reachable(&p.dfa, &mut violations);
            let mut simple = dfa_simple(&p.dfa, &mut violations);
            // The order must be exactly behavior inclusion.
            let n = p.dfa.states();
            for x in 0..n {
                for y in 0..n {
                    let incl = p.dfa.state_language_included(x, y);
                    if p.leq[x][y] != incl {
                        simple = false;
                        violations.push(format!(
                            "order at ({x},{y}) is {} but behavior inclusion is {}",
                            p.leq[x][y], incl
                        ));
                    }
                }
            }
            (reach, simple)
        }
        DAutomaton::PSet(p) => {
            // Reachability over the pointed structure: ⊥ counts as present.
            let n = p.dfa.states();
            let mut seen = vec![false; n];
            seen[p.bottom] = true;
            mark_word_reachable(&p.dfa, &mut seen);
            let reach = report_unreached(&seen, &mut violations);
            let simple = dfa_simple(&p.dfa, &mut violations);
            (reach, simple)
        }
        DAutomaton::Inv(i) => i.check(&mut violations),
        DAutomaton::Jsl(j) => j.check(&mut violations),
        DAutomaton::Vect(v) => v.check(&mut violations),
    };
    MinimalityReport {
        reachable,
        simple,
        violations,
    }
}

fn mark_word_reachable(d: &Dfa, seen: &mut [bool]) {
    let mut queue = std::collections::VecDeque::new();
    if !seen[d.initial()] {
        seen[d.initial()] = true;
    }
    queue.push_back(d.initial());
    while let Some(q) = queue.pop_front() {
        for l in 0..d.alphabet().len() {
            let t = d.step(q, l);
            if !seen[t] {
                seen[t] = true;
                queue.push_back(t);
            }
        }
    }
}

fn report_unreached(seen: &[bool], violations: &mut Vec<String>) -> bool {
    let mut ok = true;
    for (q, &s) in seen.iter().enumerate() {
        if !s {
            ok = false;
            violations.push(format!("element {q} is not reachable"));
        }
    }
    ok
}

fn dfa_reachable(d: &Dfa, violations: &mut Vec<String>) -> bool {
    let mut seen = vec![false; d.states()];
    mark_word_reachable(d, &mut seen);
    report_unreached(&seen, violations)
}

fn dfa_simple(d: &Dfa, violations: &mut Vec<String>) -> bool {
    let n = d.states();
    let (block, count) = behavior_partition(
        n,
        d.alphabet().len(),
        |q, l| d.step(q, l),
        |q| usize::from(d.is_final(q)),
    );
    if count == n {
        return true;
    }
    for x in 0..n {
        for y in x + 1..n {
            if block[x] == block[y] {
                violations.push(format!("states {x} and {y} have equal behavior"));
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::langcore::{parse_regex, regex_to_min_dfa};

    fn ab() -> Alphabet {
        Alphabet::from_str("ab").unwrap()
    }

    fn min(s: &str) -> Dfa {
        let a = ab();
        regex_to_min_dfa(&parse_regex(s, &a).unwrap(), &a).unwrap()
    }

    fn build(tag: VarietyTag, s: &str) -> DAutomaton {
        minimal_dautomaton(tag, &min(s), &Limits::default()).unwrap()
    }

    #[test]
    fn set_min_is_the_dfa_itself() {
        let d = min("(ab)*");
        match build(VarietyTag::Set, "(ab)*") {
            DAutomaton::Set(inner) => assert_eq!(inner, d),
            other => panic!("wrong variant {other:?}"),
        }
    }

    #[test]
    fn set_min_is_reachable_and_simple() {
        let report = check_reachable_simple(&build(VarietyTag::Set, "(ab)*"));
        assert!(report.reachable && report.simple, "{report:?}");
    }

    #[test]
    fn pos_contains_a_orders_nonfinal_below_final() {
        // Two states; the non-final one is strictly below the final one.
        let a = build(VarietyTag::Pos, "(a|b)*a(a|b)*");
        let DAutomaton::Pos(p) = &a else { unreachable!() };
        assert_eq!(p.dfa.states(), 2);
        let nf = (0..2).find(|&q| !p.dfa.is_final(q)).unwrap();
        let fi = 1 - nf;
        assert!(p.leq[nf][fi]);
        assert!(!p.leq[fi][nf]);
        assert!(p.leq[nf][nf] && p.leq[fi][fi]);
        assert!(check_reachable_simple(&a).passed());
    }

    #[test]
    fn pos_transitions_are_monotone_and_finals_upper() {
        for s in ["(a|b)*a(a|b)*", "(ab)*", "a*b*", "(a|b)*abb"] {
            let DAutomaton::Pos(p) = build(VarietyTag::Pos, s) else {
                unreachable!()
            };
            let n = p.dfa.states();
            for x in 0..n {
                for y in 0..n {
                    if !p.leq[x][y] {
                        continue;
                    }
                    for l in 0..p.dfa.alphabet().len() {
                        assert!(
                            p.leq[p.dfa.step(x, l)][p.dfa.step(y, l)],
                            "{s}: transition not monotone at ({x},{y})"
                        );
                    }
                    if p.dfa.is_final(x) {
                        assert!(p.dfa.is_final(y), "{s}: finals not an upper set");
                    }
                }
            }
        }
    }

    #[test]
    fn pset_designates_the_dead_state() {
        let a = build(VarietyTag::PSet, "(ab)*");
        let DAutomaton::PSet(p) = &a else { unreachable!() };
        assert_eq!(p.dfa.states(), 3);
        assert!(p.dfa.state_is_dead(p.bottom));
        assert!(check_reachable_simple(&a).passed());
    }

    #[test]
    fn pset_adjoins_fresh_bottom_when_no_dead_state() {
        // Full language: one state, no dead state; ⊥ is adjoined.
        let a = build(VarietyTag::PSet, "(a|b)*");
        let DAutomaton::PSet(p) = &a else { unreachable!() };
        assert_eq!(p.dfa.states(), 2);
        assert_eq!(p.bottom, 1);
        assert!(!p.dfa.is_final(p.bottom));
        // Still reachable in the pointed sense, and simple.
        assert!(check_reachable_simple(&a).passed(), "{a:?}");
        // Even-length words: two live states, ⊥ adjoined as third.
        let a = build(VarietyTag::PSet, "((a|b)(a|b))*");
        let DAutomaton::PSet(p) = &a else { unreachable!() };
        assert_eq!(p.dfa.states(), 3);
        assert!(check_reachable_simple(&a).passed());
    }
}
