//! The verification corpus and the acceptance checks.
//!
//! A fixed set of regular languages over {a, b} (minimal DFAs of at most
//! eight states) on which every construction in the crate is cross-checked:
//! exact algebra sizes and tables, the transition-algebra-versus-congruence
//! theorem, recognition, the algebra law suites, and both duality claims.

use serde::Serialize;

use std::collections::HashMap;

use crate::algebra::{
    laws, syntactic_algebra, syntactic_algebra_with_automaton, CongruenceOracle, EndoMap, Extra,
    MultOp,
};
use crate::duality::{verify_minimal_duality, verify_syntactic_duality};
use crate::freemon::{enumerate_bounded, OutputValue, VarietyTag};
use crate::langcore::{parse_regex, regex_to_min_dfa, Alphabet, Dfa};
use crate::Limits;

/// One corpus language.
#[derive(Debug, Clone, Copy)]
pub struct CorpusEntry {
    pub name: &'static str,
    pub regex: &'static str,
}

/// The corpus: names and regexes over the two-letter alphabet.
pub const CORPUS: &[CorpusEntry] = &[
    CorpusEntry { name: "empty", regex: "∅" },
    CorpusEntry { name: "epsilon", regex: "ε" },
    CorpusEntry { name: "full", regex: "(a|b)*" },
    CorpusEntry { name: "just-a", regex: "a" },
    CorpusEntry { name: "just-b", regex: "b" },
    CorpusEntry { name: "a-or-b", regex: "a|b" },
    CorpusEntry { name: "ab-star", regex: "(ab)*" },
    CorpusEntry { name: "ba-star", regex: "(ba)*" },
    CorpusEntry { name: "even-a", regex: "(b|ab*a)*" },
    CorpusEntry { name: "contains-a", regex: "(a|b)*a(a|b)*" },
    CorpusEntry { name: "a-star", regex: "a*" },
    CorpusEntry { name: "b-star", regex: "b*" },
    CorpusEntry { name: "b-then-as", regex: "ba*" },
    CorpusEntry { name: "ends-a", regex: "(a|b)*a" },
    CorpusEntry { name: "starts-a", regex: "a(a|b)*" },
    CorpusEntry { name: "even-length", regex: "((a|b)(a|b))*" },
    CorpusEntry { name: "aa-or-bb", regex: "aa|bb" },
    CorpusEntry { name: "contains-aa", regex: "(a|b)*aa(a|b)*" },
    CorpusEntry { name: "no-aa", regex: "(b|ab)*(ε|a)" },
    CorpusEntry { name: "a-mod-3", regex: "(b*ab*ab*a)*b*" },
    CorpusEntry { name: "ab-or-ba-star", regex: "(ab|ba)*" },
    CorpusEntry { name: "suffix-abb", regex: "(a|b)*abb" },
    CorpusEntry { name: "length-3", regex: "(a|b)(a|b)(a|b)" },
    CorpusEntry { name: "aab-star", regex: "(aab)*" },
    CorpusEntry { name: "odd-b", regex: "(a|ba*b)*ba*" },
    CorpusEntry { name: "as-then-bs", regex: "a*b*" },
    CorpusEntry { name: "ab-star-a", regex: "(ab)*a" },
    CorpusEntry { name: "double-blocks", regex: "(aa|bb)*" },
    CorpusEntry { name: "third-is-a", regex: "(a|b)(a|b)a(a|b)*" },
    CorpusEntry { name: "even-a-even-b", regex: "(aa|bb|(ab|ba)(aa|bb)*(ab|ba))*" },
    CorpusEntry { name: "contains-abab", regex: "(a|b)*abab(a|b)*" },
    CorpusEntry { name: "a-mod-4", regex: "(b*ab*ab*ab*a)*b*" },
    CorpusEntry { name: "starts-a-ends-b", regex: "a(a|b)*b" },
    CorpusEntry { name: "suffix-bab", regex: "(a|b)*bab" },
];

pub fn corpus_alphabet() -> Alphabet {
    Alphabet::from_str("ab").expect("static alphabet is valid")
}

/// The canonical minimal DFA of a corpus entry.
pub fn corpus_dfa(entry: &CorpusEntry) -> Dfa {
    let alphabet = corpus_alphabet();
    let regex = parse_regex(entry.regex, &alphabet).expect("corpus regexes parse");
    regex_to_min_dfa(&regex, &alphabet).expect("corpus regexes compile")
}

/// Outcome of one acceptance criterion.
#[derive(Debug, Clone, Serialize)]
pub struct CriterionResult {
    pub id: usize,
    pub name: String,
    pub passed: bool,
    pub details: Vec<String>,
}

impl CriterionResult {
    fn new(id: usize, name: &str) -> Self {
        CriterionResult {
            id,
            name: name.to_string(),
            passed: true,
            details: Vec::new(),
        }
    }

    fn fail(&mut self, detail: String) {
        self.passed = false;
        self.details.push(detail);
    }
}

fn dfa_of(regex: &str) -> Dfa {
    let alphabet = corpus_alphabet();
    regex_to_min_dfa(&parse_regex(regex, &alphabet).unwrap(), &alphabet).unwrap()
}

/// Runs one acceptance criterion (1-based ids, 1..=12).
pub fn run_criterion(id: usize, seed: u64, limits: &Limits) -> CriterionResult {
    match id {
        1 => criterion_trivial_sizes(limits),
        2 => criterion_ab_star_and_even_a(limits),
        3 => criterion_transition_vs_congruence(limits),
        4 => criterion_recognition(seed, limits),
        5 => criterion_ordered_instance(limits),
        6 => criterion_monoid_with_zero(limits),
        7 => criterion_involution_instance(limits),
        8 => criterion_semiring_instance(limits),
        9 => criterion_vector_instance(limits),
        10 => criterion_syntactic_duality(limits),
        11 => criterion_minimal_duality(),
        12 => criterion_law_suites_and_mutation(limits),
        _ => {
            let mut r = CriterionResult::new(id, "unknown criterion");
            r.fail(format!("no criterion with id {id}"));
            r
        }
    }
}

/// Runs all twelve acceptance criteria.
pub fn run_acceptance(seed: u64, limits: &Limits) -> Vec<CriterionResult> {
    (1..=12).map(|id| run_criterion(id, seed, limits)).collect()
}

fn criterion_trivial_sizes(limits: &Limits) -> CriterionResult {
    let mut r = CriterionResult::new(1, "trivial syntactic monoids have one element");
    for regex in ["∅", "(a|b)*"] {
        match syntactic_algebra(VarietyTag::Set, &dfa_of(regex), limits) {
            Ok(alg) if alg.size() == 1 => {}
            Ok(alg) => r.fail(format!("|Syn({regex})| = {}, expected 1", alg.size())),
            Err(e) => r.fail(format!("{regex}: {e}")),
        }
    }
    r
}

fn criterion_ab_star_and_even_a(limits: &Limits) -> CriterionResult {
    let mut r = CriterionResult::new(2, "Syn((ab)*) has 6 elements with a zero; Syn(even-a) is Z2");
    match syntactic_algebra(VarietyTag::Set, &dfa_of("(ab)*"), limits) {
        Ok(alg) => {
            if alg.size() != 6 {
                r.fail(format!("|Syn((ab)*)| = {}, expected 6", alg.size()));
            }
            let MultOp::Table(t) = &alg.mult else { unreachable!() };
            let has_zero = (0..alg.size())
                .any(|z| (0..alg.size()).all(|i| t[z][i] == z && t[i][z] == z));
            if !has_zero {
                r.fail("Syn((ab)*) has no absorbing zero class".into());
            }
        }
        Err(e) => r.fail(format!("(ab)*: {e}")),
    }
    match syntactic_algebra(VarietyTag::Set, &dfa_of("(b|ab*a)*"), limits) {
        Ok(alg) => {
            if alg.size() != 2 {
                r.fail(format!("|Syn(even-a)| = {}, expected 2", alg.size()));
            } else {
                let MultOp::Table(t) = &alg.mult else { unreachable!() };
                let g = 1 - alg.unit;
                if t[g][g] != alg.unit || t[alg.unit][g] != g || t[g][alg.unit] != g {
                    r.fail("Syn(even-a) is not the two-element group".into());
                }
            }
        }
        Err(e) => r.fail(format!("even-a: {e}")),
    }
    r
}

fn criterion_transition_vs_congruence(limits: &Limits) -> CriterionResult {
    let mut r = CriterionResult::new(
        3,
        "class equality in the transition algebra coincides with the context congruence",
    );
    let alphabet = corpus_alphabet();
    for entry in CORPUS {
        let l0 = corpus_dfa(entry);
        for tag in VarietyTag::ALL_DEFAULT {
            let (alg, aut) = match syntactic_algebra_with_automaton(tag, &l0, limits) {
                Ok(x) => x,
                Err(e) => {
                    r.fail(format!("{} {tag}: {e}", entry.name));
                    continue;
                }
            };
            let oracle = match CongruenceOracle::new(tag, &l0) {
                Ok(o) => o,
                Err(e) => {
                    r.fail(format!("{} {tag}: {e}", entry.name));
                    continue;
                }
            };
            let elems = enumerate_bounded(tag, &alphabet, 4);
            // Compare the two partitions pairwise: identical class keys in
            // the algebra iff identical context profiles in the oracle.
            let mut classes: Vec<usize> = Vec::with_capacity(elems.len());
            let mut class_keys: HashMap<EndoMap, usize> = HashMap::new();
            let mut profiles: Vec<usize> = Vec::with_capacity(elems.len());
            let mut profile_keys: HashMap<Vec<u32>, usize> = HashMap::new();
            let mut broken = false;
            for u in &elems {
                let map = match crate::algebra::elem_action(&aut, u) {
                    Ok(m) => m,
                    Err(e) => {
                        r.fail(format!("{} {tag}: {e}", entry.name));
                        broken = true;
                        break;
                    }
                };
                let fresh = class_keys.len();
                classes.push(*class_keys.entry(map).or_insert(fresh));
                let profile = match oracle.context_profile(u) {
                    Ok(p) => p,
                    Err(e) => {
                        r.fail(format!("{} {tag}: {e}", entry.name));
                        broken = true;
                        break;
                    }
                };
                let fresh = profile_keys.len();
                profiles.push(*profile_keys.entry(profile).or_insert(fresh));
            }
            if broken {
                continue;
            }
            let mut mismatches = 0usize;
            for i in 0..elems.len() {
                for j in i + 1..elems.len() {
                    let same_class = classes[i] == classes[j];
                    let same_profile = profiles[i] == profiles[j];
                    if same_class != same_profile {
                        mismatches += 1;
                        if mismatches == 1 {
                            r.fail(format!(
                                "{} {tag}: {} vs {} (class {}, oracle {})",
                                entry.name, elems[i], elems[j], same_class, same_profile
                            ));
                        }
                    }
                }
            }
            if mismatches > 1 {
                r.fail(format!(
                    "{} {tag}: {mismatches} mismatching pairs in total",
                    entry.name
                ));
            }
            let _ = alg;
        }
    }
    r
}

fn criterion_recognition(seed: u64, limits: &Limits) -> CriterionResult {
    let mut r = CriterionResult::new(4, "recognition: the language factors through every algebra");
    for entry in CORPUS {
        let l0 = corpus_dfa(entry);
        for tag in VarietyTag::ALL_DEFAULT {
            match syntactic_algebra_with_automaton(tag, &l0, limits) {
                Ok((alg, aut)) => {
                    match laws::verify_recognition(&alg, &aut, &l0, seed, 1000) {
                        Ok(report) if report.passed() => {}
                        Ok(report) => {
                            for f in report.failures.iter().take(2) {
                                r.fail(format!("{} {tag}: {f}", entry.name));
                            }
                        }
                        Err(e) => r.fail(format!("{} {tag}: {e}", entry.name)),
                    }
                }
                Err(e) => r.fail(format!("{} {tag}: {e}", entry.name)),
            }
        }
    }
    r
}

fn criterion_ordered_instance(limits: &Limits) -> CriterionResult {
    let mut r = CriterionResult::new(5, "ordered instance: Syn_POS(contains-a) is the strict 2-chain");
    match syntactic_algebra(VarietyTag::Pos, &dfa_of("(a|b)*a(a|b)*"), limits) {
        Ok(alg) => {
            if alg.size() != 2 {
                r.fail(format!("size {} != 2", alg.size()));
            } else {
                let Extra::Order(leq) = &alg.extra else { unreachable!() };
                let a_class = 1 - alg.unit;
                if !(leq[alg.unit][a_class] && !leq[a_class][alg.unit]) {
                    r.fail("expected strict order [ε] < [a]".into());
                }
            }
        }
        Err(e) => r.fail(e.to_string()),
    }
    r
}

fn criterion_monoid_with_zero(limits: &Limits) -> CriterionResult {
    let mut r = CriterionResult::new(6, "pointed instance: Syn_PSET((ab)*) merges ⊥ into the aa class");
    match syntactic_algebra(VarietyTag::PSet, &dfa_of("(ab)*"), limits) {
        Ok(alg) => {
            if alg.size() != 6 {
                r.fail(format!("size {} != 6", alg.size()));
            }
            let Extra::Zero(z) = alg.extra else { unreachable!() };
            if alg.elements[z].rep.to_string() != "aa" {
                r.fail(format!(
                    "zero class represented by {}, expected the word aa",
                    alg.elements[z].rep
                ));
            }
        }
        Err(e) => r.fail(e.to_string()),
    }
    r
}

fn criterion_involution_instance(limits: &Limits) -> CriterionResult {
    let mut r = CriterionResult::new(7, "involution instance: Syn_INV((ab)*) has 12 elements, f(m̃)=1-f(m)");
    match syntactic_algebra(VarietyTag::Inv, &dfa_of("(ab)*"), limits) {
        Ok(alg) => {
            if alg.size() != 12 {
                r.fail(format!("size {} != 12", alg.size()));
            }
            let Extra::Involution(inv) = &alg.extra else { unreachable!() };
            for i in 0..alg.size() {
                match (alg.output[i], alg.output[inv[i]]) {
                    (OutputValue::Bit(x), OutputValue::Bit(y)) if x != y => {}
                    _ => r.fail(format!("f(m̃) != 1-f(m) at element {i}")),
                }
            }
        }
        Err(e) => r.fail(e.to_string()),
    }
    r
}

fn criterion_semiring_instance(limits: &Limits) -> CriterionResult {
    let mut r = CriterionResult::new(8, "semiring instance: Syn_JSL(a*) has 2 elements; {ab} ≡ {ab,aabb} for (ab)*");
    match syntactic_algebra(VarietyTag::Jsl, &dfa_of("a*"), limits) {
        Ok(alg) => {
            if alg.size() != 2 {
                r.fail(format!("|Syn_JSL(a*)| = {}, expected 2", alg.size()));
            }
        }
        Err(e) => r.fail(e.to_string()),
    }
    let alphabet = corpus_alphabet();
    match CongruenceOracle::new(VarietyTag::Jsl, &dfa_of("(ab)*")) {
        Ok(oracle) => {
            let u = crate::freemon::parse_free_elem(VarietyTag::Jsl, "{ab}", &alphabet).unwrap();
            let v = crate::freemon::parse_free_elem(VarietyTag::Jsl, "{ab,aabb}", &alphabet)
                .unwrap();
            match oracle.decide(&u, &v) {
                Ok(ans) if ans.equal() => {}
                Ok(_) => r.fail("{ab} and {ab,aabb} should be congruent for (ab)*".into()),
                Err(e) => r.fail(e.to_string()),
            }
        }
        Err(e) => r.fail(e.to_string()),
    }
    r
}

fn criterion_vector_instance(limits: &Limits) -> CriterionResult {
    let mut r = CriterionResult::new(9, "vector instance: Syn_VECT2(even-a) has basis {identity, swap}");
    match syntactic_algebra(VarietyTag::Vect(2), &dfa_of("(b|ab*a)*"), limits) {
        Ok(alg) => {
            if alg.size() != 2 {
                r.fail(format!("dimension {} != 2", alg.size()));
            } else {
                let EndoMap::Matrix(b0) = &alg.elements[0].map else { unreachable!() };
                let EndoMap::Matrix(b1) = &alg.elements[1].map else { unreachable!() };
                if b0.data != vec![1, 0, 0, 1] || b1.data != vec![0, 1, 1, 0] {
                    r.fail("basis is not {identity, swap}".into());
                }
            }
        }
        Err(e) => r.fail(e.to_string()),
    }
    r
}

fn criterion_syntactic_duality(limits: &Limits) -> CriterionResult {
    let mut r = CriterionResult::new(10, "duality: atoms dualize to the syntactic monoid");
    for entry in CORPUS {
        match verify_syntactic_duality(&corpus_dfa(entry), limits) {
            Ok(report) if report.passed() => {}
            Ok(report) => r.fail(format!(
                "{}: atoms={} syn={} isomorphic={} {:?}",
                entry.name, report.atoms, report.syn_size, report.isomorphic, report.witnesses
            )),
            Err(e) => r.fail(format!("{}: {e}", entry.name)),
        }
    }
    r
}

fn criterion_minimal_duality() -> CriterionResult {
    let mut r = CriterionResult::new(11, "duality: left-derivative atoms match the minimal automaton");
    for entry in CORPUS {
        let report = verify_minimal_duality(&corpus_dfa(entry));
        if !report.passed() {
            r.fail(format!(
                "{}: {} atoms vs {} states",
                entry.name, report.left_derivative_atoms, report.minimal_states
            ));
        }
    }
    r
}

fn criterion_law_suites_and_mutation(limits: &Limits) -> CriterionResult {
    let mut r = CriterionResult::new(12, "algebra laws hold everywhere; corrupted tables are detected");
    for entry in CORPUS {
        let l0 = corpus_dfa(entry);
        for tag in VarietyTag::ALL_DEFAULT {
            match syntactic_algebra(tag, &l0, limits) {
                Ok(alg) => {
                    let violations = laws::check_algebra_laws(&alg);
                    for v in violations.iter().take(2) {
                        r.fail(format!("{} {tag}: {v}", entry.name));
                    }
                }
                Err(e) => r.fail(format!("{} {tag}: {e}", entry.name)),
            }
        }
    }
    // Mutation check: corrupting one table entry must be detected by the
    // law suite or by the recognition check.
    let l0 = dfa_of("(ab)*");
    match syntactic_algebra_with_automaton(VarietyTag::Set, &l0, limits) {
        Ok((mut alg, aut)) => {
            let MultOp::Table(t) = &mut alg.mult else { unreachable!() };
            let (a, b) = (t[1][2], t[2][1]);
            t[1][2] = b;
            t[2][1] = a;
            let laws_catch = !laws::check_algebra_laws(&alg).is_empty();
            let recog_catch = match laws::verify_recognition(&alg, &aut, &l0, 0, 100) {
                Ok(rep) => !rep.passed(),
                Err(_) => true,
            };
            if !(laws_catch || recog_catch) {
                r.fail("a corrupted multiplication table went undetected".into());
            }
        }
        Err(e) => r.fail(e.to_string()),
    }
    r
}

/// Summary line used by the command-line `corpus` output.
pub fn format_criterion(c: &CriterionResult) -> String {
    let status = if c.passed { "PASS" } else { "FAIL" };
    let mut line = format!("criterion {:>2}  {status}  {}", c.id, c.name);
    for d in &c.details {
        line.push_str(&format!("\n    {d}"));
    }
    line
}

#[derive(Debug, Clone, Serialize)]
pub struct LanguageSummary {
    pub name: String,
    pub regex: String,
    pub states: usize,
    pub sizes: Vec<(String, usize)>,
}

/// Per-language summary of algebra sizes, used by the corpus matrix.
pub fn language_summary(entry: &CorpusEntry, limits: &Limits) -> LanguageSummary {
    let l0 = corpus_dfa(entry);
    let sizes = VarietyTag::ALL_DEFAULT
        .iter()
        .map(|&tag| {
            let size = syntactic_algebra(tag, &l0, limits)
                .map(|a| a.size())
                .unwrap_or(0);
            (tag.to_string(), size)
        })
        .collect();
    LanguageSummary {
        name: entry.name.to_string(),
        regex: entry.regex.to_string(),
        states: l0.states(),
        sizes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_is_desk_scale() {
        assert!(CORPUS.len() >= 30);
        for entry in CORPUS {
            let dfa = corpus_dfa(entry);
            assert!(dfa.states() <= 8, "{} has {} states", entry.name, dfa.states());
        }
    }

    #[test]
    fn corpus_names_are_unique() {
        let mut names: Vec<_> = CORPUS.iter().map(|e| e.name).collect();
        names.sort_unstable();
        names.dedup();
        assert_eq!(names.len(), CORPUS.len());
    }
}
