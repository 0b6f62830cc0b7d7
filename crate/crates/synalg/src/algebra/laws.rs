//! Law suites for generated algebras, and the recognition check
//! (the factorization of the language through the algebra).

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dautomata::DAutomaton;
use crate::fp;
use crate::freemon::{eval_language, free_mul, FreeElem, OutputValue};
use crate::langcore::{Dfa, Word};

use super::{AlgebraError, ElemClass, Extra, GenMap, MultOp, SynAlgebra};

/// Checks the equational laws the algebra's variety demands of its tables:
/// associativity and unit laws, and per variety the partial-order laws and
/// monotonicity, the absorbing zero, the involution laws, the semiring laws,
/// or associativity of the structure constants. Returns the violations.
pub fn check_algebra_laws(alg: &SynAlgebra) -> Vec<String> {
    let mut v = Vec::new();
    match &alg.mult {
        MultOp::Table(t) => check_table_laws(alg, t, &mut v),
        MultOp::Structure(s) => check_structure_laws(alg, s, &mut v),
    }
    v
}

fn check_table_laws(alg: &SynAlgebra, t: &[Vec<usize>], v: &mut Vec<String>) {
    let n = alg.size();
    for i in 0..n {
        if t[alg.unit][i] != i || t[i][alg.unit] != i {
            v.push(format!("unit law fails at element {i}"));
        }
        for j in 0..n {
            for k in 0..n {
                if t[t[i][j]][k] != t[i][t[j][k]] {
                    v.push(format!("associativity fails at ({i},{j},{k})"));
                }
            }
        }
    }

    // Generation: every element arises from the letter images under the
    // algebra operations.
    let GenMap::Table(gen) = &alg.gen_map else {
        unreachable!("table algebras have table generator maps")
    };
    let mut reached = vec![false; n];
    reached[alg.unit] = true;
    match &alg.extra {
        Extra::Zero(z) => reached[*z] = true,
        Extra::Jsl { zero, .. } => reached[*zero] = true,
        _ => {}
    }
    loop {
        let mut changed = false;
        let current: Vec<usize> = (0..n).filter(|&e| reached[e]).collect();
        for &e in &current {
            for g in gen.values() {
                if !reached[t[e][*g]] {
                    reached[t[e][*g]] = true;
                    changed = true;
                }
            }
            if let Extra::Involution(inv) = &alg.extra {
                if !reached[inv[e]] {
                    reached[inv[e]] = true;
                    changed = true;
                }
            }
            if let Extra::Jsl { add, .. } = &alg.extra {
                for &f in &current {
                    if !reached[add[e][f]] {
                        reached[add[e][f]] = true;
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    for (e, &r) in reached.iter().enumerate() {
        if !r {
            v.push(format!("element {e} is not generated by the letters"));
        }
    }

    match &alg.extra {
        Extra::None => {}
        Extra::Order(leq) => {
            for i in 0..n {
                if !leq[i][i] {
                    v.push(format!("order not reflexive at {i}"));
                }
                for j in 0..n {
                    if leq[i][j] && leq[j][i] && i != j {
                        v.push(format!("order not antisymmetric at ({i},{j})"));
                    }
                    if leq[i][j] {
                        match alg.output[i].le(&alg.output[j]) {
                            Some(true) => {}
                            _ => v.push(format!("output not monotone at ({i},{j})")),
                        }
                    }
                    for k in 0..n {
                        if leq[i][j] && leq[j][k] && !leq[i][k] {
                            v.push(format!("order not transitive at ({i},{j},{k})"));
                        }
                        if leq[j][k] && (!leq[t[i][j]][t[i][k]] || !leq[t[j][i]][t[k][i]]) {
                            v.push(format!(
                                "multiplication not monotone at ({i}) applied to ({j}≤{k})"
                            ));
                        }
                    }
                }
            }
        }
        Extra::Zero(z) => {
            for i in 0..n {
                if t[*z][i] != *z || t[i][*z] != *z {
                    v.push(format!("zero not absorbing at {i}"));
                }
            }
            if alg.output[*z] != OutputValue::Bottom {
                v.push("zero does not output ⊥".into());
            }
        }
        Extra::Involution(inv) => {
            for i in 0..n {
                if inv[inv[i]] != i {
                    v.push(format!("involution not involutive at {i}"));
                }
                let (OutputValue::Bit(fi), OutputValue::Bit(fti)) =
                    (alg.output[i], alg.output[inv[i]])
                else {
                    v.push(format!("non-bit output at {i}"));
                    continue;
                };
                if fi == fti {
                    v.push(format!("output not complemented at {i}"));
                }
                for j in 0..n {
                    let plain = t[i][j];
                    if t[inv[i]][j] != inv[plain] || t[i][inv[j]] != inv[plain] {
                        v.push(format!("involution does not slide over products at ({i},{j})"));
                    }
                }
            }
        }
        Extra::Jsl { add, zero } => {
            for i in 0..n {
                if add[i][i] != i {
                    v.push(format!("addition not idempotent at {i}"));
                }
                if add[*zero][i] != i {
                    v.push(format!("zero not neutral at {i}"));
                }
                if t[*zero][i] != *zero || t[i][*zero] != *zero {
                    v.push(format!("zero not multiplicatively absorbing at {i}"));
                }
                for j in 0..n {
                    if add[i][j] != add[j][i] {
                        v.push(format!("addition not commutative at ({i},{j})"));
                    }
                    let (OutputValue::Bit(fi), OutputValue::Bit(fj), OutputValue::Bit(fij)) =
                        (alg.output[i], alg.output[j], alg.output[add[i][j]])
                    else {
                        v.push(format!("non-bit output at ({i},{j})"));
                        continue;
                    };
                    if fij != (fi || fj) {
                        v.push(format!("output not a prime upset at ({i},{j})"));
                    }
                    for k in 0..n {
                        if add[add[i][j]][k] != add[i][add[j][k]] {
                            v.push(format!("addition not associative at ({i},{j},{k})"));
                        }
                        if t[i][add[j][k]] != add[t[i][j]][t[i][k]]
                            || t[add[j][k]][i] != add[t[j][i]][t[k][i]]
                        {
                            v.push(format!(
                                "multiplication does not distribute at ({i},{j},{k})"
                            ));
                        }
                    }
                }
            }
            if alg.output[*zero] != OutputValue::Bit(false) {
                v.push("additive zero does not output 0".into());
            }
        }
        Extra::Vect { .. } => unreachable!("vector algebras use structure constants"),
    }
}

fn check_structure_laws(alg: &SynAlgebra, s: &[Vec<Vec<u32>>], v: &mut Vec<String>) {
    let Extra::Vect { p, dim } = alg.extra else {
        unreachable!()
    };
    let d = dim;
    if d == 0 {
        return;
    }
    // Unit coordinates: the unit element is basis vector `alg.unit`.
    for i in 0..d {
        let left = &s[alg.unit][i];
        let right = &s[i][alg.unit];
        let expect: Vec<u32> = (0..d).map(|k| u32::from(k == i)).collect();
        if left != &expect || right != &expect {
            v.push(format!("unit law fails at basis element {i}"));
        }
    }
    // Associativity of structure constants:
    // Σ_k s[i][j][k]·s[k][l] == Σ_k s[j][l][k]·s[i][k] as vectors.
    for i in 0..d {
        for j in 0..d {
            for l in 0..d {
                let mut lhs = vec![0u32; d];
                let mut rhs = vec![0u32; d];
                for k in 0..d {
                    let cij = s[i][j][k];
                    if cij != 0 {
                        for (m, &c) in s[k][l].iter().enumerate() {
                            lhs[m] = fp::add(p, lhs[m], fp::mul(p, cij, c));
                        }
                    }
                    let cjl = s[j][l][k];
                    if cjl != 0 {
                        for (m, &c) in s[i][k].iter().enumerate() {
                            rhs[m] = fp::add(p, rhs[m], fp::mul(p, cjl, c));
                        }
                    }
                }
                if lhs != rhs {
                    v.push(format!("associativity fails at basis ({i},{j},{l})"));
                }
            }
        }
    }
    // The basis must consist of word matrices whose span is the whole
    // algebra; the rank of the word matrices up to length < 2·(ambient
    // dimension) must equal the dimension.
    let ambient = super::vect_ambient_dim(alg);
    let letter_mats = super::vect_letter_matrices(alg);
    let mut span = crate::fp::SpanBasis::new(p, ambient * ambient);
    let mut seen = std::collections::HashSet::new();
    let mut queue = std::collections::VecDeque::new();
    let identity = crate::fp::FpMat::identity(p, ambient);
    seen.insert(identity.data.clone());
    span.insert(&identity.data);
    queue.push_back((identity, 0usize));
    let max_len = 2 * ambient;
    while let Some((m, len)) = queue.pop_front() {
        if len + 1 >= max_len {
            continue;
        }
        for lm in &letter_mats {
            let next = m.mat_mul(lm);
            if seen.insert(next.data.clone()) {
                span.insert(&next.data);
                queue.push_back((next, len + 1));
            }
        }
    }
    if span.dim() != d {
        v.push(format!(
            "span of word matrices up to length {} has rank {}, expected dimension {d}",
            max_len - 1,
            span.dim()
        ));
    }
}

/// Outcome of the recognition check.
#[derive(Debug, Clone, Serialize)]
pub struct RecognitionReport {
    pub elements_checked: usize,
    pub words_checked: usize,
    pub failures: Vec<String>,
}

impl RecognitionReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Verifies that the algebra actually recognizes the language:
///
/// 1. table consistency of the quotient map — multiplying an element by a
///    letter image agrees with the action of the extended representative;
/// 2. the output of the class of `u` equals the language value of `u`, for
///    every element representative and for `samples` seeded random words.
pub fn verify_recognition(
    alg: &SynAlgebra,
    aut: &DAutomaton,
    l0: &Dfa,
    seed: u64,
    samples: usize,
) -> Result<RecognitionReport, AlgebraError> {
    let tag = alg.tag;
    let mut failures = Vec::new();

    // (1) e_L is a morphism on generators.
    for (i, elem) in alg.elements.iter().enumerate() {
        for &c in alg.alphabet.letters() {
            let extended = free_mul(tag, &elem.rep, &FreeElem::lift_word(tag, letter_word(c)))?;
            let expected = alg.class_of(aut, &extended)?;
            let got = match (&alg.mult, &alg.gen_map) {
                (MultOp::Table(t), GenMap::Table(gen)) => ElemClass::Index(t[i][gen[&c]]),
                (MultOp::Structure(s), GenMap::Linear(gen)) => {
                    let Extra::Vect { p, dim } = alg.extra else { unreachable!() };
                    let mut coords = vec![0u32; dim];
                    for (k, &gk) in gen[&c].iter().enumerate() {
                        if gk != 0 {
                            for (m, &smk) in s[i][k].iter().enumerate() {
                                coords[m] = fp::add(p, coords[m], fp::mul(p, gk, smk));
                            }
                        }
                    }
                    ElemClass::Coords(coords)
                }
                _ => unreachable!("mult and gen_map kinds always agree"),
            };
            if expected != got {
                failures.push(format!(
                    "morphism law fails: element {i} ({}) extended by '{c}'",
                    elem.rep
                ));
            }
        }
    }

    // (2) outputs factor the language: on representatives...
    let mut words_checked = 0;
    for elem in &alg.elements {
        let class = alg.class_of(aut, &elem.rep)?;
        let got = alg.class_output(&class);
        let expected = eval_language(tag, l0, &elem.rep)?;
        if got != expected {
            failures.push(format!(
                "output of class of {} is {got}, language value is {expected}",
                elem.rep
            ));
        }
    }
    // ... and on seeded random words.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let letters = alg.alphabet.letters().to_vec();
    for _ in 0..samples {
        let len = rng.random_range(0..=16);
        let w = Word::new(
            (0..len)
                .map(|_| letters[rng.random_range(0..letters.len())])
                .collect(),
        );
        let u = FreeElem::lift_word(tag, w);
        let class = alg.class_of(aut, &u)?;
        let got = alg.class_output(&class);
        let expected = eval_language(tag, l0, &u)?;
        if got != expected {
            failures.push(format!(
                "output of class of {u} is {got}, language value is {expected}"
            ));
        }
        words_checked += 1;
    }

    Ok(RecognitionReport {
        elements_checked: alg.size(),
        words_checked,
        failures,
    })
}

fn letter_word(c: char) -> Word {
    Word::new(vec![c])
}

/// The pointwise order on element endomaps agrees with the syntactic
/// preorder (poset variety): used as an invariant check by the test suites.
pub fn pos_order_matches_oracle(
    alg: &SynAlgebra,
    oracle: &super::CongruenceOracle,
) -> Result<Vec<String>, AlgebraError> {
    let Extra::Order(leq) = &alg.extra else {
        return Ok(vec!["algebra is not ordered".into()]);
    };
    let mut violations = Vec::new();
    for (i, ei) in alg.elements.iter().enumerate() {
        for (j, ej) in alg.elements.iter().enumerate() {
            let ans = oracle.decide(&ei.rep, &ej.rep)?;
            if ans.le != leq[i][j] {
                violations.push(format!(
                    "pointwise map order at ({i},{j}) is {} but the context oracle says {}",
                    leq[i][j], ans.le
                ));
            }
        }
    }
    Ok(violations)
}
