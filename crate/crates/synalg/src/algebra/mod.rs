//! Transition algebras and syntactic algebras.
//!
//! The transition algebra of a finite automaton in a variety is the closure
//! of the generator transition maps under composition and the variety's
//! operations (joins for semilattices, linear spans for vector spaces,
//! complements for involution algebras, plus the constant-bottom map for
//! pointed structures). Applied to the minimal automaton of a language it
//! yields the syntactic algebra: the smallest recognizer generated by the
//! alphabet.
//!
//! Multiplication is taken diagrammatically: `mult(u, v) = δ_v ∘ δ_u`, the
//! map of the concatenation `uv`. The opposite convention would produce the
//! opposite monoid, so all tables here commit to reading order.

mod oracle;
pub mod laws;

pub use oracle::{CongruenceOracle, CtxWitness, OracleAnswer};

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;
use thiserror::Error;

use crate::dautomata::{DAutomaton, VectAutomaton};
use crate::fp::{self, FpMat, Insert, SpanBasis};
use crate::freemon::{eval_language, FreeElem, FreemonError, OutputValue, VarietyTag};
use crate::langcore::{Alphabet, Dfa, Word};
use crate::Limits;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("capacity guard exceeded: {what} reached {size}, limit {limit}")]
    CapacityExceeded {
        what: String,
        size: usize,
        limit: usize,
    },
    #[error("varieties do not match: {0} vs {1}")]
    TagMismatch(VarietyTag, VarietyTag),
    #[error("alphabets do not match")]
    AlphabetMismatch,
    #[error("context bound overflow: {states} states make the semilattice oracle impractical")]
    BoundOverflow { states: usize },
    #[error("the action of {0} is not in the algebra's closure")]
    NotInClosure(String),
    #[error(transparent)]
    Freemon(#[from] FreemonError),
    #[error(transparent)]
    Daut(#[from] crate::dautomata::DautError),
}

/// A concrete endomap of an automaton carrier: a state table for the finite
/// carriers, a matrix for linear carriers.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub enum EndoMap {
    Table(Vec<usize>),
    Matrix(FpMat),
}

/// One element of a transition algebra: its endomap together with the
/// shortest (length-lexicographic) free element that realizes it.
#[derive(Debug, Clone, Serialize)]
pub struct AlgebraElem {
    pub map: EndoMap,
    #[serde(serialize_with = "ser_free_elem")]
    pub rep: FreeElem,
}

fn ser_free_elem<S: serde::Serializer>(e: &FreeElem, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&e.to_string())
}

/// Multiplication: an index table for the set-like varieties, structure
/// constants over the basis for the vector variety.
#[derive(Debug, Clone, Serialize)]
pub enum MultOp {
    Table(Vec<Vec<usize>>),
    /// structure[i][j] = coordinates of elementᵢ · elementⱼ over the basis.
    Structure(Vec<Vec<Vec<u32>>>),
}

/// Images of the alphabet letters: an element index, or coordinates over the
/// basis for the vector variety (a letter matrix may be a proper linear
/// combination of basis elements).
#[derive(Debug, Clone, Serialize)]
pub enum GenMap {
    Table(BTreeMap<char, usize>),
    Linear(BTreeMap<char, Vec<u32>>),
}

/// Variety-specific extra structure.
#[derive(Debug, Clone, Serialize)]
pub enum Extra {
    None,
    /// Pointwise order of the endomaps (posets).
    Order(Vec<Vec<bool>>),
    /// Index of the absorbing zero (pointed sets).
    Zero(usize),
    /// The complement permutation on elements (involution algebras).
    Involution(Vec<usize>),
    /// Addition table and additive zero (semilattices).
    Jsl { add: Vec<Vec<usize>>, zero: usize },
    /// Prime and dimension (vector spaces); elements are a basis.
    Vect { p: u32, dim: usize },
}

/// A finite algebra presented by its elements, multiplication, generator
/// images and output map, with variety-specific extra structure.
#[derive(Debug, Clone, Serialize)]
pub struct SynAlgebra {
    pub tag: VarietyTag,
    pub alphabet: Alphabet,
    pub elements: Vec<AlgebraElem>,
    pub unit: usize,
    pub mult: MultOp,
    pub gen_map: GenMap,
    #[serde(serialize_with = "ser_outputs")]
    pub output: Vec<OutputValue>,
    pub extra: Extra,
}

fn ser_outputs<S: serde::Serializer>(v: &[OutputValue], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for o in v {
        seq.serialize_element(&o.to_string())?;
    }
    seq.end()
}

impl SynAlgebra {
    pub fn size(&self) -> usize {
        self.elements.len()
    }

    /// Index of a table element by endomap identity.
    pub fn index_of_map(&self, map: &EndoMap) -> Option<usize> {
        self.elements.iter().position(|e| &e.map == map)
    }

    /// Table product (set-like varieties only).
    pub fn mul(&self, i: usize, j: usize) -> Option<usize> {
        match &self.mult {
            MultOp::Table(t) => Some(t[i][j]),
            MultOp::Structure(_) => None,
        }
    }

    /// The span basis of the element matrices (vector variety).
    pub fn vect_span(&self) -> Option<SpanBasis> {
        let Extra::Vect { p, .. } = self.extra else {
            return None;
        };
        let ambient = vect_ambient_dim(self);
        let mut span = SpanBasis::new(p, ambient * ambient);
        for e in &self.elements {
            let EndoMap::Matrix(m) = &e.map else {
                return None;
            };
            span.insert(&m.data);
        }
        Some(span)
    }

    /// The class of a free element: an element index for table varieties,
    /// basis coordinates for the vector variety.
    pub fn class_of(&self, aut: &DAutomaton, u: &FreeElem) -> Result<ElemClass, AlgebraError> {
        let map = elem_action(aut, u)?;
        match &self.mult {
            MultOp::Table(_) => {
                let idx = self
                    .index_of_map(&map)
                    .ok_or_else(|| AlgebraError::NotInClosure(u.to_string()))?;
                Ok(ElemClass::Index(idx))
            }
            MultOp::Structure(_) => {
                let EndoMap::Matrix(m) = &map else {
                    unreachable!("vector algebras have matrix maps")
                };
                let span = self.vect_span().expect("structure mult implies vect extra");
                let coords = span
                    .coords(&m.data)
                    .expect("image of the free algebra lies in the span");
                Ok(ElemClass::Coords(coords))
            }
        }
    }

    /// Output of a class.
    pub fn class_output(&self, class: &ElemClass) -> OutputValue {
        match class {
            ElemClass::Index(i) => self.output[*i],
            ElemClass::Coords(c) => {
                let Extra::Vect { p, .. } = self.extra else {
                    unreachable!("coordinates only arise in the vector variety")
                };
                let mut acc = 0u32;
                for (i, &ci) in c.iter().enumerate() {
                    if let OutputValue::Scalar(s) = self.output[i] {
                        acc = fp::add(p, acc, fp::mul(p, ci, s));
                    }
                }
                OutputValue::Scalar(acc)
            }
        }
    }

    /// The same presentation with reversed-word generators and opposite
    /// multiplication: element x now represents the class of the reversed
    /// word. Used to mediate between a language and its reversal.
    pub fn reversed_opposite(&self) -> SynAlgebra {
        let mult = match &self.mult {
            MultOp::Table(t) => {
                let n = t.len();
                MultOp::Table(
                    (0..n)
                        .map(|i| (0..n).map(|j| t[j][i]).collect())
                        .collect(),
                )
            }
            MultOp::Structure(s) => {
                let n = s.len();
                MultOp::Structure(
                    (0..n)
                        .map(|i| (0..n).map(|j| s[j][i].clone()).collect())
                        .collect(),
                )
            }
        };
        SynAlgebra {
            mult,
            ..self.clone()
        }
    }
}

/// Either an element index (table varieties) or coordinates over the basis
/// (vector variety).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ElemClass {
    Index(usize),
    Coords(Vec<u32>),
}

fn compose_then(first: &[usize], then: &[usize]) -> Vec<usize> {
    first.iter().map(|&q| then[q]).collect()
}

/// Carrier access shared by the table-based closures.
struct TableCarrier {
    size: usize,
    initial: usize,
    /// generator maps per letter
    gens: Vec<Vec<usize>>,
    /// output as an OutputValue per carrier element
    out: Vec<OutputValue>,
    /// involution on the carrier, if any
    involution: Option<Vec<usize>>,
    /// join table and bottom, if any
    join: Option<(Vec<Vec<usize>>, usize)>,
    /// bottom element for the pointed variety
    pset_bottom: Option<usize>,
    /// state order for the ordered variety
    leq: Option<Vec<Vec<bool>>>,
}

fn table_carrier(aut: &DAutomaton) -> Option<TableCarrier> {
    let letters = aut.alphabet().len();
    match aut {
        DAutomaton::Set(_) | DAutomaton::Pos(_) | DAutomaton::PSet(_) => {
            let (d, leq, bottom) = match aut {
                DAutomaton::Set(d) => (d, None, None),
                DAutomaton::Pos(p) => (&p.dfa, Some(p.leq.clone()), None),
                DAutomaton::PSet(p) => (&p.dfa, None, Some(p.bottom)),
                _ => unreachable!(),
            };
            let n = d.states();
            let gens = (0..letters)
                .map(|l| (0..n).map(|q| d.step(q, l)).collect())
                .collect();
            let out = (0..n)
                .map(|q| match aut {
                    DAutomaton::PSet(_) => {
                        if d.is_final(q) {
                            OutputValue::Bit(true)
                        } else {
                            OutputValue::Bottom
                        }
                    }
                    _ => OutputValue::Bit(d.is_final(q)),
                })
                .collect();
            Some(TableCarrier {
                size: n,
                initial: d.initial(),
                gens,
                out,
                involution: None,
                join: None,
                pset_bottom: bottom,
                leq,
            })
        }
        DAutomaton::Inv(i) => Some(TableCarrier {
            size: i.elements(),
            initial: i.initial,
            gens: (0..letters)
                .map(|l| (0..i.elements()).map(|e| i.trans[e][l]).collect())
                .collect(),
            out: i.output.iter().map(|&b| OutputValue::Bit(b)).collect(),
            involution: Some(i.involution.clone()),
            join: None,
            pset_bottom: None,
            leq: None,
        }),
        DAutomaton::Jsl(j) => Some(TableCarrier {
            size: j.elements(),
            initial: j.initial,
            gens: (0..letters)
                .map(|l| (0..j.elements()).map(|e| j.trans[e][l]).collect())
                .collect(),
            out: j.output.iter().map(|&b| OutputValue::Bit(b)).collect(),
            involution: None,
            join: Some((j.join.clone(), j.bottom)),
            pset_bottom: None,
            leq: None,
        }),
        DAutomaton::Vect(_) => None,
    }
}

/// The transition algebra of a finite automaton: closure of the generator
/// maps under composition and the variety operations, with deterministic
/// length-lexicographic representatives.
pub fn transition_monoid(aut: &DAutomaton, limits: &Limits) -> Result<SynAlgebra, AlgebraError> {
    let tag = aut.tag();
    let alphabet = aut.alphabet().clone();
    if let DAutomaton::Vect(v) = aut {
        return vect_transition_algebra(v, &alphabet, limits);
    }
    let carrier = table_carrier(aut).expect("non-vector automata have table carriers");
    let letters: Vec<char> = alphabet.letters().to_vec();

    let mut elements: Vec<AlgebraElem> = Vec::new();
    let mut index: HashMap<Vec<usize>, usize> = HashMap::new();
    let push = |map: Vec<usize>,
                    rep: FreeElem,
                    elements: &mut Vec<AlgebraElem>,
                    index: &mut HashMap<Vec<usize>, usize>|
     -> (usize, bool) {
        if let Some(&i) = index.get(&map) {
            return (i, false);
        }
        let i = elements.len();
        index.insert(map.clone(), i);
        elements.push(AlgebraElem {
            map: EndoMap::Table(map),
            rep,
        });
        (i, true)
    };

    // Word closure: breadth-first composition with the generator maps, so
    // the first representative found is the length-lex least.
    let identity: Vec<usize> = (0..carrier.size).collect();
    push(
        identity,
        FreeElem::unit_word_like(tag),
        &mut elements,
        &mut index,
    );
    let mut next = 0;
    while next < elements.len() {
        let (cur_map, cur_rep) = {
            let e = &elements[next];
            let EndoMap::Table(m) = &e.map else { unreachable!() };
            (m.clone(), e.rep.clone())
        };
        for (l, gen) in carrier.gens.iter().enumerate() {
            let map = compose_then(&cur_map, gen);
            let rep = append_letter(tag, &cur_rep, letters[l]);
            push(map, rep, &mut elements, &mut index);
            if elements.len() > limits.max_algebra_elements {
                return Err(AlgebraError::CapacityExceeded {
                    what: "transition algebra closure".into(),
                    size: elements.len(),
                    limit: limits.max_algebra_elements,
                });
            }
        }
        next += 1;
    }

    // Variety saturation.
    let mut extra = Extra::None;
    match tag {
        VarietyTag::Set => {}
        VarietyTag::Pos => {
            let leq_states = carrier.leq.as_ref().expect("pos carrier has an order");
            let n = elements.len();
            let leq = (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| {
                            let (EndoMap::Table(mi), EndoMap::Table(mj)) =
                                (&elements[i].map, &elements[j].map)
                            else {
                                unreachable!()
                            };
                            mi.iter().zip(mj.iter()).all(|(&x, &y)| leq_states[x][y])
                        })
                        .collect()
                })
                .collect();
            extra = Extra::Order(leq);
        }
        VarietyTag::PSet => {
            let bottom = carrier.pset_bottom.expect("pset carrier has a bottom");
            let const_bottom = vec![bottom; carrier.size];
            let (zero, _) = push(
                const_bottom,
                FreeElem::Bottom,
                &mut elements,
                &mut index,
            );
            extra = Extra::Zero(zero);
        }
        VarietyTag::Inv => {
            let inv_carrier = carrier.involution.as_ref().expect("inv carrier");
            // Complements of all word maps (closed under products with them).
            let word_count = elements.len();
            for i in 0..word_count {
                let (map, rep) = {
                    let EndoMap::Table(m) = &elements[i].map else { unreachable!() };
                    (compose_then(m, inv_carrier), complement_rep(&elements[i].rep))
                };
                push(map, rep, &mut elements, &mut index);
            }
            let involution: Vec<usize> = (0..elements.len())
                .map(|i| {
                    let EndoMap::Table(m) = &elements[i].map else { unreachable!() };
                    index[&compose_then(m, inv_carrier)]
                })
                .collect();
            extra = Extra::Involution(involution);
        }
        VarietyTag::Jsl => {
            let (join, bottom) = carrier.join.as_ref().expect("jsl carrier has joins");
            let const_bottom = vec![*bottom; carrier.size];
            push(
                const_bottom,
                FreeElem::WordSet(BTreeSet::new()),
                &mut elements,
                &mut index,
            );
            // Saturate under pointwise binary joins.
            let mut frontier: Vec<usize> = (0..elements.len()).collect();
            while !frontier.is_empty() {
                let mut fresh = Vec::new();
                let known = elements.len();
                for &i in &frontier {
                    for j in 0..known {
                        let (EndoMap::Table(mi), EndoMap::Table(mj)) =
                            (&elements[i].map, &elements[j].map)
                        else {
                            unreachable!()
                        };
                        let joined: Vec<usize> = mi
                            .iter()
                            .zip(mj.iter())
                            .map(|(&x, &y)| join[x][y])
                            .collect();
                        let rep = join_rep(&elements[i].rep, &elements[j].rep);
                        let (idx, new) = push(joined, rep, &mut elements, &mut index);
                        if new {
                            fresh.push(idx);
                        }
                        if elements.len() > limits.max_algebra_elements {
                            return Err(AlgebraError::CapacityExceeded {
                                what: "semilattice transition algebra closure".into(),
                                size: elements.len(),
                                limit: limits.max_algebra_elements,
                            });
                        }
                    }
                }
                frontier = fresh;
            }
            let zero = {
                let const_bottom = vec![*bottom; carrier.size];
                index[&const_bottom]
            };
            let n = elements.len();
            let add = (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| {
                            let (EndoMap::Table(mi), EndoMap::Table(mj)) =
                                (&elements[i].map, &elements[j].map)
                            else {
                                unreachable!()
                            };
                            let joined: Vec<usize> = mi
                                .iter()
                                .zip(mj.iter())
                                .map(|(&x, &y)| join[x][y])
                                .collect();
                            index[&joined]
                        })
                        .collect()
                })
                .collect();
            extra = Extra::Jsl { add, zero };
        }
        VarietyTag::Vect(_) => unreachable!("handled above"),
    }

    // Multiplication table (diagrammatic: mult(u,v) = δ_v ∘ δ_u).
    let n = elements.len();
    let mult: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let (EndoMap::Table(mi), EndoMap::Table(mj)) =
                        (&elements[i].map, &elements[j].map)
                    else {
                        unreachable!()
                    };
                    index[&compose_then(mi, mj)]
                })
                .collect()
        })
        .collect();

    let gen_map = GenMap::Table(
        letters
            .iter()
            .enumerate()
            .map(|(l, &c)| (c, index[&carrier.gens[l]]))
            .collect(),
    );
    let output: Vec<OutputValue> = elements
        .iter()
        .map(|e| {
            let EndoMap::Table(m) = &e.map else { unreachable!() };
            carrier.out[m[carrier.initial]]
        })
        .collect();

    let unit = {
        let identity: Vec<usize> = (0..carrier.size).collect();
        index[&identity]
    };
    Ok(SynAlgebra {
        tag,
        alphabet,
        elements,
        unit,
        mult: MultOp::Table(mult),
        gen_map,
        output,
        extra,
    })
}

fn vect_transition_algebra(
    v: &VectAutomaton,
    alphabet: &Alphabet,
    limits: &Limits,
) -> Result<SynAlgebra, AlgebraError> {
    let p = v.p;
    let d = v.dim;
    let letters: Vec<char> = alphabet.letters().to_vec();
    // Basis of the span of word matrices, found breadth-first.
    let mut span = SpanBasis::new(p, d * d);
    let mut elements: Vec<AlgebraElem> = Vec::new();
    let mut mats: Vec<FpMat> = Vec::new();
    let identity = FpMat::identity(p, d);
    if let Insert::Independent(_) = span.insert(&identity.data) {
        elements.push(AlgebraElem {
            map: EndoMap::Matrix(identity.clone()),
            rep: FreeElem::Poly(BTreeMap::from([(Word::epsilon(), 1)])),
        });
        mats.push(identity.clone());
    }
    let mut next = 0;
    while next < mats.len() {
        let cur = mats[next].clone();
        let cur_rep = elements[next].rep.clone();
        for (l, m) in v.mats.iter().enumerate() {
            let prod = cur.mat_mul(m);
            if let Insert::Independent(_) = span.insert(&prod.data) {
                let rep = append_letter(VarietyTag::Vect(p), &cur_rep, letters[l]);
                elements.push(AlgebraElem {
                    map: EndoMap::Matrix(prod.clone()),
                    rep,
                });
                mats.push(prod);
                if elements.len() > limits.max_algebra_elements {
                    return Err(AlgebraError::CapacityExceeded {
                        what: "matrix span closure".into(),
                        size: elements.len(),
                        limit: limits.max_algebra_elements,
                    });
                }
            }
        }
        next += 1;
    }

    let dim = elements.len();
    let structure: Vec<Vec<Vec<u32>>> = (0..dim)
        .map(|i| {
            (0..dim)
                .map(|j| {
                    let prod = mats[i].mat_mul(&mats[j]);
                    span.coords(&prod.data)
                        .expect("products of word matrices stay in the span")
                })
                .collect()
        })
        .collect();
    let gen_map = GenMap::Linear(
        letters
            .iter()
            .enumerate()
            .map(|(l, &c)| {
                let coords = span
                    .coords(&v.mats[l].data)
                    .expect("letter matrices lie in the span of word matrices");
                (c, coords)
            })
            .collect(),
    );
    let output: Vec<OutputValue> = mats
        .iter()
        .map(|m| {
            let reached = fp::vec_mat(p, &v.init, m);
            OutputValue::Scalar(fp::dot(p, &reached, &v.out))
        })
        .collect();
    // The identity is the first basis element whenever the dimension is
    // nonzero; for the zero algebra the unit coincides with zero and the
    // index is vacuous.
    Ok(SynAlgebra {
        tag: VarietyTag::Vect(p),
        alphabet: alphabet.clone(),
        elements,
        unit: 0,
        mult: MultOp::Structure(structure),
        gen_map,
        output,
        extra: Extra::Vect { p, dim },
    })
}

impl FreeElem {
    /// The unit in word-like form used for representatives during closure.
    fn unit_word_like(tag: VarietyTag) -> FreeElem {
        match tag {
            VarietyTag::Jsl => FreeElem::WordSet(BTreeSet::from([Word::epsilon()])),
            VarietyTag::Vect(_) => FreeElem::Poly(BTreeMap::from([(Word::epsilon(), 1)])),
            VarietyTag::Inv => FreeElem::Signed {
                word: Word::epsilon(),
                complemented: false,
            },
            _ => FreeElem::epsilon(),
        }
    }
}

fn append_letter(tag: VarietyTag, rep: &FreeElem, c: char) -> FreeElem {
    let _ = tag;
    match rep {
        FreeElem::Word(w) => {
            let mut w = w.clone();
            w.push(c);
            FreeElem::Word(w)
        }
        FreeElem::Signed { word, complemented } => {
            let mut w = word.clone();
            w.push(c);
            FreeElem::Signed {
                word: w,
                complemented: *complemented,
            }
        }
        FreeElem::WordSet(ws) => FreeElem::WordSet(
            ws.iter()
                .map(|w| {
                    let mut w = w.clone();
                    w.push(c);
                    w
                })
                .collect(),
        ),
        FreeElem::Poly(terms) => FreeElem::Poly(
            terms
                .iter()
                .map(|(w, &coef)| {
                    let mut w = w.clone();
                    w.push(c);
                    (w, coef)
                })
                .collect(),
        ),
        FreeElem::Bottom => FreeElem::Bottom,
    }
}

fn complement_rep(rep: &FreeElem) -> FreeElem {
    match rep {
        FreeElem::Signed { word, complemented } => FreeElem::Signed {
            word: word.clone(),
            complemented: !complemented,
        },
        other => other.clone(),
    }
}

fn join_rep(a: &FreeElem, b: &FreeElem) -> FreeElem {
    match (a, b) {
        (FreeElem::WordSet(x), FreeElem::WordSet(y)) => {
            FreeElem::WordSet(x.union(y).cloned().collect())
        }
        _ => a.clone(),
    }
}

/// The action of an arbitrary free element on an automaton carrier.
pub fn elem_action(aut: &DAutomaton, u: &FreeElem) -> Result<EndoMap, AlgebraError> {
    u.well_formed(aut.tag())?;
    let alphabet = aut.alphabet();
    let letter_index = |w: &Word| -> Vec<usize> {
        w.letters()
            .iter()
            .map(|&c| alphabet.index_of(c).expect("validated letters"))
            .collect()
    };
    Ok(match aut {
        DAutomaton::Set(_) | DAutomaton::Pos(_) | DAutomaton::PSet(_) => {
            let d = match aut {
                DAutomaton::Set(d) => d,
                DAutomaton::Pos(p) => &p.dfa,
                DAutomaton::PSet(p) => &p.dfa,
                _ => unreachable!(),
            };
            match u {
                FreeElem::Word(w) => {
                    EndoMap::Table((0..d.states()).map(|q| d.run_from(q, w.letters())).collect())
                }
                FreeElem::Bottom => {
                    let DAutomaton::PSet(p) = aut else {
                        unreachable!("⊥ is only well-formed for pointed sets")
                    };
                    EndoMap::Table(vec![p.bottom; d.states()])
                }
                _ => unreachable!("well_formed filtered mismatches"),
            }
        }
        DAutomaton::Inv(i) => {
            let FreeElem::Signed { word, complemented } = u else {
                unreachable!()
            };
            let idx = letter_index(word);
            let mut map: Vec<usize> = (0..i.elements()).collect();
            for &l in &idx {
                map = map.into_iter().map(|e| i.trans[e][l]).collect();
            }
            if *complemented {
                map = map.into_iter().map(|e| i.involution[e]).collect();
            }
            EndoMap::Table(map)
        }
        DAutomaton::Jsl(j) => {
            let FreeElem::WordSet(ws) = u else { unreachable!() };
            let mut map = vec![j.bottom; j.elements()];
            for w in ws {
                let idx = letter_index(w);
                for (e, slot) in map.iter_mut().enumerate() {
                    let mut cur = e;
                    for &l in &idx {
                        cur = j.trans[cur][l];
                    }
                    *slot = j.join[*slot][cur];
                }
            }
            EndoMap::Table(map)
        }
        DAutomaton::Vect(v) => {
            let FreeElem::Poly(terms) = u else { unreachable!() };
            let mut acc = FpMat::zero(v.p, v.dim, v.dim);
            for (w, &c) in terms {
                let idx = letter_index(w);
                acc = acc.add_mat(&v.word_matrix(&idx).scale(c));
            }
            EndoMap::Matrix(acc)
        }
    })
}

/// The syntactic algebra of a language: the transition algebra of its
/// minimal automaton in the variety, with outputs recomputed through the
/// language evaluation of each representative.
pub fn syntactic_algebra(
    tag: VarietyTag,
    l0: &Dfa,
    limits: &Limits,
) -> Result<SynAlgebra, AlgebraError> {
    let (alg, _) = syntactic_algebra_with_automaton(tag, l0, limits)?;
    Ok(alg)
}

/// As [`syntactic_algebra`], also returning the minimal automaton the
/// algebra was computed from.
pub fn syntactic_algebra_with_automaton(
    tag: VarietyTag,
    l0: &Dfa,
    limits: &Limits,
) -> Result<(SynAlgebra, DAutomaton), AlgebraError> {
    let min;
    let l0 = if l0.is_minimal() {
        l0
    } else {
        min = l0.minimized();
        &min
    };
    let aut = crate::dautomata::minimal_dautomaton(tag, l0, limits)?;
    let mut alg = transition_monoid(&aut, limits)?;
    for i in 0..alg.elements.len() {
        alg.output[i] = eval_language(tag, l0, &alg.elements[i].rep)?;
    }
    Ok((alg, aut))
}

/// Decides whether the generator-respecting correspondence between two
/// algebras over the same alphabet (element of `a` realized by word w ↦
/// element of `b` realized by w) is well-defined and bijective. Both
/// algebras must present quotients of the same free algebra; the check runs
/// a simultaneous closure from the unit pair over generator multiplication
/// and the variety operations.
pub fn iso_as_quotients(a: &SynAlgebra, b: &SynAlgebra) -> Result<bool, AlgebraError> {
    if a.tag != b.tag {
        return Err(AlgebraError::TagMismatch(a.tag, b.tag));
    }
    if a.alphabet != b.alphabet {
        return Err(AlgebraError::AlphabetMismatch);
    }
    match (&a.mult, &b.mult) {
        (MultOp::Table(_), MultOp::Table(_)) => Ok(iso_tables(a, b)),
        (MultOp::Structure(_), MultOp::Structure(_)) => Ok(iso_linear(a, b)),
        _ => Err(AlgebraError::TagMismatch(a.tag, b.tag)),
    }
}

fn iso_tables(a: &SynAlgebra, b: &SynAlgebra) -> bool {
    if a.size() != b.size() {
        return false;
    }
    let (GenMap::Table(ga), GenMap::Table(gb)) = (&a.gen_map, &b.gen_map) else {
        unreachable!()
    };
    let mut fwd: Vec<Option<usize>> = vec![None; a.size()];
    let mut bwd: Vec<Option<usize>> = vec![None; b.size()];
    let mut queue = Vec::new();
    let relate = |x: usize,
                      y: usize,
                      fwd: &mut Vec<Option<usize>>,
                      bwd: &mut Vec<Option<usize>>,
                      queue: &mut Vec<(usize, usize)>|
     -> bool {
        match (fwd[x], bwd[y]) {
            (None, None) => {
                fwd[x] = Some(y);
                bwd[y] = Some(x);
                queue.push((x, y));
                true
            }
            (Some(y2), _) => y2 == y,
            (None, Some(x2)) => x2 == x,
        }
    };
    if !relate(a.unit, b.unit, &mut fwd, &mut bwd, &mut queue) {
        return false;
    }
    // Seed the structure constants that come from the free algebra itself.
    match (&a.extra, &b.extra) {
        (Extra::Zero(za), Extra::Zero(zb)) => {
            if !relate(*za, *zb, &mut fwd, &mut bwd, &mut queue) {
                return false;
            }
        }
        (Extra::Jsl { zero: za, .. }, Extra::Jsl { zero: zb, .. }) => {
            if !relate(*za, *zb, &mut fwd, &mut bwd, &mut queue) {
                return false;
            }
        }
        _ => {}
    }
    let mut next = 0;
    while next < queue.len() {
        let (x, y) = queue[next];
        next += 1;
        for c in a.alphabet.letters() {
            let xa = a.mul(x, ga[c]).unwrap();
            let ya = b.mul(y, gb[c]).unwrap();
            if !relate(xa, ya, &mut fwd, &mut bwd, &mut queue) {
                return false;
            }
        }
        match (&a.extra, &b.extra) {
            (Extra::Involution(ia), Extra::Involution(ib)) => {
                if !relate(ia[x], ib[y], &mut fwd, &mut bwd, &mut queue) {
                    return false;
                }
            }
            (Extra::Jsl { add: adda, .. }, Extra::Jsl { add: addb, .. }) => {
                // Close the discovered pairs under joins.
                for i in 0..next {
                    let (x2, y2) = queue[i];
                    if !relate(
                        adda[x][x2],
                        addb[y][y2],
                        &mut fwd,
                        &mut bwd,
                        &mut queue,
                    ) {
                        return false;
                    }
                }
            }
            _ => {}
        }
    }
    if fwd.iter().any(Option::is_none) || bwd.iter().any(Option::is_none) {
        return false;
    }
    // For ordered algebras the correspondence must also be an order
    // isomorphism.
    if let (Extra::Order(la), Extra::Order(lb)) = (&a.extra, &b.extra) {
        for x in 0..a.size() {
            for x2 in 0..a.size() {
                let (y, y2) = (fwd[x].unwrap(), fwd[x2].unwrap());
                if la[x][x2] != lb[y][y2] {
                    return false;
                }
            }
        }
    }
    true
}

fn iso_linear(a: &SynAlgebra, b: &SynAlgebra) -> bool {
    let (Extra::Vect { p, dim: da }, Extra::Vect { p: pb, dim: db }) = (&a.extra, &b.extra)
    else {
        unreachable!()
    };
    if p != pb || da != db {
        return false;
    }
    let p = *p;
    let (ma, mb) = (vect_letter_matrices(a), vect_letter_matrices(b));
    let (ia, ib) = (vect_ambient_dim(a), vect_ambient_dim(b));
    // Simultaneous span of (matrix in a, matrix in b) pairs over all words.
    let mut span = SpanBasis::new(p, ia * ia + ib * ib);
    let mut queue: Vec<(FpMat, FpMat)> = Vec::new();
    let pair = |x: &FpMat, y: &FpMat| {
        let mut v = x.data.clone();
        v.extend_from_slice(&y.data);
        v
    };
    let id = (FpMat::identity(p, ia), FpMat::identity(p, ib));
    if let Insert::Independent(_) = span.insert(&pair(&id.0, &id.1)) {
        queue.push(id);
    }
    let mut next = 0;
    while next < queue.len() {
        let (x, y) = queue[next].clone();
        next += 1;
        for (la, lb) in ma.iter().zip(mb.iter()) {
            let nx = x.mat_mul(la);
            let ny = y.mat_mul(lb);
            if let Insert::Independent(_) = span.insert(&pair(&nx, &ny)) {
                queue.push((nx, ny));
            }
        }
    }
    // The pairing is the graph of a linear isomorphism iff no dimension is
    // lost on either side.
    span.dim() == *da && span.dim() == *db
}

fn vect_letter_matrices(a: &SynAlgebra) -> Vec<FpMat> {
    let GenMap::Linear(gen) = &a.gen_map else {
        unreachable!("linear algebras have linear generator maps")
    };
    let Extra::Vect { p, .. } = a.extra else { unreachable!() };
    let ambient = vect_ambient_dim(a);
    a.alphabet
        .letters()
        .iter()
        .map(|c| {
            let coords = &gen[c];
            let mut m = FpMat::zero(p, ambient, ambient);
            for (i, &ci) in coords.iter().enumerate() {
                if ci != 0 {
                    let EndoMap::Matrix(bi) = &a.elements[i].map else { unreachable!() };
                    m = m.add_mat(&bi.scale(ci));
                }
            }
            m
        })
        .collect()
}

fn vect_ambient_dim(a: &SynAlgebra) -> usize {
    a.elements
        .first()
        .map(|e| {
            let EndoMap::Matrix(m) = &e.map else { unreachable!() };
            m.rows
        })
        .unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dautomata::minimal_dautomaton;
    use crate::freemon::parse_free_elem;
    use crate::langcore::{parse_regex, regex_to_min_dfa};

    fn ab() -> Alphabet {
        Alphabet::from_str("ab").unwrap()
    }

    fn min(s: &str) -> Dfa {
        let a = ab();
        regex_to_min_dfa(&parse_regex(s, &a).unwrap(), &a).unwrap()
    }

    fn syn(tag: VarietyTag, s: &str) -> SynAlgebra {
        syntactic_algebra(tag, &min(s), &Limits::default()).unwrap()
    }

    fn reps(alg: &SynAlgebra) -> Vec<String> {
        alg.elements.iter().map(|e| e.rep.to_string()).collect()
    }

    #[test]
    fn set_ab_star_has_six_elements_with_zero() {
        let alg = syn(VarietyTag::Set, "(ab)*");
        assert_eq!(alg.size(), 6);
        assert_eq!(reps(&alg), vec!["ε", "a", "b", "aa", "ab", "ba"]);
        // aa is the absorbing zero.
        let zero = 3;
        let MultOp::Table(t) = &alg.mult else { unreachable!() };
        for i in 0..6 {
            assert_eq!(t[zero][i], zero);
            assert_eq!(t[i][zero], zero);
        }
        assert!(laws::check_algebra_laws(&alg).is_empty());
    }

    #[test]
    fn full_and_empty_languages_have_trivial_monoids() {
        assert_eq!(syn(VarietyTag::Set, "(a|b)*").size(), 1);
        assert_eq!(syn(VarietyTag::Set, "∅").size(), 1);
    }

    #[test]
    fn even_a_is_the_two_element_group() {
        let alg = syn(VarietyTag::Set, "(b|ab*a)*");
        assert_eq!(alg.size(), 2);
        let MultOp::Table(t) = &alg.mult else { unreachable!() };
        let g = 1 - alg.unit;
        assert_eq!(t[g][g], alg.unit);
        assert_eq!(t[alg.unit][g], g);
    }

    #[test]
    fn pos_contains_a_is_the_ordered_two_chain() {
        let alg = syn(VarietyTag::Pos, "(a|b)*a(a|b)*");
        assert_eq!(alg.size(), 2);
        let Extra::Order(leq) = &alg.extra else { unreachable!() };
        let a_class = 1 - alg.unit;
        assert!(leq[alg.unit][a_class], "[ε] < [a] expected");
        assert!(!leq[a_class][alg.unit]);
        assert!(laws::check_algebra_laws(&alg).is_empty());
    }

    #[test]
    fn pset_ab_star_merges_bottom_into_aa() {
        let alg = syn(VarietyTag::PSet, "(ab)*");
        assert_eq!(alg.size(), 6);
        let Extra::Zero(z) = alg.extra else { unreachable!() };
        // The zero class is the class of the word aa.
        assert_eq!(alg.elements[z].rep.to_string(), "aa");
        assert_eq!(alg.output[z], OutputValue::Bottom);
        assert!(laws::check_algebra_laws(&alg).is_empty());
    }

    #[test]
    fn pset_without_dead_words_keeps_bottom_separate() {
        // Even-length words: no dead word, so ⊥ is its own class.
        let alg = syn(VarietyTag::PSet, "((a|b)(a|b))*");
        assert_eq!(alg.size(), 3);
        let Extra::Zero(z) = alg.extra else { unreachable!() };
        assert_eq!(alg.elements[z].rep, FreeElem::Bottom);
    }

    #[test]
    fn inv_ab_star_doubles_to_twelve() {
        let alg = syn(VarietyTag::Inv, "(ab)*");
        assert_eq!(alg.size(), 12);
        let Extra::Involution(inv) = &alg.extra else { unreachable!() };
        for i in 0..12 {
            let (OutputValue::Bit(f), OutputValue::Bit(fc)) =
                (alg.output[i], alg.output[inv[i]])
            else {
                unreachable!()
            };
            assert_ne!(f, fc);
        }
        assert!(laws::check_algebra_laws(&alg).is_empty());
    }

    #[test]
    fn jsl_a_star_has_two_elements() {
        let alg = syn(VarietyTag::Jsl, "a*");
        assert_eq!(alg.size(), 2);
        let Extra::Jsl { zero, .. } = alg.extra else { unreachable!() };
        assert_ne!(alg.unit, zero);
        assert!(laws::check_algebra_laws(&alg).is_empty());
    }

    #[test]
    fn vect2_even_a_has_basis_identity_and_swap() {
        let alg = syn(VarietyTag::Vect(2), "(b|ab*a)*");
        assert_eq!(alg.size(), 2);
        let EndoMap::Matrix(b0) = &alg.elements[0].map else { unreachable!() };
        let EndoMap::Matrix(b1) = &alg.elements[1].map else { unreachable!() };
        assert_eq!(b0.data, vec![1, 0, 0, 1]);
        assert_eq!(b1.data, vec![0, 1, 1, 0]);
        assert_eq!(alg.elements[0].rep.to_string(), "ε");
        assert_eq!(alg.elements[1].rep.to_string(), "a");
        assert!(laws::check_algebra_laws(&alg).is_empty());
    }

    #[test]
    fn one_state_full_language_monoid_in_every_variety() {
        // (a|b)*: one-element monoid for sets; one-dimensional for vect.
        assert_eq!(syn(VarietyTag::Set, "(a|b)*").size(), 1);
        assert_eq!(syn(VarietyTag::Vect(2), "(a|b)*").size(), 1);
        // For JSL the transition semiring also gains the additive zero.
        assert_eq!(syn(VarietyTag::Jsl, "(a|b)*").size(), 2);
    }

    #[test]
    fn morphism_law_on_short_words() {
        // class(uv) = mult(class(u), class(v)) for all words up to length 4.
        for tag in [VarietyTag::Set, VarietyTag::Pos, VarietyTag::PSet, VarietyTag::Inv] {
            let l0 = min("(ab)*");
            let (alg, aut) =
                syntactic_algebra_with_automaton(tag, &l0, &Limits::default()).unwrap();
            let words = crate::langcore::words_up_to(&ab(), 4);
            for u in &words {
                for v in &words {
                    let cu = alg.class_of(&aut, &FreeElem::lift_word(tag, u.clone())).unwrap();
                    let cv = alg.class_of(&aut, &FreeElem::lift_word(tag, v.clone())).unwrap();
                    let cuv = alg
                        .class_of(&aut, &FreeElem::lift_word(tag, u.concat(v)))
                        .unwrap();
                    let (ElemClass::Index(iu), ElemClass::Index(iv), ElemClass::Index(iuv)) =
                        (cu, cv, cuv)
                    else {
                        unreachable!()
                    };
                    assert_eq!(alg.mul(iu, iv), Some(iuv), "{tag}: {u} · {v}");
                }
            }
        }
    }

    #[test]
    fn recognition_passes_for_examples() {
        for (tag, s) in [
            (VarietyTag::Set, "(ab)*"),
            (VarietyTag::Pos, "(a|b)*a(a|b)*"),
            (VarietyTag::PSet, "(ab)*"),
            (VarietyTag::Inv, "(ab)*"),
            (VarietyTag::Jsl, "a*"),
            (VarietyTag::Vect(2), "(b|ab*a)*"),
        ] {
            let l0 = min(s);
            let (alg, aut) =
                syntactic_algebra_with_automaton(tag, &l0, &Limits::default()).unwrap();
            let report = laws::verify_recognition(&alg, &aut, &l0, 0, 200).unwrap();
            assert!(report.passed(), "{tag} {s}: {:?}", report.failures);
        }
    }

    #[test]
    fn corrupted_table_is_detected() {
        let l0 = min("(ab)*");
        let (mut alg, aut) =
            syntactic_algebra_with_automaton(VarietyTag::Set, &l0, &Limits::default()).unwrap();
        let MultOp::Table(t) = &mut alg.mult else { unreachable!() };
        // Swap two entries.
        let tmp = t[1][2];
        t[1][2] = t[2][1];
        t[2][1] = tmp;
        let laws_broken = !laws::check_algebra_laws(&alg).is_empty();
        let recognition_broken = !laws::verify_recognition(&alg, &aut, &l0, 0, 100)
            .unwrap()
            .passed();
        assert!(laws_broken || recognition_broken);
    }

    #[test]
    fn thm_transition_monoid_matches_oracle_classes() {
        // Class equality in the transition algebra of the minimal automaton
        // coincides with the bounded-context congruence, for words <= 4.
        for tag in VarietyTag::ALL_DEFAULT {
            for s in ["(ab)*", "(a|b)*a", "a*"] {
                let l0 = min(s);
                let (alg, aut) =
                    syntactic_algebra_with_automaton(tag, &l0, &Limits::default()).unwrap();
                let oracle = CongruenceOracle::new(tag, &l0).unwrap();
                let words = crate::langcore::words_up_to(&ab(), 4);
                let elems: Vec<FreeElem> =
                    words.iter().map(|w| FreeElem::lift_word(tag, w.clone())).collect();
                for u in &elems {
                    for v in &elems {
                        let same_class =
                            alg.class_of(&aut, u).unwrap() == alg.class_of(&aut, v).unwrap();
                        let ans = oracle.decide(u, v).unwrap();
                        assert_eq!(same_class, ans.equal(), "{tag} {s}: {u} vs {v}");
                    }
                }
            }
        }
    }

    #[test]
    fn iso_detects_equal_and_unequal_quotients() {
        let a1 = syn(VarietyTag::Set, "(ab)*");
        let a2 = syn(VarietyTag::Set, "((ab)*)*");
        assert!(iso_as_quotients(&a1, &a2).unwrap());
        assert!(iso_as_quotients(&a1, &a1).unwrap());
        let b = syn(VarietyTag::Set, "(b|ab*a)*");
        assert!(!iso_as_quotients(&a1, &b).unwrap());
        let pos = syn(VarietyTag::Pos, "(ab)*");
        assert!(matches!(
            iso_as_quotients(&a1, &pos),
            Err(AlgebraError::TagMismatch(..))
        ));
    }

    #[test]
    fn iso_respects_structure_for_each_variety() {
        for tag in VarietyTag::ALL_DEFAULT {
            let a1 = syn(tag, "(ab)*");
            let a2 = syn(tag, "((ab)*)*");
            assert!(iso_as_quotients(&a1, &a2).unwrap(), "{tag}");
            let b = syn(tag, "(a|b)*a");
            assert!(!iso_as_quotients(&a1, &b).unwrap(), "{tag}");
        }
    }

    #[test]
    fn pos_element_order_matches_the_context_oracle() {
        for s in ["(a|b)*a(a|b)*", "(ab)*", "a*b*"] {
            let l0 = min(s);
            let (alg, _) =
                syntactic_algebra_with_automaton(VarietyTag::Pos, &l0, &Limits::default())
                    .unwrap();
            let oracle = CongruenceOracle::new(VarietyTag::Pos, &l0).unwrap();
            let violations = laws::pos_order_matches_oracle(&alg, &oracle).unwrap();
            assert!(violations.is_empty(), "{s}: {violations:?}");
        }
    }

    #[test]
    fn transition_monoid_of_unreduced_lifting_still_closes() {
        // The transition algebra is defined for any automaton, not just the
        // minimal one; the unreduced powerset lifting works too.
        let l0 = min("a*");
        let lifting = crate::dautomata::jsl_powerset_lifting(&l0, &Limits::default()).unwrap();
        let alg = transition_monoid(&DAutomaton::Jsl(lifting), &Limits::default()).unwrap();
        assert!(alg.size() >= 2);
        // And the capacity guard triggers when the limit is tiny.
        let tiny = Limits {
            max_algebra_elements: 1,
            ..Limits::default()
        };
        let aut = minimal_dautomaton(VarietyTag::Set, &min("(ab)*"), &Limits::default()).unwrap();
        assert!(matches!(
            transition_monoid(&aut, &tiny),
            Err(AlgebraError::CapacityExceeded { .. })
        ));
    }

    #[test]
    fn representatives_reevaluate_to_their_maps() {
        for tag in VarietyTag::ALL_DEFAULT {
            let l0 = min("(ab)*");
            let (alg, aut) =
                syntactic_algebra_with_automaton(tag, &l0, &Limits::default()).unwrap();
            for e in &alg.elements {
                assert_eq!(elem_action(&aut, &e.rep).unwrap(), e.map, "{tag}: {}", e.rep);
            }
        }
    }

    #[test]
    fn jsl_class_of_free_sets_lands_in_closure() {
        let l0 = min("(ab)*");
        let (alg, aut) =
            syntactic_algebra_with_automaton(VarietyTag::Jsl, &l0, &Limits::default()).unwrap();
        for text in ["{}", "{ε}", "{a,b}", "{ab,aabb}", "{a,ab,abb}"] {
            let u = parse_free_elem(VarietyTag::Jsl, text, &ab()).unwrap();
            let class = alg.class_of(&aut, &u);
            assert!(class.is_ok(), "{text}: {class:?}");
        }
    }
}
