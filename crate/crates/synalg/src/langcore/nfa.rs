//! Internal nondeterministic automata used by the regex-to-DFA pipeline and
//! by language reversal. Not part of the public surface.

use std::collections::{BTreeSet, HashMap};

use super::dfa::Dfa;
use super::regex::Regex;
use super::word::Alphabet;

pub(crate) struct Nfa {
    /// eps[q] = ε-successors of q
    eps: Vec<Vec<usize>>,
    /// letter_edges[q] = (letter index, successor) pairs
    letter_edges: Vec<Vec<(usize, usize)>>,
    initials: Vec<usize>,
    finals: Vec<bool>,
    alphabet: Alphabet,
}

impl Nfa {
    fn with_states(alphabet: Alphabet, n: usize) -> Self {
        Nfa {
            eps: vec![Vec::new(); n],
            letter_edges: vec![Vec::new(); n],
            initials: Vec::new(),
            finals: vec![false; n],
            alphabet,
        }
    }

    fn add_state(&mut self) -> usize {
        self.eps.push(Vec::new());
        self.letter_edges.push(Vec::new());
        self.finals.push(false);
        self.eps.len() - 1
    }

    /// Thompson construction. Each sub-expression contributes one entry and
    /// one exit state.
    pub(crate) fn thompson(regex: &Regex, alphabet: &Alphabet) -> Nfa {
        let mut nfa = Nfa::with_states(alphabet.clone(), 0);
        let (start, end) = nfa.build(regex);
        nfa.initials.push(start);
        nfa.finals[end] = true;
        nfa
    }

    fn build(&mut self, regex: &Regex) -> (usize, usize) {
        match regex {
            Regex::Empty => {
                let s = self.add_state();
                let e = self.add_state();
                (s, e)
            }
            Regex::Epsilon => {
                let s = self.add_state();
                let e = self.add_state();
                self.eps[s].push(e);
                (s, e)
            }
            Regex::Literal(c) => {
                let s = self.add_state();
                let e = self.add_state();
                let idx = self
                    .alphabet
                    .index_of(*c)
                    .expect("literal checked against alphabet before construction");
                self.letter_edges[s].push((idx, e));
                (s, e)
            }
            Regex::Union(l, r) => {
                let (ls, le) = self.build(l);
                let (rs, re) = self.build(r);
                let s = self.add_state();
                let e = self.add_state();
                self.eps[s].push(ls);
                self.eps[s].push(rs);
                self.eps[le].push(e);
                self.eps[re].push(e);
                (s, e)
            }
            Regex::Concat(l, r) => {
                let (ls, le) = self.build(l);
                let (rs, re) = self.build(r);
                self.eps[le].push(rs);
                (ls, re)
            }
            Regex::Star(inner) => {
                let (is, ie) = self.build(inner);
                let s = self.add_state();
                let e = self.add_state();
                self.eps[s].push(is);
                self.eps[s].push(e);
                self.eps[ie].push(is);
                self.eps[ie].push(e);
                (s, e)
            }
        }
    }

    /// The reverse of a DFA: edges flipped, old finals become initials, the
    /// old initial becomes the single final state.
    pub(crate) fn reverse_of(dfa: &Dfa) -> Nfa {
        let n = dfa.states();
        let mut nfa = Nfa::with_states(dfa.alphabet().clone(), n);
        for q in 0..n {
            for l in 0..dfa.alphabet().len() {
                let to = dfa.step(q, l);
                nfa.letter_edges[to].push((l, q));
            }
            if dfa.is_final(q) {
                nfa.initials.push(q);
            }
        }
        nfa.finals[dfa.initial()] = true;
        nfa
    }

    fn eps_closure(&self, set: &mut BTreeSet<usize>) {
        let mut stack: Vec<usize> = set.iter().copied().collect();
        while let Some(q) = stack.pop() {
            for &t in &self.eps[q] {
                if set.insert(t) {
                    stack.push(t);
                }
            }
        }
    }

    /// Subset construction. The result is total (the empty subset acts as a
    /// sink) and trimmed to the subsets reachable from the initial closure.
    pub(crate) fn determinize(&self) -> Dfa {
        let k = self.alphabet.len();
        let mut start: BTreeSet<usize> = self.initials.iter().copied().collect();
        self.eps_closure(&mut start);

        let mut index: HashMap<BTreeSet<usize>, usize> = HashMap::new();
        let mut subsets: Vec<BTreeSet<usize>> = Vec::new();
        let mut trans: Vec<Vec<usize>> = Vec::new();

        index.insert(start.clone(), 0);
        subsets.push(start);
        let mut next = 0;
        while next < subsets.len() {
            let current = subsets[next].clone();
            let mut row = Vec::with_capacity(k);
            for l in 0..k {
                let mut target = BTreeSet::new();
                for &q in &current {
                    for &(el, to) in &self.letter_edges[q] {
                        if el == l {
                            target.insert(to);
                        }
                    }
                }
                self.eps_closure(&mut target);
                let id = *index.entry(target.clone()).or_insert_with(|| {
                    subsets.push(target);
                    subsets.len() - 1
                });
                row.push(id);
            }
            trans.push(row);
            next += 1;
        }

        let finals: Vec<bool> = subsets
            .iter()
            .map(|s| s.iter().any(|&q| self.finals[q]))
            .collect();
        Dfa::from_parts_unchecked(self.alphabet.clone(), 0, finals, trans)
    }
}
