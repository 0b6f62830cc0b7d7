//! Syntactic algebras of regular languages, computed uniformly in six
//! commutative varieties: sets, posets, pointed sets, involution algebras,
//! join-semilattices and vector spaces over a prime field.
//!
//! A regular language `L` over a finite alphabet can be recognized by a
//! monoid-like structure in each of these varieties. This crate computes the
//! smallest such recognizer — the *syntactic algebra* of `L` — in three
//! independent ways and cross-checks them:
//!
//! 1. the quotient of the free algebra by the two-sided syntactic congruence,
//!    decided exactly by a bounded-context oracle ([`algebra::CongruenceOracle`]);
//! 2. the transition algebra of the minimal automaton in the variety
//!    ([`algebra::syntactic_algebra`]);
//! 3. for sets, the dual construction via the atoms of the boolean algebra
//!    generated by the two-sided derivatives of the reversed language
//!    ([`duality`]).
//!
//! The [`langcore`] module supplies the classical substrate (regex parsing,
//! canonical minimal DFAs, derivatives, reversal); [`freemon`] the elements of
//! the free algebra per variety; [`dautomata`] the minimal automaton in each
//! variety; [`cli`] a command-line front end; [`corpus`] the verification
//! corpus and acceptance checks.

pub mod algebra;
pub mod cli;
pub mod corpus;
pub mod dautomata;
pub mod duality;
pub mod fp;
pub mod freemon;
pub mod langcore;

/// Capacity guards for the potentially explosive constructions.
#[derive(Debug, Clone)]
pub struct Limits {
    /// Subset construction for join-semilattice automata aborts above this
    /// many generated elements (default `2^20`).
    pub max_jsl_states: usize,
    /// Dimension guard for linear (vector-space) liftings.
    pub max_dim: usize,
    /// Closure guard for transition-algebra element counts.
    pub max_algebra_elements: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_jsl_states: 1 << 20,
            max_dim: 4096,
            // Multiplication tables are quadratic and the semilattice join
            // saturation touches every pair, so the element guard is kept
            // far below the subset guard.
            max_algebra_elements: 5000,
        }
    }
}
