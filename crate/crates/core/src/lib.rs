//! Action logic workbench.
//!
//! * [`syntax`]: formulas, sequents, concrete syntax.
//! * [`malc`]: cut-free decision procedure for the star-free calculus.
//! * [`act`]: proof checker for action logic and synthesizers for derived rules.
//! * [`turing`]: deterministic Turing machines, runs and protocol words.
//! * [`grammar`]: context-free grammars, pushdown automata, Greibach normal
//!   form and the grammar that misses exactly one halting protocol.
//! * [`encode`]: translation of grammars into Lambek formulas.
//! * [`synthesize`]: end-to-end non-halting proofs for trivially cycling machines.

pub mod syntax;
pub mod proof;
pub mod doc;
pub mod build;
pub mod malc;
pub mod act;
pub mod turing;
pub mod grammar;
pub mod encode;
pub mod synthesize;

pub use syntax::{parse_formula, parse_sequent, Formula, Node, Sequent};
