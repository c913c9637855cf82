//! The grammar generating every nonempty word except the halting protocol.

use std::collections::{HashMap, HashSet};

use super::classes::{class_regular, mismatch_pda, RegularClass};
use super::pda::pda_to_cfg;
use super::{to_gnf, Grammar, GrammarBuilder, Symbol};
use crate::turing::{Sym, TuringMachine};

/// Nonterminal names used by [`build_g`].
pub struct GrammarParts;

impl GrammarParts {
    pub const START: &'static str = "S";
    pub const ANY: &'static str = "U";
    pub const PREFIX: &'static str = "Y";
    pub const PARTIAL: &'static str = "Z";
    pub const SEPARATOR: &'static str = "H";
}

/// Nonterminals whose productions are exactly `A -> a A` and `A -> a` for
/// every letter `a`; they generate all nonempty words.
fn universal(g: &Grammar) -> HashSet<usize> {
    let letters = g.terminals().len();
    let mut by_lhs: HashMap<usize, HashSet<&Vec<Symbol>>> = HashMap::new();
    for p in g.productions() {
        by_lhs.entry(p.lhs).or_default().insert(&p.rhs);
    }
    by_lhs
        .into_iter()
        .filter(|(a, rhss)| {
            rhss.len() == 2 * letters
                && (0..letters).all(|t| {
                    rhss.contains(&vec![Symbol::T(t)]) && rhss.contains(&vec![Symbol::T(t), Symbol::N(*a)])
                })
        })
        .map(|(a, _)| a)
        .collect()
}

/// Copies `g` into `b` under `prefix`, sending the nonterminals in `to_any`
/// to `any`. Returns the copied start symbol.
fn import(b: &mut GrammarBuilder, g: &Grammar, prefix: &str, to_any: &HashSet<usize>, any: usize) -> usize {
    let map: Vec<usize> = (0..g.nonterminals().len())
        .map(|a| if to_any.contains(&a) { any } else { b.nonterminal(&format!("{prefix}{}", g.nonterminals()[a])) })
        .collect();
    for p in g.productions() {
        if to_any.contains(&p.lhs) {
            continue;
        }
        let rhs = p
            .rhs
            .iter()
            .map(|&s| match s {
                Symbol::N(x) => Symbol::N(map[x]),
                t => t,
            })
            .collect();
        b.add(map[p.lhs], rhs);
    }
    map[g.start()]
}

/// Adds `target -> rhs` for every production `from -> rhs`.
fn copy_alternatives(b: &mut GrammarBuilder, from: usize, target: usize) {
    let rhss: Vec<Vec<Symbol>> = b.productions_of(from).map(|p| p.rhs.clone()).collect();
    for rhs in rhss {
        b.add(target, rhs);
    }
}

/// Greibach-form grammar over the machine alphabet with start `S`:
///
/// * `U -> a U | a` for all letters,
/// * `S -> a` for all letters, `S -> a U` for `a != #`,
/// * `S -> # Y U | # Y | # Z | # H` with `H -> #`,
/// * `Y` generates (with the leading `#` removed) the words that cannot be a
///   prefix of the halting protocol: those containing the cycling state,
///   with an ill-formed complete block, with a wrong first block, or with a
///   block `k` followed by something other than its successor,
/// * `Z` generates (again without the leading `#`) the words that do not
///   end with `#` or end with a block that has a successor.
///
/// `Y` may use `U`; `Z` uses its own nonterminals only.
pub fn build_g(m: &TuringMachine, x: &[Sym]) -> Grammar {
    let terminals = m.names().to_vec();
    let hash = m.separator();
    let mut b = GrammarBuilder::new(terminals.clone());
    let u = b.nonterminal(GrammarParts::ANY);
    let s = b.nonterminal(GrammarParts::START);
    let y = b.nonterminal(GrammarParts::PREFIX);
    let z = b.nonterminal(GrammarParts::PARTIAL);
    let h = b.nonterminal(GrammarParts::SEPARATOR);
    for a in 0..terminals.len() {
        b.add(u, vec![Symbol::T(a), Symbol::N(u)]);
        b.add(u, vec![Symbol::T(a)]);
    }
    for a in 0..terminals.len() {
        b.add(s, vec![Symbol::T(a)]);
        if a != hash {
            b.add(s, vec![Symbol::T(a), Symbol::N(u)]);
        }
    }
    b.add(s, vec![Symbol::T(hash), Symbol::N(y), Symbol::N(u)]);
    b.add(s, vec![Symbol::T(hash), Symbol::N(y)]);
    b.add(s, vec![Symbol::T(hash), Symbol::N(z)]);
    b.add(s, vec![Symbol::T(hash), Symbol::N(h)]);

    let nfa_grammar = |c: RegularClass| {
        to_gnf(&class_regular(m, x, c).to_grammar(&terminals)).expect("automaton grammars are ε-free")
    };
    let prefix_parts = [
        ("Yc", nfa_grammar(RegularClass::ContainsCycling)),
        ("Yb", nfa_grammar(RegularClass::BadBlock)),
        ("Ym", to_gnf(&pda_to_cfg(&mismatch_pda(m))).expect("real-time automata give ε-free grammars")),
        ("Yi", nfa_grammar(RegularClass::WrongStart)),
    ];
    let partial_parts =
        [("Zo", nfa_grammar(RegularClass::OpenEnd)), ("Zr", nfa_grammar(RegularClass::ResumableEnd))];

    b.add(h, vec![Symbol::T(hash)]);
    let mut starts = Vec::new();
    for (prefix, g) in &prefix_parts {
        starts.push((y, import(&mut b, g, prefix, &universal(g), u)));
    }
    for (prefix, g) in &partial_parts {
        starts.push((z, import(&mut b, g, prefix, &HashSet::new(), u)));
    }
    for (target, from) in starts {
        copy_alternatives(&mut b, from, target);
    }
    b.finish(s).expect("assembled grammar is well-formed")
}
