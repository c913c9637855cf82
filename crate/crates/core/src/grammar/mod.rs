//! Context-free grammars and the automata used to build the grammar of
//! "everything except the halting protocol".
//!
//! Terminals and nonterminals are interned as indices. Words are slices of
//! terminal indices. For grammars produced by [`build_g`] the terminal index
//! of a letter equals its index in the machine alphabet.

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

mod build;
mod classes;
mod gnf;
pub mod nfa;
mod parse;
pub mod pda;

pub use build::{build_g, GrammarParts};
pub use classes::{class_regular, mismatch_pda, RegularClass};
pub use gnf::to_gnf;
pub use parse::{member, member_from, parse_tree, total_up_to, Earley, ParseTree, Totality};
pub use pda::pda_to_cfg;

#[derive(Debug, Error)]
pub enum GrammarError {
    #[error("invalid grammar JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid grammar: {0}")]
    Invalid(String),
    #[error("the grammar generates the empty word")]
    EmptyWordInLanguage,
    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),
    #[error("grammar is not in Greibach normal form")]
    NotGnf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    T(usize),
    N(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Production {
    pub lhs: usize,
    pub rhs: Vec<Symbol>,
}

impl Production {
    /// Leading terminal and trailing nonterminals when the production is in
    /// Greibach form `A -> a B1 .. Bl`.
    pub fn gnf_parts(&self) -> Option<(usize, Vec<usize>)> {
        let (&first, rest) = self.rhs.split_first()?;
        let Symbol::T(a) = first else { return None };
        let tail = rest
            .iter()
            .map(|s| match s {
                Symbol::N(b) => Some(*b),
                Symbol::T(_) => None,
            })
            .collect::<Option<Vec<_>>>()?;
        Some((a, tail))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grammar {
    terminals: Vec<String>,
    nonterminals: Vec<String>,
    start: usize,
    productions: Vec<Production>,
}

impl Grammar {
    pub fn new(
        terminals: Vec<String>,
        nonterminals: Vec<String>,
        start: usize,
        productions: Vec<Production>,
    ) -> Result<Self, GrammarError> {
        let bad = |m: String| Err(GrammarError::Invalid(m));
        let mut seen = HashSet::new();
        for name in terminals.iter().chain(&nonterminals) {
            if name.is_empty() || name.chars().any(char::is_whitespace) {
                return bad(format!("symbol {name:?} must be a nonempty token without spaces"));
            }
            if !seen.insert(name.as_str()) {
                return bad(format!("symbol {name:?} declared twice"));
            }
        }
        if start >= nonterminals.len() {
            return bad("start symbol out of range".into());
        }
        for p in &productions {
            let ok = p.lhs < nonterminals.len()
                && p.rhs.iter().all(|s| match *s {
                    Symbol::T(a) => a < terminals.len(),
                    Symbol::N(b) => b < nonterminals.len(),
                });
            if !ok {
                return bad("production refers to an undeclared symbol".into());
            }
        }
        Ok(Grammar { terminals, nonterminals, start, productions })
    }

    pub fn from_json(text: &str) -> Result<Self, GrammarError> {
        let doc: GrammarDoc = serde_json::from_str(text)?;
        Self::from_doc(&doc)
    }

    /// Names listed in `terminals` are terminals; every other name occurring
    /// as a left-hand side, in a right-hand side or as the start symbol is a
    /// nonterminal.
    pub fn from_doc(doc: &GrammarDoc) -> Result<Self, GrammarError> {
        let tindex: HashMap<&str, usize> = doc.terminals.iter().enumerate().map(|(i, t)| (t.as_str(), i)).collect();
        let mut b = GrammarBuilder::new(doc.terminals.clone());
        if tindex.contains_key(doc.start.as_str()) {
            return Err(GrammarError::Invalid(format!("start symbol {:?} is a terminal", doc.start)));
        }
        let start = b.nonterminal(&doc.start);
        for p in &doc.productions {
            if tindex.contains_key(p.lhs.as_str()) {
                return Err(GrammarError::Invalid(format!("terminal {:?} on a left-hand side", p.lhs)));
            }
            let lhs = b.nonterminal(&p.lhs);
            let rhs = p
                .rhs
                .iter()
                .map(|s| match tindex.get(s.as_str()) {
                    Some(&a) => Symbol::T(a),
                    None => Symbol::N(b.nonterminal(s)),
                })
                .collect();
            b.add(lhs, rhs);
        }
        b.finish(start)
    }

    pub fn to_doc(&self) -> GrammarDoc {
        GrammarDoc {
            start: self.nonterminals[self.start].clone(),
            terminals: self.terminals.clone(),
            productions: self
                .productions
                .iter()
                .map(|p| ProductionDoc {
                    lhs: self.nonterminals[p.lhs].clone(),
                    rhs: p.rhs.iter().map(|&s| self.symbol_name(s).to_string()).collect(),
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_doc()).expect("grammar documents serialize")
    }

    pub fn terminals(&self) -> &[String] {
        &self.terminals
    }
    pub fn nonterminals(&self) -> &[String] {
        &self.nonterminals
    }
    pub fn start(&self) -> usize {
        self.start
    }
    pub fn productions(&self) -> &[Production] {
        &self.productions
    }
    pub fn symbol_name(&self, s: Symbol) -> &str {
        match s {
            Symbol::T(a) => &self.terminals[a],
            Symbol::N(b) => &self.nonterminals[b],
        }
    }
    pub fn nonterminal(&self, name: &str) -> Option<usize> {
        self.nonterminals.iter().position(|n| n == name)
    }
    pub fn terminal(&self, name: &str) -> Option<usize> {
        self.terminals.iter().position(|n| n == name)
    }

    /// Same grammar with another start symbol.
    pub fn with_start(&self, start: usize) -> Grammar {
        assert!(start < self.nonterminals.len());
        Grammar { start, ..self.clone() }
    }

    /// Whether every production has the form `A -> a B1 .. Bl`.
    pub fn is_gnf(&self) -> bool {
        self.productions.iter().all(|p| p.gnf_parts().is_some())
    }

    /// Nonterminals deriving some terminal word (possibly empty).
    pub fn generating(&self) -> Vec<bool> {
        let mut gen = vec![false; self.nonterminals.len()];
        let mut changed = true;
        while changed {
            changed = false;
            for p in &self.productions {
                if !gen[p.lhs]
                    && p.rhs.iter().all(|s| match *s {
                        Symbol::T(_) => true,
                        Symbol::N(b) => gen[b],
                    })
                {
                    gen[p.lhs] = true;
                    changed = true;
                }
            }
        }
        gen
    }

    /// Nonterminals deriving the empty word.
    pub fn nullable(&self) -> Vec<bool> {
        let mut null = vec![false; self.nonterminals.len()];
        let mut changed = true;
        while changed {
            changed = false;
            for p in &self.productions {
                if !null[p.lhs] && p.rhs.iter().all(|s| matches!(*s, Symbol::N(b) if null[b])) {
                    null[p.lhs] = true;
                    changed = true;
                }
            }
        }
        null
    }

    /// Drops productions mentioning non-generating nonterminals, then
    /// everything unreachable from the start symbol, renumbering the
    /// remaining nonterminals in order of first appearance.
    pub fn trim(&self) -> Grammar {
        let gen = self.generating();
        let useful: Vec<&Production> = self
            .productions
            .iter()
            .filter(|p| gen[p.lhs] && p.rhs.iter().all(|s| !matches!(*s, Symbol::N(b) if !gen[b])))
            .collect();
        let mut by_lhs: Vec<Vec<&Production>> = vec![Vec::new(); self.nonterminals.len()];
        for p in &useful {
            by_lhs[p.lhs].push(p);
        }
        let mut reach = vec![false; self.nonterminals.len()];
        let mut stack = vec![self.start];
        reach[self.start] = true;
        while let Some(a) = stack.pop() {
            for p in &by_lhs[a] {
                for s in &p.rhs {
                    if let Symbol::N(b) = *s {
                        if !reach[b] {
                            reach[b] = true;
                            stack.push(b);
                        }
                    }
                }
            }
        }
        let mut b = GrammarBuilder::new(self.terminals.clone());
        let start = b.nonterminal(&self.nonterminals[self.start]);
        for p in useful.into_iter().filter(|p| reach[p.lhs]) {
            let lhs = b.nonterminal(&self.nonterminals[p.lhs]);
            let rhs = p
                .rhs
                .iter()
                .map(|&s| match s {
                    Symbol::N(x) => Symbol::N(b.nonterminal(&self.nonterminals[x])),
                    t => t,
                })
                .collect();
            b.add(lhs, rhs);
        }
        b.finish(start).expect("trimming keeps a grammar well-formed")
    }

    /// Reads a word over the terminals: whitespace-separated tokens, or the
    /// longest matching terminal names when there is no whitespace.
    pub fn parse_word(&self, text: &str) -> Result<Vec<usize>, GrammarError> {
        tokenize(text, &self.terminals).map_err(GrammarError::AlphabetMismatch)
    }

    pub fn show_word(&self, w: &[usize]) -> String {
        w.iter().map(|&a| self.terminals[a].as_str()).collect()
    }

    pub(crate) fn check_word(&self, w: &[usize]) -> Result<(), GrammarError> {
        match w.iter().find(|&&a| a >= self.terminals.len()) {
            Some(a) => Err(GrammarError::AlphabetMismatch(format!("letter index {a} is not a terminal"))),
            None => Ok(()),
        }
    }
}

impl fmt::Display for Grammar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "start {}", self.nonterminals[self.start])?;
        for p in &self.productions {
            write!(f, "{} ->", self.nonterminals[p.lhs])?;
            for &s in &p.rhs {
                write!(f, " {}", self.symbol_name(s))?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Splits `text` into symbols from `names`.
pub(crate) fn tokenize(text: &str, names: &[String]) -> Result<Vec<usize>, String> {
    let text = text.trim();
    let find = |t: &str| names.iter().position(|n| n == t).ok_or_else(|| format!("unknown symbol {t:?}"));
    if text.chars().any(char::is_whitespace) {
        return text.split_whitespace().map(find).collect();
    }
    let mut out = Vec::new();
    let mut rest = text;
    while !rest.is_empty() {
        let best = names
            .iter()
            .enumerate()
            .filter(|(_, n)| rest.starts_with(n.as_str()))
            .max_by_key(|(_, n)| n.len())
            .ok_or_else(|| format!("no symbol matches at {rest:?}"))?;
        out.push(best.0);
        rest = &rest[best.1.len()..];
    }
    Ok(out)
}

/// Incremental grammar construction with interned nonterminal names.
#[derive(Debug, Clone)]
pub struct GrammarBuilder {
    terminals: Vec<String>,
    nonterminals: Vec<String>,
    index: HashMap<String, usize>,
    productions: Vec<Production>,
    seen: HashSet<Production>,
}

impl GrammarBuilder {
    pub fn new(terminals: Vec<String>) -> Self {
        GrammarBuilder {
            terminals,
            nonterminals: Vec::new(),
            index: HashMap::new(),
            productions: Vec::new(),
            seen: HashSet::new(),
        }
    }

    pub fn nonterminal(&mut self, name: &str) -> usize {
        if let Some(&i) = self.index.get(name) {
            return i;
        }
        let i = self.nonterminals.len();
        self.nonterminals.push(name.to_string());
        self.index.insert(name.to_string(), i);
        i
    }

    /// Adds a production; exact duplicates are ignored.
    pub fn add(&mut self, lhs: usize, rhs: Vec<Symbol>) {
        let p = Production { lhs, rhs };
        if self.seen.insert(p.clone()) {
            self.productions.push(p);
        }
    }

    /// Copies every production of `g` with nonterminals renamed by `prefix`;
    /// returns the index of the copied start symbol.
    pub fn import(&mut self, g: &Grammar, prefix: &str) -> usize {
        assert_eq!(g.terminals, self.terminals, "imported grammar must share the alphabet");
        let map: Vec<usize> = g.nonterminals.iter().map(|n| self.nonterminal(&format!("{prefix}{n}"))).collect();
        for p in &g.productions {
            let rhs = p
                .rhs
                .iter()
                .map(|&s| match s {
                    Symbol::N(b) => Symbol::N(map[b]),
                    t => t,
                })
                .collect();
            self.add(map[p.lhs], rhs);
        }
        map[g.start]
    }

    pub fn productions_of(&self, lhs: usize) -> impl Iterator<Item = &Production> {
        self.productions.iter().filter(move |p| p.lhs == lhs)
    }

    pub fn finish(self, start: usize) -> Result<Grammar, GrammarError> {
        Grammar::new(self.terminals, self.nonterminals, start, self.productions)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductionDoc {
    pub lhs: String,
    pub rhs: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrammarDoc {
    pub start: String,
    pub terminals: Vec<String>,
    pub productions: Vec<ProductionDoc>,
}
