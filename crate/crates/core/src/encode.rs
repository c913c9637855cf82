//! Grammars as Lambek formulas.
//!
//! Every nonterminal becomes a variable. A production `A -> a B1 .. Bl`
//! becomes the formula `A/(B1. .. .Bl)` (just `A` when `l = 0`) attached to
//! the letter `a`; the letter's formula `phi_a` is the meet of these, and
//! `psi` is the join of all letter formulas. A word `a1..an` is generated
//! from `A` exactly when `phi_a1, .., phi_an |- A` is derivable.
//!
//! Two variants avoid one of the lattice connectives by means of the
//! pseudo-negation `f^b = f\b` for a fresh variable `b`:
//!
//! * `psi_vee`: `phi'_a = (xi1^b | .. | xik^b)^b`, `psi' = phi'_a1 | ..`
//!   (no meets),
//! * `psi_wedge`: `(phi_a1^b & .. & phi_am^b)^b` (no joins).
//!
//! [`Derivations`] builds the proofs behind the first claim directly from
//! derivation trees instead of searching for them.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::build::{self, P};
use crate::grammar::Grammar;
use crate::syntax::{big_join, big_meet, big_product, Formula, Sequent};

pub const DEFAULT_NEGVAR: &str = "b0";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EncodeError {
    #[error("grammar is not in Greibach normal form")]
    NotGnf,
    #[error("no production starts with the letter {0:?}")]
    NoProductions(String),
    #[error("unknown letter {0:?}")]
    UnknownLetter(String),
    #[error("the negation variable {0:?} already occurs in the encoding")]
    NegVarOccurs(String),
    #[error("{0:?} is not a valid variable name")]
    BadVariable(String),
}

/// Which target sequent to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kind {
    /// `psi.psi^* |- S`
    Full,
    /// `psi'.psi'^* |- (S\b)\b` with the meet-free `psi'`.
    Vee,
    /// `psi'.psi'^* |- (S\b)\b` with the join-free `psi'`.
    Wedge,
}

impl Kind {
    pub const ALL: [Kind; 3] = [Kind::Full, Kind::Vee, Kind::Wedge];

    pub fn name(self) -> &'static str {
        match self {
            Kind::Full => "full",
            Kind::Vee => "vee",
            Kind::Wedge => "wedge",
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Kind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Kind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown kind {s:?} (expected full, vee or wedge)"))
    }
}

fn is_identifier(s: &str) -> bool {
    let mut cs = s.chars();
    matches!(cs.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && cs.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

/// Variable names for the nonterminals of `g`, one per nonterminal and
/// pairwise distinct. Names that are already identifiers are kept; other
/// characters are spelled out as `_xHH` codes.
pub fn variable_names(g: &Grammar) -> Vec<String> {
    let mut used = HashSet::new();
    let mut out = Vec::with_capacity(g.nonterminals().len());
    // identifiers first, so that they keep their names
    let mut pending = Vec::new();
    for (i, name) in g.nonterminals().iter().enumerate() {
        if is_identifier(name) && used.insert(name.clone()) {
            out.push(Some(name.clone()));
        } else {
            out.push(None);
            pending.push(i);
        }
    }
    for i in pending {
        let mut s = String::new();
        for (k, c) in g.nonterminals()[i].chars().enumerate() {
            if c.is_ascii_alphanumeric() && !(k == 0 && c.is_ascii_digit()) || c == '_' {
                s.push(c);
            } else {
                s.push_str(&format!("_x{:02X}", c as u32));
            }
        }
        if s.is_empty() {
            s.push('_');
        }
        while !used.insert(s.clone()) {
            s.push('\'');
        }
        out[i] = Some(s);
    }
    out.into_iter().map(Option::unwrap).collect()
}

/// `f\b`.
pub fn pneg(f: &Formula, b: &str) -> Result<Formula, EncodeError> {
    if !is_identifier(b) {
        return Err(EncodeError::BadVariable(b.to_string()));
    }
    if f.mentions_var(b) {
        return Err(EncodeError::NegVarOccurs(b.to_string()));
    }
    Ok(Formula::ldiv(f.clone(), Formula::var(b)))
}

/// `(f\b)\b`.
pub fn pdneg(f: &Formula, b: &str) -> Result<Formula, EncodeError> {
    let once = pneg(f, b)?;
    Ok(Formula::ldiv(once, Formula::var(b)))
}

/// `(f\b)\b` without the freshness check.
fn dn(f: &Formula, b: &Formula) -> Formula {
    Formula::ldiv(Formula::ldiv(f.clone(), b.clone()), b.clone())
}

/// The letter formulas of one grammar, computed once.
#[derive(Debug, Clone)]
pub struct Encoding {
    grammar: Grammar,
    vars: Vec<Formula>,
    /// `xi[a]`: formulas of the productions with leading letter `a`.
    xi: Vec<Vec<Formula>>,
    /// Production index to `(letter, position in xi[letter])`.
    slots: Vec<(usize, usize)>,
    phi: Vec<Formula>,
    psi: Formula,
}

impl Encoding {
    /// Fails unless `g` is in Greibach form and every letter starts some
    /// production.
    pub fn new(g: &Grammar) -> Result<Self, EncodeError> {
        let (vars, xi, slots) = letter_formulas(g)?;
        let mut phi = Vec::with_capacity(xi.len());
        for (a, fs) in xi.iter().enumerate() {
            phi.push(big_meet(fs).map_err(|_| EncodeError::NoProductions(g.terminals()[a].clone()))?);
        }
        let psi = big_join(&phi).map_err(|_| EncodeError::NoProductions(String::new()))?;
        Ok(Encoding { grammar: g.clone(), vars, xi, slots, phi, psi })
    }

    pub fn grammar(&self) -> &Grammar {
        &self.grammar
    }

    /// The variable of nonterminal `a`.
    pub fn var(&self, a: usize) -> &Formula {
        &self.vars[a]
    }

    pub fn start_var(&self) -> &Formula {
        &self.vars[self.grammar.start()]
    }

    pub fn letters(&self) -> usize {
        self.xi.len()
    }

    pub fn xi(&self, a: usize) -> &[Formula] {
        &self.xi[a]
    }

    pub fn phi(&self, a: usize) -> &Formula {
        &self.phi[a]
    }

    pub fn psi(&self) -> &Formula {
        &self.psi
    }

    /// `(letter, index into xi(letter))` of production `p`.
    pub fn slot(&self, p: usize) -> (usize, usize) {
        self.slots[p]
    }

    /// Index of `f` in `xi(a)`.
    pub fn xi_index(&self, a: usize, f: &Formula) -> Option<usize> {
        self.xi[a].iter().position(|x| x == f)
    }

    pub fn phi_word(&self, w: &[usize]) -> Vec<Formula> {
        w.iter().map(|&a| self.phi[a].clone()).collect()
    }

    /// True if `b` names a variable of this encoding.
    pub fn mentions(&self, b: &str) -> bool {
        self.vars.iter().any(|v| v.as_var() == Some(b))
    }

    /// `preferred` if it is fresh, otherwise the first fresh name obtained
    /// by counting up its numeric suffix.
    pub fn fresh_negvar(&self, preferred: &str) -> String {
        if !self.mentions(preferred) && is_identifier(preferred) {
            return preferred.to_string();
        }
        let stem = preferred.trim_end_matches(|c: char| c.is_ascii_digit());
        let stem = if is_identifier(stem) { stem } else { "b" };
        (0..).map(|i| format!("{stem}{i}")).find(|n| !self.mentions(n)).expect("unbounded")
    }

    fn check_negvar(&self, b: &str) -> Result<Formula, EncodeError> {
        if !is_identifier(b) {
            return Err(EncodeError::BadVariable(b.to_string()));
        }
        if self.mentions(b) {
            return Err(EncodeError::NegVarOccurs(b.to_string()));
        }
        Ok(Formula::var(b))
    }

    /// `(xi1\b | .. | xik\b)\b`
    pub fn phi_vee(&self, a: usize, b: &str) -> Result<Formula, EncodeError> {
        let bv = self.check_negvar(b)?;
        Ok(Formula::ldiv(self.vee_inner(a, &bv), bv))
    }

    fn vee_inner(&self, a: usize, b: &Formula) -> Formula {
        let negs: Vec<Formula> = self.xi[a].iter().map(|x| Formula::ldiv(x.clone(), b.clone())).collect();
        big_join(&negs).expect("nonempty by construction")
    }

    pub fn psi_vee(&self, b: &str) -> Result<Formula, EncodeError> {
        let parts = (0..self.letters()).map(|a| self.phi_vee(a, b)).collect::<Result<Vec<_>, _>>()?;
        Ok(big_join(&parts).expect("nonempty alphabet"))
    }

    /// `phi_a1\b & .. & phi_am\b`, the formula under the outer negation of
    /// [`Encoding::psi_wedge`].
    fn wedge_inner(&self, b: &Formula) -> Formula {
        let negs: Vec<Formula> = self.phi.iter().map(|f| Formula::ldiv(f.clone(), b.clone())).collect();
        big_meet(&negs).expect("nonempty alphabet")
    }

    pub fn psi_wedge(&self, b: &str) -> Result<Formula, EncodeError> {
        let bv = self.check_negvar(b)?;
        Ok(Formula::ldiv(self.wedge_inner(&bv), bv))
    }

    /// The letter formula of `kind` and its succedent transform:
    /// `(psi, S)`, or the negated variants with `(S\b)\b`.
    pub fn psi_of(&self, kind: Kind, b: &str) -> Result<Formula, EncodeError> {
        match kind {
            Kind::Full => Ok(self.psi.clone()),
            Kind::Vee => self.psi_vee(b),
            Kind::Wedge => self.psi_wedge(b),
        }
    }

    /// `f` for the full kind, `(f\b)\b` otherwise.
    pub fn goal_of(&self, kind: Kind, f: &Formula, b: &str) -> Result<Formula, EncodeError> {
        match kind {
            Kind::Full => Ok(f.clone()),
            _ => Ok(dn(f, &self.check_negvar(b)?)),
        }
    }

    /// `psi+ |- S` in the chosen variant.
    pub fn target_sequent(&self, kind: Kind, b: &str) -> Result<Sequent, EncodeError> {
        let psi = self.psi_of(kind, b)?;
        let goal = self.goal_of(kind, self.start_var(), b)?;
        Ok(Sequent::new(vec![Formula::plus(psi)], goal))
    }

    /// `psi, .., psi |- S` with `n` copies.
    pub fn power_sequent(&self, n: usize) -> Sequent {
        Sequent::new(vec![self.psi.clone(); n], self.start_var().clone())
    }
}

type LetterFormulas = (Vec<Formula>, Vec<Vec<Formula>>, Vec<(usize, usize)>);

fn letter_formulas(g: &Grammar) -> Result<LetterFormulas, EncodeError> {
    if !g.is_gnf() {
        return Err(EncodeError::NotGnf);
    }
    let vars: Vec<Formula> = variable_names(g).iter().map(|n| Formula::var(n)).collect();
    let mut xi = vec![Vec::new(); g.terminals().len()];
    let mut slots = Vec::with_capacity(g.productions().len());
    for p in g.productions() {
        let (a, tail) = p.gnf_parts().ok_or(EncodeError::NotGnf)?;
        let head = vars[p.lhs].clone();
        let tail: Vec<Formula> = tail.iter().map(|&b| vars[b].clone()).collect();
        let f = match big_product(&tail) {
            None => head,
            Some(prod) => Formula::rdiv(head, prod),
        };
        slots.push((a, xi[a].len()));
        xi[a].push(f);
    }
    Ok((vars, xi, slots))
}

fn letter_index(g: &Grammar, a: &str) -> Result<usize, EncodeError> {
    g.terminal(a).ok_or_else(|| EncodeError::UnknownLetter(a.to_string()))
}

/// Formulas of the productions whose leading letter is `a`, in production
/// order.
pub fn xi(g: &Grammar, a: &str) -> Result<Vec<Formula>, EncodeError> {
    let a = letter_index(g, a)?;
    let (_, mut xi, _) = letter_formulas(g)?;
    let out = std::mem::take(&mut xi[a]);
    if out.is_empty() {
        return Err(EncodeError::NoProductions(g.terminals()[a].clone()));
    }
    Ok(out)
}

/// Meet of [`xi`].
pub fn phi(g: &Grammar, a: &str) -> Result<Formula, EncodeError> {
    Ok(big_meet(&xi(g, a)?).expect("xi is nonempty"))
}

/// Join of the letter formulas, in alphabet order.
pub fn psi(g: &Grammar) -> Result<Formula, EncodeError> {
    Ok(Encoding::new(g)?.psi)
}

pub fn psi_vee(g: &Grammar, b: &str) -> Result<Formula, EncodeError> {
    Encoding::new(g)?.psi_vee(b)
}

pub fn psi_wedge(g: &Grammar, b: &str) -> Result<Formula, EncodeError> {
    Encoding::new(g)?.psi_wedge(b)
}

/// The target sequent of `kind`. Without `b` the default negation variable
/// is used, renamed if it clashes with a nonterminal; an explicit `b` must
/// be fresh.
pub fn target_sequent(g: &Grammar, kind: Kind, b: Option<&str>) -> Result<Sequent, EncodeError> {
    let enc = Encoding::new(g)?;
    let b = match b {
        Some(b) => b.to_string(),
        None => enc.fresh_negvar(DEFAULT_NEGVAR),
    };
    enc.target_sequent(kind, &b)
}

/// Proofs of `phi_a1, .., phi_an |- A` (and of the same with the single
/// production formulas) built from derivation trees.
///
/// Trees and proofs are memoized on `(A, word)`, so proofs for many words
/// share their common parts.
pub struct Derivations<'e> {
    enc: &'e Encoding,
    by_lhs: Vec<Vec<usize>>,
    /// `(A, w)` to the production used at the root and the lengths of the
    /// subwords of its trailing nonterminals.
    trees: HashMap<(usize, Vec<usize>), Option<(usize, Vec<usize>)>>,
    xi_proofs: HashMap<(usize, Vec<usize>), P>,
    phi_proofs: HashMap<(usize, Vec<usize>), P>,
    projections: HashMap<(usize, usize), P>,
}

impl<'e> Derivations<'e> {
    pub fn new(enc: &'e Encoding) -> Self {
        let g = enc.grammar();
        let mut by_lhs = vec![Vec::new(); g.nonterminals().len()];
        for (i, p) in g.productions().iter().enumerate() {
            by_lhs[p.lhs].push(i);
        }
        Derivations {
            enc,
            by_lhs,
            trees: HashMap::new(),
            xi_proofs: HashMap::new(),
            phi_proofs: HashMap::new(),
            projections: HashMap::new(),
        }
    }

    pub fn encoding(&self) -> &'e Encoding {
        self.enc
    }

    /// First derivation of `w` from `a`, trying productions in order and
    /// splits from the left.
    fn tree(&mut self, a: usize, w: &[usize]) -> Option<(usize, Vec<usize>)> {
        let key = (a, w.to_vec());
        if let Some(hit) = self.trees.get(&key) {
            return hit.clone();
        }
        let mut found = None;
        if let Some((&first, rest)) = w.split_first() {
            for i in 0..self.by_lhs[a].len() {
                let p = self.by_lhs[a][i];
                let (letter, tail) = self.enc.grammar().productions()[p].gnf_parts().expect("GNF");
                if letter != first || tail.len() > rest.len() || (tail.is_empty() && !rest.is_empty()) {
                    continue;
                }
                if let Some(lens) = self.split(&tail, rest) {
                    found = Some((p, lens));
                    break;
                }
            }
        }
        self.trees.insert(key, found.clone());
        found
    }

    fn split(&mut self, bs: &[usize], w: &[usize]) -> Option<Vec<usize>> {
        match bs {
            [] => w.is_empty().then(Vec::new),
            [b] => self.tree(*b, w).map(|_| vec![w.len()]),
            [b, more @ ..] => {
                for len in 1..=w.len() - more.len() {
                    if self.tree(*b, &w[..len]).is_none() {
                        continue;
                    }
                    if let Some(mut rest) = self.split(more, &w[len..]) {
                        rest.insert(0, len);
                        return Some(rest);
                    }
                }
                None
            }
        }
    }

    pub fn generates(&mut self, a: usize, w: &[usize]) -> bool {
        self.tree(a, w).is_some()
    }

    fn children(&mut self, a: usize, w: &[usize]) -> Option<(usize, Vec<(usize, Vec<usize>)>)> {
        let (p, lens) = self.tree(a, w)?;
        let (_, tail) = self.enc.grammar().productions()[p].gnf_parts().expect("GNF");
        let mut at = 1;
        let mut out = Vec::with_capacity(tail.len());
        for (b, len) in tail.into_iter().zip(lens) {
            out.push((b, w[at..at + len].to_vec()));
            at += len;
        }
        Some((p, out))
    }

    /// `G |- B1. .. .Bl` from proofs of `Gi |- Bi`.
    fn product_of(parts: Vec<P>) -> P {
        let mut it = parts.into_iter();
        let first = it.next().expect("nonempty");
        it.fold(first, build::prod_r)
    }

    /// Proof of `xi1, .., xin |- A`, where `xii` are the production formulas
    /// along the first derivation of `w` from `a`.
    pub fn xi_proof(&mut self, a: usize, w: &[usize]) -> Option<P> {
        let key = (a, w.to_vec());
        if let Some(p) = self.xi_proofs.get(&key) {
            return Some(p.clone());
        }
        let (_, kids) = self.children(a, w)?;
        let head = build::ax(self.enc.var(a));
        let proof = if kids.is_empty() {
            head
        } else {
            let parts = kids.iter().map(|(b, u)| self.xi_proof(*b, u)).collect::<Option<Vec<_>>>()?;
            build::rdiv_l(Self::product_of(parts), head, 0)
        };
        self.xi_proofs.insert(key, proof.clone());
        Some(proof)
    }

    /// `phi_a |- xi`, where `xi` is entry `j` of `xi(a)`.
    pub fn projection(&mut self, a: usize, j: usize) -> P {
        if let Some(p) = self.projections.get(&(a, j)) {
            return p.clone();
        }
        let xs = self.enc.xi(a);
        let mut p = build::ax(&xs[j]);
        if j + 1 < xs.len() {
            let rest = big_meet(&xs[j + 1..]).expect("nonempty");
            p = build::meet_l1(p, 0, &rest);
        }
        for x in xs[..j].iter().rev() {
            p = build::meet_l2(p, 0, x);
        }
        debug_assert_eq!(&p.conclusion.antecedent[0], self.enc.phi(a));
        self.projections.insert((a, j), p.clone());
        p
    }

    /// `phi_a |- xi` for the production formula `xi` of letter `a`.
    pub fn project(&mut self, a: usize, xi: &Formula) -> Option<P> {
        let j = self.enc.xi_index(a, xi)?;
        Some(self.projection(a, j))
    }

    /// Proof of `phi_a1, .., phi_an |- A` for `w = a1..an`, or `None` if `a`
    /// does not generate `w`. Uses cut against the projections
    /// `phi_a |- xi`; no joins occur.
    pub fn phi_proof(&mut self, a: usize, w: &[usize]) -> Option<P> {
        let key = (a, w.to_vec());
        if let Some(p) = self.phi_proofs.get(&key) {
            return Some(p.clone());
        }
        let (prod, kids) = self.children(a, w)?;
        let head = build::ax(self.enc.var(a));
        let inner = if kids.is_empty() {
            head
        } else {
            let parts = kids.iter().map(|(b, u)| self.phi_proof(*b, u)).collect::<Option<Vec<_>>>()?;
            build::rdiv_l(Self::product_of(parts), head, 0)
        };
        let (letter, j) = self.enc.slot(prod);
        let proof = build::cut(self.projection(letter, j), inner, 0);
        self.phi_proofs.insert(key, proof.clone());
        Some(proof)
    }
}
