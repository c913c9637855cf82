//! Cut-free backward proof search for MALC, the star-free calculus.
//!
//! Search is exhaustive and memoized on sequents. Every rule lowers the
//! sequent complexity, so it terminates. Invertible rules are applied eagerly
//! and exclusively. After that the search is focused: it picks the
//! succedent or one antecedent formula and decomposes it as far as its
//! polarity allows, with variables treated as negative. Focusing is complete
//! for this calculus and prunes most of the search space on sequents built
//! from large meets. Choices are tried in a fixed order with splits
//! enumerated left to right, so returned proofs are reproducible.

use std::collections::HashMap;
use std::sync::Arc;

use thiserror::Error;

use crate::proof::{Proof, Rule, RuleViolation};
use crate::syntax::{Formula, Node, Sequent};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MalcError {
    #[error("MALC sequents may not mention the Kleene star: {0}")]
    StarNotAllowed(Sequent),
    #[error("inversion does not apply: {0}")]
    ShapeMismatch(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProveResult {
    Derivable(Arc<Proof>),
    Underivable { explored: usize },
}

impl ProveResult {
    pub fn is_derivable(&self) -> bool {
        matches!(self, ProveResult::Derivable(_))
    }

    pub fn proof(&self) -> Option<&Arc<Proof>> {
        match self {
            ProveResult::Derivable(p) => Some(p),
            ProveResult::Underivable { .. } => None,
        }
    }
}

/// Decides `s` with a fresh memo table.
pub fn prove(s: &Sequent) -> Result<ProveResult, MalcError> {
    Prover::new().prove(s)
}

pub fn derivable(s: &Sequent) -> Result<bool, MalcError> {
    Ok(prove(s)?.is_derivable())
}

/// Checks `p` against the MALC rule set (no cut, no star rules).
pub fn check_proof(p: &Proof) -> Result<(), RuleViolation> {
    p.check(false)
}

/// A prover whose memo table persists across calls on the same value, which
/// pays off when many related sequents are decided. Not shared between
/// threads; create one per worker.
#[derive(Debug, Default)]
pub struct Prover {
    memo: HashMap<Sequent, Option<Arc<Proof>>>,
    focus_memo: HashMap<Sequent, Option<Arc<Proof>>>,
}

impl Prover {
    pub fn new() -> Self {
        Prover::default()
    }

    pub fn explored(&self) -> usize {
        self.memo.len()
    }

    pub fn prove(&mut self, s: &Sequent) -> Result<ProveResult, MalcError> {
        if s.has_star() {
            return Err(MalcError::StarNotAllowed(s.clone()));
        }
        Ok(match self.search(s) {
            Some(p) => ProveResult::Derivable(p),
            None => ProveResult::Underivable { explored: self.memo.len() },
        })
    }

    fn search(&mut self, s: &Sequent) -> Option<Arc<Proof>> {
        if let Some(hit) = self.memo.get(s) {
            return hit.clone();
        }
        let found = self.search_uncached(s);
        self.memo.insert(s.clone(), found.clone());
        found
    }

    fn close(&mut self, rule: Rule, s: &Sequent, premises: &[Sequent]) -> Option<Arc<Proof>> {
        let mut proofs = Vec::with_capacity(premises.len());
        for p in premises {
            proofs.push(self.search(p)?);
        }
        Some(Proof::node(rule, s.clone(), proofs))
    }

    fn attempt(&mut self, rule: Rule, s: &Sequent) -> Option<Arc<Proof>> {
        let premises = rule.expected_premises(s).ok()?;
        self.close(rule, s, &premises)
    }

    fn search_uncached(&mut self, s: &Sequent) -> Option<Arc<Proof>> {
        let ante = &s.antecedent;
        let n = ante.len();

        // Axioms.
        if n == 1 && ante[0] == s.succedent {
            return Some(Proof::leaf(Rule::Ax, s.clone()));
        }
        if let Some(pos) = ante.iter().position(|f| matches!(f.node(), Node::Zero)) {
            return Some(Proof::leaf(Rule::ZeroL { pos }, s.clone()));
        }
        if n == 0 && matches!(s.succedent.node(), Node::One) {
            return Some(Proof::leaf(Rule::OneR, s.clone()));
        }

        // Invertible rules: the first one that applies decides the sequent.
        for (pos, f) in ante.iter().enumerate() {
            match f.node() {
                Node::Product(..) => return self.attempt(Rule::ProdL { pos }, s),
                Node::One => return self.attempt(Rule::OneL { pos }, s),
                Node::Join(..) => return self.attempt(Rule::JoinL { pos }, s),
                _ => {}
            }
        }
        match s.succedent.node() {
            Node::LeftResidual(..) => return self.attempt(Rule::LdivR, s),
            Node::RightResidual(..) => return self.attempt(Rule::RdivR, s),
            Node::Meet(..) => return self.attempt(Rule::MeetR, s),
            _ => {}
        }

        // Focusing phase: every antecedent formula is now negative (a
        // variable, residual or meet) and the succedent is positive or a
        // variable. Try right focus, then left focus on each position.
        if let Some(p) = self.right_focus(ante, &s.succedent) {
            return Some(p);
        }
        for pos in 0..n {
            if let Some(p) = self.left_focus(&ante[..pos], &ante[pos], &ante[pos + 1..], &s.succedent)
            {
                return Some(p);
            }
        }
        None
    }

    /// Proves `ante |- goal` by decomposing the succedent while it stays
    /// positive.
    fn right_focus(&mut self, ante: &[Formula], goal: &Formula) -> Option<Arc<Proof>> {
        let key = Sequent::new(ante.to_vec(), goal.clone());
        if let Some(hit) = self.focus_memo.get(&key) {
            return hit.clone();
        }
        let found = self.right_focus_uncached(&key);
        self.focus_memo.insert(key, found.clone());
        found
    }

    fn right_focus_uncached(&mut self, s: &Sequent) -> Option<Arc<Proof>> {
        let ante = &s.antecedent;
        match s.succedent.node() {
            Node::One if ante.is_empty() => Some(Proof::leaf(Rule::OneR, s.clone())),
            Node::Join(a, b) => {
                for (rule, part) in [(Rule::JoinR1, a), (Rule::JoinR2, b)] {
                    if let Some(p) = self.focus_or_blur(ante, part) {
                        return Some(Proof::node(rule, s.clone(), vec![p]));
                    }
                }
                None
            }
            Node::Product(a, b) => {
                for split in 0..=ante.len() {
                    let Some(right) = self.focus_or_blur(&ante[split..], b) else { continue };
                    let Some(left) = self.focus_or_blur(&ante[..split], a) else { continue };
                    return Some(Proof::node(Rule::ProdR { split }, s.clone(), vec![left, right]));
                }
                None
            }
            _ => None,
        }
    }

    /// Continues right focus on positive formulas, otherwise falls back to
    /// unfocused search.
    fn focus_or_blur(&mut self, ante: &[Formula], goal: &Formula) -> Option<Arc<Proof>> {
        match goal.node() {
            Node::One | Node::Join(..) | Node::Product(..) => self.right_focus(ante, goal),
            _ => self.search(&Sequent::new(ante.to_vec(), goal.clone())),
        }
    }

    /// Proves `left, f, right |- goal` by decomposing `f`, keeping the focus
    /// on the part that replaces it in the major premise.
    fn left_focus(
        &mut self,
        left: &[Formula],
        f: &Formula,
        right: &[Formula],
        goal: &Formula,
    ) -> Option<Arc<Proof>> {
        let pos = left.len();
        let concl = || {
            let mut v = left.to_vec();
            v.push(f.clone());
            v.extend_from_slice(right);
            Sequent::new(v, goal.clone())
        };
        match f.node() {
            Node::Var(_) => {
                (left.is_empty() && right.is_empty() && f == goal)
                    .then(|| Proof::leaf(Rule::Ax, concl()))
            }
            Node::Meet(a, b) => {
                for (rule, part) in [(Rule::MeetL1 { pos }, a), (Rule::MeetL2 { pos }, b)] {
                    if let Some(p) = self.left_focus(left, part, right, goal) {
                        return Some(Proof::node(rule, concl(), vec![p]));
                    }
                }
                None
            }
            Node::LeftResidual(a, b) => {
                for start in 0..=pos {
                    let Some(major) = self.left_focus(&left[..start], b, right, goal) else {
                        continue;
                    };
                    let Some(minor) = self.focus_or_blur(&left[start..], a) else { continue };
                    return Some(Proof::node(Rule::LdivL { pos, start }, concl(), vec![minor, major]));
                }
                None
            }
            Node::RightResidual(b, a) => {
                for end in pos + 1..=pos + 1 + right.len() {
                    let (pi, rest) = right.split_at(end - pos - 1);
                    let Some(major) = self.left_focus(left, b, rest, goal) else { continue };
                    let Some(minor) = self.focus_or_blur(pi, a) else { continue };
                    return Some(Proof::node(Rule::RdivL { pos, end }, concl(), vec![minor, major]));
                }
                None
            }
            // Positive formulas end the focus; the invertible phase takes over.
            _ => self.search(&concl()),
        }
    }
}

/// Inversions of the invertible rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Inversion {
    /// From `G |- a\b` to `a, G |- b`.
    LdivR,
    /// From `G |- b/a` to `G, a |- b`.
    RdivR,
    /// From `G, a.b, D |- c` to `G, a, b, D |- c`.
    ProdL { pos: usize },
    /// From `G |- a1&a2` to `G |- ai` (`which` is 1 or 2).
    MeetR { which: u8 },
    /// From `G, a1|a2, D |- c` to `G, ai, D |- c` (`which` is 1 or 2).
    JoinL { pos: usize, which: u8 },
}

/// Premises of the inverted rule. Derivability of `s` implies derivability
/// of each returned sequent.
pub fn invert(inv: Inversion, s: &Sequent) -> Result<Vec<Sequent>, MalcError> {
    let mismatch = |m: String| MalcError::ShapeMismatch(m);
    let pick = |mut v: Vec<Sequent>, which: u8| -> Result<Vec<Sequent>, MalcError> {
        match which {
            1 | 2 => Ok(vec![v.swap_remove(which as usize - 1)]),
            _ => Err(mismatch(format!("component index {which} must be 1 or 2"))),
        }
    };
    match inv {
        Inversion::LdivR => Rule::LdivR.expected_premises(s).map_err(mismatch),
        Inversion::RdivR => Rule::RdivR.expected_premises(s).map_err(mismatch),
        Inversion::ProdL { pos } => Rule::ProdL { pos }.expected_premises(s).map_err(mismatch),
        Inversion::MeetR { which } => pick(Rule::MeetR.expected_premises(s).map_err(mismatch)?, which),
        Inversion::JoinL { pos, which } => {
            pick(Rule::JoinL { pos }.expected_premises(s).map_err(mismatch)?, which)
        }
    }
}

/// True if every formula in `p` is a subformula of its root sequent.
pub fn has_subformula_property(p: &Proof) -> bool {
    let mut allowed = std::collections::HashSet::new();
    for f in p.conclusion.formulas() {
        allowed.extend(f.subformulas());
    }
    !p.any_formula(&|f: &Formula| !allowed.contains(f))
}
