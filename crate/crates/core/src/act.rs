//! Full action logic: MALC plus cut and the Kleene-star rules.
//!
//! Provability is undecidable, so this module only checks proofs and builds
//! proofs of a few derived rules for Kleene plus (`p+ = p.p^*`).

use std::ops::Deref;
use std::sync::Arc;

use thiserror::Error;

use crate::build::{self, P};
use crate::proof::{Proof, RuleViolation};
use crate::syntax::{Formula, Sequent};

/// A proof that passed the ACT checker.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActProof(Arc<Proof>);

impl ActProof {
    /// Checks `p` and wraps it.
    pub fn new(p: Arc<Proof>) -> Result<Self, RuleViolation> {
        check_act_proof(&p)?;
        Ok(ActProof(p))
    }

    pub fn proof(&self) -> &Arc<Proof> {
        &self.0
    }

    pub fn into_inner(self) -> Arc<Proof> {
        self.0
    }
}

impl Deref for ActProof {
    type Target = Proof;
    fn deref(&self) -> &Proof {
        &self.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ActError {
    #[error("premise {index}: expected `{expected}`, found `{found}`")]
    ConclusionMismatch { index: usize, expected: Sequent, found: Sequent },
    #[error("expected {expected} premises, found {found}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("input mentions a join, which this construction must avoid")]
    JoinPresent,
    #[error(transparent)]
    Invalid(#[from] RuleViolation),
}

pub fn check_act_proof(p: &Proof) -> Result<(), RuleViolation> {
    p.check(true)
}

/// Re-tags a MALC proof as an ACT proof. MALC rules are ACT rules, so this
/// only verifies the input.
pub fn embed_malc(p: &Arc<Proof>) -> Result<ActProof, RuleViolation> {
    crate::malc::check_proof(p)?;
    Ok(ActProof(p.clone()))
}

fn copies(psi: &Formula, k: usize) -> Vec<Formula> {
    vec![psi.clone(); k]
}

fn expect(index: usize, p: &Proof, expected: &Sequent) -> Result<(), ActError> {
    if p.conclusion == *expected {
        Ok(())
    } else {
        Err(ActError::ConclusionMismatch {
            index,
            expected: expected.clone(),
            found: p.conclusion.clone(),
        })
    }
}

/// Accepts a premise whose antecedent is either `k` copies of `psi` followed
/// by `tail`, or the left-nested product `psi^k` followed by `tail`, and
/// returns a proof of the copies form.
fn normalize_power(
    index: usize,
    p: &ActProof,
    psi: &Formula,
    k: usize,
    tail: &[Formula],
    gamma: &Formula,
) -> Result<P, ActError> {
    let mut want = copies(psi, k);
    want.extend_from_slice(tail);
    let want = Sequent::new(want, gamma.clone());
    if p.conclusion == want || k <= 1 {
        expect(index, p, &want)?;
        return Ok(p.0.clone());
    }
    let power = build::product_intro(&copies(psi, k)).conclusion.succedent.clone();
    let mut alt = vec![power];
    alt.extend_from_slice(tail);
    expect(index, p, &Sequent::new(alt, gamma.clone()))
        .map_err(|_| ActError::ConclusionMismatch {
            index,
            expected: want.clone(),
            found: p.conclusion.clone(),
        })?;
    Ok(build::unfold_product(p.0.clone(), 0, &copies(psi, k)))
}

fn finish(p: P) -> ActProof {
    debug_assert!(check_act_proof(&p).is_ok(), "synthesized proof fails the checker");
    ActProof(p)
}

/// `(+|-)_fp`: from `psi |- gamma` and `psi, gamma |- gamma` derive
/// `psi.psi^* |- gamma`.
pub fn synth_plus_fp(
    psi: &Formula,
    gamma: &Formula,
    p1: &ActProof,
    p2: &ActProof,
) -> Result<ActProof, ActError> {
    expect(0, p1, &Sequent::new(vec![psi.clone()], gamma.clone()))?;
    expect(1, p2, &Sequent::new(vec![psi.clone(), gamma.clone()], gamma.clone()))?;
    Ok(finish(plus_fp(psi, gamma, p1.0.clone(), p2.0.clone())))
}

fn plus_fp(psi: &Formula, gamma: &Formula, p1: P, p2: P) -> P {
    // |- psi\gamma
    let base = build::ldiv_r(p1);
    // psi, psi\gamma |- psi\gamma, from psi, psi, psi\gamma |- gamma
    let step = build::ldiv_r(build::ldiv_l(build::ax(psi), p2, 1));
    let star = build::star_l_fp(base, step);
    let apply = build::ldiv_l(build::ax(psi), build::ax(gamma), 0);
    build::prod_l(build::cut(star, apply, 1), 0)
}

/// `psi.psi^* |- psi | (psi.psi^+)`, the unfolding used by the long rule.
pub fn plus_unfold(psi: &Formula) -> ActProof {
    finish(plus_unfold_proof(psi))
}

fn plus_unfold_proof(psi: &Formula) -> P {
    let plus = Formula::plus(psi.clone());
    let star = Formula::star(psi.clone());
    let pp = Formula::product(psi.clone(), plus.clone());
    let delta = Formula::join(psi.clone(), pp.clone());
    // psi |- psi+
    let psi_plus = build::prod_r(build::ax(psi), build::star_r_0(psi));
    // psi+ |- psi^*, then psi.psi+ |- psi+
    let tail = build::prod_l(build::star_r_fp(build::ax(psi), build::ax(&star)), 0);
    let pp_plus = build::prod_l(build::prod_r(build::ax(psi), tail), 0);
    let delta_plus = build::join_l(psi_plus, pp_plus, 0);
    let p1 = build::join_r1(build::ax(psi), &pp);
    let p2 = build::join_r2(build::prod_r(build::ax(psi), delta_plus), psi);
    plus_fp(psi, &delta, p1, p2)
}

/// The long rule: from `psi^k |- gamma` for `k = 1..n` and
/// `psi^n, psi+ |- gamma`, derive `psi+ |- gamma`.
///
/// `prem[k-1]` proves `psi^k |- gamma` and `prem[n]` the last premise.
/// `psi^k` may be written as `k` antecedent copies of `psi` or as one
/// left-nested product.
pub fn synth_long_rule(
    psi: &Formula,
    gamma: &Formula,
    n: usize,
    prem: &[ActProof],
) -> Result<ActProof, ActError> {
    long_rule(psi, gamma, n, prem, false)
}

/// The long rule built without joins, for the join-free fragment.
pub fn synth_long_rule_meet(
    psi: &Formula,
    gamma: &Formula,
    n: usize,
    prem: &[ActProof],
) -> Result<ActProof, ActError> {
    if psi.has_join() || gamma.has_join() || prem.iter().any(|p| p.mentions_join()) {
        return Err(ActError::JoinPresent);
    }
    long_rule(psi, gamma, n, prem, true)
}

fn long_rule(
    psi: &Formula,
    gamma: &Formula,
    n: usize,
    prem: &[ActProof],
    meet_only: bool,
) -> Result<ActProof, ActError> {
    if prem.len() != n + 1 {
        return Err(ActError::ArityMismatch { expected: n + 1, found: prem.len() });
    }
    let plus = Formula::plus(psi.clone());
    let mut powers = Vec::with_capacity(n);
    for (i, p) in prem[..n].iter().enumerate() {
        powers.push(normalize_power(i, p, psi, i + 1, &[], gamma)?);
    }
    let last = normalize_power(n, &prem[n], psi, n, &[plus], gamma)?;
    Ok(finish(LongRule::new(psi, gamma, meet_only).run(powers, last)))
}

/// Shared state for one long-rule construction.
pub(crate) struct LongRule {
    psi: Formula,
    gamma: Formula,
    plus: Formula,
    meet_only: bool,
    /// `psi+ |- psi | psi.psi+`, or `M |- gamma/psi+` in the meet variant.
    lemma: Option<P>,
}

impl LongRule {
    pub(crate) fn new(psi: &Formula, gamma: &Formula, meet_only: bool) -> Self {
        LongRule {
            psi: psi.clone(),
            gamma: gamma.clone(),
            plus: Formula::plus(psi.clone()),
            meet_only,
            lemma: None,
        }
    }

    /// `powers[k-1]` proves `psi^k |- gamma` (copies), `last` proves
    /// `psi^n, psi+ |- gamma`.
    pub(crate) fn run(mut self, powers: Vec<P>, mut last: P) -> P {
        for k in (1..=powers.len()).rev() {
            last = self.lower(k, powers[k - 1].clone(), last);
        }
        last
    }

    /// From `psi^k |- gamma` and `psi^k, psi+ |- gamma` derive
    /// `psi^{k-1}, psi+ |- gamma`.
    fn lower(&mut self, k: usize, power: P, last: P) -> P {
        if self.meet_only {
            self.lower_meet(k, power, last)
        } else {
            self.lower_join(k, power, last)
        }
    }

    fn lower_join(&mut self, k: usize, power: P, last: P) -> P {
        let unfold = self.lemma.get_or_insert_with(|| plus_unfold_proof(&self.psi)).clone();
        let split = build::join_l(power, build::prod_l(last, k - 1), k - 1);
        build::cut(unfold, split, k - 1)
    }

    fn lower_meet(&mut self, k: usize, power: P, last: P) -> P {
        let lemma = match &self.lemma {
            Some(l) => l.clone(),
            None => {
                let l = self.meet_lemma();
                self.lemma = Some(l.clone());
                l
            }
        };
        // psi^{k-1} |- M
        let m = build::meet_r(build::rdiv_r(power), build::rdiv_r(build::prod_l(last, k - 1)));
        // psi^{k-1} |- gamma/psi+
        let over_plus = build::cut(m, lemma, 0);
        let apply = build::rdiv_l(build::ax(&self.plus), build::ax(&self.gamma), 0);
        build::cut(over_plus, apply, 0)
    }

    fn m_formula(&self) -> Formula {
        Formula::meet(
            Formula::rdiv(self.gamma.clone(), self.psi.clone()),
            Formula::rdiv(self.gamma.clone(), Formula::product(self.psi.clone(), self.plus.clone())),
        )
    }

    /// `(gamma/psi) & (gamma/(psi.psi+)) |- gamma/psi+`, without joins.
    fn meet_lemma(&self) -> P {
        let (psi, gamma, plus) = (&self.psi, &self.gamma, &self.plus);
        let m = self.m_formula();
        let left = Formula::rdiv(gamma.clone(), psi.clone());
        let right = Formula::rdiv(gamma.clone(), Formula::product(psi.clone(), plus.clone()));
        let star = Formula::star(psi.clone());
        let m_psi = Formula::product(m.clone(), psi.clone());

        // |- (M.psi)\gamma
        let gp = build::rdiv_l(build::ax(psi), build::ax(gamma), 0);
        let base = build::ldiv_r(build::prod_l(build::meet_l1(gp, 0, &right), 0));

        // psi, psi^* |- (M.psi)\gamma
        let psi_psi_star =
            build::prod_r(build::ax(psi), build::prod_r(build::ax(psi), build::ax(&star)));
        let g_pp = build::rdiv_l(psi_psi_star, build::ax(gamma), 0);
        let step = build::ldiv_r(build::prod_l(build::meet_l2(g_pp, 0, &left), 0));

        let star_to = star_case_split(psi, base, step);
        // M, psi, (M.psi)\gamma |- gamma
        let apply = build::ldiv_l(build::product_intro(&[m.clone(), psi.clone()]), build::ax(gamma), 0);
        debug_assert_eq!(apply.conclusion.antecedent[2], Formula::ldiv(m_psi, gamma.clone()));
        // M, psi, psi^* |- gamma, then M, psi+ |- gamma, then M |- gamma/psi+
        let body = build::prod_l(build::cut(star_to, apply, 2), 1);
        build::rdiv_r(body)
    }
}

/// From `|- b` and `a, a^* |- b` derive `a^* |- b`, using only meets: run
/// the fixpoint rule on `b & a^*` and project.
pub(crate) fn star_case_split(a: &Formula, base: P, step: P) -> P {
    let b = base.conclusion.succedent.clone();
    let star = Formula::star(a.clone());
    let fp_base = build::meet_r(base, build::star_r_0(a));
    let keep_star = build::star_r_fp(build::ax(a), build::ax(&star));
    let fp_step = build::meet_r(build::meet_l2(step, 1, &b), build::meet_l2(keep_star, 1, &b));
    let fp = build::star_l_fp(fp_base, fp_step);
    build::cut(fp, build::meet_l1(build::ax(&b), 0, &star), 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_formula, parse_sequent};

    fn f(t: &str) -> Formula {
        parse_formula(t).unwrap()
    }

    fn act(p: P) -> ActProof {
        ActProof::new(p).unwrap()
    }

    /// `a^k |- a^*` as k copies.
    fn power_to_star(a: &Formula, k: usize) -> P {
        (0..k).fold(build::star_r_0(a), |acc, _| build::star_r_fp(build::ax(a), acc))
    }

    /// `a^n, a+ |- a^*`
    fn last_to_star(a: &Formula, n: usize) -> P {
        let star = Formula::star(a.clone());
        let tail = build::star_r_fp(build::ax(a), build::ax(&star));
        let plus = build::prod_l(tail, 0);
        (0..n).fold(plus, |acc, _| build::star_r_fp(build::ax(a), acc))
    }

    #[test]
    fn star_rule_examples() {
        let p = build::star_r_0(&f("a"));
        assert!(check_act_proof(&p).is_ok());
        let a = f("a");
        let step = build::star_r_fp(build::ax(&a), build::ax(&f("a^*")));
        let p = build::star_l_fp(build::star_r_0(&a), step);
        assert_eq!(p.conclusion, parse_sequent("a^* |- a^*").unwrap());
        assert!(check_act_proof(&p).is_ok());
    }

    #[test]
    fn embedding() {
        let p = crate::malc::prove(&parse_sequent("a, a\\c |- c").unwrap()).unwrap();
        let e = embed_malc(p.proof().unwrap()).unwrap();
        assert!(check_act_proof(&e).is_ok());
        let bad = Proof::leaf(crate::proof::Rule::Ax, parse_sequent("a |- b").unwrap());
        assert!(embed_malc(&bad).is_err());
    }

    #[test]
    fn plus_fp_examples() {
        let a = f("a");
        let plus = Formula::plus(a.clone());
        // a |- a+ and a, a+ |- a+
        let p1 = act(build::prod_r(build::ax(&a), build::star_r_0(&a)));
        let p2 = act(build::prod_r(build::ax(&a), build::prod_l(build::star_r_fp(build::ax(&a), build::ax(&f("a^*"))), 0)));
        let out = synth_plus_fp(&a, &plus, &p1, &p2).unwrap();
        assert_eq!(out.conclusion, parse_sequent("a.a^* |- a.a^*").unwrap());

        let star = f("a^*");
        let q1 = act(power_to_star(&a, 1));
        let q2 = act(build::star_r_fp(build::ax(&a), build::ax(&star)));
        let out = synth_plus_fp(&a, &star, &q1, &q2).unwrap();
        assert_eq!(out.conclusion, parse_sequent("a^+ |- a^*").unwrap());

        assert!(matches!(
            synth_plus_fp(&a, &star, &q2, &q1),
            Err(ActError::ConclusionMismatch { index: 0, .. })
        ));
    }

    #[test]
    fn unfold_lemma_checks() {
        let u = plus_unfold(&f("a.b"));
        assert_eq!(u.conclusion, parse_sequent("(a.b)^+ |- a.b | (a.b).(a.b)^+").unwrap());
    }

    #[test]
    fn long_rules_for_small_n() {
        let a = f("a");
        let star = f("a^*");
        for n in 0..=4 {
            let mut prem: Vec<ActProof> = (1..=n).map(|k| act(power_to_star(&a, k))).collect();
            prem.push(act(last_to_star(&a, n)));
            let j = synth_long_rule(&a, &star, n, &prem).unwrap();
            let m = synth_long_rule_meet(&a, &star, n, &prem).unwrap();
            assert_eq!(j.conclusion, parse_sequent("a^+ |- a^*").unwrap());
            assert_eq!(m.conclusion, j.conclusion);
            assert!(!m.mentions_join());
            assert_eq!(m.count_rule("join_l") + m.count_rule("join_r1") + m.count_rule("join_r2"), 0);
            if n == 0 {
                assert_eq!(j, prem[0]);
            }
        }
    }

    #[test]
    fn long_rule_accepts_product_powers() {
        let a = f("a");
        let star = f("a^*");
        // a.a |- a^* from a, a |- a^* by prod_l
        let sq = act(build::prod_l(power_to_star(&a, 2), 0));
        let prem = vec![act(power_to_star(&a, 1)), sq, act(last_to_star(&a, 2))];
        let out = synth_long_rule(&a, &star, 2, &prem).unwrap();
        assert_eq!(out.conclusion, parse_sequent("a^+ |- a^*").unwrap());
    }

    #[test]
    fn long_rule_errors() {
        let a = f("a");
        let star = f("a^*");
        let prem = vec![act(power_to_star(&a, 1))];
        assert!(matches!(
            synth_long_rule(&a, &star, 1, &prem),
            Err(ActError::ArityMismatch { expected: 2, found: 1 })
        ));
        let j = f("a|c");
        let pj = act(build::ax(&j));
        assert_eq!(synth_long_rule_meet(&j, &j, 0, &[pj]), Err(ActError::JoinPresent));
    }
}
