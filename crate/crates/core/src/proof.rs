//! Proof trees and the rule-instance checker shared by the MALC and ACT
//! checkers.
//!
//! Antecedent positions in rule parameters are 0-based; range ends are
//! exclusive. Premises are listed in the order of the usual rule displays:
//! the minor premise (the one proving the divisor or the cut formula) first.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::syntax::{Formula, Node, Sequent};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Rule {
    Ax,
    ZeroL { pos: usize },
    OneL { pos: usize },
    OneR,
    /// `Gamma, Pi, a\b, Delta |- c`; `Pi` is `start..pos`.
    LdivL { pos: usize, start: usize },
    LdivR,
    ProdL { pos: usize },
    /// `Gamma, b/a, Pi, Delta |- c`; `Pi` is `pos+1..end`.
    RdivL { pos: usize, end: usize },
    RdivR,
    ProdR { split: usize },
    MeetL1 { pos: usize },
    MeetL2 { pos: usize },
    MeetR,
    JoinL { pos: usize },
    JoinR1,
    JoinR2,
    /// `Gamma, Pi, Delta |- c` with `Pi` = `start..start+len`.
    Cut { start: usize, len: usize, formula: Formula },
    StarLFp,
    StarR0,
    StarRFp { split: usize },
}

pub const MALC_RULES: &[&str] = &[
    "ax", "zero_l", "one_l", "one_r", "ldiv_l", "ldiv_r", "prod_l", "rdiv_l", "rdiv_r", "prod_r",
    "meet_l1", "meet_l2", "meet_r", "join_l", "join_r1", "join_r2",
];

pub const ACT_EXTRA_RULES: &[&str] = &["cut", "star_l_fp", "star_r_0", "star_r_fp"];

impl Rule {
    pub fn name(&self) -> &'static str {
        match self {
            Rule::Ax => "ax",
            Rule::ZeroL { .. } => "zero_l",
            Rule::OneL { .. } => "one_l",
            Rule::OneR => "one_r",
            Rule::LdivL { .. } => "ldiv_l",
            Rule::LdivR => "ldiv_r",
            Rule::ProdL { .. } => "prod_l",
            Rule::RdivL { .. } => "rdiv_l",
            Rule::RdivR => "rdiv_r",
            Rule::ProdR { .. } => "prod_r",
            Rule::MeetL1 { .. } => "meet_l1",
            Rule::MeetL2 { .. } => "meet_l2",
            Rule::MeetR => "meet_r",
            Rule::JoinL { .. } => "join_l",
            Rule::JoinR1 => "join_r1",
            Rule::JoinR2 => "join_r2",
            Rule::Cut { .. } => "cut",
            Rule::StarLFp => "star_l_fp",
            Rule::StarR0 => "star_r_0",
            Rule::StarRFp { .. } => "star_r_fp",
        }
    }

    pub fn is_act_only(&self) -> bool {
        matches!(self, Rule::Cut { .. } | Rule::StarLFp | Rule::StarR0 | Rule::StarRFp { .. })
    }

    /// Premise sequents this rule instance requires for `concl`, or the
    /// reason the instance is malformed.
    pub fn expected_premises(&self, concl: &Sequent) -> Result<Vec<Sequent>, String> {
        let ante = &concl.antecedent;
        let succ = &concl.succedent;
        let n = ante.len();
        let at = |pos: usize| -> Result<&Formula, String> {
            ante.get(pos).ok_or_else(|| format!("position {pos} out of range (antecedent has {n})"))
        };
        let replace = |pos: usize, with: &[Formula]| -> Vec<Formula> {
            let mut v = ante[..pos].to_vec();
            v.extend_from_slice(with);
            v.extend_from_slice(&ante[pos + 1..]);
            v
        };
        let seq = Sequent::new;
        match self {
            Rule::Ax => {
                if n == 1 && ante[0] == *succ {
                    Ok(vec![])
                } else {
                    Err("axiom must have the form a |- a".into())
                }
            }
            Rule::ZeroL { pos } => match at(*pos)?.node() {
                Node::Zero => Ok(vec![]),
                _ => Err(format!("antecedent formula {pos} is not 0")),
            },
            Rule::OneL { pos } => match at(*pos)?.node() {
                Node::One => Ok(vec![seq(replace(*pos, &[]), succ.clone())]),
                _ => Err(format!("antecedent formula {pos} is not 1")),
            },
            Rule::OneR => match succ.node() {
                Node::One if n == 0 => Ok(vec![]),
                Node::One => Err("antecedent must be empty for |- 1".into()),
                _ => Err("succedent is not 1".into()),
            },
            Rule::LdivL { pos, start } => match at(*pos)?.node() {
                Node::LeftResidual(a, b) if start <= pos => {
                    let minor = seq(ante[*start..*pos].to_vec(), a.clone());
                    let mut major = ante[..*start].to_vec();
                    major.push(b.clone());
                    major.extend_from_slice(&ante[pos + 1..]);
                    Ok(vec![minor, seq(major, succ.clone())])
                }
                Node::LeftResidual(..) => Err(format!("start {start} is after position {pos}")),
                _ => Err(format!("antecedent formula {pos} is not a left residual")),
            },
            Rule::LdivR => match succ.node() {
                Node::LeftResidual(a, b) => {
                    let mut v = vec![a.clone()];
                    v.extend_from_slice(ante);
                    Ok(vec![seq(v, b.clone())])
                }
                _ => Err("succedent is not a left residual".into()),
            },
            Rule::ProdL { pos } => match at(*pos)?.node() {
                Node::Product(a, b) => {
                    Ok(vec![seq(replace(*pos, &[a.clone(), b.clone()]), succ.clone())])
                }
                _ => Err(format!("antecedent formula {pos} is not a product")),
            },
            Rule::RdivL { pos, end } => match at(*pos)?.node() {
                Node::RightResidual(b, a) if *end > *pos && *end <= n => {
                    let minor = seq(ante[pos + 1..*end].to_vec(), a.clone());
                    let mut major = ante[..*pos].to_vec();
                    major.push(b.clone());
                    major.extend_from_slice(&ante[*end..]);
                    Ok(vec![minor, seq(major, succ.clone())])
                }
                Node::RightResidual(..) => Err(format!("end {end} out of range")),
                _ => Err(format!("antecedent formula {pos} is not a right residual")),
            },
            Rule::RdivR => match succ.node() {
                Node::RightResidual(b, a) => {
                    let mut v = ante.clone();
                    v.push(a.clone());
                    Ok(vec![seq(v, b.clone())])
                }
                _ => Err("succedent is not a right residual".into()),
            },
            Rule::ProdR { split } => match succ.node() {
                Node::Product(a, b) if *split <= n => Ok(vec![
                    seq(ante[..*split].to_vec(), a.clone()),
                    seq(ante[*split..].to_vec(), b.clone()),
                ]),
                Node::Product(..) => Err(format!("split {split} out of range")),
                _ => Err("succedent is not a product".into()),
            },
            Rule::MeetL1 { pos } | Rule::MeetL2 { pos } => match at(*pos)?.node() {
                Node::Meet(a, b) => {
                    let pick = if matches!(self, Rule::MeetL1 { .. }) { a } else { b };
                    Ok(vec![seq(replace(*pos, &[pick.clone()]), succ.clone())])
                }
                _ => Err(format!("antecedent formula {pos} is not a meet")),
            },
            Rule::MeetR => match succ.node() {
                Node::Meet(a, b) => Ok(vec![seq(ante.clone(), a.clone()), seq(ante.clone(), b.clone())]),
                _ => Err("succedent is not a meet".into()),
            },
            Rule::JoinL { pos } => match at(*pos)?.node() {
                Node::Join(a, b) => Ok(vec![
                    seq(replace(*pos, &[a.clone()]), succ.clone()),
                    seq(replace(*pos, &[b.clone()]), succ.clone()),
                ]),
                _ => Err(format!("antecedent formula {pos} is not a join")),
            },
            Rule::JoinR1 | Rule::JoinR2 => match succ.node() {
                Node::Join(a, b) => {
                    let pick = if matches!(self, Rule::JoinR1) { a } else { b };
                    Ok(vec![seq(ante.clone(), pick.clone())])
                }
                _ => Err("succedent is not a join".into()),
            },
            Rule::Cut { start, len, formula } => {
                let end = start.checked_add(*len).filter(|&e| e <= n);
                let Some(end) = end else {
                    return Err(format!("cut range {start}+{len} out of range"));
                };
                let minor = seq(ante[*start..end].to_vec(), formula.clone());
                let mut major = ante[..*start].to_vec();
                major.push(formula.clone());
                major.extend_from_slice(&ante[end..]);
                Ok(vec![minor, seq(major, succ.clone())])
            }
            Rule::StarLFp => match ante.as_slice() {
                [f] => match f.node() {
                    Node::Star(a) => Ok(vec![
                        seq(vec![], succ.clone()),
                        seq(vec![a.clone(), succ.clone()], succ.clone()),
                    ]),
                    _ => Err("antecedent is not a star".into()),
                },
                _ => Err("antecedent must be a single starred formula".into()),
            },
            Rule::StarR0 => match succ.node() {
                Node::Star(_) if n == 0 => Ok(vec![]),
                Node::Star(_) => Err("antecedent must be empty".into()),
                _ => Err("succedent is not a star".into()),
            },
            Rule::StarRFp { split } => match succ.node() {
                Node::Star(a) if *split <= n => Ok(vec![
                    seq(ante[..*split].to_vec(), a.clone()),
                    seq(ante[*split..].to_vec(), succ.clone()),
                ]),
                Node::Star(_) => Err(format!("split {split} out of range")),
                _ => Err("succedent is not a star".into()),
            },
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A proof tree. Subproofs are reference counted so large derivations can
/// share identical subtrees.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Proof {
    pub rule: Rule,
    pub conclusion: Sequent,
    pub premises: Vec<Arc<Proof>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("rule violation at {}: {reason}", fmt_path(.path))]
pub struct RuleViolation {
    /// Premise indices from the root to the offending node.
    pub path: Vec<usize>,
    pub reason: String,
}

fn fmt_path(p: &[usize]) -> String {
    if p.is_empty() {
        "root".into()
    } else {
        p.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(".")
    }
}

impl Proof {
    pub fn new(rule: Rule, conclusion: Sequent, premises: Vec<Arc<Proof>>) -> Self {
        Proof { rule, conclusion, premises }
    }

    pub fn leaf(rule: Rule, conclusion: Sequent) -> Arc<Self> {
        Arc::new(Proof::new(rule, conclusion, vec![]))
    }

    pub fn node(rule: Rule, conclusion: Sequent, premises: Vec<Arc<Proof>>) -> Arc<Self> {
        Arc::new(Proof::new(rule, conclusion, premises))
    }

    /// Checks every node. When `allow_act` is false the ACT-only rules are
    /// rejected. Shared subtrees are checked once.
    pub fn check(&self, allow_act: bool) -> Result<(), RuleViolation> {
        let mut done = HashSet::new();
        let mut path = Vec::new();
        check_node(self, allow_act, &mut done, &mut path)
    }

    /// Visits each distinct node once (by identity), parents before children.
    pub fn for_each_distinct(&self, mut f: impl FnMut(&Proof)) {
        let mut seen = HashSet::new();
        let mut stack: Vec<&Proof> = vec![self];
        while let Some(p) = stack.pop() {
            f(p);
            for q in p.premises.iter().rev() {
                if seen.insert(Arc::as_ptr(q) as usize) {
                    stack.push(q);
                }
            }
        }
    }

    pub fn distinct_nodes(&self) -> usize {
        let mut n = 0;
        self.for_each_distinct(|_| n += 1);
        n
    }

    /// Node count of the fully unfolded tree (saturating).
    pub fn tree_size(&self) -> u128 {
        fn go(p: &Proof, memo: &mut HashMap<usize, u128>) -> u128 {
            let key = p as *const Proof as usize;
            if let Some(&v) = memo.get(&key) {
                return v;
            }
            let v = p.premises.iter().fold(1u128, |acc, q| acc.saturating_add(go(q, memo)));
            memo.insert(key, v);
            v
        }
        go(self, &mut HashMap::new())
    }

    pub fn depth(&self) -> usize {
        fn go(p: &Proof, memo: &mut HashMap<usize, usize>) -> usize {
            let key = p as *const Proof as usize;
            if let Some(&v) = memo.get(&key) {
                return v;
            }
            let v = 1 + p.premises.iter().map(|q| go(q, memo)).max().unwrap_or(0);
            memo.insert(key, v);
            v
        }
        go(self, &mut HashMap::new())
    }

    /// Number of distinct nodes whose rule has the given name.
    pub fn count_rule(&self, name: &str) -> usize {
        let mut n = 0;
        self.for_each_distinct(|p| {
            if p.rule.name() == name {
                n += 1
            }
        });
        n
    }

    pub fn any_formula(&self, pred: &dyn Fn(&Formula) -> bool) -> bool {
        let mut hit = false;
        self.for_each_distinct(|p| {
            if !hit {
                hit = p.conclusion.formulas().any(pred)
                    || matches!(&p.rule, Rule::Cut { formula, .. } if pred(formula));
            }
        });
        hit
    }

    pub fn mentions_meet(&self) -> bool {
        self.any_formula(&Formula::has_meet)
    }

    pub fn mentions_join(&self) -> bool {
        self.any_formula(&Formula::has_join)
    }
}

fn check_node(
    p: &Proof,
    allow_act: bool,
    done: &mut HashSet<usize>,
    path: &mut Vec<usize>,
) -> Result<(), RuleViolation> {
    let violation = |path: &Vec<usize>, reason: String| RuleViolation { path: path.clone(), reason };
    if p.rule.is_act_only() && !allow_act {
        return Err(violation(path, format!("rule {} is not a MALC rule", p.rule)));
    }
    let expected = p.rule.expected_premises(&p.conclusion).map_err(|r| violation(path, r))?;
    if expected.len() != p.premises.len() {
        return Err(violation(
            path,
            format!("{} expects {} premises, found {}", p.rule, expected.len(), p.premises.len()),
        ));
    }
    for (i, (want, got)) in expected.iter().zip(&p.premises).enumerate() {
        if *want != got.conclusion {
            return Err(violation(
                path,
                format!("premise {i} should be `{want}` but is `{}`", got.conclusion),
            ));
        }
    }
    for (i, q) in p.premises.iter().enumerate() {
        let key = Arc::as_ptr(q) as usize;
        if done.contains(&key) {
            continue;
        }
        path.push(i);
        check_node(q, allow_act, done, path)?;
        path.pop();
        done.insert(key);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_formula, parse_sequent};

    fn s(t: &str) -> Sequent {
        parse_sequent(t).unwrap()
    }

    #[test]
    fn axiom_and_one() {
        assert!(Proof::new(Rule::Ax, s("a |- a"), vec![]).check(false).is_ok());
        assert!(Proof::new(Rule::Ax, s("a |- b"), vec![]).check(false).is_err());
        let bad = Proof::new(Rule::OneR, s("a |- 1"), vec![]).check(false).unwrap_err();
        assert!(bad.reason.contains("empty"));
        assert!(Proof::new(Rule::OneR, s("|- 1"), vec![]).check(false).is_ok());
    }

    #[test]
    fn ldiv_l_instance() {
        let p = Proof::new(
            Rule::LdivL { pos: 1, start: 0 },
            s("a, a\\c |- c"),
            vec![Proof::leaf(Rule::Ax, s("a |- a")), Proof::leaf(Rule::Ax, s("c |- c"))],
        );
        assert!(p.check(false).is_ok());
        let wrong = Proof::new(
            Rule::LdivL { pos: 1, start: 1 },
            s("a, a\\c |- c"),
            vec![Proof::leaf(Rule::Ax, s("a |- a")), Proof::leaf(Rule::Ax, s("c |- c"))],
        );
        assert!(wrong.check(false).is_err());
    }

    #[test]
    fn violation_path_points_at_node() {
        let p = Proof::new(
            Rule::ProdR { split: 1 },
            s("a, b |- a.b"),
            vec![Proof::leaf(Rule::Ax, s("a |- a")), Proof::leaf(Rule::OneR, s("b |- b"))],
        );
        let e = p.check(false).unwrap_err();
        assert_eq!(e.path, vec![1]);
    }

    #[test]
    fn act_rules_need_permission() {
        let p = Proof::new(Rule::StarR0, s("|- a^*"), vec![]);
        assert!(p.check(false).is_err());
        assert!(p.check(true).is_ok());
    }

    #[test]
    fn cut_formula_must_match() {
        let cut = |f: &str| {
            Proof::new(
                Rule::Cut { start: 0, len: 1, formula: parse_formula(f).unwrap() },
                s("a |- a"),
                vec![Proof::leaf(Rule::Ax, s("a |- a")), Proof::leaf(Rule::Ax, s("a |- a"))],
            )
        };
        assert!(cut("a").check(true).is_ok());
        assert!(cut("b").check(true).is_err());
    }

    #[test]
    fn sizes_with_sharing() {
        let leaf = Proof::leaf(Rule::Ax, s("a |- a"));
        let p = Proof::new(
            Rule::MeetR,
            s("a |- a&a"),
            vec![leaf.clone(), leaf],
        );
        assert!(p.check(false).is_ok());
        assert_eq!(p.distinct_nodes(), 2);
        assert_eq!(p.tree_size(), 3);
        assert_eq!(p.depth(), 2);
        assert!(p.mentions_meet());
        assert!(!p.mentions_join());
    }
}
