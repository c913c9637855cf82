//! Helpers shared by the integration tests: seeded generators and naive
//! reference implementations used as oracles.
#![allow(dead_code)]

use std::collections::HashMap;

use actlogic::syntax::{Formula, Node, Sequent};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Clone, Copy)]
pub struct Ops {
    pub lattice: bool,
    pub units: bool,
}

pub const ALL_OPS: Ops = Ops { lattice: true, units: true };
pub const MULT_OPS: Ops = Ops { lattice: false, units: false };

/// Random star-free formula with at most `budget` connectives.
pub fn formula(r: &mut ChaCha8Rng, vars: &[&str], budget: usize, ops: Ops) -> Formula {
    if budget == 0 || r.gen_bool(0.3) {
        if ops.units && r.gen_bool(0.1) {
            return if r.gen_bool(0.5) { Formula::one() } else { Formula::zero() };
        }
        return Formula::var(vars.choose(r).unwrap());
    }
    let rest = budget - 1;
    let left = r.gen_range(0..=rest);
    let a = formula(r, vars, left, ops);
    let b = formula(r, vars, rest - left, ops);
    let kinds = if ops.lattice { 5 } else { 3 };
    match r.gen_range(0..kinds) {
        0 => Formula::product(a, b),
        1 => Formula::ldiv(a, b),
        2 => Formula::rdiv(a, b),
        3 => Formula::meet(a, b),
        _ => Formula::join(a, b),
    }
}

/// Random sequent with total complexity at most `budget`.
pub fn sequent(r: &mut ChaCha8Rng, vars: &[&str], budget: usize, ops: Ops) -> Sequent {
    let n = r.gen_range(0..=3);
    let mut left = budget;
    let mut ante = Vec::new();
    for _ in 0..n {
        let k = r.gen_range(0..=left);
        left -= k;
        ante.push(formula(r, vars, k, ops));
    }
    let succ = formula(r, vars, left, ops);
    Sequent::new(ante, succ)
}

/// Unfocused exhaustive backward search over every rule instance.
#[derive(Default)]
pub struct NaiveProver {
    memo: HashMap<Sequent, bool>,
}

impl NaiveProver {
    pub fn derivable(&mut self, s: &Sequent) -> bool {
        if let Some(&v) = self.memo.get(s) {
            return v;
        }
        let v = self.compute(s);
        self.memo.insert(s.clone(), v);
        v
    }

    fn compute(&mut self, s: &Sequent) -> bool {
        let g = &s.antecedent;
        let c = &s.succedent;
        let n = g.len();
        if n == 1 && g[0] == *c {
            return true;
        }
        if g.iter().any(|f| matches!(f.node(), Node::Zero)) {
            return true;
        }
        if n == 0 && matches!(c.node(), Node::One) {
            return true;
        }
        let with = |pos: usize, mid: &[Formula]| -> Vec<Formula> {
            let mut v = g[..pos].to_vec();
            v.extend_from_slice(mid);
            v.extend_from_slice(&g[pos + 1..]);
            v
        };
        let sq = |a: Vec<Formula>, c: &Formula| Sequent::new(a, c.clone());
        match c.node() {
            Node::LeftResidual(a, b) => {
                let mut v = vec![a.clone()];
                v.extend_from_slice(g);
                if self.derivable(&sq(v, b)) {
                    return true;
                }
            }
            Node::RightResidual(b, a) => {
                let mut v = g.clone();
                v.push(a.clone());
                if self.derivable(&sq(v, b)) {
                    return true;
                }
            }
            Node::Product(a, b) => {
                for k in 0..=n {
                    if self.derivable(&sq(g[..k].to_vec(), a)) && self.derivable(&sq(g[k..].to_vec(), b)) {
                        return true;
                    }
                }
            }
            Node::Meet(a, b) => {
                if self.derivable(&sq(g.clone(), a)) && self.derivable(&sq(g.clone(), b)) {
                    return true;
                }
            }
            Node::Join(a, b) => {
                if self.derivable(&sq(g.clone(), a)) || self.derivable(&sq(g.clone(), b)) {
                    return true;
                }
            }
            _ => {}
        }
        for pos in 0..n {
            match g[pos].node() {
                Node::One => {
                    if self.derivable(&sq(with(pos, &[]), c)) {
                        return true;
                    }
                }
                Node::Product(a, b) => {
                    if self.derivable(&sq(with(pos, &[a.clone(), b.clone()]), c)) {
                        return true;
                    }
                }
                Node::Meet(a, b) => {
                    if self.derivable(&sq(with(pos, &[a.clone()]), c))
                        || self.derivable(&sq(with(pos, &[b.clone()]), c))
                    {
                        return true;
                    }
                }
                Node::Join(a, b) => {
                    if self.derivable(&sq(with(pos, &[a.clone()]), c))
                        && self.derivable(&sq(with(pos, &[b.clone()]), c))
                    {
                        return true;
                    }
                }
                Node::LeftResidual(a, b) => {
                    for start in 0..=pos {
                        let mut major = g[..start].to_vec();
                        major.push(b.clone());
                        major.extend_from_slice(&g[pos + 1..]);
                        if self.derivable(&sq(g[start..pos].to_vec(), a)) && self.derivable(&sq(major, c)) {
                            return true;
                        }
                    }
                }
                Node::RightResidual(b, a) => {
                    for end in pos + 1..=n {
                        let mut major = g[..pos].to_vec();
                        major.push(b.clone());
                        major.extend_from_slice(&g[end..]);
                        if self.derivable(&sq(g[pos + 1..end].to_vec(), a)) && self.derivable(&sq(major, c)) {
                            return true;
                        }
                    }
                }
                _ => {}
            }
        }
        false
    }
}
pub mod grammars;
pub mod machines;
