//! Forward proof-construction combinators.
//!
//! Each function takes proofs of the premises and returns the proof of the
//! conclusion of one rule instance. Misuse (premises of the wrong shape) is a
//! programming error and panics; every proof built here still goes through
//! the checker before it leaves the crate's public synthesizers.

use std::sync::Arc;

use crate::proof::{Proof, Rule};
use crate::syntax::{Formula, Node, Sequent};

pub type P = Arc<Proof>;

fn ante(p: &P) -> &[Formula] {
    &p.conclusion.antecedent
}

fn succ(p: &P) -> &Formula {
    &p.conclusion.succedent
}

fn splice(prefix: &[Formula], mid: &[Formula], suffix: &[Formula]) -> Vec<Formula> {
    let mut v = Vec::with_capacity(prefix.len() + mid.len() + suffix.len());
    v.extend_from_slice(prefix);
    v.extend_from_slice(mid);
    v.extend_from_slice(suffix);
    v
}

/// `f |- f`
pub fn ax(f: &Formula) -> P {
    Proof::leaf(Rule::Ax, Sequent::new(vec![f.clone()], f.clone()))
}

/// `|- 1`
pub fn one_r() -> P {
    Proof::leaf(Rule::OneR, Sequent::new(vec![], Formula::one()))
}

/// `|- f^*` for `f = body`.
pub fn star_r_0(body: &Formula) -> P {
    Proof::leaf(Rule::StarR0, Sequent::new(vec![], Formula::star(body.clone())))
}

/// From `Pi |- a` and `G, a, D |- c` (with `a` at `pos`) to `G, Pi, D |- c`.
pub fn cut(minor: P, major: P, pos: usize) -> P {
    let a = succ(&minor).clone();
    assert_eq!(ante(&major)[pos], a, "cut formula mismatch");
    let concl = Sequent::new(
        splice(&ante(&major)[..pos], ante(&minor), &ante(&major)[pos + 1..]),
        succ(&major).clone(),
    );
    let rule = Rule::Cut { start: pos, len: ante(&minor).len(), formula: a };
    Proof::node(rule, concl, vec![minor, major])
}

/// From `a, G |- b` to `G |- a\b`.
pub fn ldiv_r(p: P) -> P {
    let (a, rest) = ante(&p).split_first().expect("ldiv_r needs a nonempty antecedent");
    let concl = Sequent::new(rest.to_vec(), Formula::ldiv(a.clone(), succ(&p).clone()));
    Proof::node(Rule::LdivR, concl, vec![p])
}

/// From `G, a |- b` to `G |- b/a`.
pub fn rdiv_r(p: P) -> P {
    let (a, rest) = ante(&p).split_last().expect("rdiv_r needs a nonempty antecedent");
    let concl = Sequent::new(rest.to_vec(), Formula::rdiv(succ(&p).clone(), a.clone()));
    Proof::node(Rule::RdivR, concl, vec![p])
}

/// From `Pi |- a` and `G, b, D |- c` (`b` at `pos`) to `G, Pi, a\b, D |- c`.
pub fn ldiv_l(minor: P, major: P, pos: usize) -> P {
    let f = Formula::ldiv(succ(&minor).clone(), ante(&major)[pos].clone());
    let mut mid = ante(&minor).to_vec();
    mid.push(f);
    let concl = Sequent::new(
        splice(&ante(&major)[..pos], &mid, &ante(&major)[pos + 1..]),
        succ(&major).clone(),
    );
    let rule = Rule::LdivL { pos: pos + ante(&minor).len(), start: pos };
    Proof::node(rule, concl, vec![minor, major])
}

/// From `Pi |- a` and `G, b, D |- c` (`b` at `pos`) to `G, b/a, Pi, D |- c`.
pub fn rdiv_l(minor: P, major: P, pos: usize) -> P {
    let f = Formula::rdiv(ante(&major)[pos].clone(), succ(&minor).clone());
    let mut mid = vec![f];
    mid.extend_from_slice(ante(&minor));
    let concl = Sequent::new(
        splice(&ante(&major)[..pos], &mid, &ante(&major)[pos + 1..]),
        succ(&major).clone(),
    );
    let rule = Rule::RdivL { pos, end: pos + 1 + ante(&minor).len() };
    Proof::node(rule, concl, vec![minor, major])
}

/// From `G, a, b, D |- c` to `G, a.b, D |- c`, with `a` at `pos`.
pub fn prod_l(p: P, pos: usize) -> P {
    let a = &ante(&p)[pos];
    let b = &ante(&p)[pos + 1];
    let f = Formula::product(a.clone(), b.clone());
    let concl = Sequent::new(
        splice(&ante(&p)[..pos], &[f], &ante(&p)[pos + 2..]),
        succ(&p).clone(),
    );
    Proof::node(Rule::ProdL { pos }, concl, vec![p])
}

/// From `G |- a` and `D |- b` to `G, D |- a.b`.
pub fn prod_r(left: P, right: P) -> P {
    let split = ante(&left).len();
    let concl = Sequent::new(
        splice(ante(&left), ante(&right), &[]),
        Formula::product(succ(&left).clone(), succ(&right).clone()),
    );
    Proof::node(Rule::ProdR { split }, concl, vec![left, right])
}

/// From `G, a, D |- c` to `G, a&other, D |- c`.
pub fn meet_l1(p: P, pos: usize, other: &Formula) -> P {
    let f = Formula::meet(ante(&p)[pos].clone(), other.clone());
    replace_one(p, pos, f, Rule::MeetL1 { pos })
}

/// From `G, a, D |- c` to `G, other&a, D |- c`.
pub fn meet_l2(p: P, pos: usize, other: &Formula) -> P {
    let f = Formula::meet(other.clone(), ante(&p)[pos].clone());
    replace_one(p, pos, f, Rule::MeetL2 { pos })
}

/// From `G, D |- c` to `G, 1, D |- c`.
pub fn one_l(p: P, pos: usize) -> P {
    let concl = Sequent::new(
        splice(&ante(&p)[..pos], &[Formula::one()], &ante(&p)[pos..]),
        succ(&p).clone(),
    );
    Proof::node(Rule::OneL { pos }, concl, vec![p])
}

fn replace_one(p: P, pos: usize, f: Formula, rule: Rule) -> P {
    let concl = Sequent::new(
        splice(&ante(&p)[..pos], &[f], &ante(&p)[pos + 1..]),
        succ(&p).clone(),
    );
    Proof::node(rule, concl, vec![p])
}

/// From `G |- a` and `G |- b` to `G |- a&b`.
pub fn meet_r(left: P, right: P) -> P {
    assert_eq!(ante(&left), ante(&right), "meet_r premises need equal antecedents");
    let concl = Sequent::new(
        ante(&left).to_vec(),
        Formula::meet(succ(&left).clone(), succ(&right).clone()),
    );
    Proof::node(Rule::MeetR, concl, vec![left, right])
}

/// From `G, a, D |- c` and `G, b, D |- c` to `G, a|b, D |- c`.
pub fn join_l(left: P, right: P, pos: usize) -> P {
    assert_eq!(succ(&left), succ(&right), "join_l premises need equal succedents");
    let f = Formula::join(ante(&left)[pos].clone(), ante(&right)[pos].clone());
    let concl = Sequent::new(
        splice(&ante(&left)[..pos], &[f], &ante(&left)[pos + 1..]),
        succ(&left).clone(),
    );
    Proof::node(Rule::JoinL { pos }, concl, vec![left, right])
}

/// From `G |- a` to `G |- a|other`.
pub fn join_r1(p: P, other: &Formula) -> P {
    let concl = Sequent::new(ante(&p).to_vec(), Formula::join(succ(&p).clone(), other.clone()));
    Proof::node(Rule::JoinR1, concl, vec![p])
}

/// From `G |- a` to `G |- other|a`.
pub fn join_r2(p: P, other: &Formula) -> P {
    let concl = Sequent::new(ante(&p).to_vec(), Formula::join(other.clone(), succ(&p).clone()));
    Proof::node(Rule::JoinR2, concl, vec![p])
}

/// From `|- b` and `a, b |- b` to `a^* |- b`.
pub fn star_l_fp(base: P, step: P) -> P {
    assert!(ante(&base).is_empty(), "star_l_fp base must have empty antecedent");
    let a = ante(&step)[0].clone();
    let concl = Sequent::new(vec![Formula::star(a)], succ(&base).clone());
    Proof::node(Rule::StarLFp, concl, vec![base, step])
}

/// From `Pi |- a` and `D |- a^*` to `Pi, D |- a^*`.
pub fn star_r_fp(head: P, tail: P) -> P {
    let split = ante(&head).len();
    let concl = Sequent::new(splice(ante(&head), ante(&tail), &[]), succ(&tail).clone());
    Proof::node(Rule::StarRFp { split }, concl, vec![head, tail])
}

/// `a1, ..., an |- ((a1.a2)...).an`, the left-nested product.
pub fn product_intro(fs: &[Formula]) -> P {
    let mut it = fs.iter();
    let first = it.next().expect("product of an empty list");
    it.fold(ax(first), |acc, f| prod_r(acc, ax(f)))
}

/// Turns a proof of `G, ((a1.a2)...).an, D |- c` (product at `pos`) into a
/// proof of `G, a1, ..., an, D |- c`, via cut.
pub fn unfold_product(p: P, pos: usize, parts: &[Formula]) -> P {
    cut(product_intro(parts), p, pos)
}

/// Factors of a left-nested product, `((a1.a2)...).an` to `[a1, ..., an]`;
/// a non-product yields `[f]`.
pub fn product_factors(f: &Formula, n: usize) -> Option<Vec<Formula>> {
    if n == 1 {
        return Some(vec![f.clone()]);
    }
    match f.node() {
        Node::Product(a, b) => {
            let mut v = product_factors(a, n - 1)?;
            v.push(b.clone());
            Some(v)
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_formula, parse_sequent};

    fn f(t: &str) -> Formula {
        parse_formula(t).unwrap()
    }

    #[test]
    fn combinators_build_checkable_instances() {
        let p = ldiv_l(ax(&f("a")), ax(&f("c")), 0);
        assert_eq!(p.conclusion, parse_sequent("a, a\\c |- c").unwrap());
        p.check(false).unwrap();

        let p = rdiv_l(ax(&f("a")), ax(&f("c")), 0);
        assert_eq!(p.conclusion, parse_sequent("c/a, a |- c").unwrap());
        p.check(false).unwrap();

        let p = prod_l(prod_r(ax(&f("a")), ax(&f("b"))), 0);
        assert_eq!(p.conclusion, parse_sequent("a.b |- a.b").unwrap());
        p.check(false).unwrap();

        let p = ldiv_r(ldiv_l(ax(&f("a")), ax(&f("c")), 0));
        assert_eq!(p.conclusion, parse_sequent("a\\c |- a\\c").unwrap());
        p.check(false).unwrap();

        let p = meet_r(meet_l1(ax(&f("a")), 0, &f("b")), meet_l2(ax(&f("b")), 0, &f("a")));
        assert_eq!(p.conclusion, parse_sequent("a&b |- a&b").unwrap());
        p.check(false).unwrap();

        let p = join_l(join_r1(ax(&f("a")), &f("b")), join_r2(ax(&f("b")), &f("a")), 0);
        assert_eq!(p.conclusion, parse_sequent("a|b |- a|b").unwrap());
        p.check(false).unwrap();

        let p = one_l(one_r(), 0);
        assert_eq!(p.conclusion, parse_sequent("1 |- 1").unwrap());
        p.check(false).unwrap();
    }

    #[test]
    fn star_and_cut() {
        let a = f("a");
        let step = star_r_fp(ax(&a), ax(&Formula::star(a.clone())));
        let p = star_l_fp(star_r_0(&a), step);
        assert_eq!(p.conclusion, parse_sequent("a^* |- a^*").unwrap());
        p.check(true).unwrap();

        let prod = f("(a.b).c");
        let parts = product_factors(&prod, 3).unwrap();
        assert_eq!(parts, vec![f("a"), f("b"), f("c")]);
        let p = unfold_product(ax(&prod), 0, &parts);
        assert_eq!(p.conclusion, parse_sequent("a, b, c |- (a.b).c").unwrap());
        p.check(true).unwrap();
    }
}
