//! Conversion to Greibach normal form.
//!
//! ε-productions, unit productions and useless symbols are removed, inner
//! terminals are lifted to fresh nonterminals, left recursion is eliminated
//! along a fixed order of nonterminals and finally leading nonterminals are
//! substituted back from the highest index down.

use std::collections::HashSet;

use super::{Grammar, GrammarBuilder, GrammarError, Symbol};

type Rhs = Vec<Symbol>;

struct Work {
    names: Vec<String>,
    prods: Vec<Vec<Rhs>>,
    seen: Vec<HashSet<Rhs>>,
}

impl Work {
    fn add_nt(&mut self, name: String) -> usize {
        self.names.push(name);
        self.prods.push(Vec::new());
        self.seen.push(HashSet::new());
        self.names.len() - 1
    }

    fn add(&mut self, a: usize, rhs: Rhs) {
        if self.seen[a].insert(rhs.clone()) {
            self.prods[a].push(rhs);
        }
    }

    fn set(&mut self, a: usize, rhss: Vec<Rhs>) {
        self.prods[a].clear();
        self.seen[a].clear();
        for r in rhss {
            self.add(a, r);
        }
    }

    fn fresh(&self, base: &str) -> String {
        let mut name = base.to_string();
        while self.names.contains(&name) {
            name.push('\'');
        }
        name
    }

    /// Replaces a leading `N(b)` by every production of `b`.
    fn substitute_head(&self, rhs: &Rhs, b: usize) -> Vec<Rhs> {
        self.prods[b].iter().map(|d| d.iter().chain(&rhs[1..]).copied().collect()).collect()
    }

    fn substitute_all(&mut self, a: usize, pred: impl Fn(usize) -> bool) {
        let mut out = Vec::new();
        for rhs in self.prods[a].clone() {
            match rhs[0] {
                Symbol::N(b) if pred(b) => out.extend(self.substitute_head(&rhs, b)),
                _ => out.push(rhs),
            }
        }
        self.set(a, out);
    }
}

/// Greibach normal form of an ε-free grammar; the language is unchanged.
pub fn to_gnf(g: &Grammar) -> Result<Grammar, GrammarError> {
    if g.nullable()[g.start()] {
        return Err(GrammarError::EmptyWordInLanguage);
    }
    if g.is_gnf() {
        return Ok(g.trim());
    }
    let g = g.trim();
    let n = g.nonterminals().len();
    let nullable = g.nullable();
    let mut w = Work { names: g.nonterminals().to_vec(), prods: vec![Vec::new(); n], seen: vec![HashSet::new(); n] };

    // ε-free variants of every production
    for p in g.productions() {
        let mut variants: Vec<Rhs> = vec![Vec::new()];
        for &s in &p.rhs {
            let optional = matches!(s, Symbol::N(b) if nullable[b]);
            let mut next = Vec::new();
            for v in variants {
                if optional {
                    next.push(v.clone());
                }
                let mut v = v;
                v.push(s);
                next.push(v);
            }
            variants = next;
        }
        for v in variants.into_iter().filter(|v| !v.is_empty()) {
            w.add(p.lhs, v);
        }
    }

    // unit productions: a inherits the non-unit productions of every b with a =>* b
    let mut result = Vec::with_capacity(n);
    for a in 0..n {
        let mut reach = vec![false; n];
        reach[a] = true;
        let mut stack = vec![a];
        while let Some(x) = stack.pop() {
            for r in &w.prods[x] {
                if let [Symbol::N(y)] = r[..] {
                    if !reach[y] {
                        reach[y] = true;
                        stack.push(y);
                    }
                }
            }
        }
        let rhss: Vec<Rhs> = (0..n)
            .filter(|&b| reach[b])
            .flat_map(|b| w.prods[b].iter().filter(|r| !matches!(r[..], [Symbol::N(_)])).cloned())
            .collect();
        result.push(rhss);
    }
    for (a, rhss) in result.into_iter().enumerate() {
        w.set(a, rhss);
    }

    // inner terminals become nonterminals
    let mut lifted: Vec<Option<usize>> = vec![None; g.terminals().len()];
    for a in 0..n {
        let mut out = Vec::new();
        for rhs in w.prods[a].clone() {
            let mut r = vec![rhs[0]];
            for &s in &rhs[1..] {
                match s {
                    Symbol::T(t) => {
                        let x = match lifted[t] {
                            Some(x) => x,
                            None => {
                                let name = w.fresh(&format!("T_{}", g.terminals()[t]));
                                let x = w.add_nt(name);
                                w.add(x, vec![Symbol::T(t)]);
                                lifted[t] = Some(x);
                                x
                            }
                        };
                        r.push(Symbol::N(x));
                    }
                    s => r.push(s),
                }
            }
            out.push(r);
        }
        w.set(a, out);
    }

    // left recursion, in index order over the nonterminals present now
    let m = w.names.len();
    let mut primes: Vec<usize> = Vec::new();
    for i in 0..m {
        for j in 0..i {
            w.substitute_all(i, |b| b == j);
        }
        let (rec, base): (Vec<Rhs>, Vec<Rhs>) = w.prods[i].iter().cloned().partition(|r| r[0] == Symbol::N(i));
        if rec.is_empty() {
            continue;
        }
        let name = w.fresh(&format!("{}_rest", w.names[i]));
        let z = w.add_nt(name);
        primes.push(z);
        let mut new_base = base.clone();
        for b in &base {
            let mut r = b.clone();
            r.push(Symbol::N(z));
            new_base.push(r);
        }
        w.set(i, new_base);
        for r in rec {
            let alpha: Rhs = r[1..].to_vec();
            let mut with_z = alpha.clone();
            with_z.push(Symbol::N(z));
            w.add(z, alpha);
            w.add(z, with_z);
        }
    }

    // back-substitution
    for i in (0..m).rev() {
        w.substitute_all(i, |b| b > i && b < m);
    }
    for &z in &primes {
        w.substitute_all(z, |b| b < m);
    }

    let mut b = GrammarBuilder::new(g.terminals().to_vec());
    let ids: Vec<usize> = w.names.iter().map(|name| b.nonterminal(name)).collect();
    for (a, rhss) in w.prods.iter().enumerate() {
        for r in rhss {
            let r = r
                .iter()
                .map(|&s| match s {
                    Symbol::N(x) => Symbol::N(ids[x]),
                    t => t,
                })
                .collect();
            b.add(ids[a], r);
        }
    }
    let out = b.finish(ids[g.start()])?.trim();
    debug_assert!(out.is_gnf(), "conversion left a non-Greibach production:\n{out}");
    if !out.is_gnf() {
        return Err(GrammarError::Invalid("internal error: conversion did not reach Greibach form".into()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::member;

    fn words(letters: usize, max: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut layer: Vec<Vec<usize>> = vec![vec![]];
        for _ in 0..max {
            layer = layer.iter().flat_map(|w| (0..letters).map(move |a| [w.clone(), vec![a]].concat())).collect();
            out.extend(layer.iter().cloned());
        }
        out
    }

    fn agree(text: &str, max: usize) {
        let g = Grammar::from_json(text).unwrap();
        let h = to_gnf(&g).unwrap();
        assert!(h.is_gnf());
        for w in words(g.terminals().len(), max) {
            assert_eq!(member(&g, &w).unwrap(), member(&h, &w).unwrap(), "{w:?}\n{h}");
        }
    }

    #[test]
    fn catalan_grammar() {
        agree(r#"{"start":"S","terminals":["a"],"productions":[{"lhs":"S","rhs":["S","S"]},{"lhs":"S","rhs":["a"]}]}"#, 7);
    }

    #[test]
    fn mixed_grammar() {
        agree(
            r#"{"start":"S","terminals":["a","b"],"productions":[
            {"lhs":"S","rhs":["A","b","A"]},{"lhs":"S","rhs":["S","a"]},{"lhs":"A","rhs":[]},
            {"lhs":"A","rhs":["A","a"]},{"lhs":"A","rhs":["B"]},{"lhs":"B","rhs":["S"]},{"lhs":"B","rhs":["b","B","a"]}]}"#,
            7,
        );
    }

    #[test]
    fn already_gnf() {
        agree(r#"{"start":"S","terminals":["a","b"],"productions":[{"lhs":"S","rhs":["a","S","B"]},{"lhs":"S","rhs":["a"]},{"lhs":"B","rhs":["b"]}]}"#, 7);
    }

    #[test]
    fn empty_word_rejected() {
        let g = Grammar::from_json(r#"{"start":"S","terminals":["a"],"productions":[{"lhs":"S","rhs":[]},{"lhs":"S","rhs":["a"]}]}"#).unwrap();
        assert!(matches!(to_gnf(&g), Err(GrammarError::EmptyWordInLanguage)));
    }
}
