//! Nondeterministic finite automata over letter indices.

use std::collections::BTreeSet;

use super::{Grammar, GrammarBuilder, Symbol};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Nfa {
    letters: usize,
    start: usize,
    accepting: Vec<bool>,
    trans: Vec<Vec<(usize, usize)>>,
}

impl Nfa {
    /// An automaton with a single non-accepting start state `0`.
    pub fn new(letters: usize) -> Self {
        Nfa { letters, start: 0, accepting: vec![false], trans: vec![Vec::new()] }
    }

    pub fn start(&self) -> usize {
        self.start
    }
    pub fn letters(&self) -> usize {
        self.letters
    }
    pub fn len(&self) -> usize {
        self.accepting.len()
    }
    pub fn is_empty(&self) -> bool {
        self.accepting.is_empty()
    }

    pub fn add_state(&mut self, accepting: bool) -> usize {
        self.accepting.push(accepting);
        self.trans.push(Vec::new());
        self.accepting.len() - 1
    }

    pub fn set_accepting(&mut self, q: usize, accepting: bool) {
        self.accepting[q] = accepting;
    }

    pub fn add(&mut self, from: usize, letter: usize, to: usize) {
        assert!(letter < self.letters, "letter out of range");
        if !self.trans[from].contains(&(letter, to)) {
            self.trans[from].push((letter, to));
        }
    }

    /// Adds transitions on every letter accepted by `pred`.
    pub fn add_where(&mut self, from: usize, to: usize, pred: impl Fn(usize) -> bool) {
        for a in 0..self.letters {
            if pred(a) {
                self.add(from, a, to);
            }
        }
    }

    pub fn accepts(&self, word: &[usize]) -> bool {
        let mut cur: BTreeSet<usize> = [self.start].into();
        for &a in word {
            cur = cur
                .iter()
                .flat_map(|&q| self.trans[q].iter().filter(move |t| t.0 == a).map(|t| t.1))
                .collect();
            if cur.is_empty() {
                return false;
            }
        }
        cur.iter().any(|&q| self.accepting[q])
    }

    /// Right-linear grammar in Greibach form for the nonempty words accepted:
    /// `Pq -> a Pr` for each transition and `Pq -> a` when `r` accepts.
    pub fn to_grammar(&self, terminals: &[String]) -> Grammar {
        assert_eq!(terminals.len(), self.letters);
        let mut b = GrammarBuilder::new(terminals.to_vec());
        let ids: Vec<usize> = (0..self.len()).map(|q| b.nonterminal(&format!("P{q}"))).collect();
        for q in 0..self.len() {
            for &(a, r) in &self.trans[q] {
                b.add(ids[q], vec![Symbol::T(a), Symbol::N(ids[r])]);
                if self.accepting[r] {
                    b.add(ids[q], vec![Symbol::T(a)]);
                }
            }
        }
        b.finish(ids[self.start]).expect("automaton grammars are well-formed").trim()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::member;

    #[test]
    fn automaton_and_grammar_agree() {
        // words over {a, b} ending in "ab"
        let mut n = Nfa::new(2);
        let s1 = n.add_state(false);
        let s2 = n.add_state(true);
        n.add_where(0, 0, |_| true);
        n.add(0, 0, s1);
        n.add(s1, 1, s2);
        let names = vec!["a".to_string(), "b".to_string()];
        let g = n.to_grammar(&names);
        assert!(g.is_gnf());
        for len in 0..7 {
            for code in 0..(1usize << len) {
                let w: Vec<usize> = (0..len).map(|i| (code >> i) & 1).collect();
                let expected = w.ends_with(&[0, 1]);
                assert_eq!(n.accepts(&w), expected, "{w:?}");
                assert_eq!(member(&g, &w).unwrap(), expected, "{w:?}");
            }
        }
    }
}
