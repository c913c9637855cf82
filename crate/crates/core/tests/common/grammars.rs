//! Random grammars and automata, with naive membership oracles.
#![allow(dead_code)]

use std::collections::{HashSet, VecDeque};

use actlogic::grammar::pda::Pda;
use actlogic::grammar::{Grammar, GrammarBuilder, Symbol};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

const LETTERS: [&str; 3] = ["a", "b", "c"];
const NONTERMINALS: [&str; 4] = ["S", "A", "B", "C"];

/// All words over `letters` letters of length `1..=max`.
pub fn words(letters: usize, max: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut layer: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..max {
        layer = layer.iter().flat_map(|w| (0..letters).map(move |a| [w.clone(), vec![a]].concat())).collect();
        out.extend(layer.iter().cloned());
    }
    out
}

/// Random Greibach grammar: at most four nonterminals, at most eight
/// productions, at most three letters, every letter leading some
/// production. Roughly one in four is built around `S -> x | x S` so that
/// total grammars occur.
pub fn random_gnf(r: &mut ChaCha8Rng) -> Grammar {
    let k = r.gen_range(1..=3);
    let n = r.gen_range(1..=4);
    let mut b = GrammarBuilder::new(LETTERS[..k].iter().map(|s| s.to_string()).collect());
    let nts: Vec<usize> = NONTERMINALS[..n].iter().map(|s| b.nonterminal(s)).collect();
    let mut count = 0;
    let add = |b: &mut GrammarBuilder, lhs: usize, rhs: Vec<Symbol>, count: &mut usize| {
        b.add(lhs, rhs);
        *count += 1;
    };
    if r.gen_bool(0.25) && 2 * k <= 8 {
        for a in 0..k {
            add(&mut b, nts[0], vec![Symbol::T(a)], &mut count);
            add(&mut b, nts[0], vec![Symbol::T(a), Symbol::N(nts[0])], &mut count);
        }
    } else {
        for a in 0..k {
            let lhs = nts[r.gen_range(0..n)];
            add(&mut b, lhs, vec![Symbol::T(a)], &mut count);
        }
    }
    let extra = r.gen_range(0..=8 - count);
    for _ in 0..extra {
        let lhs = nts[r.gen_range(0..n)];
        let mut rhs = vec![Symbol::T(r.gen_range(0..k))];
        for _ in 0..r.gen_range(0..=2) {
            rhs.push(Symbol::N(nts[r.gen_range(0..n)]));
        }
        add(&mut b, lhs, rhs, &mut count);
    }
    b.finish(nts[0]).unwrap()
}

/// Random context-free grammar with ε-, unit and left-recursive
/// productions whose start symbol is not nullable.
pub fn random_cfg(r: &mut ChaCha8Rng) -> Grammar {
    loop {
        let k = r.gen_range(1..=2);
        let n = r.gen_range(1..=4);
        let mut b = GrammarBuilder::new(LETTERS[..k].iter().map(|s| s.to_string()).collect());
        let nts: Vec<usize> = NONTERMINALS[..n].iter().map(|s| b.nonterminal(s)).collect();
        for _ in 0..r.gen_range(2..=7) {
            let lhs = nts[r.gen_range(0..n)];
            let len = r.gen_range(0..=3);
            let rhs = (0..len)
                .map(|_| if r.gen_bool(0.5) { Symbol::T(r.gen_range(0..k)) } else { Symbol::N(nts[r.gen_range(0..n)]) })
                .collect();
            b.add(lhs, rhs);
        }
        let g = b.finish(nts[0]).unwrap();
        if !g.nullable()[g.start()] {
            return g;
        }
    }
}

/// `derives[a]` for every nonterminal `a`: does it derive `w`? Computed by
/// a fixpoint over all spans, so ε- and unit productions need no special
/// treatment.
pub fn derives_all(g: &Grammar, w: &[usize]) -> Vec<bool> {
    let n = w.len();
    let nts = g.nonterminals().len();
    // table[i][j][a]: a derives w[i..j]
    let mut table = vec![vec![vec![false; nts]; n + 1]; n + 1];
    loop {
        let mut changed = false;
        for i in 0..=n {
            for j in i..=n {
                for p in g.productions() {
                    if table[i][j][p.lhs] {
                        continue;
                    }
                    if spans(&table, w, &p.rhs, i, j) {
                        table[i][j][p.lhs] = true;
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            return table[0][n].clone();
        }
    }
}

fn spans(table: &[Vec<Vec<bool>>], w: &[usize], rhs: &[Symbol], i: usize, j: usize) -> bool {
    match rhs.split_first() {
        None => i == j,
        Some((&Symbol::T(t), rest)) => i < j && w[i] == t && spans(table, w, rest, i + 1, j),
        Some((&Symbol::N(a), rest)) => (i..=j).any(|m| table[i][m][a] && spans(table, w, rest, m, j)),
    }
}

pub fn derives(g: &Grammar, a: usize, w: &[usize]) -> bool {
    derives_all(g, w)[a]
}

/// Random pushdown automaton over two letters, possibly with ε-moves that
/// pop or replace the top.
pub fn random_pda(r: &mut ChaCha8Rng) -> Pda {
    let states = r.gen_range(1..=3);
    let stack = r.gen_range(1..=2);
    let mut p = Pda::new(vec!["a".into(), "b".into()], states, stack, 0, 0);
    for _ in 0..r.gen_range(2..=7) {
        let from = r.gen_range(0..states);
        let to = r.gen_range(0..states);
        let top = r.gen_range(0..stack);
        let eps = r.gen_bool(0.2);
        let input = if eps { None } else { Some(r.gen_range(0..2)) };
        let len = if eps { r.gen_range(0..=1) } else { r.gen_range(0..=2) };
        let push = (0..len).map(|_| r.gen_range(0..stack)).collect();
        p.add(from, input, top, to, push);
    }
    p
}

/// Acceptance by empty stack, by breadth-first search over configurations.
/// ε-moves never grow the stack in [`random_pda`], so stacks stay below
/// `1 + |w|` and the search is finite.
pub fn pda_accepts(p: &Pda, w: &[usize]) -> bool {
    let start = (p.start, 0usize, vec![p.bottom]);
    let mut seen = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([start]);
    while let Some((q, pos, stack)) = queue.pop_front() {
        let Some(&top) = stack.last() else {
            if pos == w.len() {
                return true;
            }
            continue;
        };
        for t in p.transitions.iter().filter(|t| t.from == q && t.top == top) {
            let next = match t.input {
                None => pos,
                Some(a) if pos < w.len() && w[pos] == a => pos + 1,
                Some(_) => continue,
            };
            let mut s = stack.clone();
            s.pop();
            s.extend(t.push.iter().rev());
            if s.len() > w.len() + 2 {
                continue;
            }
            let c = (t.to, next, s);
            if seen.insert(c.clone()) {
                queue.push_back(c);
            }
        }
    }
    false
}
