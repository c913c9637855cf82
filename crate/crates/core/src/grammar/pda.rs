//! Pushdown automata accepting by empty stack, and their conversion into
//! context-free grammars.

use std::collections::{HashMap, HashSet, VecDeque};

use super::{Grammar, GrammarBuilder, Symbol};

/// `(from, input, top) -> (to, push)`; `push[0]` becomes the new top.
/// `input == None` is an ε-move.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Transition {
    pub from: usize,
    pub input: Option<usize>,
    pub top: usize,
    pub to: usize,
    pub push: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pda {
    pub terminals: Vec<String>,
    pub states: usize,
    pub stack_symbols: usize,
    pub start: usize,
    pub bottom: usize,
    pub transitions: Vec<Transition>,
}

impl Pda {
    pub fn new(terminals: Vec<String>, states: usize, stack_symbols: usize, start: usize, bottom: usize) -> Self {
        assert!(start < states && bottom < stack_symbols);
        Pda { terminals, states, stack_symbols, start, bottom, transitions: Vec::new() }
    }

    pub fn add(&mut self, from: usize, input: Option<usize>, top: usize, to: usize, push: Vec<usize>) {
        assert!(from < self.states && to < self.states && top < self.stack_symbols);
        assert!(input.map_or(true, |a| a < self.terminals.len()));
        assert!(push.iter().all(|&y| y < self.stack_symbols));
        self.transitions.push(Transition { from, input, top, to, push });
    }

    /// Every transition reads a letter.
    pub fn is_real_time(&self) -> bool {
        self.transitions.iter().all(|t| t.input.is_some())
    }

    /// Breadth-first search over all runs. Exact whenever no ε-move pushes
    /// more than one symbol; otherwise stacks taller than a generous bound
    /// are pruned.
    pub fn accepts(&self, word: &[usize]) -> bool {
        let grow = self.transitions.iter().map(|t| t.push.len()).max().unwrap_or(0);
        let eps_grows = self.transitions.iter().any(|t| t.input.is_none() && t.push.len() > 1);
        let cap = if eps_grows {
            (word.len() + 1) * grow.max(1) * (self.states * self.stack_symbols + 1)
        } else {
            1 + word.len() * grow.saturating_sub(1).max(1)
        };
        self.accepts_bounded(word, cap)
    }

    pub fn accepts_bounded(&self, word: &[usize], max_stack: usize) -> bool {
        let mut by_key: HashMap<(usize, usize), Vec<&Transition>> = HashMap::new();
        for t in &self.transitions {
            by_key.entry((t.from, t.top)).or_default().push(t);
        }
        let init = (self.start, 0usize, vec![self.bottom]);
        let mut seen = HashSet::new();
        let mut queue = VecDeque::new();
        seen.insert(init.clone());
        queue.push_back(init);
        while let Some((q, pos, stack)) = queue.pop_front() {
            let Some(&top) = stack.last() else {
                if pos == word.len() {
                    return true;
                }
                continue;
            };
            for t in by_key.get(&(q, top)).into_iter().flatten() {
                let next_pos = match t.input {
                    None => pos,
                    Some(a) if pos < word.len() && word[pos] == a => pos + 1,
                    Some(_) => continue,
                };
                let mut s = stack.clone();
                s.pop();
                s.extend(t.push.iter().rev());
                if s.len() > max_stack {
                    continue;
                }
                let c = (t.to, next_pos, s);
                if seen.insert(c.clone()) {
                    queue.push_back(c);
                }
            }
        }
        false
    }
}

/// Triple construction: `[p,X,q]` derives the words that take the automaton
/// from `p` with `X` on top to `q` with `X` popped. Only triples that can
/// actually be completed are generated (computed by saturation), and the
/// result is trimmed. Real-time automata give Greibach-form grammars.
pub fn pda_to_cfg(p: &Pda) -> Grammar {
    let ts = &p.transitions;
    // ends[(s, Y)]: states q with [s,Y,q] productive.
    let mut ends: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    let mut triples: HashSet<(usize, usize, usize)> = HashSet::new();
    let mut waiting: HashMap<(usize, usize), Vec<(usize, usize)>> = HashMap::new();
    let mut items: HashSet<(usize, usize, usize)> = HashSet::new();
    let mut work: Vec<(usize, usize, usize)> = Vec::new();
    for (i, t) in ts.iter().enumerate() {
        if items.insert((i, 0, t.to)) {
            work.push((i, 0, t.to));
        }
    }
    while let Some((ti, k, s)) = work.pop() {
        let t = &ts[ti];
        if k == t.push.len() {
            if triples.insert((t.from, t.top, s)) {
                ends.entry((t.from, t.top)).or_default().push(s);
                for &(tj, kj) in waiting.get(&(t.from, t.top)).into_iter().flatten() {
                    if items.insert((tj, kj + 1, s)) {
                        work.push((tj, kj + 1, s));
                    }
                }
            }
            continue;
        }
        let key = (s, t.push[k]);
        waiting.entry(key).or_default().push((ti, k));
        for &e in ends.get(&key).into_iter().flatten() {
            if items.insert((ti, k + 1, e)) {
                work.push((ti, k + 1, e));
            }
        }
    }

    let mut b = GrammarBuilder::new(p.terminals.clone());
    let start = b.nonterminal("S0");
    let mut names: HashMap<(usize, usize, usize), usize> = HashMap::new();
    let mut nt = |b: &mut GrammarBuilder, tr: (usize, usize, usize)| {
        *names.entry(tr).or_insert_with(|| b.nonterminal(&format!("N{}_{}_{}", tr.0, tr.1, tr.2)))
    };
    for t in ts {
        let mut chains: Vec<(usize, Vec<Symbol>)> = vec![(t.to, Vec::new())];
        for &y in &t.push {
            let mut next = Vec::new();
            for (s, rhs) in chains {
                for &e in ends.get(&(s, y)).into_iter().flatten() {
                    let mut r = rhs.clone();
                    r.push(Symbol::N(nt(&mut b, (s, y, e))));
                    next.push((e, r));
                }
            }
            chains = next;
        }
        for (q, tail) in chains {
            let mut rhs: Vec<Symbol> = t.input.map(Symbol::T).into_iter().collect();
            rhs.extend(tail);
            let lhs = nt(&mut b, (t.from, t.top, q));
            if t.from == p.start && t.top == p.bottom {
                b.add(start, rhs.clone());
            }
            b.add(lhs, rhs);
        }
    }
    b.finish(start).expect("triple grammars are well-formed").trim()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::member;

    fn names() -> Vec<String> {
        vec!["a".into(), "b".into()]
    }

    /// { a^n b^n | n >= 1 }, real-time.
    fn anbn() -> Pda {
        let (z, x) = (0, 1);
        let mut p = Pda::new(names(), 2, 2, 0, z);
        p.add(0, Some(0), z, 0, vec![x, z]);
        p.add(0, Some(0), x, 0, vec![x, x]);
        p.add(0, Some(1), x, 1, vec![]);
        p.add(1, Some(1), x, 1, vec![]);
        p.add(1, None, z, 1, vec![]);
        p
    }

    fn words(max: usize) -> Vec<Vec<usize>> {
        let mut out = vec![vec![]];
        let mut layer = vec![vec![]];
        for _ in 0..max {
            layer = layer
                .iter()
                .flat_map(|w: &Vec<usize>| (0..2).map(move |a| [w.clone(), vec![a]].concat()))
                .collect();
            out.extend(layer.iter().cloned());
        }
        out
    }

    #[test]
    fn anbn_grammar() {
        let p = anbn();
        let g = pda_to_cfg(&p);
        for w in words(8) {
            let n = w.len() / 2;
            let expected = n >= 1 && w.len() == 2 * n && w[..n].iter().all(|&a| a == 0) && w[n..].iter().all(|&a| a == 1);
            assert_eq!(p.accepts(&w), expected, "{w:?}");
            assert_eq!(member(&g, &w).unwrap(), expected, "{w:?}");
        }
    }

    #[test]
    fn empty_and_universal() {
        let mut empty = Pda::new(names(), 1, 1, 0, 0);
        empty.add(0, Some(0), 0, 0, vec![0]);
        let g = pda_to_cfg(&empty);
        assert!(words(6).iter().all(|w| !member(&g, w).unwrap()));

        let mut plus = Pda::new(names(), 1, 1, 0, 0);
        for a in 0..2 {
            plus.add(0, Some(a), 0, 0, vec![0]);
            plus.add(0, Some(a), 0, 0, vec![]);
        }
        let g = pda_to_cfg(&plus);
        assert!(g.is_gnf());
        for w in words(6) {
            assert_eq!(member(&g, &w).unwrap(), !w.is_empty());
        }
    }
}
