//! Languages of words that are not the halting protocol of a machine.
//!
//! All automata here read words with the leading `#` already removed, so a
//! "block" is either the segment before the first `#` or a segment between
//! two consecutive `#`s.

use std::collections::HashMap;

use super::nfa::Nfa;
use super::pda::Pda;
use crate::turing::{Move, Sym, TuringMachine};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegularClass {
    /// 1.1: contains the cycling state.
    ContainsCycling,
    /// 1.2: some complete block is not a configuration code.
    BadBlock,
    /// 1.4: disagrees with `k0#` (the initial code followed by `#`) at some
    /// position, i.e. starts with a wrong first block or a wrong prefix of it.
    WrongStart,
    /// 2.1: nonempty and not ending with `#`.
    OpenEnd,
    /// 2.2: ends with `k#` where `k` is a whole block that has a successor.
    ResumableEnd,
    /// 3: does not start with `#`.
    NoLeadingSeparator,
}

impl RegularClass {
    pub const ALL: [RegularClass; 6] = [
        RegularClass::ContainsCycling,
        RegularClass::BadBlock,
        RegularClass::WrongStart,
        RegularClass::OpenEnd,
        RegularClass::ResumableEnd,
        RegularClass::NoLeadingSeparator,
    ];

    pub fn label(self) -> &'static str {
        match self {
            RegularClass::ContainsCycling => "1.1",
            RegularClass::BadBlock => "1.2",
            RegularClass::WrongStart => "1.4",
            RegularClass::OpenEnd => "2.1",
            RegularClass::ResumableEnd => "2.2",
            RegularClass::NoLeadingSeparator => "3",
        }
    }

    pub fn from_label(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.label() == s)
    }
}

/// Finite automaton for one of the regular classes.
pub fn class_regular(m: &TuringMachine, x: &[Sym], which: RegularClass) -> Nfa {
    let hash = m.separator();
    let mut n = Nfa::new(m.sigma_len());
    let s0 = n.start();
    let all = |_: usize| true;
    let not_hash = move |a: usize| a != hash;
    match which {
        RegularClass::ContainsCycling => {
            let acc = n.add_state(true);
            n.add_where(s0, s0, all);
            n.add(s0, m.cycling(), acc);
            n.add_where(acc, acc, all);
        }
        RegularClass::BadBlock => {
            // s0: at a block start; mid: skipping a block
            let mid = n.add_state(false);
            let acc = n.add_state(true);
            let none = n.add_state(false); // no state yet
            let just = n.add_state(false); // one state, rightmost so far
            let one = n.add_state(false); // one state, followed by tape
            let many = n.add_state(false); // two or more states
            n.add(s0, hash, s0);
            n.add_where(s0, mid, not_hash);
            n.add_where(mid, mid, not_hash);
            n.add(mid, hash, s0);
            n.add(s0, hash, acc); // empty block
            for a in m.tape_symbols() {
                n.add(s0, a, none);
                n.add(none, a, none);
                n.add(just, a, one);
                n.add(one, a, one);
                n.add(many, a, many);
            }
            for q in m.states() {
                n.add(s0, q, just);
                n.add(none, q, just);
                n.add(just, q, many);
                n.add(one, q, many);
                n.add(many, q, many);
            }
            for bad in [none, just, many] {
                n.add(bad, hash, acc);
            }
            n.add_where(acc, acc, all);
        }
        RegularClass::WrongStart => {
            let mut target = m.initial_configuration(x).code();
            target.push(hash);
            let acc = n.add_state(true);
            let mut cur = s0;
            for (i, &t) in target.iter().enumerate() {
                n.add_where(cur, acc, |a| a != t);
                if i + 1 < target.len() {
                    let next = n.add_state(false);
                    n.add(cur, t, next);
                    cur = next;
                }
            }
            n.add_where(acc, acc, all);
        }
        RegularClass::OpenEnd => {
            let acc = n.add_state(true);
            n.add(s0, hash, s0);
            n.add_where(s0, acc, not_hash);
            n.add_where(acc, acc, not_hash);
            n.add(acc, hash, s0);
        }
        RegularClass::ResumableEnd => {
            let mid = n.add_state(false);
            let pre = n.add_state(false);
            let post = n.add_state(false);
            let fin = n.add_state(true);
            n.add(s0, hash, s0);
            n.add_where(s0, mid, not_hash);
            n.add_where(mid, mid, not_hash);
            n.add(mid, hash, s0);
            for a in m.tape_symbols() {
                n.add(s0, a, pre);
                n.add(pre, a, pre);
                n.add(post, a, post);
            }
            for q in m.states() {
                let at_first = n.add_state(false);
                let later = n.add_state(false);
                n.add(s0, q, at_first);
                n.add(pre, q, later);
                for a in m.tape_symbols() {
                    if let Some(act) = m.rule(q, a) {
                        n.add(later, a, post);
                        if act.mv != Move::L {
                            n.add(at_first, a, post);
                        }
                    }
                }
            }
            n.add(post, hash, fin);
        }
        RegularClass::NoLeadingSeparator => {
            let acc = n.add_state(true);
            n.add_where(s0, acc, not_hash);
            n.add_where(acc, acc, all);
        }
    }
    n
}

const Z: usize = 0;
const X: usize = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum St {
    Start,
    Skip,
    /// Reading the block `k` before the compared position; `prev` is the last
    /// letter read and `grows` says the successor would append a blank if
    /// the block ended now.
    Count { seen: bool, prev: Sym, grows: bool },
    /// The letter at the compared position is the state `q`.
    AtState { before: Option<Sym>, q: Sym },
    /// The letter at the compared position is the tape letter `c`.
    AtTape { seen: bool, c: Sym },
    /// As `AtTape`, and the next letter is the state `q`.
    AtTapeThenState { c: Sym, q: Sym },
    /// Rest of `k`; `target` is the successor letter at the compared position.
    Rest { seen: bool, last_state: bool, target: Sym },
    /// Skipping the compared prefix of the next block.
    Compare { target: Sym },
    /// Mismatch found; reading whatever follows.
    Drain,
    Done,
    /// Block without successor: before its state, at its state, after it,
    /// and just past its closing `#`.
    HaltPre,
    HaltState { q: Sym, first: bool },
    HaltPost,
    HaltHash,
}

struct Builder<'m> {
    m: &'m TuringMachine,
    ids: HashMap<St, usize>,
    order: Vec<St>,
    edges: Vec<(St, Sym, usize, St, Vec<usize>)>,
}

impl Builder<'_> {
    fn id(&mut self, s: St) -> usize {
        if let Some(&i) = self.ids.get(&s) {
            return i;
        }
        self.ids.insert(s, self.order.len());
        self.order.push(s);
        self.order.len() - 1
    }

    /// Transition that leaves the stack as it is, for either top.
    fn keep(&mut self, from: St, a: Sym, to: St) {
        self.id(to);
        for top in [Z, X] {
            self.edges.push((from, a, top, to, vec![top]));
        }
    }

    fn push_x(&mut self, from: St, a: Sym, to: St) {
        self.id(to);
        for top in [Z, X] {
            self.edges.push((from, a, top, to, vec![X, top]));
        }
    }

    /// Letter of the successor at position `p` of `k`, given `k[p-1]`,
    /// `k[p]`, `k[p+1]`, `k[p+2]` where they matter. `None` when the rule
    /// needed is missing (then `k` has no successor).
    fn successor_letter(&self, before: Option<Sym>, cur: Sym, next: Option<Sym>, next2: Option<Sym>) -> Option<Sym> {
        let m = self.m;
        if let Some(q) = before.filter(|&b| m.is_state(b)) {
            let act = m.rule(q, cur)?;
            return Some(match act.mv {
                Move::R => act.to,
                Move::N | Move::L => act.write,
            });
        }
        if m.is_state(cur) {
            let act = m.rule(cur, next?)?;
            return match act.mv {
                Move::N => Some(act.to),
                Move::R => Some(act.write),
                Move::L => before,
            };
        }
        if let (Some(q), Some(a)) = (next.filter(|&n| m.is_state(n)), next2) {
            if let Some(act) = m.rule(q, a) {
                if act.mv == Move::L {
                    return Some(act.to);
                }
            }
        }
        Some(cur)
    }
}

/// Pushdown automaton for words with a factor `k#v` (at the word start or
/// after a `#`) where `k` is a configuration code, `v` is nonempty, and
/// either `k` has no successor or `v` and `succ(k)#` differ at some position
/// they both have. Every transition reads a letter.
///
/// The automaton guesses the position `p`, pushes one marker per letter of
/// `k` before `p`, works out the successor letter there from a window of at
/// most four letters of `k`, pops one marker per letter of `v` and finally
/// reads a letter different from the expected one.
pub fn mismatch_pda(m: &TuringMachine) -> Pda {
    let hash = m.separator();
    let tape: Vec<Sym> = m.tape_symbols().collect();
    let states: Vec<Sym> = m.states().collect();
    let letters: Vec<Sym> = (0..m.sigma_len()).collect();
    let mut b = Builder { m, ids: HashMap::new(), order: Vec::new(), edges: Vec::new() };
    b.id(St::Start);
    b.id(St::Done);

    // explore reachable states breadth first
    let mut i = 0;
    while i < b.order.len() {
        let st = b.order[i];
        i += 1;
        match st {
            St::Start | St::Skip => {
                b.keep(st, hash, St::Start);
                for &c in letters.iter().filter(|&&c| c != hash) {
                    b.keep(st, c, St::Skip);
                }
                if st == St::Skip {
                    continue;
                }
                for &c in &tape {
                    b.push_x(st, c, St::Count { seen: false, prev: c, grows: false });
                    b.keep(st, c, St::AtTape { seen: false, c });
                    b.keep(st, c, St::HaltPre);
                }
                for &q in &states {
                    b.push_x(st, q, St::Count { seen: true, prev: q, grows: false });
                    b.keep(st, q, St::AtState { before: None, q });
                    b.keep(st, q, St::HaltState { q, first: true });
                }
            }
            St::Count { seen, prev, grows } => {
                let prev_state = m.is_state(prev);
                for &c in &tape {
                    let grows = prev_state && m.rule(prev, c).is_some_and(|a| a.mv == Move::R);
                    b.push_x(st, c, St::Count { seen, prev: c, grows });
                    if prev_state {
                        if let Some(t) = b.successor_letter(Some(prev), c, None, None) {
                            b.keep(st, c, St::Rest { seen: true, last_state: false, target: t });
                        }
                    } else {
                        b.keep(st, c, St::AtTape { seen, c });
                    }
                }
                if !seen && !prev_state {
                    for &q in &states {
                        b.push_x(st, q, St::Count { seen: true, prev: q, grows: false });
                        b.keep(st, q, St::AtState { before: Some(prev), q });
                    }
                }
                if seen && !prev_state {
                    // the block ends here: compare at |k| (and |k|+1 if it grows)
                    if grows {
                        b.keep(st, hash, St::Compare { target: m.blank() });
                        b.push_x(st, hash, St::Compare { target: hash });
                    } else {
                        b.keep(st, hash, St::Compare { target: hash });
                    }
                }
            }
            St::AtState { before, q } => {
                for &d in &tape {
                    if let Some(t) = b.successor_letter(before, q, Some(d), None) {
                        b.keep(st, d, St::Rest { seen: true, last_state: false, target: t });
                    }
                }
            }
            St::AtTape { seen, c } => {
                if seen {
                    b.keep(st, hash, St::Compare { target: c });
                }
                for &d in &tape {
                    b.keep(st, d, St::Rest { seen, last_state: false, target: c });
                }
                if !seen {
                    for &q in &states {
                        b.keep(st, q, St::AtTapeThenState { c, q });
                    }
                }
            }
            St::AtTapeThenState { c, q } => {
                for &e in &tape {
                    if let Some(t) = b.successor_letter(None, c, Some(q), Some(e)) {
                        if m.rule(q, e).is_some() {
                            b.keep(st, e, St::Rest { seen: true, last_state: false, target: t });
                        }
                    }
                }
            }
            St::Rest { seen, last_state, target } => {
                if seen && !last_state {
                    b.keep(st, hash, St::Compare { target });
                }
                for &d in &tape {
                    b.keep(st, d, St::Rest { seen, last_state: false, target });
                }
                if !seen {
                    for &q in &states {
                        b.keep(st, q, St::Rest { seen: true, last_state: true, target });
                    }
                }
            }
            St::Compare { target } => {
                for &c in &letters {
                    b.edges.push((st, c, X, st, vec![]));
                    if c != target {
                        b.id(St::Drain);
                        b.edges.push((st, c, Z, St::Done, vec![]));
                        b.edges.push((st, c, Z, St::Drain, vec![Z]));
                    }
                }
            }
            St::Drain | St::HaltHash => {
                for &c in &letters {
                    b.id(St::Drain);
                    b.edges.push((st, c, Z, St::Done, vec![]));
                    b.edges.push((st, c, Z, St::Drain, vec![Z]));
                }
            }
            St::HaltPre => {
                for &c in &tape {
                    b.keep(st, c, St::HaltPre);
                }
                for &q in &states {
                    b.keep(st, q, St::HaltState { q, first: false });
                }
            }
            St::HaltState { q, first } => {
                for &a in &tape {
                    let stuck = match m.rule(q, a) {
                        None => true,
                        Some(act) => first && act.mv == Move::L,
                    };
                    if stuck {
                        b.keep(st, a, St::HaltPost);
                    }
                }
            }
            St::HaltPost => {
                for &c in &tape {
                    b.keep(st, c, St::HaltPost);
                }
                b.keep(st, hash, St::HaltHash);
            }
            St::Done => {}
        }
    }

    let mut pda = Pda::new(m.names().to_vec(), b.order.len(), 2, b.ids[&St::Start], Z);
    for (from, a, top, to, push) in std::mem::take(&mut b.edges) {
        let (f, t) = (b.ids[&from], b.ids[&to]);
        pda.add(f, Some(a), top, t, push);
    }
    pda
}
