//! Membership: an incremental Earley recognizer for arbitrary grammars, and
//! span-based parse trees for Greibach-form grammars.

use std::collections::{HashMap, HashSet};

use super::{Grammar, GrammarError, Symbol};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct Item {
    prod: usize,
    dot: usize,
    origin: usize,
}

/// Earley recognizer that can be extended and shrunk one letter at a time.
pub struct Earley<'g> {
    g: &'g Grammar,
    root: usize,
    by_lhs: Vec<Vec<usize>>,
    nullable: Vec<bool>,
    sets: Vec<Vec<Item>>,
    seen: Vec<HashSet<Item>>,
    // waiting[i][B]: items of set i whose next symbol is B
    waiting: Vec<HashMap<usize, Vec<Item>>>,
}

impl<'g> Earley<'g> {
    pub fn new(g: &'g Grammar, root: usize) -> Self {
        let mut by_lhs = vec![Vec::new(); g.nonterminals().len()];
        for (i, p) in g.productions().iter().enumerate() {
            by_lhs[p.lhs].push(i);
        }
        let mut e = Earley {
            g,
            root,
            by_lhs,
            nullable: g.nullable(),
            sets: Vec::new(),
            seen: Vec::new(),
            waiting: Vec::new(),
        };
        e.open_set();
        let virt = Item { prod: g.productions().len(), dot: 0, origin: 0 };
        e.close(vec![virt]);
        e
    }

    fn next(&self, it: Item) -> Option<Symbol> {
        match self.g.productions().get(it.prod) {
            Some(p) => p.rhs.get(it.dot).copied(),
            None => (it.dot == 0).then_some(Symbol::N(self.root)),
        }
    }

    fn lhs(&self, it: Item) -> Option<usize> {
        self.g.productions().get(it.prod).map(|p| p.lhs)
    }

    fn open_set(&mut self) {
        self.sets.push(Vec::new());
        self.seen.push(HashSet::new());
        self.waiting.push(HashMap::new());
    }

    fn close(&mut self, mut work: Vec<Item>) {
        let i = self.sets.len() - 1;
        while let Some(it) = work.pop() {
            if !self.seen[i].insert(it) {
                continue;
            }
            self.sets[i].push(it);
            match self.next(it) {
                Some(Symbol::N(b)) => {
                    self.waiting[i].entry(b).or_default().push(it);
                    for &p in &self.by_lhs[b] {
                        work.push(Item { prod: p, dot: 0, origin: i });
                    }
                    if self.nullable[b] {
                        work.push(Item { dot: it.dot + 1, ..it });
                    }
                }
                Some(Symbol::T(_)) => {}
                None => {
                    if let Some(lhs) = self.lhs(it) {
                        if let Some(ws) = self.waiting[it.origin].get(&lhs) {
                            work.extend(ws.iter().map(|w| Item { dot: w.dot + 1, ..*w }));
                        }
                    }
                }
            }
        }
    }

    /// Number of letters consumed so far.
    pub fn len(&self) -> usize {
        self.sets.len() - 1
    }
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Extends the input by one letter; returns whether any item survived.
    pub fn push(&mut self, a: usize) -> bool {
        let i = self.sets.len() - 1;
        let moved: Vec<Item> = self.sets[i]
            .iter()
            .filter(|&&it| self.next(it) == Some(Symbol::T(a)))
            .map(|it| Item { dot: it.dot + 1, ..*it })
            .collect();
        self.open_set();
        let alive = !moved.is_empty();
        self.close(moved);
        alive
    }

    pub fn pop(&mut self) {
        assert!(self.sets.len() > 1, "nothing to pop");
        self.sets.pop();
        self.seen.pop();
        self.waiting.pop();
    }

    /// Whether the letters pushed so far form a word of the root symbol.
    pub fn accepts(&self) -> bool {
        let virt = Item { prod: self.g.productions().len(), dot: 1, origin: 0 };
        self.seen.last().unwrap().contains(&virt)
    }

    /// Whether some extension of the current input could still be accepted
    /// (for trimmed grammars).
    pub fn viable(&self) -> bool {
        !self.sets.last().unwrap().is_empty()
    }
}

/// Membership of `w` in the language of the start symbol.
pub fn member(g: &Grammar, w: &[usize]) -> Result<bool, GrammarError> {
    member_from(g, g.start(), w)
}

/// Membership of `w` in the language of nonterminal `root`.
pub fn member_from(g: &Grammar, root: usize, w: &[usize]) -> Result<bool, GrammarError> {
    g.check_word(w)?;
    if root >= g.nonterminals().len() {
        return Err(GrammarError::Invalid(format!("no nonterminal with index {root}")));
    }
    let mut e = Earley::new(g, root);
    for &a in w {
        if !e.push(a) {
            return Ok(false);
        }
    }
    Ok(e.accepts())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Totality {
    AllGenerated,
    /// Shortest missing word (lexicographically first among the shortest).
    Counterexample(Vec<usize>),
}

/// Checks every nonempty word of length at most `n`.
pub fn total_up_to(g: &Grammar, n: usize) -> Totality {
    let letters = g.terminals().len();
    let mut e = Earley::new(g, g.start());
    let mut best: Option<Vec<usize>> = None;
    let mut word = Vec::new();
    fn go(e: &mut Earley, word: &mut Vec<usize>, letters: usize, n: usize, best: &mut Option<Vec<usize>>) {
        for a in 0..letters {
            if best.as_ref().is_some_and(|b| word.len() + 1 >= b.len()) {
                return;
            }
            e.push(a);
            word.push(a);
            if !e.accepts() {
                *best = Some(word.clone());
            } else if word.len() < n {
                go(e, word, letters, n, best);
            }
            word.pop();
            e.pop();
        }
    }
    if n > 0 {
        go(&mut e, &mut word, letters, n, &mut best);
    }
    match best {
        Some(w) => Totality::Counterexample(w),
        None => Totality::AllGenerated,
    }
}

/// Derivation tree for a Greibach-form grammar: the production used and one
/// subtree per trailing nonterminal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseTree {
    pub production: usize,
    pub children: Vec<ParseTree>,
}

impl ParseTree {
    /// Number of letters covered, which equals the number of nodes.
    pub fn len(&self) -> usize {
        1 + self.children.iter().map(ParseTree::len).sum::<usize>()
    }
    pub fn is_empty(&self) -> bool {
        false
    }
}

struct SpanParser<'a> {
    w: &'a [usize],
    by_lhs: Vec<Vec<usize>>,
    tails: Vec<Vec<usize>>,
    heads: Vec<usize>,
    derive_memo: HashMap<(usize, usize, usize), bool>,
    seq_memo: HashMap<(usize, usize, usize, usize), bool>,
}

impl<'a> SpanParser<'a> {
    fn derive(&mut self, a: usize, i: usize, j: usize) -> bool {
        if let Some(&v) = self.derive_memo.get(&(a, i, j)) {
            return v;
        }
        let v = (0..self.by_lhs[a].len()).any(|k| {
            let p = self.by_lhs[a][k];
            i < j && self.heads[p] == self.w[i] && self.seq(p, 0, i + 1, j)
        });
        self.derive_memo.insert((a, i, j), v);
        v
    }

    fn seq(&mut self, p: usize, k: usize, i: usize, j: usize) -> bool {
        let rest = self.tails[p].len() - k;
        if rest == 0 {
            return i == j;
        }
        if j - i < rest {
            return false;
        }
        if let Some(&v) = self.seq_memo.get(&(p, k, i, j)) {
            return v;
        }
        let b = self.tails[p][k];
        let v = (i + 1..=j - (rest - 1)).any(|m| self.derive(b, i, m) && self.seq(p, k + 1, m, j));
        self.seq_memo.insert((p, k, i, j), v);
        v
    }

    fn tree(&mut self, a: usize, i: usize, j: usize) -> ParseTree {
        for k in 0..self.by_lhs[a].len() {
            let p = self.by_lhs[a][k];
            if self.heads[p] == self.w[i] && self.seq(p, 0, i + 1, j) {
                let mut children = Vec::new();
                let mut start = i + 1;
                for kk in 0..self.tails[p].len() {
                    let b = self.tails[p][kk];
                    let rest = self.tails[p].len() - kk - 1;
                    let m = (start + 1..=j - rest)
                        .find(|&m| self.derive(b, start, m) && self.seq(p, kk + 1, m, j))
                        .expect("a successful span has a split");
                    children.push(self.tree(b, start, m));
                    start = m;
                }
                return ParseTree { production: p, children };
            }
        }
        unreachable!("tree requested for an underivable span")
    }
}

/// A derivation of `w` from `root`, for grammars in Greibach form.
pub fn parse_tree(g: &Grammar, root: usize, w: &[usize]) -> Result<Option<ParseTree>, GrammarError> {
    g.check_word(w)?;
    let mut heads = Vec::new();
    let mut tails = Vec::new();
    for p in g.productions() {
        let (a, bs) = p.gnf_parts().ok_or(GrammarError::NotGnf)?;
        heads.push(a);
        tails.push(bs);
    }
    let mut by_lhs = vec![Vec::new(); g.nonterminals().len()];
    for (i, p) in g.productions().iter().enumerate() {
        by_lhs[p.lhs].push(i);
    }
    let mut sp = SpanParser { w, by_lhs, tails, heads, derive_memo: HashMap::new(), seq_memo: HashMap::new() };
    if w.is_empty() || !sp.derive(root, 0, w.len()) {
        return Ok(None);
    }
    Ok(Some(sp.tree(root, 0, w.len())))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(text: &str) -> Grammar {
        Grammar::from_json(text).unwrap()
    }

    const PAL: &str = r#"{"start":"S","terminals":["a","b"],"productions":[
        {"lhs":"S","rhs":["a","S","A"]},{"lhs":"S","rhs":["b","S","B"]},
        {"lhs":"S","rhs":["a"]},{"lhs":"S","rhs":["b"]},{"lhs":"S","rhs":["a","A"]},{"lhs":"S","rhs":["b","B"]},
        {"lhs":"A","rhs":["a"]},{"lhs":"B","rhs":["b"]}]}"#;

    fn is_pal(w: &[usize]) -> bool {
        !w.is_empty() && w.iter().eq(w.iter().rev())
    }

    #[test]
    fn palindromes() {
        let g = g(PAL);
        for len in 0..9 {
            for code in 0..(1usize << len) {
                let w: Vec<usize> = (0..len).map(|i| (code >> i) & 1).collect();
                assert_eq!(member(&g, &w).unwrap(), is_pal(&w), "{w:?}");
                let t = parse_tree(&g, g.start(), &w).unwrap();
                assert_eq!(t.is_some(), is_pal(&w));
                if let Some(t) = t {
                    assert_eq!(t.len(), w.len());
                }
            }
        }
    }

    #[test]
    fn epsilon_and_left_recursion() {
        // S -> S S | a | ε ; T -> T b | b
        let g = g(r#"{"start":"S","terminals":["a","b"],"productions":[
            {"lhs":"S","rhs":["S","S"]},{"lhs":"S","rhs":["a"]},{"lhs":"S","rhs":[]},
            {"lhs":"T","rhs":["T","b"]},{"lhs":"T","rhs":["b"]}]}"#);
        assert!(member(&g, &[]).unwrap());
        assert!(member(&g, &[0, 0, 0]).unwrap());
        assert!(!member(&g, &[0, 1]).unwrap());
        let t = g.nonterminal("T").unwrap();
        assert!(member_from(&g, t, &[1, 1, 1]).unwrap());
        assert!(!member_from(&g, t, &[]).unwrap());
        assert!(member(&g, &[7]).is_err());
        assert!(matches!(parse_tree(&g, 0, &[0]), Err(GrammarError::NotGnf)));
    }

    #[test]
    fn totality() {
        let u = g(r#"{"start":"U","terminals":["a","b"],"productions":[
            {"lhs":"U","rhs":["a","U"]},{"lhs":"U","rhs":["b","U"]},{"lhs":"U","rhs":["a"]},{"lhs":"U","rhs":["b"]}]}"#);
        assert_eq!(total_up_to(&u, 6), Totality::AllGenerated);
        assert_eq!(total_up_to(&g(PAL), 5), Totality::Counterexample(vec![0, 1]));
    }
}
