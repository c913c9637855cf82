//! Formulas and sequents of the action-logic language, with the ASCII
//! concrete syntax used throughout the crate.
//!
//! Grammar, loosest to tightest:
//!
//! ```text
//! join   := meet ('|' join)?
//! meet   := div ('&' meet)?
//! div    := ldiv ('\' div)?          a\b\c = a\(b\c)
//! ldiv   := prod ('/' prod)*         a/b/c = (a/b)/c
//! prod   := post ('.' post)*         left-associative
//! post   := atom ('^*' | '^+')*
//! atom   := IDENT | '1' | '0' | '(' join ')' | '@' IDENT
//! ```
//!
//! `x^+` is sugar for `x.x^*`. The `@name` form refers to an abbreviation and
//! is accepted only by [`parse_formula_with`].

use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at offset {pos}: {msg}")]
pub struct SyntaxError {
    pub pos: usize,
    pub msg: String,
}

impl SyntaxError {
    fn new(pos: usize, msg: impl Into<String>) -> Self {
        SyntaxError { pos, msg: msg.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Node {
    Var(Arc<str>),
    One,
    Zero,
    Product(Formula, Formula),
    /// `divisor \ result`
    LeftResidual(Formula, Formula),
    /// `result / divisor`
    RightResidual(Formula, Formula),
    Join(Formula, Formula),
    Meet(Formula, Formula),
    Star(Formula),
}

/// A formula. Cloning is cheap; subterms are shared. Every node caches a
/// structural hash, so hashing is constant-time.
#[derive(Clone)]
pub struct Formula(Arc<Inner>);

struct Inner {
    hash: u64,
    node: Node,
}

impl PartialEq for Formula {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.0.hash == other.0.hash && self.0.node == other.0.node)
    }
}

impl Eq for Formula {}

impl Hash for Formula {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u64(self.0.hash)
    }
}

impl PartialOrd for Formula {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Formula {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.node.cmp(&other.0.node)
    }
}

impl Formula {
    pub fn new(node: Node) -> Self {
        // children contribute their cached hashes
        let mut h = std::collections::hash_map::DefaultHasher::new();
        node.hash(&mut h);
        Formula(Arc::new(Inner { hash: h.finish(), node }))
    }

    pub fn var(name: &str) -> Self {
        Formula::new(Node::Var(name.into()))
    }

    pub fn one() -> Self {
        Formula::new(Node::One)
    }

    pub fn zero() -> Self {
        Formula::new(Node::Zero)
    }

    pub fn product(left: Formula, right: Formula) -> Self {
        Formula::new(Node::Product(left, right))
    }

    /// `divisor \ result`
    pub fn ldiv(divisor: Formula, result: Formula) -> Self {
        Formula::new(Node::LeftResidual(divisor, result))
    }

    /// `result / divisor`
    pub fn rdiv(result: Formula, divisor: Formula) -> Self {
        Formula::new(Node::RightResidual(result, divisor))
    }

    pub fn join(left: Formula, right: Formula) -> Self {
        Formula::new(Node::Join(left, right))
    }

    pub fn meet(left: Formula, right: Formula) -> Self {
        Formula::new(Node::Meet(left, right))
    }

    pub fn star(body: Formula) -> Self {
        Formula::new(Node::Star(body))
    }

    /// `f.f^*`
    pub fn plus(body: Formula) -> Self {
        Formula::product(body.clone(), Formula::star(body))
    }

    pub fn node(&self) -> &Node {
        &self.0.node
    }

    pub fn ptr_id(&self) -> usize {
        Arc::as_ptr(&self.0) as usize
    }

    pub fn as_var(&self) -> Option<&str> {
        match self.node() {
            Node::Var(v) => Some(v),
            _ => None,
        }
    }

    /// Number of connective and constant occurrences.
    pub fn size(&self) -> usize {
        match self.node() {
            Node::Var(_) => 0,
            Node::One | Node::Zero => 1,
            Node::Star(a) => 1 + a.size(),
            Node::Product(a, b)
            | Node::LeftResidual(a, b)
            | Node::RightResidual(a, b)
            | Node::Join(a, b)
            | Node::Meet(a, b) => 1 + a.size() + b.size(),
        }
    }

    fn children(&self) -> (Option<&Formula>, Option<&Formula>) {
        match self.node() {
            Node::Var(_) | Node::One | Node::Zero => (None, None),
            Node::Star(a) => (Some(a), None),
            Node::Product(a, b)
            | Node::LeftResidual(a, b)
            | Node::RightResidual(a, b)
            | Node::Join(a, b)
            | Node::Meet(a, b) => (Some(a), Some(b)),
        }
    }

    /// True if some subformula (including `self`) satisfies `pred`.
    pub fn any(&self, pred: &dyn Fn(&Node) -> bool) -> bool {
        if pred(self.node()) {
            return true;
        }
        let (a, b) = self.children();
        a.is_some_and(|f| f.any(pred)) || b.is_some_and(|f| f.any(pred))
    }

    pub fn has_star(&self) -> bool {
        self.any(&|n| matches!(n, Node::Star(_)))
    }

    pub fn has_meet(&self) -> bool {
        self.any(&|n| matches!(n, Node::Meet(..)))
    }

    pub fn has_join(&self) -> bool {
        self.any(&|n| matches!(n, Node::Join(..)))
    }

    pub fn mentions_var(&self, name: &str) -> bool {
        self.any(&|n| matches!(n, Node::Var(v) if &**v == name))
    }

    /// Every subformula, `self` first, in pre-order.
    pub fn subformulas(&self) -> Vec<Formula> {
        let mut out = Vec::new();
        let mut stack = vec![self.clone()];
        while let Some(f) = stack.pop() {
            let (a, b) = f.children();
            if let Some(b) = b {
                stack.push(b.clone());
            }
            if let Some(a) = a {
                stack.push(a.clone());
            }
            out.push(f);
        }
        out
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", print_formula(self))
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_formula(self))
    }
}

/// `antecedent |- succedent`; antecedent order matters.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sequent {
    pub antecedent: Vec<Formula>,
    pub succedent: Formula,
}

impl Sequent {
    pub fn new(antecedent: Vec<Formula>, succedent: Formula) -> Self {
        Sequent { antecedent, succedent }
    }

    pub fn formulas(&self) -> impl Iterator<Item = &Formula> {
        self.antecedent.iter().chain(std::iter::once(&self.succedent))
    }

    pub fn has_star(&self) -> bool {
        self.formulas().any(Formula::has_star)
    }
}

impl fmt::Debug for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", print_sequent(self))
    }
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_sequent(self))
    }
}

/// Termination measure for cut-free search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Complexity(pub usize);

pub fn complexity(s: &Sequent) -> Complexity {
    Complexity(s.formulas().map(Formula::size).sum())
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("big {0} of an empty list")]
pub struct EmptyList(pub &'static str);

/// Right-nested `f1 & (f2 & (... & fn))`.
pub fn big_meet(fs: &[Formula]) -> Result<Formula, EmptyList> {
    fold_right(fs, Formula::meet).ok_or(EmptyList("meet"))
}

/// Right-nested `f1 | (f2 | (... | fn))`.
pub fn big_join(fs: &[Formula]) -> Result<Formula, EmptyList> {
    fold_right(fs, Formula::join).ok_or(EmptyList("join"))
}

/// Left-nested product `(f1 . f2) . f3 ...`.
pub fn big_product(fs: &[Formula]) -> Option<Formula> {
    let mut it = fs.iter().cloned();
    let first = it.next()?;
    Some(it.fold(first, Formula::product))
}

fn fold_right(fs: &[Formula], op: fn(Formula, Formula) -> Formula) -> Option<Formula> {
    let (last, init) = fs.split_last()?;
    Some(init.iter().rev().fold(last.clone(), |acc, f| op(f.clone(), acc)))
}

// ---------------------------------------------------------------------------
// Printing

const P_JOIN: u8 = 0;
const P_MEET: u8 = 1;
const P_DIV: u8 = 2;
const P_LDIV: u8 = 3;
const P_PROD: u8 = 4;
const P_POST: u8 = 5;

pub fn print_formula(f: &Formula) -> String {
    print_formula_with(f, &|_| None)
}

/// Prints `f`, writing `@name` for every subformula that `abbrev` names.
pub fn print_formula_with(f: &Formula, abbrev: &dyn Fn(&Formula) -> Option<String>) -> String {
    let mut out = String::new();
    write_formula(f, P_JOIN, abbrev, &mut out);
    out
}

fn write_formula(
    f: &Formula,
    ctx: u8,
    abbrev: &dyn Fn(&Formula) -> Option<String>,
    out: &mut String,
) {
    if let Some(name) = abbrev(f) {
        out.push('@');
        out.push_str(&name);
        return;
    }
    let (prec, write_body): (u8, Box<dyn Fn(&mut String)>) = match f.node() {
        Node::Var(v) => {
            out.push_str(v);
            return;
        }
        Node::One => {
            out.push('1');
            return;
        }
        Node::Zero => {
            out.push('0');
            return;
        }
        Node::Join(a, b) => (
            P_JOIN,
            Box::new(move |o: &mut String| {
                write_formula(a, P_MEET, abbrev, o);
                o.push('|');
                write_formula(b, P_JOIN, abbrev, o);
            }),
        ),
        Node::Meet(a, b) => (
            P_MEET,
            Box::new(move |o: &mut String| {
                write_formula(a, P_DIV, abbrev, o);
                o.push('&');
                write_formula(b, P_MEET, abbrev, o);
            }),
        ),
        Node::LeftResidual(a, b) => (
            P_DIV,
            Box::new(move |o: &mut String| {
                write_formula(a, P_LDIV, abbrev, o);
                o.push('\\');
                write_formula(b, P_DIV, abbrev, o);
            }),
        ),
        Node::RightResidual(a, b) => (
            P_LDIV,
            Box::new(move |o: &mut String| {
                write_formula(a, P_LDIV, abbrev, o);
                o.push('/');
                write_formula(b, P_PROD, abbrev, o);
            }),
        ),
        Node::Product(a, b) => (
            P_PROD,
            Box::new(move |o: &mut String| {
                write_formula(a, P_PROD, abbrev, o);
                o.push('.');
                write_formula(b, P_POST, abbrev, o);
            }),
        ),
        Node::Star(a) => (
            P_POST,
            Box::new(move |o: &mut String| {
                write_formula(a, P_POST, abbrev, o);
                o.push_str("^*");
            }),
        ),
    };
    // A right residual is a valid left operand of `\` but a left residual
    // is not a valid left operand of `/`, hence the extra P_LDIV level.
    if prec < ctx {
        out.push('(');
        write_body(out);
        out.push(')');
    } else {
        write_body(out);
    }
}

pub fn print_sequent(s: &Sequent) -> String {
    print_sequent_with(s, &|_| None)
}

pub fn print_sequent_with(s: &Sequent, abbrev: &dyn Fn(&Formula) -> Option<String>) -> String {
    let mut out = String::new();
    for (i, f) in s.antecedent.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        write_formula(f, P_JOIN, abbrev, &mut out);
    }
    if s.antecedent.is_empty() {
        out.push_str("|- ");
    } else {
        out.push_str(" |- ");
    }
    write_formula(&s.succedent, P_JOIN, abbrev, &mut out);
    out
}

// ---------------------------------------------------------------------------
// Parsing

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Abbrev(String),
    One,
    Zero,
    Dot,
    Back,
    Slash,
    Bar,
    Amp,
    StarOp,
    PlusOp,
    LParen,
    RParen,
    Comma,
    Turnstile,
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>, SyntaxError> {
    let bytes: Vec<(usize, char)> = text.char_indices().collect();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let (pos, c) = bytes[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let next = bytes.get(i + 1).map(|&(_, c)| c);
        let tok = match c {
            '.' => Tok::Dot,
            '\\' => Tok::Back,
            '/' => Tok::Slash,
            '|' if next == Some('-') => {
                i += 1;
                Tok::Turnstile
            }
            '|' => Tok::Bar,
            '&' => Tok::Amp,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            ',' => Tok::Comma,
            '^' => match next {
                Some('*') => {
                    i += 1;
                    Tok::StarOp
                }
                Some('+') => {
                    i += 1;
                    Tok::PlusOp
                }
                _ => return Err(SyntaxError::new(pos, "expected '*' or '+' after '^'")),
            },
            '1' if !next.is_some_and(is_ident_char) => Tok::One,
            '0' if !next.is_some_and(is_ident_char) => Tok::Zero,
            _ if c == '@' || is_ident_start(c) => {
                let start = if c == '@' { i + 1 } else { i };
                let mut j = start;
                while j < bytes.len() && is_ident_char(bytes[j].1) {
                    j += 1;
                }
                if j == start || !is_ident_start(bytes[start].1) {
                    return Err(SyntaxError::new(pos, "expected identifier"));
                }
                let name: String = bytes[start..j].iter().map(|&(_, c)| c).collect();
                i = j;
                toks.push((pos, if c == '@' { Tok::Abbrev(name) } else { Tok::Ident(name) }));
                continue;
            }
            _ => return Err(SyntaxError::new(pos, format!("unexpected character {c:?}"))),
        };
        toks.push((pos, tok));
        i += 1;
    }
    Ok(toks)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
    abbrevs: Option<&'a HashMap<String, Formula>>,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map(|&(p, _)| p).unwrap_or(self.end)
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn join(&mut self) -> Result<Formula, SyntaxError> {
        let left = self.meet()?;
        if self.eat(&Tok::Bar) {
            Ok(Formula::join(left, self.join()?))
        } else {
            Ok(left)
        }
    }

    fn meet(&mut self) -> Result<Formula, SyntaxError> {
        let left = self.div()?;
        if self.eat(&Tok::Amp) {
            Ok(Formula::meet(left, self.meet()?))
        } else {
            Ok(left)
        }
    }

    fn div(&mut self) -> Result<Formula, SyntaxError> {
        let left = self.ldiv()?;
        if self.eat(&Tok::Back) {
            Ok(Formula::ldiv(left, self.div()?))
        } else {
            Ok(left)
        }
    }

    fn ldiv(&mut self) -> Result<Formula, SyntaxError> {
        let mut acc = self.prod()?;
        while self.eat(&Tok::Slash) {
            acc = Formula::rdiv(acc, self.prod()?);
        }
        Ok(acc)
    }

    fn prod(&mut self) -> Result<Formula, SyntaxError> {
        let mut acc = self.post()?;
        while self.eat(&Tok::Dot) {
            acc = Formula::product(acc, self.post()?);
        }
        Ok(acc)
    }

    fn post(&mut self) -> Result<Formula, SyntaxError> {
        let mut acc = self.atom()?;
        loop {
            if self.eat(&Tok::StarOp) {
                acc = Formula::star(acc);
            } else if self.eat(&Tok::PlusOp) {
                acc = Formula::plus(acc);
            } else {
                return Ok(acc);
            }
        }
    }

    fn atom(&mut self) -> Result<Formula, SyntaxError> {
        let pos = self.pos();
        let tok = self.peek().cloned();
        match tok {
            Some(Tok::Ident(name)) => {
                self.at += 1;
                Ok(Formula::var(&name))
            }
            Some(Tok::Abbrev(name)) => {
                self.at += 1;
                self.abbrevs
                    .and_then(|m| m.get(&name).cloned())
                    .ok_or_else(|| SyntaxError::new(pos, format!("unknown abbreviation @{name}")))
            }
            Some(Tok::One) => {
                self.at += 1;
                Ok(Formula::one())
            }
            Some(Tok::Zero) => {
                self.at += 1;
                Ok(Formula::zero())
            }
            Some(Tok::LParen) => {
                self.at += 1;
                let f = self.join()?;
                if !self.eat(&Tok::RParen) {
                    return Err(SyntaxError::new(self.pos(), "expected ')'"));
                }
                Ok(f)
            }
            Some(t) => Err(SyntaxError::new(pos, format!("unexpected token {t:?}"))),
            None => Err(SyntaxError::new(pos, "unexpected end of input")),
        }
    }

    fn finish(&self) -> Result<(), SyntaxError> {
        if self.at == self.toks.len() {
            Ok(())
        } else {
            Err(SyntaxError::new(self.pos(), "trailing input"))
        }
    }
}

fn parser<'a>(
    text: &str,
    abbrevs: Option<&'a HashMap<String, Formula>>,
) -> Result<Parser<'a>, SyntaxError> {
    Ok(Parser { toks: tokenize(text)?, at: 0, end: text.len(), abbrevs })
}

pub fn parse_formula(text: &str) -> Result<Formula, SyntaxError> {
    let mut p = parser(text, None)?;
    let f = p.join()?;
    p.finish()?;
    Ok(f)
}

/// Like [`parse_formula`], additionally resolving `@name` references.
pub fn parse_formula_with(
    text: &str,
    abbrevs: &HashMap<String, Formula>,
) -> Result<Formula, SyntaxError> {
    let mut p = parser(text, Some(abbrevs))?;
    let f = p.join()?;
    p.finish()?;
    Ok(f)
}

pub fn parse_sequent(text: &str) -> Result<Sequent, SyntaxError> {
    parse_sequent_impl(text, None)
}

pub fn parse_sequent_with(
    text: &str,
    abbrevs: &HashMap<String, Formula>,
) -> Result<Sequent, SyntaxError> {
    parse_sequent_impl(text, Some(abbrevs))
}

fn parse_sequent_impl(
    text: &str,
    abbrevs: Option<&HashMap<String, Formula>>,
) -> Result<Sequent, SyntaxError> {
    let mut p = parser(text, abbrevs)?;
    let mut antecedent = Vec::new();
    if !p.eat(&Tok::Turnstile) {
        loop {
            antecedent.push(p.join()?);
            if p.eat(&Tok::Comma) {
                continue;
            }
            if p.eat(&Tok::Turnstile) {
                break;
            }
            return Err(SyntaxError::new(p.pos(), "expected ',' or '|-'"));
        }
    }
    let succedent = p.join()?;
    p.finish()?;
    Ok(Sequent::new(antecedent, succedent))
}

impl std::str::FromStr for Formula {
    type Err = SyntaxError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_formula(s)
    }
}

impl std::str::FromStr for Sequent {
    type Err = SyntaxError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_sequent(s)
    }
}
