//! End-to-end proofs of non-halting for trivially cycling machines, and the
//! matching refutation for halting ones.
//!
//! For a machine that reaches the cycling state after a protocol of `n`
//! letters, `psi+ |- S` follows by the long rule from `psi^k |- S`
//! (`k = 1..n`) and `psi^n, psi+ |- S`. The last premise is a cut of
//! `psi+ |- U` against `psi^n, U |- S`, which splits over the first letter:
//! words starting with `#` go through `S -> # Y U`, the others through
//! `S -> a U` and `U -> a U`.
//!
//! Joins in the antecedent are expanded letter by letter. Every leaf is
//! built from a derivation tree ([`Derivations`]) instead of searched for.
//! In the negated variants each `(x\b)\b` in the antecedent is discharged
//! from the right: `G, (x\b)\b |- b` follows from `x, G |- b`, so a leaf
//! `x1, .., xk |- A` yields `(x1\b)\b, .., (xk\b)\b |- (A\b)\b`.

use std::collections::HashMap;
use std::time::Instant;

use serde_json::{json, Value};
use thiserror::Error;

use crate::act::{self, ActError, ActProof};
use crate::build::{self, P};
use crate::doc::{proof_to_value, DocOptions};
use crate::encode::{Derivations, EncodeError, Encoding, Kind, DEFAULT_NEGVAR};
use crate::grammar::{build_g, member, Grammar, GrammarParts};
use crate::malc::{self, Inversion, MalcError, Prover};
use crate::proof::RuleViolation;
use crate::syntax::{big_join, Formula, Sequent};
use crate::turing::{Behavior, Sym, TuringMachine};

#[derive(Debug, Error)]
pub enum SynthesisError {
    #[error("the machine does not trivially cycle: {0}")]
    NotCycling(Behavior),
    #[error("the machine does not halt: {0}")]
    NotHalted(Behavior),
    #[error("not a grammar of the expected shape: {0}")]
    NotBuildG(String),
    #[error(transparent)]
    Encode(#[from] EncodeError),
    #[error("the grammar does not generate {0:?} from {1}")]
    NotGenerated(String, String),
    #[error("the halting protocol {0:?} is generated by the grammar")]
    ProtocolGenerated(String),
    #[error("the sequent {0} is derivable")]
    Derivable(Sequent),
    #[error(transparent)]
    Act(#[from] ActError),
    #[error(transparent)]
    Check(#[from] RuleViolation),
    #[error(transparent)]
    Malc(#[from] MalcError),
}

type Result<T> = std::result::Result<T, SynthesisError>;

/// A checked proof of `psi+ |- S` (or a negated variant) and how it came about.
#[derive(Debug, Clone)]
pub struct SynthesisReport {
    pub behavior: Behavior,
    pub kind: Kind,
    /// Protocol length in letters, up to and including the cycling block.
    pub n: usize,
    /// Negation variable of the vee and wedge kinds.
    pub negvar: Option<String>,
    pub proof: ActProof,
    pub node_count: usize,
    pub elapsed_ms: u128,
}

impl SynthesisReport {
    pub fn metadata(&self) -> Value {
        json!({
            "behavior": self.behavior,
            "kind": self.kind.name(),
            "n": self.n,
            "negvar": self.negvar,
            "node_count": self.node_count,
            "elapsed_ms": self.elapsed_ms,
        })
    }

    /// The proof document with a `metadata` entry; it still reads back as a
    /// proof document.
    pub fn to_value(&self, opts: DocOptions) -> Value {
        let mut v = proof_to_value(self.proof.proof(), opts);
        v.as_object_mut().expect("proof documents are objects").insert("metadata".into(), self.metadata());
        v
    }
}

/// Evidence that `psi^|p| |- S` is underivable for the halting protocol `p`.
#[derive(Debug, Clone)]
pub struct Refutation {
    pub behavior: Behavior,
    /// The halting protocol, which the grammar misses.
    pub word: Vec<Sym>,
    pub word_text: String,
    /// `psi, .., psi |- S` with `|p|` copies.
    pub power: Sequent,
    /// `phi_p1, .., phi_pn |- S`, reached from `power` by inverting the
    /// join rule at every position; underivable.
    pub leaf: Sequent,
    pub leaf_explored: usize,
    /// Result of searching `power` itself, when small enough to try.
    pub full_search: Option<bool>,
}

impl Refutation {
    pub fn to_value(&self) -> Value {
        json!({
            "behavior": self.behavior,
            "witness": self.word_text,
            "length": self.word.len(),
            "member": false,
            "power": self.power.to_string(),
            "leaf": self.leaf.to_string(),
            "leaf_derivable": false,
            "leaf_explored": self.leaf_explored,
            "full_search_derivable": self.full_search,
        })
    }
}

/// Power sequents with at most this many join expansions are also searched
/// as a whole by [`refute_halting`].
pub const FULL_SEARCH_LIMIT: usize = 4096;

/// How an antecedent formula `x\b` gets discharged: `x` is `g\b` for a
/// fixed `g`, the join of the `xi^b` of a letter (one of them picked), or
/// the meet of all `phi_a^b` (every letter in turn).
#[derive(Debug, Clone)]
enum Slot {
    Dn(Formula),
    Vee { letter: usize, index: usize },
    Wedge,
}

/// Nonterminal indices and letters `build_g` guarantees.
struct Shape {
    hash: usize,
    s: usize,
    u: usize,
    y: usize,
}

impl Shape {
    fn of(enc: &Encoding, hash: usize) -> Result<Self> {
        let g = enc.grammar();
        let nt = |name: &str| g.nonterminal(name).ok_or_else(|| SynthesisError::NotBuildG(format!("missing {name}")));
        let shape = Shape { hash, s: nt(GrammarParts::START)?, u: nt(GrammarParts::ANY)?, y: nt(GrammarParts::PREFIX)? };
        if g.start() != shape.s {
            return Err(SynthesisError::NotBuildG("start symbol is not S".into()));
        }
        let (s, u, y) = (enc.var(shape.s), enc.var(shape.u), enc.var(shape.y));
        let u_u = Formula::rdiv(u.clone(), u.clone());
        for a in 0..enc.letters() {
            let has = |f: &Formula| enc.xi_index(a, f).is_some();
            let name = &g.terminals()[a];
            if !has(u) || !has(&u_u) {
                return Err(SynthesisError::NotBuildG(format!("U rules missing for {name:?}")));
            }
            let needed = if a == hash {
                Formula::rdiv(s.clone(), Formula::product(y.clone(), u.clone()))
            } else {
                Formula::rdiv(s.clone(), u.clone())
            };
            if !has(&needed) {
                return Err(SynthesisError::NotBuildG(format!("no production for {needed} on {name:?}")));
            }
        }
        Ok(shape)
    }
}

/// Builds the proofs of one synthesis run.
struct Builder<'e> {
    enc: &'e Encoding,
    kind: Kind,
    b: Formula,
    shape: Shape,
    d: Derivations<'e>,
    ax_b: P,
    injections: HashMap<(usize, usize), P>,
    chains: HashMap<usize, P>,
    psi: Formula,
}

impl<'e> Builder<'e> {
    fn new(enc: &'e Encoding, kind: Kind, b: &str, hash: usize) -> Result<Self> {
        let shape = Shape::of(enc, hash)?;
        let b_var = Formula::var(b);
        Ok(Builder {
            enc,
            kind,
            psi: enc.psi_of(kind, b)?,
            b: b_var.clone(),
            shape,
            d: Derivations::new(enc),
            ax_b: build::ax(&b_var),
            injections: HashMap::new(),
            chains: HashMap::new(),
        })
    }

    fn s(&self) -> Formula {
        self.enc.var(self.shape.s).clone()
    }

    fn u(&self) -> Formula {
        self.enc.var(self.shape.u).clone()
    }

    /// `f`, or `(f\b)\b` in the negated variants.
    fn lift(&self, f: &Formula) -> Formula {
        match self.kind {
            Kind::Full => f.clone(),
            _ => Formula::ldiv(Formula::ldiv(f.clone(), self.b.clone()), self.b.clone()),
        }
    }

    fn word_text(&self, w: &[usize]) -> String {
        self.enc.grammar().show_word(w)
    }

    fn not_generated(&self, a: usize, w: &[usize]) -> SynthesisError {
        SynthesisError::NotGenerated(self.word_text(w), self.enc.grammar().nonterminals()[a].clone())
    }

    fn phi_proof(&mut self, a: usize, w: &[usize]) -> Result<P> {
        self.d.phi_proof(a, w).ok_or_else(|| self.not_generated(a, w))
    }

    fn xi_proof(&mut self, a: usize, w: &[usize]) -> Result<P> {
        self.d.xi_proof(a, w).ok_or_else(|| self.not_generated(a, w))
    }

    fn project(&mut self, a: usize, f: &Formula) -> P {
        self.d.project(a, f).expect("checked by Shape::of")
    }

    fn index(&self, a: usize, f: &Formula) -> usize {
        self.enc.xi_index(a, f).expect("formula taken from the letter's list")
    }

    /// `xi\b |- xi1\b | .. | xik\b` for entry `index` of letter `letter`.
    fn injection(&mut self, letter: usize, index: usize) -> P {
        if let Some(p) = self.injections.get(&(letter, index)) {
            return p.clone();
        }
        let negs: Vec<Formula> =
            self.enc.xi(letter).iter().map(|x| Formula::ldiv(x.clone(), self.b.clone())).collect();
        let mut p = build::ax(&negs[index]);
        if index + 1 < negs.len() {
            p = build::join_r1(p, &big_join(&negs[index + 1..]).expect("nonempty"));
        }
        for x in negs[..index].iter().rev() {
            p = build::join_r2(p, x);
        }
        self.injections.insert((letter, index), p.clone());
        p
    }

    /// `S/U, U/U, .., U/U, U |- S` with `n - 1` copies of `U/U`.
    fn chain(&mut self, n: usize) -> P {
        if let Some(p) = self.chains.get(&n) {
            return p.clone();
        }
        let (s, u) = (self.s(), self.u());
        let mut p = build::ax(&u);
        for _ in 1..n {
            p = build::rdiv_l(p, build::ax(&u), 0);
        }
        let p = build::rdiv_l(p, build::ax(&s), 0);
        self.chains.insert(n, p.clone());
        p
    }

    /// Proves `N1, .., Nk |- (goal\b)\b` where `Ni` is the formula of
    /// `slots[i]`. `leaf` gets the letters chosen for wedge slots and must
    /// prove `g1, .., gk |- goal` for the corresponding plain formulas.
    fn rotate(
        &mut self,
        goal: &Formula,
        slots: &[Slot],
        leaf: &mut dyn FnMut(&mut Self, &[usize]) -> Result<P>,
    ) -> Result<P> {
        let mut after = Vec::new();
        let mut chosen = Vec::new();
        let p = self.rotate_at(slots.len(), goal, slots, &mut after, &mut chosen, leaf)?;
        Ok(build::ldiv_r(p))
    }

    /// Proves `g(j+1), .., gk, goal\b, N1, .., Nj |- b`; `after` holds
    /// `g(j+1)..gk` and `chosen` the wedge letters from the right.
    fn rotate_at(
        &mut self,
        j: usize,
        goal: &Formula,
        slots: &[Slot],
        after: &mut Vec<Formula>,
        chosen: &mut Vec<usize>,
        leaf: &mut dyn FnMut(&mut Self, &[usize]) -> Result<P>,
    ) -> Result<P> {
        if j == 0 {
            let letters: Vec<usize> = chosen.iter().rev().copied().collect();
            let p = leaf(self, &letters)?;
            debug_assert_eq!(p.conclusion.antecedent.len(), slots.len());
            return Ok(build::ldiv_l(p, self.ax_b.clone(), 0));
        }
        let mut under = |me: &mut Self, g: Formula, letter: Option<usize>| -> Result<P> {
            after.insert(0, g);
            chosen.extend(letter);
            let r = me.rotate_at(j - 1, goal, slots, after, chosen, leaf);
            after.remove(0);
            if letter.is_some() {
                chosen.pop();
            }
            Ok(build::ldiv_r(r?))
        };
        let minor = match &slots[j - 1] {
            Slot::Dn(g) => under(self, g.clone(), None)?,
            Slot::Vee { letter, index } => {
                let g = self.enc.xi(*letter)[*index].clone();
                let p = under(self, g, None)?;
                build::cut(p, self.injection(*letter, *index), 0)
            }
            Slot::Wedge => {
                let mut parts = Vec::with_capacity(self.enc.letters());
                let enc = self.enc;
                for a in 0..enc.letters() {
                    parts.push(under(self, enc.phi(a).clone(), Some(a))?);
                }
                let last = parts.pop().expect("nonempty alphabet");
                parts.into_iter().rev().fold(last, |acc, p| build::meet_r(p, acc))
            }
        };
        Ok(build::ldiv_l(minor, self.ax_b.clone(), 0))
    }

    /// Proves `psi, .., psi, tail |- goal` (`k` copies) in the current kind,
    /// where `tail` and `goal` are plain formulas that get lifted. `leaf`
    /// receives the letters and a flag telling whether it must prove the
    /// letter formulas (`phi_a1, .., tail |- goal`) or single production
    /// formulas (`xi1, .., tail |- goal`).
    fn power(
        &mut self,
        k: usize,
        tail: &[Formula],
        goal: &Formula,
        leaf: &mut dyn FnMut(&mut Self, &[usize], bool) -> Result<P>,
    ) -> Result<P> {
        match self.kind {
            Kind::Full => self.expand(k, &mut Vec::new(), &mut |me, w| leaf(me, w, true)),
            Kind::Vee => {
                let tail = tail.to_vec();
                let goal = goal.clone();
                self.expand(k, &mut Vec::new(), &mut |me, w| {
                    let p = leaf(me, w, false)?;
                    let mut slots = Vec::with_capacity(p.conclusion.antecedent.len());
                    for (i, &a) in w.iter().enumerate() {
                        let index = me.index(a, &p.conclusion.antecedent[i]);
                        slots.push(Slot::Vee { letter: a, index });
                    }
                    slots.extend(tail.iter().cloned().map(Slot::Dn));
                    me.rotate(&goal, &slots, &mut |_, _| Ok(p.clone()))
                })
            }
            Kind::Wedge => {
                let mut slots = vec![Slot::Wedge; k];
                slots.extend(tail.iter().cloned().map(Slot::Dn));
                self.rotate(goal, &slots, &mut |me, w| leaf(me, w, true))
            }
        }
    }

    /// Expands the join `psi` at positions `prefix.len()..k`.
    fn expand(
        &mut self,
        k: usize,
        prefix: &mut Vec<usize>,
        leaf: &mut dyn FnMut(&mut Self, &[usize]) -> Result<P>,
    ) -> Result<P> {
        let i = prefix.len();
        if i == k {
            return leaf(self, prefix);
        }
        let mut parts = Vec::with_capacity(self.enc.letters());
        for a in 0..self.enc.letters() {
            prefix.push(a);
            let p = self.expand(k, prefix, leaf);
            prefix.pop();
            parts.push(p?);
        }
        let last = parts.pop().expect("nonempty alphabet");
        Ok(parts.into_iter().rev().fold(last, |acc, p| build::join_l(p, acc, i)))
    }

    /// `psi |- f` for a formula `f` with a production formula on every
    /// letter (`U` and `U/U`).
    fn everywhere(&mut self, f: &Formula) -> Result<P> {
        let f = f.clone();
        let goal = f.clone();
        self.power(1, &[], &goal, &mut |me, w, phi_level| {
            Ok(if phi_level { me.project(w[0], &f) } else { build::ax(&f) })
        })
    }

    /// `psi.psi^* |- U`, lifted in the negated variants.
    fn u_plus(&mut self) -> Result<ActProof> {
        let u = self.u();
        let u_u = Formula::rdiv(u.clone(), u.clone());
        let base = self.everywhere(&u)?;
        let to_uu = self.everywhere(&u_u)?;
        let apply = build::rdiv_l(build::ax(&u), build::ax(&u), 0);
        let apply = match self.kind {
            Kind::Full => apply,
            _ => self.rotate(&u, &[Slot::Dn(u_u.clone()), Slot::Dn(u.clone())], &mut |_, _| Ok(apply.clone()))?,
        };
        let step = build::cut(to_uu, apply, 0);
        let gamma = self.lift(&u);
        Ok(act::synth_plus_fp(&self.psi, &gamma, &ActProof::new(base)?, &ActProof::new(step)?)?)
    }

    /// `psi^k |- S`.
    fn power_premise(&mut self, k: usize) -> Result<P> {
        let s = self.s();
        let start = self.shape.s;
        self.power(k, &[], &s, &mut |me, w, phi_level| {
            if phi_level {
                me.phi_proof(start, w)
            } else {
                me.xi_proof(start, w)
            }
        })
    }

    /// `psi^n, U |- S`, split on the first letter.
    fn split_premise(&mut self, n: usize) -> Result<P> {
        let (s, u) = (self.s(), self.u());
        let (hash, y) = (self.shape.hash, self.shape.y);
        self.power(n, &[u.clone()], &s, &mut |me, w, phi_level| {
            if w[0] == hash {
                // S/(Y.U), [Y-part], U |- S
                let rest = &w[1..];
                let yp = if phi_level { me.phi_proof(y, rest)? } else { me.xi_proof(y, rest)? };
                let p = build::rdiv_l(build::prod_r(yp, build::ax(&u)), build::ax(&s), 0);
                if !phi_level {
                    return Ok(p);
                }
                let head = p.conclusion.antecedent[0].clone();
                Ok(build::cut(me.project(hash, &head), p, 0))
            } else {
                let mut p = me.chain(w.len());
                if !phi_level {
                    return Ok(p);
                }
                for (i, &a) in w.iter().enumerate() {
                    let f = p.conclusion.antecedent[i].clone();
                    p = build::cut(me.project(a, &f), p, i);
                }
                Ok(p)
            }
        })
    }

    fn cycling_proof(&mut self, n: usize) -> Result<ActProof> {
        let s = self.lift(&self.s());
        let mut premises = Vec::with_capacity(n + 1);
        for k in 1..=n {
            premises.push(ActProof::new(self.power_premise(k)?)?);
        }
        let u_plus = self.u_plus()?;
        let split = self.split_premise(n)?;
        premises.push(ActProof::new(build::cut(u_plus.into_inner(), split, n))?);
        let proof = match self.kind {
            Kind::Wedge => act::synth_long_rule_meet(&self.psi, &s, n, &premises)?,
            _ => act::synth_long_rule(&self.psi, &s, n, &premises)?,
        };
        Ok(proof)
    }
}

/// Proof of `psi.psi^* |- U` for a grammar built by [`build_g`].
pub fn prove_u_plus(g: &Grammar) -> Result<ActProof> {
    let enc = Encoding::new(g)?;
    let hash = g.terminal("#").ok_or_else(|| SynthesisError::NotBuildG("no separator letter".into()))?;
    Builder::new(&enc, Kind::Full, DEFAULT_NEGVAR, hash)?.u_plus()
}

fn synthesize(m: &TuringMachine, x: &[Sym], max_steps: usize, kind: Kind, negvar: Option<&str>) -> Result<SynthesisReport> {
    let started = Instant::now();
    let behavior = m.behavior(x, max_steps);
    if !matches!(behavior, Behavior::TriviallyCycles(_)) {
        return Err(SynthesisError::NotCycling(behavior));
    }
    let n = m.protocol(x, max_steps).len();
    let g = build_g(m, x);
    let enc = Encoding::new(&g)?;
    let b = match negvar {
        Some(b) => b.to_string(),
        None => enc.fresh_negvar(DEFAULT_NEGVAR),
    };
    let proof = Builder::new(&enc, kind, &b, m.separator())?.cycling_proof(n)?;
    debug_assert_eq!(proof.conclusion, enc.target_sequent(kind, &b)?);
    let node_count = proof.distinct_nodes();
    Ok(SynthesisReport {
        behavior,
        kind,
        n,
        negvar: (kind != Kind::Full).then_some(b),
        proof,
        node_count,
        elapsed_ms: started.elapsed().as_millis(),
    })
}

/// ACT proof of `psi+ |- S` for a machine that trivially cycles on `x`.
pub fn prove_cycling(m: &TuringMachine, x: &[Sym], max_steps: usize) -> Result<SynthesisReport> {
    synthesize(m, x, max_steps, Kind::Full, None)
}

/// Meet-free proof of `psi'+ |- (S\b)\b` with the meet-free encoding.
pub fn prove_cycling_vee(m: &TuringMachine, x: &[Sym], max_steps: usize, b: Option<&str>) -> Result<SynthesisReport> {
    synthesize(m, x, max_steps, Kind::Vee, b)
}

/// Join-free proof of `psi'+ |- (S\b)\b` with the join-free encoding.
pub fn prove_cycling_wedge(m: &TuringMachine, x: &[Sym], max_steps: usize, b: Option<&str>) -> Result<SynthesisReport> {
    synthesize(m, x, max_steps, Kind::Wedge, b)
}

pub fn prove_cycling_kind(
    m: &TuringMachine,
    x: &[Sym],
    max_steps: usize,
    kind: Kind,
    b: Option<&str>,
) -> Result<SynthesisReport> {
    synthesize(m, x, max_steps, kind, b)
}

/// For a machine that halts on `x`: the grammar misses the halting protocol
/// `p`, and `psi^|p| |- S` is underivable.
///
/// Underivability is shown on the single sequent `phi_p1, .., phi_pn |- S`:
/// the join rule is invertible, so a derivation of the power would yield
/// one of it. When the power is small it is also searched directly.
pub fn refute_halting(m: &TuringMachine, x: &[Sym], max_steps: usize) -> Result<Refutation> {
    let behavior = m.behavior(x, max_steps);
    if !matches!(behavior, Behavior::Halts(_)) {
        return Err(SynthesisError::NotHalted(behavior));
    }
    let word = m.protocol(x, max_steps).word;
    let word_text = m.show_word(&word);
    let g = build_g(m, x);
    if member(&g, &word).expect("build_g output is well-formed") {
        return Err(SynthesisError::ProtocolGenerated(word_text));
    }
    let enc = Encoding::new(&g)?;
    let power = enc.power_sequent(word.len());

    // walk from the power down to the leaf of the protocol word
    let mut leaf = power.clone();
    for (pos, &a) in word.iter().enumerate() {
        for _ in 0..a {
            leaf = malc::invert(Inversion::JoinL { pos, which: 2 }, &leaf)?.remove(0);
        }
        if a + 1 < enc.letters() {
            leaf = malc::invert(Inversion::JoinL { pos, which: 1 }, &leaf)?.remove(0);
        }
    }
    debug_assert_eq!(leaf, Sequent::new(enc.phi_word(&word), enc.start_var().clone()));

    let mut prover = Prover::new();
    let leaf_explored = match prover.prove(&leaf)? {
        malc::ProveResult::Derivable(_) => return Err(SynthesisError::Derivable(leaf)),
        malc::ProveResult::Underivable { explored } => explored,
    };
    let expansions = enc.letters().checked_pow(word.len() as u32).unwrap_or(usize::MAX);
    let full_search = if expansions <= FULL_SEARCH_LIMIT {
        let derivable = prover.prove(&power)?.is_derivable();
        if derivable {
            return Err(SynthesisError::Derivable(power));
        }
        Some(false)
    } else {
        None
    };
    Ok(Refutation { behavior, word, word_text, power, leaf, leaf_explored, full_search })
}
