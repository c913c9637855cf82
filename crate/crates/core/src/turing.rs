//! Deterministic single-tape Turing machines.
//!
//! Machines work over one combined alphabet Σ: tape symbols come first, then
//! states, then the separator `#`. A [`Sym`] indexes into Σ. Configurations
//! are encoded as words `a1..a(i-1) q ai..am` with exactly one state symbol,
//! which is never the rightmost letter. A protocol is `#k0#k1#..#kn#`.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Index into the machine alphabet Σ.
pub type Sym = usize;

pub const SEPARATOR: &str = "#";

#[derive(Debug, Error)]
pub enum TuringError {
    #[error("invalid machine JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid machine: {0}")]
    Invalid(String),
    #[error("ill-formed configuration: {0}")]
    IllFormedConfiguration(String),
    #[error("cannot read word: {0}")]
    BadWord(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Move {
    L,
    R,
    N,
}

/// Right-hand side of a rule `<q, a> -> <to, write, mv>`. Both fields are Σ
/// indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Action {
    pub to: Sym,
    pub write: Sym,
    pub mv: Move,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleDoc {
    pub from: String,
    pub read: String,
    pub to: String,
    pub write: String,
    #[serde(rename = "move")]
    pub mv: Move,
}

/// Serialized form of a machine.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MachineDoc {
    pub states: Vec<String>,
    pub initial: String,
    pub cycling: String,
    pub tape_alphabet: Vec<String>,
    pub input_alphabet: Vec<String>,
    pub blank: String,
    pub rules: Vec<RuleDoc>,
}

#[derive(Debug, Clone)]
pub struct TuringMachine {
    names: Vec<String>,
    index: HashMap<String, Sym>,
    n_tape: usize,
    n_states: usize,
    initial: Sym,
    cycling: Sym,
    blank: Sym,
    input: Vec<Sym>,
    rules: HashMap<(Sym, Sym), Action>,
    warnings: Vec<String>,
}

impl TuringMachine {
    pub fn from_json(text: &str) -> Result<Self, TuringError> {
        let doc: MachineDoc = serde_json::from_str(text)?;
        Self::from_doc(&doc)
    }

    /// Validates a machine description. Missing `q_c` self-loops are added
    /// (with a logged warning); a conflicting rule at `q_c` is an error.
    pub fn from_doc(doc: &MachineDoc) -> Result<Self, TuringError> {
        let bad = |m: String| Err(TuringError::Invalid(m));
        let mut names = Vec::new();
        let mut index = HashMap::new();
        for (kind, list) in [("tape symbol", &doc.tape_alphabet), ("state", &doc.states)] {
            for name in list {
                if name.is_empty() || name.chars().any(char::is_whitespace) {
                    return bad(format!("{kind} {name:?} must be a nonempty token without spaces"));
                }
                if name.contains(SEPARATOR) {
                    return bad(format!("{kind} {name:?} uses the reserved symbol #"));
                }
                if index.insert(name.clone(), names.len()).is_some() {
                    return bad(format!("{name:?} is declared twice (states and tape symbols must be disjoint)"));
                }
                names.push(name.clone());
            }
        }
        let n_tape = doc.tape_alphabet.len();
        let n_states = doc.states.len();
        if n_states == 0 {
            return bad("no states".into());
        }
        index.insert(SEPARATOR.to_string(), names.len());
        names.push(SEPARATOR.to_string());

        let state = |name: &str, what: &str| -> Result<Sym, TuringError> {
            match index.get(name) {
                Some(&i) if i >= n_tape && i < n_tape + n_states => Ok(i),
                _ => Err(TuringError::Invalid(format!("{what} {name:?} is not a state"))),
            }
        };
        let tape = |name: &str, what: &str| -> Result<Sym, TuringError> {
            match index.get(name) {
                Some(&i) if i < n_tape => Ok(i),
                _ => Err(TuringError::Invalid(format!("{what} {name:?} is not a tape symbol"))),
            }
        };
        let initial = state(&doc.initial, "initial")?;
        let cycling = state(&doc.cycling, "cycling")?;
        let blank = tape(&doc.blank, "blank")?;
        let mut input = Vec::new();
        for s in &doc.input_alphabet {
            input.push(tape(s, "input symbol")?);
        }

        let mut rules = HashMap::new();
        for r in &doc.rules {
            let key = (state(&r.from, "rule source")?, tape(&r.read, "rule read")?);
            let act = Action { to: state(&r.to, "rule target")?, write: tape(&r.write, "rule write")?, mv: r.mv };
            if rules.insert(key, act).is_some() {
                return bad(format!("two rules for <{}, {}>", r.from, r.read));
            }
        }
        let mut warnings = Vec::new();
        for a in 0..n_tape {
            let fixed = Action { to: cycling, write: a, mv: Move::N };
            match rules.get(&(cycling, a)) {
                None => {
                    rules.insert((cycling, a), fixed);
                    warnings.push(format!("added rule <{0}, {1}> -> <{0}, {1}, N>", doc.cycling, names[a]));
                }
                Some(act) if *act != fixed => {
                    return bad(format!("rule at <{}, {}> must keep the configuration fixed", doc.cycling, names[a]));
                }
                Some(_) => {}
            }
        }
        for w in &warnings {
            log::warn!("{w}");
        }
        Ok(TuringMachine { names, index, n_tape, n_states, initial, cycling, blank, input, rules, warnings })
    }

    pub fn to_doc(&self) -> MachineDoc {
        let mut rules: Vec<_> = self.rules.iter().collect();
        rules.sort_by_key(|(k, _)| **k);
        MachineDoc {
            states: self.names[self.n_tape..self.n_tape + self.n_states].to_vec(),
            initial: self.names[self.initial].clone(),
            cycling: self.names[self.cycling].clone(),
            tape_alphabet: self.names[..self.n_tape].to_vec(),
            input_alphabet: self.input.iter().map(|&s| self.names[s].clone()).collect(),
            blank: self.names[self.blank].clone(),
            rules: rules
                .into_iter()
                .map(|(&(q, a), act)| RuleDoc {
                    from: self.names[q].clone(),
                    read: self.names[a].clone(),
                    to: self.names[act.to].clone(),
                    write: self.names[act.write].clone(),
                    mv: act.mv,
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_doc()).expect("machine documents serialize")
    }

    /// Warnings produced while loading (inserted `q_c` rules).
    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// Size of Σ (tape symbols, states and `#`).
    pub fn sigma_len(&self) -> usize {
        self.names.len()
    }
    pub fn name(&self, s: Sym) -> &str {
        &self.names[s]
    }
    pub fn names(&self) -> &[String] {
        &self.names
    }
    pub fn lookup(&self, name: &str) -> Option<Sym> {
        self.index.get(name).copied()
    }
    pub fn tape_symbols(&self) -> std::ops::Range<Sym> {
        0..self.n_tape
    }
    pub fn states(&self) -> std::ops::Range<Sym> {
        self.n_tape..self.n_tape + self.n_states
    }
    pub fn input_symbols(&self) -> &[Sym] {
        &self.input
    }
    pub fn is_state(&self, s: Sym) -> bool {
        self.states().contains(&s)
    }
    pub fn is_tape(&self, s: Sym) -> bool {
        s < self.n_tape
    }
    pub fn separator(&self) -> Sym {
        self.n_tape + self.n_states
    }
    pub fn initial(&self) -> Sym {
        self.initial
    }
    pub fn cycling(&self) -> Sym {
        self.cycling
    }
    pub fn blank(&self) -> Sym {
        self.blank
    }
    pub fn rule(&self, state: Sym, read: Sym) -> Option<&Action> {
        self.rules.get(&(state, read))
    }
    /// Rules sorted by their left-hand side.
    pub fn rules(&self) -> Vec<((Sym, Sym), Action)> {
        let mut v: Vec<_> = self.rules.iter().map(|(k, a)| (*k, *a)).collect();
        v.sort_by_key(|(k, _)| *k);
        v
    }

    /// Reads a word over Σ. Whitespace-separated tokens are taken as given;
    /// otherwise the text is split greedily by longest matching symbol name.
    pub fn parse_word(&self, text: &str) -> Result<Vec<Sym>, TuringError> {
        let text = text.trim();
        if text.chars().any(char::is_whitespace) {
            return text
                .split_whitespace()
                .map(|t| self.lookup(t).ok_or_else(|| TuringError::BadWord(format!("unknown symbol {t:?}"))))
                .collect();
        }
        let mut out = Vec::new();
        let mut rest = text;
        while !rest.is_empty() {
            let best = self
                .names
                .iter()
                .enumerate()
                .filter(|(_, n)| rest.starts_with(n.as_str()))
                .max_by_key(|(_, n)| n.len());
            match best {
                Some((i, n)) => {
                    out.push(i);
                    rest = &rest[n.len()..];
                }
                None => return Err(TuringError::BadWord(format!("no symbol matches at {rest:?}"))),
            }
        }
        Ok(out)
    }

    /// Reads an input word; every symbol must be in the input alphabet.
    pub fn parse_input(&self, text: &str) -> Result<Vec<Sym>, TuringError> {
        let w = self.parse_word(text)?;
        if let Some(&s) = w.iter().find(|s| !self.input.contains(s)) {
            return Err(TuringError::BadWord(format!("{:?} is not an input symbol", self.names[s])));
        }
        Ok(w)
    }

    pub fn show_word(&self, w: &[Sym]) -> String {
        w.iter().map(|&s| self.names[s].as_str()).collect()
    }

    /// Like [`show_word`](Self::show_word) but separating symbols by spaces,
    /// which always reads back unambiguously.
    pub fn show_word_spaced(&self, w: &[Sym]) -> String {
        w.iter().map(|&s| self.names[s].as_str()).collect::<Vec<_>>().join(" ")
    }

    pub fn initial_configuration(&self, x: &[Sym]) -> Configuration {
        let tape = if x.is_empty() { vec![self.blank] } else { x.to_vec() };
        Configuration { tape, state: self.initial, head: 0 }
    }

    /// Applies the unique applicable rule. `Ok(None)` means no successor.
    pub fn step(&self, c: &Configuration) -> Result<Option<Configuration>, TuringError> {
        self.check_configuration(c)?;
        Ok(self.step_unchecked(c))
    }

    fn step_unchecked(&self, c: &Configuration) -> Option<Configuration> {
        let act = self.rule(c.state, c.tape[c.head])?;
        let mut next = c.clone();
        next.tape[c.head] = act.write;
        next.state = act.to;
        match act.mv {
            Move::N => {}
            Move::L => next.head = c.head.checked_sub(1)?,
            Move::R => {
                next.head += 1;
                if next.head == next.tape.len() {
                    next.tape.push(self.blank);
                }
            }
        }
        Some(next)
    }

    pub fn check_configuration(&self, c: &Configuration) -> Result<(), TuringError> {
        if !self.is_state(c.state) {
            return Err(TuringError::IllFormedConfiguration("state is not a machine state".into()));
        }
        if c.head >= c.tape.len() {
            return Err(TuringError::IllFormedConfiguration("head is off the tape".into()));
        }
        if c.tape.iter().any(|&s| !self.is_tape(s)) {
            return Err(TuringError::IllFormedConfiguration("tape holds a non-tape symbol".into()));
        }
        Ok(())
    }

    /// Decodes a configuration code.
    pub fn decode(&self, code: &[Sym]) -> Result<Configuration, TuringError> {
        let ill = |m: &str| Err(TuringError::IllFormedConfiguration(m.into()));
        let states: Vec<usize> = (0..code.len()).filter(|&i| self.is_state(code[i])).collect();
        if states.len() != 1 {
            return ill("a code holds exactly one state");
        }
        let i = states[0];
        if i + 1 == code.len() {
            return ill("the state is the rightmost letter");
        }
        let mut tape = code.to_vec();
        let state = tape.remove(i);
        let c = Configuration { tape, state, head: i };
        self.check_configuration(&c)?;
        Ok(c)
    }

    pub fn is_valid_code(&self, code: &[Sym]) -> bool {
        self.decode(code).is_ok()
    }

    /// Code of the successor of a valid code, if any.
    pub fn successor_code(&self, code: &[Sym]) -> Option<Vec<Sym>> {
        let c = self.decode(code).ok()?;
        self.step_unchecked(&c).map(|n| n.code())
    }

    /// Simulates from the initial configuration on `x`. Checks, in order:
    /// `q_c` reached, no successor, budget exhausted.
    pub fn run(&self, x: &[Sym], max_steps: usize) -> (Vec<Configuration>, Behavior) {
        let mut trace = vec![self.initial_configuration(x)];
        loop {
            let steps = trace.len() - 1;
            let cur = trace.last().unwrap();
            if cur.state == self.cycling {
                return (trace, Behavior::TriviallyCycles(steps));
            }
            let Some(next) = self.step_unchecked(cur) else {
                return (trace, Behavior::Halts(steps));
            };
            if steps == max_steps {
                return (trace, Behavior::Unknown(max_steps));
            }
            trace.push(next);
        }
    }

    pub fn behavior(&self, x: &[Sym], max_steps: usize) -> Behavior {
        self.run(x, max_steps).1
    }

    /// The protocol word of a run and whether it is complete (halting).
    pub fn protocol(&self, x: &[Sym], max_steps: usize) -> Protocol {
        let (trace, behavior) = self.run(x, max_steps);
        Protocol::from_trace(self, &trace, matches!(behavior, Behavior::Halts(_)))
    }

    /// Checks that `word` is `#k0#..#kn#` with `k0` initial for `x` and each
    /// block the successor of the previous one.
    pub fn is_protocol_prefix(&self, x: &[Sym], word: &[Sym]) -> bool {
        let hash = self.separator();
        if word.len() < 2 || word[0] != hash || *word.last().unwrap() != hash {
            return false;
        }
        let blocks: Vec<&[Sym]> = word[1..word.len() - 1].split(|&s| s == hash).collect();
        if blocks[0] != self.initial_configuration(x).code().as_slice() {
            return false;
        }
        blocks.windows(2).all(|w| self.successor_code(w[0]).as_deref() == Some(w[1]))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Configuration {
    /// Tape contents as Σ indices.
    pub tape: Vec<Sym>,
    /// Current state as a Σ index.
    pub state: Sym,
    /// Zero-based head position.
    pub head: usize,
}

impl Configuration {
    pub fn code(&self) -> Vec<Sym> {
        let mut v = Vec::with_capacity(self.tape.len() + 1);
        v.extend_from_slice(&self.tape[..self.head]);
        v.push(self.state);
        v.extend_from_slice(&self.tape[self.head..]);
        v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Behavior {
    Halts(usize),
    TriviallyCycles(usize),
    Unknown(usize),
}

fn steps(n: usize) -> String {
    if n == 1 {
        "1 step".into()
    } else {
        format!("{n} steps")
    }
}

impl fmt::Display for Behavior {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Behavior::Halts(n) => write!(f, "halts after {}", steps(*n)),
            Behavior::TriviallyCycles(n) => {
                write!(f, "trivially cycles (reaches the cycling state after {})", steps(*n))
            }
            Behavior::Unknown(n) => write!(f, "unknown after {}", steps(*n)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Protocol {
    pub word: Vec<Sym>,
    pub complete: bool,
}

impl Protocol {
    fn from_trace(m: &TuringMachine, trace: &[Configuration], complete: bool) -> Self {
        let hash = m.separator();
        let mut word = vec![hash];
        for c in trace {
            word.extend(c.code());
            word.push(hash);
        }
        Protocol { word, complete }
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }
    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn machine(rules: &str, input: &[&str], tape: &[&str]) -> TuringMachine {
        let json = format!(
            r#"{{"states":["q0","q1","qc"],"initial":"q0","cycling":"qc","tape_alphabet":{},"input_alphabet":{},"blank":"_","rules":[{}]}}"#,
            serde_json::to_string(tape).unwrap(),
            serde_json::to_string(input).unwrap(),
            rules
        );
        TuringMachine::from_json(&json).unwrap()
    }

    fn r(from: &str, read: &str, to: &str, write: &str, mv: &str) -> String {
        format!(r#"{{"from":"{from}","read":"{read}","to":"{to}","write":"{write}","move":"{mv}"}}"#)
    }

    #[test]
    fn step_right_grows_tape() {
        let m = machine(&r("q0", "a", "q1", "b", "R"), &["a"], &["_", "a", "b"]);
        let c = m.decode(&m.parse_word("q0a").unwrap()).unwrap();
        let n = m.step(&c).unwrap().unwrap();
        assert_eq!(m.show_word(&n.code()), "bq1_");
    }

    #[test]
    fn step_without_rule_or_left_edge() {
        let m = machine("", &["a"], &["_", "a"]);
        let c = m.initial_configuration(&m.parse_input("a").unwrap());
        assert_eq!(m.step(&c).unwrap(), None);
        let m = machine(&r("q0", "a", "q1", "a", "L"), &["a"], &["_", "a"]);
        assert_eq!(m.step(&c).unwrap(), None);
    }

    #[test]
    fn ill_formed_codes() {
        let m = machine("", &["a"], &["_", "a"]);
        for w in ["aq0", "q0q1a", "aa", "q0#a"] {
            assert!(m.decode(&m.parse_word(w).unwrap()).is_err(), "{w}");
        }
        let bad = Configuration { tape: vec![1], state: m.initial(), head: 3 };
        assert!(matches!(m.step(&bad), Err(TuringError::IllFormedConfiguration(_))));
    }

    #[test]
    fn run_verdicts() {
        let cyc = machine(&r("q0", "_", "qc", "_", "N"), &["a"], &["_", "a"]);
        assert_eq!(cyc.behavior(&[], 100), Behavior::TriviallyCycles(1));
        let p = cyc.protocol(&[], 100);
        assert_eq!(cyc.show_word(&p.word), "#q0_#qc_#");
        assert_eq!(p.len(), 7);
        assert!(!p.complete);

        let halt = machine("", &["a"], &["_", "a"]);
        let a = halt.parse_input("a").unwrap();
        assert_eq!(halt.behavior(&a, 10), Behavior::Halts(0));
        let p = halt.protocol(&a, 10);
        assert_eq!(halt.show_word(&p.word), "#q0a#");
        assert!(p.complete);

        let runner = machine(&[r("q0", "_", "q0", "_", "R"), r("q0", "a", "q0", "a", "R")].join(","), &["a"], &["_", "a"]);
        assert_eq!(runner.behavior(&a, 100), Behavior::Unknown(100));
        let p = runner.protocol(&a, 5);
        assert!(!p.complete);
        assert!(runner.is_protocol_prefix(&a, &p.word));
    }

    #[test]
    fn cycling_rules_inserted_and_checked() {
        let m = machine("", &["a"], &["_", "a"]);
        assert_eq!(m.warnings().len(), 2);
        let qc = m.cycling();
        for a in m.tape_symbols() {
            assert_eq!(m.rule(qc, a), Some(&Action { to: qc, write: a, mv: Move::N }));
        }
        let json = r#"{"states":["q0","qc"],"initial":"q0","cycling":"qc","tape_alphabet":["_"],"input_alphabet":[],"blank":"_","rules":[{"from":"qc","read":"_","to":"q0","write":"_","move":"N"}]}"#;
        assert!(TuringMachine::from_json(json).is_err());
    }

    #[test]
    fn validation_errors() {
        let base = r#"{"states":["q0","qc"],"initial":"q0","cycling":"qc","tape_alphabet":["_","a"],"input_alphabet":["a"],"blank":"_","rules":[]}"#;
        assert!(TuringMachine::from_json(base).is_ok());
        for (from, to) in [
            (r#""tape_alphabet":["_","a"]"#, r#""tape_alphabet":["_","q0"]"#),
            (r#""tape_alphabet":["_","a"]"#, r##""tape_alphabet":["_","#"]"##),
            (r#""initial":"q0""#, r#""initial":"q9""#),
            (r#""blank":"_""#, r#""blank":"q0""#),
            (r#""input_alphabet":["a"]"#, r#""input_alphabet":["b"]"#),
            (
                r#""rules":[]"#,
                r#""rules":[{"from":"q0","read":"a","to":"q0","write":"a","move":"R"},{"from":"q0","read":"a","to":"qc","write":"a","move":"R"}]"#,
            ),
        ] {
            assert!(TuringMachine::from_json(&base.replace(from, to)).is_err(), "{to}");
        }
    }

    #[test]
    fn json_round_trip_and_sigma_layout() {
        let m = machine(&r("q0", "a", "q1", "b", "R"), &["a"], &["_", "a", "b"]);
        let again = TuringMachine::from_json(&m.to_json()).unwrap();
        assert_eq!(again.to_doc(), m.to_doc());
        assert!(again.warnings().is_empty());
        assert_eq!(m.tape_symbols(), 0..3);
        assert_eq!(m.states(), 3..6);
        assert_eq!(m.name(m.separator()), "#");
    }

    #[test]
    fn word_parsing() {
        let m = machine("", &["a"], &["_", "a"]);
        let w = m.parse_word("#q0a#").unwrap();
        assert_eq!(w.len(), 4);
        assert_eq!(m.parse_word("# q0 a #").unwrap(), w);
        assert!(m.parse_word("x").is_err());
        assert!(m.parse_input("_").is_err());
    }

    #[test]
    fn absorption_after_cycling_state() {
        let m = machine(&r("q0", "a", "qc", "b", "R"), &["a"], &["_", "a", "b"]);
        let (trace, b) = m.run(&m.parse_input("a").unwrap(), 10);
        assert_eq!(b, Behavior::TriviallyCycles(1));
        let last = trace.last().unwrap();
        assert_eq!(m.step(last).unwrap().as_ref(), Some(last));
    }
}
