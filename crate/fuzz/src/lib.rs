//! Harnesses shared by the fuzz targets and the seed replay test. Each one
//! must return normally on every input; a panic is a finding.

use actlogic::act::check_act_proof;
use actlogic::doc::{proof_from_str, proof_to_string, DocOptions};
use actlogic::grammar::{member, to_gnf, total_up_to, Grammar};
use actlogic::syntax::{self, print_formula};
use actlogic::turing::TuringMachine;

/// Inputs longer than this are skipped; they only slow the search down.
pub const MAX_LEN: usize = 4096;

fn text(data: &[u8]) -> Option<&str> {
    if data.len() > MAX_LEN {
        return None;
    }
    std::str::from_utf8(data).ok()
}

/// Parsing then printing then parsing again gives the same formula.
pub fn parse_formula(data: &[u8]) {
    let Some(s) = text(data) else { return };
    if let Ok(f) = syntax::parse_formula(s) {
        let printed = print_formula(&f);
        let again = syntax::parse_formula(&printed).expect("printed formulas parse");
        assert_eq!(f, again, "{s:?} printed as {printed:?}");
    }
}

pub fn parse_sequent(data: &[u8]) {
    let Some(s) = text(data) else { return };
    if let Ok(q) = syntax::parse_sequent(s) {
        let printed = q.to_string();
        let again = syntax::parse_sequent(&printed).expect("printed sequents parse");
        assert_eq!(q, again, "{s:?} printed as {printed:?}");
    }
}

/// Reading a proof document and checking it; accepted proofs survive a
/// write and read cycle.
pub fn proof_document(data: &[u8]) {
    let Some(s) = text(data) else { return };
    let Ok(p) = proof_from_str(s) else { return };
    if p.distinct_nodes() > 512 {
        return;
    }
    if check_act_proof(&p).is_ok() {
        for abbreviate in [false, true] {
            let again = proof_from_str(&proof_to_string(&p, DocOptions { abbreviate })).expect("written documents read back");
            assert_eq!(again.conclusion, p.conclusion);
            assert!(check_act_proof(&again).is_ok());
        }
    }
}

/// Loading a machine, running it briefly and reading its protocol back.
pub fn machine_json(data: &[u8]) {
    let Some(s) = text(data) else { return };
    let Ok(m) = TuringMachine::from_json(s) else { return };
    if m.sigma_len() > 16 {
        return;
    }
    let again = TuringMachine::from_json(&m.to_json()).expect("written machines read back");
    assert_eq!(again.names(), m.names());
    let x: Vec<_> = m.input_symbols().iter().copied().cycle().take(3).collect();
    let (trace, _) = m.run(&x, 32);
    for c in &trace {
        let code = c.code();
        assert!(m.is_valid_code(&code));
        assert_eq!(m.decode(&code).expect("codes decode"), *c);
    }
    let p = m.protocol(&x, 32);
    assert!(m.is_protocol_prefix(&x, &p.word));
}

/// Loading a grammar and, when it is small, converting it to Greibach form
/// and comparing short words.
pub fn grammar_json(data: &[u8]) {
    let Some(s) = text(data) else { return };
    let Ok(g) = Grammar::from_json(s) else { return };
    let again = Grammar::from_json(&g.to_json()).expect("written grammars read back");
    assert_eq!(again.productions().len(), g.productions().len());
    let letters = g.terminals().len();
    let small = g.productions().len() <= 8 && g.productions().iter().all(|p| p.rhs.len() <= 3) && letters <= 3;
    if !small {
        return;
    }
    let _ = total_up_to(&g, 3);
    let Ok(h) = to_gnf(&g) else { return };
    assert!(h.is_gnf());
    let mut words: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..4 {
        let next: Vec<Vec<usize>> = words
            .iter()
            .filter(|w| w.len() < 4)
            .flat_map(|w| (0..letters).map(move |a| [w.as_slice(), &[a]].concat()))
            .collect();
        words.extend(next);
    }
    for w in words.iter().filter(|w| !w.is_empty()) {
        assert_eq!(member(&g, w).unwrap(), member(&h, w).unwrap(), "{w:?}");
    }
}
