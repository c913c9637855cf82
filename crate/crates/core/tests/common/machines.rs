//! Small machines used across integration tests.
#![allow(dead_code)]

use actlogic::turing::TuringMachine;

fn rule(r: &str) -> String {
    let f: Vec<&str> = r.split_whitespace().collect();
    format!(r#"{{"from":"{}","read":"{}","to":"{}","write":"{}","move":"{}"}}"#, f[0], f[1], f[2], f[3], f[4])
}

/// Builds a machine from space-separated lists and rules written
/// `from read to write move`.
pub fn machine(states: &str, tape: &str, input: &str, rules: &[&str]) -> TuringMachine {
    let list = |s: &str| serde_json::to_string(&s.split_whitespace().collect::<Vec<_>>()).unwrap();
    let rules: Vec<String> = rules.iter().map(|r| rule(r)).collect();
    let json = format!(
        r#"{{"states":{},"initial":"q0","cycling":"qc","tape_alphabet":{},"input_alphabet":{},"blank":"_","rules":[{}]}}"#,
        list(states),
        list(tape),
        list(input),
        rules.join(",")
    );
    TuringMachine::from_json(&json).unwrap()
}

/// The two-state cycler: `<q0,_> -> <qc,_,N>` over the blank alphabet.
pub fn cycler() -> TuringMachine {
    machine("q0 qc", "_", "", &["q0 _ qc _ N"])
}

/// Halts immediately on every input.
pub fn immediate_halter() -> TuringMachine {
    machine("q0 qc", "_ a", "a", &[])
}

/// Rewrites the first letter and halts after one step.
pub fn one_step_halter() -> TuringMachine {
    machine("q0 q1 qc", "_ a", "a", &["q0 a q1 _ N"])
}

/// Moves right twice and halts (two steps on "a").
pub fn two_step_halter() -> TuringMachine {
    machine("q0 q1 qh qc", "_ a", "a", &["q0 a q1 a R", "q1 _ qh _ R"])
}

/// Cycles on "a" without moving: `<q0,a> -> <qc,a,N>`.
pub fn cycler_on_a() -> TuringMachine {
    machine("q0 qc", "_ a", "a", &["q0 a qc a N"])
}

/// Moves right once, entering the cycling state on the blank.
pub fn moving_cycler() -> TuringMachine {
    machine("q0 qc", "_", "", &["q0 _ qc _ R"])
}

/// Moves left off the first cell, then halts.
pub fn left_halter() -> TuringMachine {
    machine("q0 q1 qc", "_ a", "a", &["q0 a q1 a L"])
}

/// Shuttles between the first two cells forever.
pub fn bouncer() -> TuringMachine {
    machine("q0 q1 qc", "_ a", "a", &["q0 a q1 a R", "q1 _ q0 _ L"])
}

/// Writes `a` to the right forever.
pub fn writer() -> TuringMachine {
    machine("q0 qc", "_ a", "", &["q0 _ q0 a R"])
}

/// Runs right forever.
pub fn right_runner() -> TuringMachine {
    machine("q0 qc", "_ a", "a", &["q0 a q0 a R", "q0 _ q0 _ R"])
}

/// Machines exercising every kind of move, with their inputs.
pub fn assorted() -> Vec<(TuringMachine, &'static str)> {
    vec![
        (cycler(), ""),
        (immediate_halter(), "a"),
        (one_step_halter(), "a"),
        (two_step_halter(), "a"),
        (right_runner(), "a"),
        (machine("q0 q1 qc", "_ a", "a", &["q0 a q1 a R", "q1 _ q0 a L"]), "a"),
        (machine("q0 q1 qc", "_ a", "a", &["q0 a q1 _ L"]), "a"),
        (machine("q0 q1 qc", "_ a", "a", &["q0 a q1 a R", "q1 _ qc _ N"]), "a"),
    ]
}

/// Ten machines covering every behavior, with their inputs.
pub fn corpus() -> Vec<(&'static str, TuringMachine, &'static str)> {
    vec![
        ("cycler", cycler(), ""),
        ("cycler on a", cycler_on_a(), "a"),
        ("moving cycler", moving_cycler(), ""),
        ("immediate halter", immediate_halter(), "a"),
        ("one-step halter", one_step_halter(), "a"),
        ("two-step halter", two_step_halter(), "a"),
        ("left halter", left_halter(), "a"),
        ("right runner", right_runner(), "a"),
        ("bouncer", bouncer(), "a"),
        ("writer", writer(), ""),
    ]
}
