//! Property suites runnable from the command line. Every sample draws from
//! its own seeded generator, so results do not depend on `--jobs`.

use std::fmt;
use std::time::Instant;

use actlogic::act::{check_act_proof, synth_long_rule, synth_long_rule_meet, ActProof};
use actlogic::build;
use actlogic::encode::{pdneg, Encoding, Kind};
use actlogic::grammar::{member_from, Grammar, GrammarBuilder, Symbol};
use actlogic::malc::derivable;
use actlogic::synthesize::prove_cycling_kind;
use actlogic::syntax::{Formula, Sequent};
use actlogic::turing::TuringMachine;
use clap::ValueEnum;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    /// Double negation by a fresh variable preserves derivability.
    Dn,
    /// Cutting derivable sequents stays derivable.
    Cut,
    /// Membership agrees with derivability of letter-formula sequents.
    GrammarLogic,
    /// Both long rules give checking proofs of `a+ |- a^*`.
    LongRule,
    /// The two-state cycler yields checking proofs of every kind.
    Cycler,
}

pub struct Report {
    pub suite: Suite,
    pub samples: usize,
    pub checked: usize,
    pub failures: Vec<String>,
    pub passed: bool,
    pub elapsed_ms: u128,
}

impl Report {
    pub fn to_value(&self) -> Value {
        json!({
            "suite": format!("{:?}", self.suite),
            "samples": self.samples,
            "checked": self.checked,
            "passed": self.passed,
            "failures": self.failures,
            "elapsed_ms": self.elapsed_ms,
        })
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{verdict} {:?}: {} checks in {} ms", self.suite, self.checked, self.elapsed_ms)?;
        for e in &self.failures {
            write!(f, "\n  {e}")?;
        }
        Ok(())
    }
}

/// Result of one sample: `None` when the sample was skipped.
type Sample = Option<Result<(), String>>;

pub fn run(suite: Suite, samples: usize, seed: u64, jobs: usize) -> Report {
    let start = Instant::now();
    let count = match suite {
        Suite::LongRule => 5,
        Suite::Cycler => Kind::ALL.len(),
        _ => samples,
    };
    let results = parallel(count, jobs, |i| {
        let mut r = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(i as u64));
        match suite {
            Suite::Dn => dn(&mut r),
            Suite::Cut => cut(&mut r),
            Suite::GrammarLogic => grammar_logic(&mut r),
            Suite::LongRule => Some(long_rule_case(i)),
            Suite::Cycler => Some(cycler_case(Kind::ALL[i])),
        }
    });
    let checked = results.iter().filter(|r| r.is_some()).count();
    let failures: Vec<String> = results.into_iter().flatten().filter_map(|r| r.err()).collect();
    Report {
        suite,
        samples: count,
        checked,
        passed: failures.is_empty(),
        failures,
        elapsed_ms: start.elapsed().as_millis(),
    }
}

fn parallel(count: usize, jobs: usize, f: impl Fn(usize) -> Sample + Sync) -> Vec<Sample> {
    let mut out: Vec<Sample> = vec![None; count];
    let chunk = count.div_ceil(jobs.max(1)).max(1);
    std::thread::scope(|s| {
        for (c, slot) in out.chunks_mut(chunk).enumerate() {
            let f = &f;
            s.spawn(move || {
                for (j, r) in slot.iter_mut().enumerate() {
                    *r = f(c * chunk + j);
                }
            });
        }
    });
    out
}

const VARS: [&str; 3] = ["p", "q", "r"];

fn formula(r: &mut ChaCha8Rng, budget: usize) -> Formula {
    if budget == 0 || r.gen_bool(0.3) {
        return match r.gen_range(0..12) {
            0 => Formula::one(),
            1 => Formula::zero(),
            _ => Formula::var(VARS.choose(r).expect("nonempty")),
        };
    }
    let left = r.gen_range(0..budget);
    let a = formula(r, left);
    let b = formula(r, budget - 1 - left);
    match r.gen_range(0..5) {
        0 => Formula::product(a, b),
        1 => Formula::ldiv(a, b),
        2 => Formula::rdiv(a, b),
        3 => Formula::meet(a, b),
        _ => Formula::join(a, b),
    }
}

fn sequent(r: &mut ChaCha8Rng, budget: usize) -> Sequent {
    let n = r.gen_range(0..=3);
    let mut left = budget;
    let mut ante = Vec::with_capacity(n);
    for _ in 0..n {
        let k = r.gen_range(0..=left);
        left -= k;
        ante.push(formula(r, k));
    }
    Sequent::new(ante, formula(r, left))
}

fn ok(s: &Sequent) -> bool {
    derivable(s).expect("generated sequents are star-free")
}

fn dn(r: &mut ChaCha8Rng) -> Sample {
    let budget = r.gen_range(1..=6);
    let s = sequent(r, budget);
    let lift = |f: &Formula| pdneg(f, "b").expect("generated formulas avoid b");
    let lifted = Sequent::new(s.antecedent.iter().map(lift).collect(), lift(&s.succedent));
    let (a, b) = (ok(&s), ok(&lifted));
    Some(if a == b { Ok(()) } else { Err(format!("{s}: {a}, lifted {b}")) })
}

fn cut(r: &mut ChaCha8Rng) -> Sample {
    let budget = r.gen_range(1..=6);
    let major = sequent(r, budget);
    if major.antecedent.is_empty() || !ok(&major) {
        return None;
    }
    let pos = r.gen_range(0..major.antecedent.len());
    let a = major.antecedent[pos].clone();
    let minor = (0..20)
        .map(|_| {
            let n = r.gen_range(1..=2);
            Sequent::new((0..n).map(|_| formula(r, 2)).collect(), a.clone())
        })
        .find(ok)
        .unwrap_or_else(|| Sequent::new(vec![Formula::meet(a.clone(), formula(r, 1))], a.clone()));
    let mut ante = major.antecedent[..pos].to_vec();
    ante.extend(minor.antecedent.iter().cloned());
    ante.extend(major.antecedent[pos + 1..].iter().cloned());
    let composite = Sequent::new(ante, major.succedent.clone());
    Some(if ok(&composite) { Ok(()) } else { Err(format!("{minor} and {major} derivable, {composite} not")) })
}

fn random_gnf(r: &mut ChaCha8Rng) -> Grammar {
    let letters = r.gen_range(1..=3);
    let names = ["S", "A", "B", "C"];
    let mut b = GrammarBuilder::new(["a", "b", "c"][..letters].iter().map(|s| s.to_string()).collect());
    let nts: Vec<usize> = names[..r.gen_range(1..=4)].iter().map(|n| b.nonterminal(n)).collect();
    let mut count = 0;
    for t in 0..letters {
        b.add(*nts.choose(r).expect("nonempty"), vec![Symbol::T(t)]);
        count += 1;
    }
    for _ in 0..r.gen_range(0..=8 - count) {
        let mut rhs = vec![Symbol::T(r.gen_range(0..letters))];
        for _ in 0..r.gen_range(0..=2) {
            rhs.push(Symbol::N(*nts.choose(r).expect("nonempty")));
        }
        b.add(*nts.choose(r).expect("nonempty"), rhs);
    }
    b.finish(nts[0]).expect("generated grammars are well-formed")
}

fn grammar_logic(r: &mut ChaCha8Rng) -> Sample {
    let g = random_gnf(r);
    let enc = Encoding::new(&g).expect("every letter has a production");
    let len = r.gen_range(1..=4);
    let w: Vec<usize> = (0..len).map(|_| r.gen_range(0..g.terminals().len())).collect();
    for a in 0..g.nonterminals().len() {
        let expected = member_from(&g, a, &w).expect("word over the alphabet");
        let s = Sequent::new(enc.phi_word(&w), enc.var(a).clone());
        if ok(&s) != expected {
            return Some(Err(format!("{s}: membership {expected}\n{g}")));
        }
    }
    Some(Ok(()))
}

fn long_rule_case(n: usize) -> Result<(), String> {
    let a = Formula::var("a");
    let star = Formula::star(a.clone());
    let power = |k: usize| (0..k).fold(build::star_r_0(&a), |acc, _| build::star_r_fp(build::ax(&a), acc));
    let tail = build::prod_l(build::star_r_fp(build::ax(&a), build::ax(&star)), 0);
    let last = (0..n).fold(tail, |acc, _| build::star_r_fp(build::ax(&a), acc));
    let mut prem: Vec<ActProof> = (1..=n).map(|k| ActProof::new(power(k)).map_err(|e| e.to_string())).collect::<Result<_, _>>()?;
    prem.push(ActProof::new(last).map_err(|e| e.to_string())?);
    let full = synth_long_rule(&a, &star, n, &prem).map_err(|e| format!("n = {n}: {e}"))?;
    let meet = synth_long_rule_meet(&a, &star, n, &prem).map_err(|e| format!("n = {n}: {e}"))?;
    check_act_proof(&full).map_err(|e| format!("n = {n}: {e}"))?;
    check_act_proof(&meet).map_err(|e| format!("n = {n}: {e}"))?;
    if meet.mentions_join() {
        return Err(format!("n = {n}: join-free long rule mentions a join"));
    }
    Ok(())
}

const CYCLER: &str = r#"{"states":["q0","qc"],"initial":"q0","cycling":"qc","tape_alphabet":["_"],"input_alphabet":[],"blank":"_","rules":[{"from":"q0","read":"_","to":"qc","write":"_","move":"N"}]}"#;

fn cycler_case(kind: Kind) -> Result<(), String> {
    let m = TuringMachine::from_json(CYCLER).expect("valid machine");
    let rep = prove_cycling_kind(&m, &[], 100, kind, None).map_err(|e| format!("{kind}: {e}"))?;
    check_act_proof(rep.proof.proof()).map_err(|e| format!("{kind}: {e}"))?;
    let clean = match kind {
        Kind::Full => true,
        Kind::Vee => !rep.proof.mentions_meet(),
        Kind::Wedge => !rep.proof.mentions_join(),
    };
    if clean {
        Ok(())
    } else {
        Err(format!("{kind}: proof leaves its fragment"))
    }
}
