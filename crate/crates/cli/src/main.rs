//! `actlogic` command-line tool.
//!
//! Exit codes: 0 for a positive result, 1 for an expected negative result
//! (underivable, counterexample, rule violation, wrong machine behavior),
//! 2 for usage and input errors.

mod verify;

use std::fs;
use std::io::{self, Read};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use actlogic::act::check_act_proof;
use actlogic::doc::{proof_from_str, proof_from_value, proof_to_value, DocOptions};
use actlogic::encode::{self, Encoding, Kind, DEFAULT_NEGVAR};
use actlogic::grammar::{build_g, member_from, to_gnf, total_up_to, Grammar, Totality};
use actlogic::malc::{self, ProveResult};
use actlogic::synthesize::{prove_cycling_kind, refute_halting, SynthesisError};
use actlogic::syntax::parse_sequent;
use actlogic::turing::{Sym, TuringMachine};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "actlogic", version, about = "Action logic workbench")]
struct Cli {
    /// Write the result document to FILE instead of standard output.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Decide a star-free sequent and emit a cut-free proof document.
    Prove {
        /// The sequent, e.g. "a, a\c |- c".
        sequent: Option<String>,
        /// Read the sequent from a file ("-" for standard input).
        #[arg(long, conflicts_with = "sequent")]
        file: Option<PathBuf>,
        /// Replace recurring formulas by named abbreviations.
        #[arg(long)]
        abbreviate: bool,
    },
    /// Check a proof document ("-" for standard input).
    Check { file: PathBuf },
    /// Run a Turing machine.
    TmRun(MachineArgs),
    /// Print the protocol word of a run.
    TmProtocol(MachineArgs),
    /// Build the grammar that misses exactly the halting protocol.
    GrammarBuild(MachineArgs),
    /// Test membership of a word.
    GrammarMember {
        #[arg(short = 'g', long = "grammar")]
        grammar: PathBuf,
        /// The word; letters separated by spaces or written together.
        #[arg(short = 'w', long)]
        word: String,
        /// Nonterminal to derive from (default: the start symbol).
        #[arg(long)]
        from: Option<String>,
    },
    /// Check that every nonempty word up to a length is generated.
    GrammarTotal {
        #[arg(short = 'g', long = "grammar")]
        grammar: PathBuf,
        #[arg(short = 'n', long)]
        n: usize,
    },
    /// Convert a grammar to Greibach normal form.
    GrammarGnf {
        #[arg(short = 'g', long = "grammar")]
        grammar: PathBuf,
    },
    /// Translate a Greibach grammar into formulas.
    Encode {
        #[arg(short = 'g', long = "grammar")]
        grammar: PathBuf,
        #[arg(long, default_value = "full")]
        kind: Kind,
        #[arg(long)]
        negvar: Option<String>,
    },
    /// Build a checked proof that a trivially cycling machine cycles.
    Synthesize {
        #[command(flatten)]
        machine: MachineArgs,
        #[arg(long, default_value = "full")]
        kind: Kind,
        #[arg(long)]
        negvar: Option<String>,
        /// Re-read the emitted document and check it again.
        #[arg(long)]
        check: bool,
        /// Write formulas in full instead of abbreviating them.
        #[arg(long)]
        no_abbreviate: bool,
    },
    /// Show that a halting machine's power sequent is underivable.
    Refute {
        #[command(flatten)]
        machine: MachineArgs,
    },
    /// Run a property suite.
    Verify {
        #[arg(value_enum)]
        suite: verify::Suite,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Worker threads.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
}

#[derive(Args)]
struct MachineArgs {
    /// Machine document.
    #[arg(short = 'm', long = "machine")]
    machine: PathBuf,
    /// Input word over the input alphabet.
    #[arg(short = 'x', long = "input", default_value = "")]
    input: String,
    #[arg(long, default_value_t = 1000)]
    max_steps: usize,
}

/// A result document, its text rendering and whether it is positive.
struct Outcome {
    doc: Value,
    text: String,
    positive: bool,
}

impl Outcome {
    fn new(positive: bool, doc: Value, text: impl Into<String>) -> Self {
        Outcome { doc, text: text.into(), positive }
    }
}

/// Usage or input error.
#[derive(Debug)]
struct Failure(String);

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(e.to_string())
    }
}

type Result<T> = std::result::Result<T, Failure>;

fn read_input(path: &Path) -> Result<String> {
    if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        Ok(s)
    } else {
        fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))
    }
}

fn load_machine(a: &MachineArgs) -> Result<(TuringMachine, Vec<Sym>)> {
    let m = TuringMachine::from_json(&read_input(&a.machine)?)?;
    let x = m.parse_input(&a.input)?;
    Ok((m, x))
}

fn load_grammar(path: &Path) -> Result<Grammar> {
    Ok(Grammar::from_json(&read_input(path)?)?)
}

fn prove(sequent: Option<String>, file: Option<PathBuf>, abbreviate: bool) -> Result<Outcome> {
    let text = match (sequent, file) {
        (Some(s), _) => s,
        (None, Some(f)) => read_input(&f)?,
        (None, None) => return Err(Failure("give a sequent or --file".into())),
    };
    let s = parse_sequent(text.trim())?;
    Ok(match malc::prove(&s)? {
        ProveResult::Derivable(p) => {
            let nodes = p.distinct_nodes();
            Outcome::new(true, proof_to_value(&p, DocOptions { abbreviate }), format!("derivable: {s} ({nodes} nodes)"))
        }
        ProveResult::Underivable { explored } => Outcome::new(
            false,
            json!({"result": "underivable", "sequent": s.to_string(), "explored": explored}),
            format!("underivable: {s}"),
        ),
    })
}

fn check(file: &Path) -> Result<Outcome> {
    let p = proof_from_str(&read_input(file)?)?;
    Ok(match check_act_proof(&p) {
        Ok(()) => {
            let fragment = if malc::check_proof(&p).is_ok() { "malc" } else { "act" };
            let doc = json!({
                "result": "ok",
                "conclusion": p.conclusion.to_string(),
                "fragment": fragment,
                "nodes": p.distinct_nodes(),
            });
            Outcome::new(true, doc, format!("ok ({fragment}): {}", p.conclusion))
        }
        Err(v) => Outcome::new(
            false,
            json!({"result": "violation", "path": v.path, "reason": v.reason}),
            format!("rule violation at {:?}: {}", v.path, v.reason),
        ),
    })
}

fn tm_run(a: &MachineArgs) -> Result<Outcome> {
    let (m, x) = load_machine(a)?;
    let (trace, behavior) = m.run(&x, a.max_steps);
    let codes: Vec<String> = trace.iter().map(|c| m.show_word_spaced(&c.code())).collect();
    let text = format!("{behavior}\n{}", codes.join("\n"));
    Ok(Outcome::new(true, json!({"behavior": behavior, "trace": codes}), text))
}

fn tm_protocol(a: &MachineArgs) -> Result<Outcome> {
    let (m, x) = load_machine(a)?;
    let p = m.protocol(&x, a.max_steps);
    let word = m.show_word_spaced(&p.word);
    let doc = json!({"word": word, "length": p.len(), "complete": p.complete});
    Ok(Outcome::new(true, doc, word))
}

fn grammar_build(a: &MachineArgs) -> Result<Outcome> {
    let (m, x) = load_machine(a)?;
    let g = build_g(&m, &x);
    Ok(Outcome::new(true, serde_json::to_value(g.to_doc())?, g.to_string()))
}

fn grammar_member(path: &Path, word: &str, from: Option<&str>) -> Result<Outcome> {
    let g = load_grammar(path)?;
    let w = g.parse_word(word)?;
    let root = match from {
        None => g.start(),
        Some(n) => g.nonterminal(n).ok_or_else(|| Failure(format!("unknown nonterminal {n}")))?,
    };
    let yes = member_from(&g, root, &w)?;
    let verdict = if yes { "member" } else { "not a member" };
    Ok(Outcome::new(yes, json!({"member": yes, "word": g.show_word(&w), "from": g.nonterminals()[root]}), verdict))
}

fn grammar_total(path: &Path, n: usize) -> Result<Outcome> {
    let g = load_grammar(path)?;
    Ok(match total_up_to(&g, n) {
        Totality::AllGenerated => Outcome::new(true, json!({"total": true, "n": n}), format!("all words up to length {n}")),
        Totality::Counterexample(w) => {
            let w = g.show_word(&w);
            Outcome::new(false, json!({"total": false, "n": n, "counterexample": w}), format!("counterexample: {w}"))
        }
    })
}

fn grammar_gnf(path: &Path) -> Result<Outcome> {
    let g = to_gnf(&load_grammar(path)?)?;
    Ok(Outcome::new(true, serde_json::to_value(g.to_doc())?, g.to_string()))
}

fn encode_grammar(path: &Path, kind: Kind, negvar: Option<&str>) -> Result<Outcome> {
    let g = load_grammar(path)?;
    let enc = Encoding::new(&g)?;
    let b = match (kind, negvar) {
        (Kind::Full, _) => None,
        (_, Some(b)) => Some(b.to_string()),
        (_, None) => Some(enc.fresh_negvar(DEFAULT_NEGVAR)),
    };
    let bref = b.as_deref().unwrap_or(DEFAULT_NEGVAR);
    let mut letters = serde_json::Map::new();
    for (a, name) in g.terminals().iter().enumerate() {
        let f = match kind {
            Kind::Vee => enc.phi_vee(a, bref)?,
            _ => enc.phi(a).clone(),
        };
        letters.insert(name.clone(), json!(f.to_string()));
    }
    let psi = enc.psi_of(kind, bref)?;
    let target = enc.target_sequent(kind, bref)?;
    let variables: Vec<String> = encode::variable_names(&g);
    let doc = json!({
        "kind": kind.name(),
        "negvar": b,
        "variables": variables,
        "letters": letters,
        "psi": psi.to_string(),
        "target": target.to_string(),
    });
    Ok(Outcome::new(true, doc, target.to_string()))
}

fn synthesize(a: &MachineArgs, kind: Kind, negvar: Option<&str>, recheck: bool, abbreviate: bool) -> Result<Outcome> {
    let (m, x) = load_machine(a)?;
    let rep = match prove_cycling_kind(&m, &x, a.max_steps, kind, negvar) {
        Ok(r) => r,
        Err(e @ SynthesisError::NotCycling(_)) => {
            return Ok(Outcome::new(false, json!({"result": "not cycling", "reason": e.to_string()}), e.to_string()))
        }
        Err(e) => return Err(e.into()),
    };
    let doc = rep.to_value(DocOptions { abbreviate });
    if recheck {
        let p = proof_from_value(&doc)?;
        check_act_proof(&p).map_err(|v| Failure(format!("emitted proof fails the checker: {v}")))?;
        log::info!("re-checked {} nodes", p.distinct_nodes());
    }
    let text = format!(
        "{}\n{}: n = {}, {} nodes, {} ms",
        rep.proof.conclusion,
        rep.kind,
        rep.n,
        rep.node_count,
        rep.elapsed_ms
    );
    Ok(Outcome::new(true, doc, text))
}

fn refute(a: &MachineArgs) -> Result<Outcome> {
    let (m, x) = load_machine(a)?;
    Ok(match refute_halting(&m, &x, a.max_steps) {
        Ok(r) => {
            let text = format!("{}: {} is not generated and {} is underivable", r.behavior, r.word_text, r.leaf);
            Outcome::new(true, r.to_value(), text)
        }
        Err(e @ SynthesisError::NotHalted(_)) => {
            Outcome::new(false, json!({"result": "not halted", "reason": e.to_string()}), e.to_string())
        }
        Err(e) => return Err(e.into()),
    })
}

fn run(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Prove { sequent, file, abbreviate } => prove(sequent.clone(), file.clone(), *abbreviate),
        Command::Check { file } => check(file),
        Command::TmRun(a) => tm_run(a),
        Command::TmProtocol(a) => tm_protocol(a),
        Command::GrammarBuild(a) => grammar_build(a),
        Command::GrammarMember { grammar, word, from } => grammar_member(grammar, word, from.as_deref()),
        Command::GrammarTotal { grammar, n } => grammar_total(grammar, *n),
        Command::GrammarGnf { grammar } => grammar_gnf(grammar),
        Command::Encode { grammar, kind, negvar } => encode_grammar(grammar, *kind, negvar.as_deref()),
        Command::Synthesize { machine, kind, negvar, check, no_abbreviate } => {
            synthesize(machine, *kind, negvar.as_deref(), *check, !no_abbreviate)
        }
        Command::Refute { machine } => refute(machine),
        Command::Verify { suite, samples, seed, jobs } => {
            let r = verify::run(*suite, *samples, *seed, (*jobs).max(1));
            Ok(Outcome::new(r.passed, r.to_value(), r.to_string()))
        }
    }
}

fn emit(cli: &Cli, o: &Outcome) -> io::Result<()> {
    let mut body = match cli.format {
        Format::Json => serde_json::to_string_pretty(&o.doc).expect("JSON values always serialize"),
        Format::Text => o.text.clone(),
    };
    body.push('\n');
    match &cli.out {
        Some(path) => fs::write(path, body),
        None => {
            use io::Write;
            let mut out = io::stdout().lock();
            out.write_all(body.as_bytes())?;
            out.flush()
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(o) => {
            if let Err(e) = emit(&cli, &o) {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            if o.positive {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
