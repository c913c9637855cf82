//! JSON proof documents.
//!
//! A node is `{"rule": .., "sequent": .., "params": {..}, "premises": [..]}`.
//! A premise may instead be `{"ref": id}`, naming a node defined earlier in
//! the document (any node may carry an `"id"`). Large proofs put shared and
//! deeply nested subtrees into a `"definitions"` array that precedes the root
//! `"proof"`; a bare node is also a valid document. An optional ordered
//! `"abbreviations"` list of `{"name", "formula"}` entries lets sequent texts
//! write `@name` for a recurring formula.

use std::collections::HashMap;
use std::sync::Arc;

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::proof::{Proof, Rule};
use crate::syntax::{
    parse_formula_with, parse_sequent_with, print_formula, print_formula_with, print_sequent_with,
    Formula, SyntaxError,
};

#[derive(Debug, Error)]
pub enum DocError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Syntax(#[from] SyntaxError),
    #[error("malformed proof document: {0}")]
    Shape(String),
}

fn shape(msg: impl Into<String>) -> DocError {
    DocError::Shape(msg.into())
}

/// Subtrees nested deeper than this are hoisted into `definitions`, which
/// keeps every document within the JSON parser's nesting limit.
const HOIST_DEPTH: usize = 24;

#[derive(Debug, Clone, Copy, Default)]
pub struct DocOptions {
    /// Replace recurring large formulas by `@name` references.
    pub abbreviate: bool,
}

pub fn proof_to_value(p: &Proof, opts: DocOptions) -> Value {
    Writer::new(p, opts).finish(p)
}

pub fn proof_to_string(p: &Proof, opts: DocOptions) -> String {
    serde_json::to_string(&proof_to_value(p, opts)).expect("JSON values always serialize")
}

pub fn proof_to_string_pretty(p: &Proof, opts: DocOptions) -> String {
    serde_json::to_string_pretty(&proof_to_value(p, opts)).expect("JSON values always serialize")
}

struct Writer {
    in_degree: HashMap<usize, usize>,
    ids: HashMap<usize, u64>,
    definitions: Vec<Value>,
    abbrevs: HashMap<Formula, String>,
    abbrev_list: Vec<Value>,
}

fn key(p: &Proof) -> usize {
    p as *const Proof as usize
}

impl Writer {
    fn new(root: &Proof, opts: DocOptions) -> Self {
        let mut in_degree = HashMap::new();
        let mut uses: HashMap<Formula, usize> = HashMap::new();
        root.for_each_distinct(|p| {
            for q in &p.premises {
                *in_degree.entry(key(q)).or_insert(0) += 1;
            }
            if opts.abbreviate {
                for f in p.conclusion.formulas() {
                    if f.size() >= 2 {
                        *uses.entry(f.clone()).or_insert(0) += 1;
                    }
                }
            }
        });
        let mut w = Writer {
            in_degree,
            ids: HashMap::new(),
            definitions: Vec::new(),
            abbrevs: HashMap::new(),
            abbrev_list: Vec::new(),
        };
        let mut named: Vec<Formula> =
            uses.into_iter().filter(|&(_, n)| n >= 2).map(|(f, _)| f).collect();
        // Smaller formulas first so definitions can refer to earlier names.
        named.sort_by_key(|f| (f.size(), print_formula(f)));
        for (i, f) in named.into_iter().enumerate() {
            let name = format!("f{i}");
            let text = print_formula_with(&f, &|g| {
                if *g == f {
                    None
                } else {
                    w.abbrevs.get(g).cloned()
                }
            });
            w.abbrev_list.push(json!({"name": name, "formula": text}));
            w.abbrevs.insert(f, name);
        }
        w
    }

    fn finish(mut self, root: &Proof) -> Value {
        let tree = self.node(root, 0, true);
        if self.definitions.is_empty() && self.abbrev_list.is_empty() {
            return tree;
        }
        let mut doc = Map::new();
        if !self.abbrev_list.is_empty() {
            doc.insert("abbreviations".into(), Value::Array(std::mem::take(&mut self.abbrev_list)));
        }
        if !self.definitions.is_empty() {
            doc.insert("definitions".into(), Value::Array(std::mem::take(&mut self.definitions)));
        }
        doc.insert("proof".into(), tree);
        Value::Object(doc)
    }

    /// Emits `p` inline, or as a reference to a hoisted definition.
    fn node(&mut self, p: &Proof, depth: usize, is_root: bool) -> Value {
        let k = key(p);
        if let Some(id) = self.ids.get(&k) {
            return json!({ "ref": id });
        }
        let shared = self.in_degree.get(&k).copied().unwrap_or(0) > 1;
        if !is_root && (shared || depth >= HOIST_DEPTH) {
            let body = self.body(p, 0);
            let id = self.ids.len() as u64;
            let mut body = body;
            body.as_object_mut().expect("node bodies are objects").insert("id".into(), json!(id));
            self.definitions.push(body);
            self.ids.insert(k, id);
            return json!({ "ref": id });
        }
        self.body(p, depth)
    }

    fn body(&mut self, p: &Proof, depth: usize) -> Value {
        let premises: Vec<Value> =
            p.premises.iter().map(|q| self.node(q, depth + 1, false)).collect();
        let abbrevs = &self.abbrevs;
        let sequent = print_sequent_with(&p.conclusion, &|f| abbrevs.get(f).cloned());
        let mut obj = Map::new();
        obj.insert("rule".into(), json!(p.rule.name()));
        obj.insert("sequent".into(), json!(sequent));
        let params = self.params(&p.rule);
        if !params.is_empty() {
            obj.insert("params".into(), Value::Object(params));
        }
        obj.insert("premises".into(), Value::Array(premises));
        Value::Object(obj)
    }

    fn params(&self, rule: &Rule) -> Map<String, Value> {
        let mut m = Map::new();
        match rule {
            Rule::ZeroL { pos }
            | Rule::OneL { pos }
            | Rule::ProdL { pos }
            | Rule::MeetL1 { pos }
            | Rule::MeetL2 { pos }
            | Rule::JoinL { pos } => {
                m.insert("pos".into(), json!(pos));
            }
            Rule::LdivL { pos, start } => {
                m.insert("pos".into(), json!(pos));
                m.insert("start".into(), json!(start));
            }
            Rule::RdivL { pos, end } => {
                m.insert("pos".into(), json!(pos));
                m.insert("end".into(), json!(end));
            }
            Rule::ProdR { split } | Rule::StarRFp { split } => {
                m.insert("split".into(), json!(split));
            }
            Rule::Cut { start, len, formula } => {
                m.insert("start".into(), json!(start));
                m.insert("len".into(), json!(len));
                let text = print_formula_with(formula, &|f| self.abbrevs.get(f).cloned());
                m.insert("formula".into(), json!(text));
            }
            Rule::Ax
            | Rule::OneR
            | Rule::LdivR
            | Rule::RdivR
            | Rule::MeetR
            | Rule::JoinR1
            | Rule::JoinR2
            | Rule::StarLFp
            | Rule::StarR0 => {}
        }
        m
    }
}

pub fn proof_from_str(text: &str) -> Result<Arc<Proof>, DocError> {
    let v: Value = serde_json::from_str(text)?;
    proof_from_value(&v)
}

pub fn proof_from_value(v: &Value) -> Result<Arc<Proof>, DocError> {
    let obj = v.as_object().ok_or_else(|| shape("document must be an object"))?;
    let mut r = Reader { abbrevs: HashMap::new(), nodes: HashMap::new() };
    if obj.contains_key("rule") {
        return r.node(v);
    }
    if let Some(list) = obj.get("abbreviations") {
        let list = list.as_array().ok_or_else(|| shape("abbreviations must be an array"))?;
        for entry in list {
            let name = str_field(entry, "name")?;
            let f = parse_formula_with(str_field(entry, "formula")?, &r.abbrevs)?;
            r.abbrevs.insert(name.to_string(), f);
        }
    }
    if let Some(defs) = obj.get("definitions") {
        let defs = defs.as_array().ok_or_else(|| shape("definitions must be an array"))?;
        for d in defs {
            if d.get("id").is_none() {
                return Err(shape("every definition needs an id"));
            }
            r.node(d)?;
        }
    }
    let root = obj.get("proof").ok_or_else(|| shape("missing proof"))?;
    r.node(root)
}

fn str_field<'a>(v: &'a Value, name: &str) -> Result<&'a str, DocError> {
    v.get(name).and_then(Value::as_str).ok_or_else(|| shape(format!("missing string field {name:?}")))
}

struct Reader {
    abbrevs: HashMap<String, Formula>,
    nodes: HashMap<u64, Arc<Proof>>,
}

impl Reader {
    fn node(&mut self, v: &Value) -> Result<Arc<Proof>, DocError> {
        let obj = v.as_object().ok_or_else(|| shape("proof node must be an object"))?;
        if let Some(r) = obj.get("ref") {
            let id = r.as_u64().ok_or_else(|| shape("ref must be a non-negative integer"))?;
            return self.nodes.get(&id).cloned().ok_or_else(|| shape(format!("unknown ref {id}")));
        }
        let rule_name = str_field(v, "rule")?;
        let conclusion = parse_sequent_with(str_field(v, "sequent")?, &self.abbrevs)?;
        let empty = Map::new();
        let params = match obj.get("params") {
            None | Some(Value::Null) => &empty,
            Some(Value::Object(m)) => m,
            Some(_) => return Err(shape("params must be an object")),
        };
        let rule = self.rule(rule_name, params)?;
        let premises = match obj.get("premises") {
            None => Vec::new(),
            Some(Value::Array(ps)) => ps.iter().map(|p| self.node(p)).collect::<Result<_, _>>()?,
            Some(_) => return Err(shape("premises must be an array")),
        };
        let p = Arc::new(Proof::new(rule, conclusion, premises));
        if let Some(id) = obj.get("id") {
            let id = id.as_u64().ok_or_else(|| shape("id must be a non-negative integer"))?;
            if self.nodes.insert(id, p.clone()).is_some() {
                return Err(shape(format!("duplicate id {id}")));
            }
        }
        Ok(p)
    }

    fn rule(&self, name: &str, params: &Map<String, Value>) -> Result<Rule, DocError> {
        let num = |k: &str| -> Result<usize, DocError> {
            params
                .get(k)
                .and_then(Value::as_u64)
                .and_then(|n| usize::try_from(n).ok())
                .ok_or_else(|| shape(format!("rule {name} needs integer param {k:?}")))
        };
        Ok(match name {
            "ax" => Rule::Ax,
            "zero_l" => Rule::ZeroL { pos: num("pos")? },
            "one_l" => Rule::OneL { pos: num("pos")? },
            "one_r" => Rule::OneR,
            "ldiv_l" => Rule::LdivL { pos: num("pos")?, start: num("start")? },
            "ldiv_r" => Rule::LdivR,
            "prod_l" => Rule::ProdL { pos: num("pos")? },
            "rdiv_l" => Rule::RdivL { pos: num("pos")?, end: num("end")? },
            "rdiv_r" => Rule::RdivR,
            "prod_r" => Rule::ProdR { split: num("split")? },
            "meet_l1" => Rule::MeetL1 { pos: num("pos")? },
            "meet_l2" => Rule::MeetL2 { pos: num("pos")? },
            "meet_r" => Rule::MeetR,
            "join_l" => Rule::JoinL { pos: num("pos")? },
            "join_r1" => Rule::JoinR1,
            "join_r2" => Rule::JoinR2,
            "cut" => {
                let text = params
                    .get("formula")
                    .and_then(Value::as_str)
                    .ok_or_else(|| shape("cut needs a formula param"))?;
                Rule::Cut {
                    start: num("start")?,
                    len: num("len")?,
                    formula: parse_formula_with(text, &self.abbrevs)?,
                }
            }
            "star_l_fp" => Rule::StarLFp,
            "star_r_0" => Rule::StarR0,
            "star_r_fp" => Rule::StarRFp { split: num("split")? },
            other => return Err(shape(format!("unknown rule {other:?}"))),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_sequent;

    fn s(t: &str) -> crate::syntax::Sequent {
        parse_sequent(t).unwrap()
    }

    fn sample() -> Proof {
        Proof::new(
            Rule::LdivL { pos: 1, start: 0 },
            s("a, a\\c |- c"),
            vec![Proof::leaf(Rule::Ax, s("a |- a")), Proof::leaf(Rule::Ax, s("c |- c"))],
        )
    }

    #[test]
    fn bare_tree_round_trip() {
        let p = sample();
        let text = proof_to_string(&p, DocOptions::default());
        let v: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["rule"], "ldiv_l");
        assert_eq!(v["params"]["start"], 0);
        assert_eq!(*proof_from_str(&text).unwrap(), p);
    }

    #[test]
    fn shared_subtrees_become_refs() {
        let leaf = Proof::leaf(Rule::Ax, s("(a.b)\\c |- (a.b)\\c"));
        let p = Proof::new(
            Rule::MeetR,
            s("(a.b)\\c |- ((a.b)\\c)&((a.b)\\c)"),
            vec![leaf.clone(), leaf],
        );
        let text = proof_to_string(&p, DocOptions { abbreviate: true });
        assert!(text.contains("\"ref\""));
        assert!(text.contains("@f"));
        let back = proof_from_str(&text).unwrap();
        assert_eq!(*back, p);
        assert!(Arc::ptr_eq(&back.premises[0], &back.premises[1]));
    }

    #[test]
    fn deep_proofs_stay_shallow_in_json() {
        let mut p = Proof::leaf(Rule::Ax, s("a |- a"));
        let mut succ = "a".to_string();
        for _ in 0..200 {
            succ = format!("({succ})|a");
            p = Proof::node(Rule::JoinR1, s(&format!("a |- {succ}")), vec![p]);
        }
        let text = proof_to_string(&p, DocOptions::default());
        let back = proof_from_str(&text).unwrap();
        assert_eq!(back, p);
        assert!(back.check(false).is_ok());
    }

    #[test]
    fn cut_params_round_trip() {
        let p = Proof::new(
            Rule::Cut { start: 0, len: 1, formula: crate::parse_formula("a").unwrap() },
            s("a |- a"),
            vec![Proof::leaf(Rule::Ax, s("a |- a")), Proof::leaf(Rule::Ax, s("a |- a"))],
        );
        let back = proof_from_str(&proof_to_string(&p, DocOptions::default())).unwrap();
        assert_eq!(*back, p);
    }

    #[test]
    fn malformed_documents() {
        for bad in [
            "[]",
            "{}",
            r#"{"rule":"nope","sequent":"a |- a"}"#,
            r#"{"rule":"ax","sequent":"a |-"}"#,
            r#"{"rule":"zero_l","sequent":"0 |- a"}"#,
            r#"{"rule":"ax","sequent":"a |- a","premises":[{"ref":7}]}"#,
            r#"{"proof":{"rule":"ax","sequent":"@x |- a"}}"#,
        ] {
            assert!(proof_from_str(bad).is_err(), "{bad}");
        }
    }
}
