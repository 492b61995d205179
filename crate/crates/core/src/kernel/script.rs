//! The `.ndp` proof-script format, one node per line:
//!
//! ```text
//! a1: assume H |- forall x f(x) = 0
//! n2: allE a1 [term S(0)] |- f(S(0)) = 0
//! n3: impI n2 [discharge H] |- (forall x f(x) = 0) -> f(S(0)) = 0
//! ```
//!
//! Data blocks are `[term t]`, `[var y]`, `[discharge L]` (two labels for
//! `orE`) and `[paths 1.0, 0]`. Premises must refer to earlier lines and the
//! last line is the root.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use super::proof::{Label, Node, Proof, Rule};
use crate::syntax::parse::{Parser, Tok};
use crate::syntax::{fmt_path, Name, Path, SyntaxError, Term};

fn id_token(p: &mut Parser) -> Result<String, SyntaxError> {
    match p.peek() {
        Some(Tok::Ident(s)) => {
            let s = s.clone();
            p.bump();
            Ok(s)
        }
        Some(Tok::Num(n)) => {
            let n = *n;
            p.bump();
            Ok(n.to_string())
        }
        _ => Err(p.error("expected a node id or label")),
    }
}

#[derive(Default)]
struct Data {
    term: Option<Term>,
    var: Option<Name>,
    discharge: Vec<Label>,
    paths: Option<BTreeSet<Path>>,
}

fn data_block(p: &mut Parser, d: &mut Data) -> Result<(), SyntaxError> {
    let key = p.ident()?;
    match key.as_str() {
        "term" => d.term = Some(p.term()?),
        "var" => d.var = Some(p.variable()?),
        "discharge" => {
            while p.peek() != Some(&Tok::RBracket) {
                d.discharge.push(id_token(p)?.into());
            }
        }
        "paths" => {
            let mut ps = BTreeSet::new();
            if p.peek() != Some(&Tok::RBracket) {
                loop {
                    ps.insert(p.path()?);
                    if !p.eat(&Tok::Comma) {
                        break;
                    }
                }
            }
            d.paths = Some(ps);
        }
        other => return Err(p.error(format!("unknown data block `{other}`"))),
    }
    p.expect(&Tok::RBracket)
}

fn build_rule(p: &Parser, name: &str, d: Data) -> Result<Rule, SyntaxError> {
    let need_term = |t: Option<Term>| t.ok_or_else(|| p.error(format!("`{name}` needs [term t]")));
    let need_var = |v: Option<Name>| v.ok_or_else(|| p.error(format!("`{name}` needs [var y]")));
    let one_label = |ls: &[Label]| match ls {
        [l] => Ok(l.clone()),
        _ => Err(p.error(format!("`{name}` needs [discharge L]"))),
    };
    Ok(match name {
        "axiom" => Rule::Axiom,
        "refl" => Rule::Refl,
        "eqsub" => Rule::EqSub(d.paths.ok_or_else(|| p.error("`eqsub` needs [paths ...]"))?),
        "impI" => Rule::ImpI(one_label(&d.discharge)?),
        "impE" => Rule::ImpE,
        "andI" => Rule::AndI,
        "andEl" => Rule::AndEl,
        "andEr" => Rule::AndEr,
        "orIl" => Rule::OrIl,
        "orIr" => Rule::OrIr,
        "orE" => match d.discharge.as_slice() {
            [a, b] => Rule::OrE(a.clone(), b.clone()),
            _ => return Err(p.error("`orE` needs [discharge L1 L2]")),
        },
        "botE" => Rule::BotE,
        "dne" => Rule::Dne,
        "allI" => Rule::AllI(need_var(d.var)?),
        "allE" => Rule::AllE(need_term(d.term)?),
        "exI" => Rule::ExI(need_term(d.term)?),
        "exE" => Rule::ExE(need_var(d.var)?, one_label(&d.discharge)?),
        "nzero" => Rule::NZero,
        "nsucc" => Rule::NSucc,
        "nind" => Rule::NInd,
        other => return Err(p.error(format!("unknown rule `{other}`"))),
    })
}

pub fn parse_proof(text: &str) -> Result<Proof, SyntaxError> {
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut nodes = Vec::new();
    for (li, line) in text.lines().enumerate() {
        let mut p = Parser::new(line, li + 1)?;
        if p.at_end() {
            continue;
        }
        let id = id_token(&mut p)?;
        p.expect(&Tok::Colon)?;
        let rule_name = p.ident()?;
        let mut premises = Vec::new();
        let rule = if rule_name == "assume" {
            Rule::Assume(id_token(&mut p)?.into())
        } else {
            while matches!(p.peek(), Some(Tok::Ident(_)) | Some(Tok::Num(_))) {
                let pid = id_token(&mut p)?;
                match index.get(&pid) {
                    Some(&i) => premises.push(i),
                    None => return Err(p.error(format!("unknown premise `{pid}`"))),
                }
            }
            let mut d = Data::default();
            while p.eat(&Tok::LBracket) {
                data_block(&mut p, &mut d)?;
            }
            build_rule(&p, &rule_name, d)?
        };
        p.expect(&Tok::Turnstile)?;
        let conclusion = p.formula()?;
        p.expect_end()?;
        if index.insert(id.clone(), nodes.len()).is_some() {
            return Err(SyntaxError { line: li + 1, col: 1, msg: format!("duplicate node id `{id}`") });
        }
        nodes.push(Node { id, rule, premises, conclusion });
    }
    if nodes.is_empty() {
        return Err(SyntaxError { line: 1, col: 1, msg: "proof script has no nodes".into() });
    }
    Ok(Proof { nodes })
}

impl fmt::Display for Proof {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for n in &self.nodes {
            write!(f, "{}: {}", n.id, n.rule.name())?;
            if let Rule::Assume(l) = &n.rule {
                write!(f, " {l}")?;
            }
            for &p in &n.premises {
                write!(f, " {}", self.nodes[p].id)?;
            }
            match &n.rule {
                Rule::EqSub(paths) => {
                    let ps: Vec<String> =
                        paths.iter().map(|p| if p.is_empty() { ".".to_string() } else { fmt_path(p) }).collect();
                    write!(f, " [paths {}]", ps.join(", "))?;
                }
                Rule::ImpI(l) => write!(f, " [discharge {l}]")?,
                Rule::OrE(a, b) => write!(f, " [discharge {a} {b}]")?,
                Rule::AllI(y) => write!(f, " [var {y}]")?,
                Rule::AllE(t) | Rule::ExI(t) => write!(f, " [term {t}]")?,
                Rule::ExE(y, l) => write!(f, " [var {y}] [discharge {l}]")?,
                _ => {}
            }
            writeln!(f, " |- {}", n.conclusion)?;
        }
        Ok(())
    }
}
