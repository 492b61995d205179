use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use thiserror::Error;

use crate::syntax::parse::{Parser, Tok};
use crate::syntax::{Equation, Name, PrLanguage, Program, ProgramError, SyntaxError, Term, SUCC};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum PrError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error(transparent)]
    Program(#[from] ProgramError),
    #[error("unknown definition `{0}`")]
    UnknownDefinition(Name),
    #[error("definition `{0}` is defined twice")]
    Duplicate(Name),
    #[error("definition `{0}` refers to itself")]
    Cyclic(Name),
    #[error("arity-mismatch in `{name}`: {detail}")]
    Arity { name: Name, detail: String },
    #[error("not-pr-term: {0}")]
    NotPrTerm(Term),
    #[error("not-full: `{symbol}` lacks {}", fmt_eqs(.missing))]
    NotFull { symbol: Name, missing: Vec<Equation> },
    #[error("symbol-clash: `{0}` already occurs in the program")]
    SymbolClash(Name),
    #[error("symbol-not-found: `{0}`")]
    SymbolNotFound(Name),
    #[error("wrong-shape: {0}")]
    Shape(String),
}

fn fmt_eqs(es: &[Equation]) -> String {
    es.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("; ")
}

/// Combinator expressions of the registry language.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum PrExpr {
    /// The constant zero function of the given arity.
    Zero(usize),
    Succ,
    /// `Proj(i, n)` selects argument `i` (1-based) of `n`.
    Proj(usize, usize),
    Comp(Box<PrExpr>, Vec<PrExpr>),
    Rec(Box<PrExpr>, Box<PrExpr>),
    Named(Name),
}

impl fmt::Display for PrExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PrExpr::Zero(0) => write!(f, "zero"),
            PrExpr::Zero(n) => write!(f, "zero({n})"),
            PrExpr::Succ => write!(f, "S"),
            PrExpr::Proj(i, n) if *i < 10 && *n < 10 => write!(f, "p{i}{n}"),
            PrExpr::Proj(i, n) => write!(f, "proj({i}, {n})"),
            PrExpr::Comp(h, gs) => {
                write!(f, "comp({h}")?;
                for g in gs {
                    write!(f, ", {g}")?;
                }
                write!(f, ")")
            }
            PrExpr::Rec(b, s) => write!(f, "rec({b}, {s})"),
            PrExpr::Named(n) => write!(f, "{n}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrDefinition {
    pub name: Name,
    pub arity: usize,
    pub body: PrExpr,
}

impl PrDefinition {
    pub fn is_successor(&self) -> bool {
        &*self.name == SUCC
    }
}

/// Parameter names: `x`, `x, y`, `x, y, z`, then `x1 .. xn`.
pub fn param_names(n: usize) -> Vec<Name> {
    match n {
        0 => Vec::new(),
        1 => vec!["x".into()],
        2 => vec!["x".into(), "y".into()],
        3 => vec!["x".into(), "y".into(), "z".into()],
        _ => (1..=n).map(|i| format!("x{i}").into()).collect(),
    }
}

/// Parameters of a recursion, which must not collide with the recursion variable `y`.
fn rec_params(k: usize) -> Vec<Name> {
    match k {
        0 => Vec::new(),
        1 => vec!["x".into()],
        _ => (1..=k).map(|i| format!("x{i}").into()).collect(),
    }
}

/// The first of `y, z, w, v, u` not in `used`.
pub fn witness_name(used: &[Name]) -> Name {
    ["y", "z", "w", "v", "u"]
        .iter()
        .find(|c| !used.iter().any(|u| &**u == **c))
        .map(|c| Name::from(*c))
        .unwrap_or_else(|| "y'".into())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Fullness {
    Full,
    Missing { symbol: Name, equations: Vec<Equation> },
}

/// A reference-closed, acyclic set of named definitions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrRegistry {
    defs: Vec<PrDefinition>,
    index: HashMap<Name, usize>,
}

const CATALOG: &str = include_str!("../../corpus/catalog.pr");

fn parse_expr(p: &mut Parser) -> Result<PrExpr, SyntaxError> {
    let name = p.ident()?;
    let args = |p: &mut Parser| -> Result<Vec<PrExpr>, SyntaxError> {
        p.expect(&Tok::LParen)?;
        let mut out = vec![parse_expr(p)?];
        while p.eat(&Tok::Comma) {
            out.push(parse_expr(p)?);
        }
        p.expect(&Tok::RParen)?;
        Ok(out)
    };
    let bytes = name.as_bytes();
    Ok(match name.as_str() {
        "zero" => {
            if p.eat(&Tok::LParen) {
                let n = p.number()? as usize;
                p.expect(&Tok::RParen)?;
                PrExpr::Zero(n)
            } else {
                PrExpr::Zero(0)
            }
        }
        "S" | "succ" => PrExpr::Succ,
        "proj" => {
            p.expect(&Tok::LParen)?;
            let i = p.number()? as usize;
            p.expect(&Tok::Comma)?;
            let n = p.number()? as usize;
            p.expect(&Tok::RParen)?;
            PrExpr::Proj(i, n)
        }
        "comp" => {
            let mut xs = args(p)?;
            if xs.len() < 2 {
                return Err(p.error("comp needs an outer function and at least one inner function"));
            }
            let h = xs.remove(0);
            PrExpr::Comp(Box::new(h), xs)
        }
        "rec" => {
            let xs = args(p)?;
            let [b, s]: [PrExpr; 2] = xs.try_into().map_err(|_| p.error("rec takes exactly two arguments"))?;
            PrExpr::Rec(Box::new(b), Box::new(s))
        }
        _ if bytes.len() == 3 && bytes[0] == b'p' && bytes[1].is_ascii_digit() && bytes[2].is_ascii_digit() => {
            PrExpr::Proj((bytes[1] - b'0') as usize, (bytes[2] - b'0') as usize)
        }
        _ => PrExpr::Named(name.into()),
    })
}

impl PrRegistry {
    fn empty() -> PrRegistry {
        let mut r = PrRegistry { defs: Vec::new(), index: HashMap::new() };
        r.index.insert(SUCC.into(), 0);
        r.defs.push(PrDefinition { name: SUCC.into(), arity: 1, body: PrExpr::Succ });
        r
    }

    /// Parse `def name = expr;` entries. Nested recursions are lifted into
    /// auxiliary definitions named with the reserved prefix.
    pub fn parse(text: &str) -> Result<PrRegistry, PrError> {
        let mut p = Parser::new(text, 1)?;
        let mut raw: Vec<(Name, PrExpr)> = Vec::new();
        while !p.at_end() {
            if !p.is_keyword("def") {
                return Err(p.error("expected `def`").into());
            }
            p.bump();
            let name: Name = p.ident()?.into();
            p.expect(&Tok::Eq)?;
            let body = parse_expr(&mut p)?;
            p.expect(&Tok::Semi)?;
            raw.push((name, body));
        }
        let mut reg = PrRegistry::empty();
        let names: HashSet<Name> = raw.iter().map(|(n, _)| n.clone()).collect();
        let mut seen = HashSet::new();
        for (n, _) in &raw {
            if !seen.insert(n.clone()) || &**n == SUCC {
                return Err(PrError::Duplicate(n.clone()));
            }
        }
        let mut lifted: Vec<(Name, PrExpr)> = Vec::new();
        for (name, body) in raw {
            let mut counter = 0;
            let body = match body {
                PrExpr::Rec(b, s) => {
                    let b = lift(&name, *b, &mut counter, &mut lifted);
                    let s = lift(&name, *s, &mut counter, &mut lifted);
                    PrExpr::Rec(Box::new(b), Box::new(s))
                }
                other => lift(&name, other, &mut counter, &mut lifted),
            };
            lifted.push((name, body));
        }
        for (_, body) in &lifted {
            check_refs(body, &names, &lifted)?;
        }
        // Resolve arities in dependency order.
        let by_name: HashMap<Name, PrExpr> = lifted.iter().cloned().collect();
        let order: Vec<Name> = lifted.iter().map(|(n, _)| n.clone()).collect();
        let mut state: HashMap<Name, u8> = HashMap::new();
        for n in &order {
            reg.resolve(n, &by_name, &mut state)?;
        }
        Ok(reg)
    }

    fn resolve(&mut self, n: &Name, by_name: &HashMap<Name, PrExpr>, state: &mut HashMap<Name, u8>) -> Result<usize, PrError> {
        if let Some(&i) = self.index.get(n) {
            return Ok(self.defs[i].arity);
        }
        if state.get(n) == Some(&1) {
            return Err(PrError::Cyclic(n.clone()));
        }
        state.insert(n.clone(), 1);
        let body = by_name.get(n).ok_or_else(|| PrError::UnknownDefinition(n.clone()))?.clone();
        let mut deps = Vec::new();
        named_refs(&body, &mut deps);
        for d in &deps {
            self.resolve(d, by_name, state)?;
        }
        let arity = self.arity_of(n, &body)?;
        state.insert(n.clone(), 2);
        self.index.insert(n.clone(), self.defs.len());
        self.defs.push(PrDefinition { name: n.clone(), arity, body });
        Ok(arity)
    }

    fn arity_of(&self, name: &Name, e: &PrExpr) -> Result<usize, PrError> {
        let err = |detail: String| PrError::Arity { name: name.clone(), detail };
        match e {
            PrExpr::Zero(n) => Ok(*n),
            PrExpr::Succ => Ok(1),
            PrExpr::Proj(i, n) => {
                if *i == 0 || i > n {
                    Err(err(format!("projection {i} of {n}")))
                } else {
                    Ok(*n)
                }
            }
            PrExpr::Named(g) => self.get(g).map(|d| d.arity).ok_or_else(|| PrError::UnknownDefinition(g.clone())),
            PrExpr::Comp(h, gs) => {
                let ha = self.arity_of(name, h)?;
                if ha != gs.len() {
                    return Err(err(format!("{h} takes {ha} arguments, given {}", gs.len())));
                }
                let mut k = None;
                for g in gs {
                    let ga = self.arity_of(name, g)?;
                    match k {
                        Some(k) if k != ga => return Err(err(format!("inner functions of {e} differ in arity"))),
                        _ => k = Some(ga),
                    }
                }
                Ok(k.unwrap_or(0))
            }
            PrExpr::Rec(b, s) => {
                let ba = self.arity_of(name, b)?;
                let sa = self.arity_of(name, s)?;
                if sa != ba + 2 {
                    return Err(err(format!("step arity {sa} should be {}", ba + 2)));
                }
                Ok(ba + 1)
            }
        }
    }

    /// The registry shipped with the crate.
    pub fn catalog() -> PrRegistry {
        PrRegistry::parse(CATALOG).expect("bundled catalog parses")
    }

    pub fn get(&self, name: &str) -> Option<&PrDefinition> {
        self.index.get(name).map(|&i| &self.defs[i])
    }

    /// Definitions in dependency order, starting with the builtin successor.
    pub fn definitions(&self) -> &[PrDefinition] {
        &self.defs
    }

    /// Definitions written by the user, excluding lifted auxiliaries and `S`.
    pub fn user_definitions(&self) -> impl Iterator<Item = &PrDefinition> {
        self.defs.iter().filter(|d| !d.name.starts_with('_') && !d.is_successor())
    }

    fn def(&self, name: &str) -> Result<&PrDefinition, PrError> {
        self.get(name).ok_or_else(|| PrError::UnknownDefinition(name.into()))
    }

    /// Variables of the left-hand sides of `name`'s equations.
    pub fn lhs_vars(&self, name: &str) -> Result<Vec<Name>, PrError> {
        let d = self.def(name)?;
        Ok(match &d.body {
            PrExpr::Rec(..) => {
                let mut v = rec_params(d.arity - 1);
                v.push("y".into());
                v
            }
            _ => param_names(d.arity),
        })
    }

    /// Standard defining equations with projections and anonymous
    /// compositions inlined.
    pub fn defining_equations(&self, name: &str) -> Result<Vec<Equation>, PrError> {
        let d = self.def(name)?;
        if d.is_successor() {
            return Ok(Vec::new());
        }
        let f = |args: Vec<Term>| Term::App(d.name.clone(), args);
        Ok(match &d.body {
            PrExpr::Rec(b, s) => {
                let xs: Vec<Term> = rec_params(d.arity - 1).into_iter().map(Term::Var).collect();
                let y = Term::var("y");
                let mut at_zero = xs.clone();
                at_zero.push(Term::zero());
                let mut at_succ = xs.clone();
                at_succ.push(Term::succ(y.clone()));
                let mut at_y = xs.clone();
                at_y.push(y.clone());
                let mut step_args = xs.clone();
                step_args.push(y);
                step_args.push(f(at_y));
                vec![
                    Equation::new(f(at_zero), apply(b, &xs)),
                    Equation::new(f(at_succ), apply(s, &step_args)),
                ]
            }
            body => {
                let xs: Vec<Term> = param_names(d.arity).into_iter().map(Term::Var).collect();
                vec![Equation::new(f(xs.clone()), apply(body, &xs))]
            }
        })
    }

    /// Definitions `name` refers to, transitively, excluding itself.
    pub fn dependencies(&self, name: &str) -> Result<Vec<Name>, PrError> {
        let mut out: Vec<Name> = Vec::new();
        let mut stack = vec![Name::from(name)];
        while let Some(n) = stack.pop() {
            let mut refs = Vec::new();
            named_refs(&self.def(&n)?.body, &mut refs);
            for r in refs {
                if &*r != name && !out.contains(&r) {
                    out.push(r.clone());
                    stack.push(r);
                }
            }
        }
        Ok(out)
    }

    /// Equations of `name` and of everything it refers to.
    pub fn required_equations(&self, name: &str) -> Result<Vec<Equation>, PrError> {
        let mut out = self.defining_equations(name)?;
        for d in self.dependencies(name)? {
            out.extend(self.defining_equations(&d)?);
        }
        Ok(out)
    }

    /// The smallest full program containing `name`, with every definition linked.
    pub fn minimal_program(&self, name: &str) -> Result<Program, PrError> {
        self.program_for(&[Name::from(name)])
    }

    /// The smallest full program containing all of `names`.
    pub fn program_for(&self, names: &[Name]) -> Result<Program, PrError> {
        let mut p = Program::new(Vec::new())?;
        let mut linked = BTreeSet::new();
        for n in names {
            p.extend(self.required_equations(n)?)?;
            linked.insert(n.clone());
            linked.extend(self.dependencies(n)?);
        }
        for l in linked {
            if p.has_symbol(&l) && &*l != SUCC {
                p = p.with_link(&l, &l)?;
            }
        }
        if let [single] = names {
            if p.arity(single).is_some() && &**single != SUCC {
                p = p.with_main(single)?;
            }
        }
        Ok(p)
    }

    /// Equations the program must contain for the linked symbol `sym`.
    fn linked_equations(&self, sym: &Name, def: &Name) -> Result<Vec<Equation>, PrError> {
        let eqs = self.defining_equations(def)?;
        if sym == def {
            return Ok(eqs);
        }
        let rn = |t: &Term| rename_symbol(t, def, sym);
        Ok(eqs.iter().map(|e| Equation::new(rn(&e.lhs), rn(&e.rhs))).collect())
    }

    /// Check that every linked symbol comes with all its defining equations.
    pub fn is_full(&self, p: &Program) -> Result<Fullness, PrError> {
        for (sym, def) in p.links() {
            let mut todo = vec![(sym.clone(), def.clone())];
            for d in self.dependencies(def)? {
                todo.push((d.clone(), d));
            }
            for (s, d) in todo {
                let missing: Vec<Equation> =
                    self.linked_equations(&s, &d)?.into_iter().filter(|e| !p.contains(e)).collect();
                if !missing.is_empty() {
                    return Ok(Fullness::Missing { symbol: s, equations: missing });
                }
            }
        }
        Ok(Fullness::Full)
    }

    /// Definition behind a program symbol: its link target, else itself.
    pub fn definition_for<'a>(&'a self, p: &'a Program, sym: &str) -> Option<&'a PrDefinition> {
        match p.links().get(sym) {
            Some(def) => self.get(def),
            None if sym == SUCC => self.get(SUCC),
            None => None,
        }
    }

    /// Equations a program symbol is defined by, with the head renamed to the symbol.
    pub fn equations_for_symbol(&self, p: &Program, sym: &str) -> Result<Vec<Equation>, PrError> {
        let def = self.definition_for(p, sym).ok_or_else(|| PrError::SymbolNotFound(sym.into()))?;
        self.linked_equations(&sym.into(), &def.name)
    }

    /// The primitive recursive symbols of `p`: its linked symbols.
    pub fn language_for(&self, p: &Program) -> PrSymbols {
        let mut syms = HashSet::new();
        for (sym, def) in p.links() {
            if let Some(d) = self.get(def) {
                syms.insert((sym.clone(), d.arity));
            }
        }
        PrSymbols(syms)
    }

    /// Direct computation of the function a definition denotes.
    pub fn semantics(&self, name: &str, args: &[u64]) -> Result<u64, PrError> {
        let d = self.def(name)?;
        if d.arity != args.len() {
            return Err(PrError::Arity { name: d.name.clone(), detail: format!("given {} arguments", args.len()) });
        }
        Ok(self.run(&d.body, args))
    }

    fn run(&self, e: &PrExpr, args: &[u64]) -> u64 {
        match e {
            PrExpr::Zero(_) => 0,
            PrExpr::Succ => args[0] + 1,
            PrExpr::Proj(i, _) => args[i - 1],
            PrExpr::Named(g) => {
                let d = self.get(g).expect("resolved reference");
                self.run(&d.body, args)
            }
            PrExpr::Comp(h, gs) => {
                let inner: Vec<u64> = gs.iter().map(|g| self.run(g, args)).collect();
                self.run(h, &inner)
            }
            PrExpr::Rec(b, s) => {
                let (xs, n) = args.split_at(args.len() - 1);
                let mut acc = self.run(b, xs);
                for y in 0..n[0] {
                    let mut sa = xs.to_vec();
                    sa.push(y);
                    sa.push(acc);
                    acc = self.run(s, &sa);
                }
                acc
            }
        }
    }
}

impl PrLanguage for PrRegistry {
    fn is_pr_symbol(&self, name: &str, arity: usize) -> bool {
        self.get(name).is_some_and(|d| d.arity == arity)
    }
}

/// A fixed set of primitive recursive symbols with arities.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PrSymbols(pub HashSet<(Name, usize)>);

impl PrLanguage for PrSymbols {
    fn is_pr_symbol(&self, name: &str, arity: usize) -> bool {
        self.0.contains(&(Name::from(name), arity))
    }
}

fn lift(parent: &Name, e: PrExpr, counter: &mut usize, out: &mut Vec<(Name, PrExpr)>) -> PrExpr {
    match e {
        PrExpr::Rec(b, s) => {
            let b = lift(parent, *b, counter, out);
            let s = lift(parent, *s, counter, out);
            *counter += 1;
            let name: Name = format!("_{parent}_r{counter}").into();
            out.push((name.clone(), PrExpr::Rec(Box::new(b), Box::new(s))));
            PrExpr::Named(name)
        }
        PrExpr::Comp(h, gs) => {
            let h = lift(parent, *h, counter, out);
            let gs = gs.into_iter().map(|g| lift(parent, g, counter, out)).collect();
            PrExpr::Comp(Box::new(h), gs)
        }
        other => other,
    }
}

fn named_refs(e: &PrExpr, out: &mut Vec<Name>) {
    match e {
        PrExpr::Named(n) => {
            if !out.contains(n) {
                out.push(n.clone());
            }
        }
        PrExpr::Comp(h, gs) => {
            named_refs(h, out);
            gs.iter().for_each(|g| named_refs(g, out));
        }
        PrExpr::Rec(b, s) => {
            named_refs(b, out);
            named_refs(s, out);
        }
        _ => {}
    }
}

fn check_refs(e: &PrExpr, names: &HashSet<Name>, lifted: &[(Name, PrExpr)]) -> Result<(), PrError> {
    let mut refs = Vec::new();
    named_refs(e, &mut refs);
    for r in refs {
        if !names.contains(&r) && !lifted.iter().any(|(n, _)| *n == r) {
            return Err(PrError::UnknownDefinition(r));
        }
    }
    Ok(())
}

/// The term computing `e` on `args`.
fn apply(e: &PrExpr, args: &[Term]) -> Term {
    match e {
        PrExpr::Zero(_) => Term::zero(),
        PrExpr::Succ => Term::succ(args[0].clone()),
        PrExpr::Proj(i, _) => args[i - 1].clone(),
        PrExpr::Named(g) => Term::App(g.clone(), args.to_vec()),
        PrExpr::Comp(h, gs) => {
            let inner: Vec<Term> = gs.iter().map(|g| apply(g, args)).collect();
            apply(h, &inner)
        }
        PrExpr::Rec(..) => unreachable!("nested recursions are lifted at parse time"),
    }
}

pub(crate) fn rename_symbol(t: &Term, from: &str, to: &Name) -> Term {
    match t {
        Term::Var(_) => t.clone(),
        Term::App(f, args) => {
            let head = if &**f == from { to.clone() } else { f.clone() };
            Term::App(head, args.iter().map(|a| rename_symbol(a, from, to)).collect())
        }
    }
}

impl fmt::Display for PrRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in self.defs.iter().filter(|d| !d.is_successor()) {
            writeln!(f, "def {} = {};", d.name, d.body)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{numeral, parse_equation};
    use crate::equational::{evaluate, SearchBudget};

    #[test]
    fn catalog_addition_equations() {
        let reg = PrRegistry::catalog();
        let eqs = reg.defining_equations("add").unwrap();
        assert_eq!(
            eqs,
            vec![parse_equation("add(x, 0) = x").unwrap(), parse_equation("add(x, S(y)) = S(add(x, y))").unwrap()]
        );
        assert_eq!(reg.defining_equations("z").unwrap(), vec![parse_equation("z() = 0").unwrap()]);
        assert_eq!(reg.defining_equations("p12").unwrap(), vec![parse_equation("p12(x, y) = x").unwrap()]);
        assert_eq!(
            reg.defining_equations("mul").unwrap()[1],
            parse_equation("mul(x, S(y)) = add(mul(x, y), x)").unwrap()
        );
    }

    #[test]
    fn catalog_has_at_least_eight_definitions() {
        let reg = PrRegistry::catalog();
        assert!(reg.user_definitions().count() + 1 >= 8);
        for n in ["z", "p11", "p12", "p22", "add", "mul", "pred", "monus", "sign"] {
            assert!(reg.get(n).is_some(), "{n}");
        }
    }

    #[test]
    fn equations_agree_with_semantics() {
        let reg = PrRegistry::catalog();
        let b = SearchBudget::default();
        for d in reg.user_definitions() {
            let p = reg.minimal_program(&d.name).unwrap();
            let inputs: Vec<Vec<u64>> = match d.arity {
                0 => vec![vec![]],
                1 => (0..5).map(|a| vec![a]).collect(),
                _ => (0..4).flat_map(|a| (0..4).map(move |b| vec![a, b])).collect(),
            };
            for args in inputs.into_iter().filter(|a| a.len() == d.arity) {
                let want = reg.semantics(&d.name, &args).unwrap();
                let nums: Vec<Term> = args.iter().map(|&a| numeral(a)).collect();
                let got = evaluate(&p, &d.name, &nums, &b).unwrap().map(|e| e.value);
                assert_eq!(got, Some(want), "{} {:?}", d.name, args);
            }
        }
    }

    #[test]
    fn fullness() {
        let reg = PrRegistry::catalog();
        let p = reg.minimal_program("add").unwrap();
        assert_eq!(reg.is_full(&p).unwrap(), Fullness::Full);
        let step = parse_equation("add(x, S(y)) = S(add(x, y))").unwrap();
        let partial = Program::new(p.equations().iter().filter(|e| **e != step).cloned())
            .unwrap()
            .with_link("add", "add")
            .unwrap();
        assert_eq!(reg.is_full(&partial).unwrap(), Fullness::Missing { symbol: "add".into(), equations: vec![step] });
        let sadd_only = Program::new(reg.defining_equations("sadd").unwrap()).unwrap().with_link("sadd", "sadd").unwrap();
        assert!(matches!(reg.is_full(&sadd_only).unwrap(), Fullness::Missing { symbol, .. } if &*symbol == "add"));
    }

    #[test]
    fn registry_errors() {
        assert!(matches!(PrRegistry::parse("def f = comp(S, p12, p12);"), Err(PrError::Arity { .. })));
        assert!(matches!(PrRegistry::parse("def f = g;"), Err(PrError::UnknownDefinition(_))));
        assert!(matches!(PrRegistry::parse("def f = g;\ndef g = f;"), Err(PrError::Cyclic(_))));
        assert!(matches!(PrRegistry::parse("def f = S;\ndef f = S;"), Err(PrError::Duplicate(_))));
        assert!(matches!(PrRegistry::parse("def f = rec(zero, p11);"), Err(PrError::Arity { .. })));
    }

    #[test]
    fn nested_recursion_is_lifted() {
        let reg = PrRegistry::parse("def f = comp(rec(p11, comp(S, p33)), p11, p11);").unwrap();
        let p = reg.minimal_program("f").unwrap();
        assert_eq!(reg.is_full(&p).unwrap(), Fullness::Full);
        assert_eq!(reg.semantics("f", &[3]).unwrap(), 6);
        let ev = evaluate(&p, "f", &[numeral(3)], &SearchBudget::default()).unwrap().unwrap();
        assert_eq!(ev.value, 6);
    }

    #[test]
    fn printing_reparses() {
        let reg = PrRegistry::catalog();
        assert_eq!(PrRegistry::parse(&reg.to_string()).unwrap(), reg);
    }
}
