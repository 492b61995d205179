use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::syntax::parse::{Parser, Tok};
use crate::syntax::{fmt_path, Equation, Name, Path, Program, SyntaxError, Term};

/// One application of an equational-logic rule. Premises index earlier steps.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum EqStep {
    /// An equation of the program.
    Axiom(Equation),
    /// `t = t`.
    Refl(Term),
    /// `E[x]` to `E[t]`.
    Instantiate { premise: usize, var: Name, term: Term },
    /// From `s[t] = r[t]` and `t = t'`, replace the addressed occurrences of `t` by `t'`.
    Replace { main: usize, eq: usize, paths: BTreeSet<Path> },
}

/// A derivation as a list of steps; the last step is the conclusion.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EqDerivation {
    pub steps: Vec<EqStep>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EqVerdict {
    Valid(Equation),
    /// `step` is the 1-based id of the first failing step.
    Invalid { step: usize, reason: String },
}

impl EqVerdict {
    pub fn is_valid(&self) -> bool {
        matches!(self, EqVerdict::Valid(_))
    }

    pub fn conclusion(&self) -> Option<&Equation> {
        match self {
            EqVerdict::Valid(e) => Some(e),
            EqVerdict::Invalid { .. } => None,
        }
    }
}

fn replace_in_equation(e: &Equation, t: &Term, s: &Term, paths: &BTreeSet<Path>) -> Result<Equation, String> {
    let mut out = e.clone();
    for p in paths {
        let (side, rest) = match p.split_first() {
            Some((0, rest)) => (&mut out.lhs, rest),
            Some((1, rest)) => (&mut out.rhs, rest),
            _ => return Err(format!("bad-position: {} is not inside the equation", fmt_path(p))),
        };
        if side.at(rest) != Some(t) {
            return Err(format!("bad-position: {} does not address an occurrence of {t}", fmt_path(p)));
        }
        *side = side.replace_at(rest, s).expect("path checked above");
    }
    Ok(out)
}

/// The conclusion of `step` given the conclusions of earlier steps.
pub(crate) fn step_conclusion(p: &Program, step: &EqStep, earlier: &[Equation]) -> Result<Equation, String> {
    let get = |i: usize| {
        earlier
            .get(i)
            .ok_or_else(|| format!("premise {} does not refer to an earlier step", i + 1))
    };
    let well_formed = |t: &Term| match p.foreign_symbol(t) {
        Some((f, n)) => Err(format!("term {t} uses `{f}`/{n}, which is not in the program's language")),
        None => Ok(()),
    };
    match step {
        EqStep::Axiom(e) => {
            if p.contains(e) {
                Ok(e.clone())
            } else {
                Err(format!("{e} is not an equation of the program"))
            }
        }
        EqStep::Refl(t) => {
            well_formed(t)?;
            Ok(Equation::new(t.clone(), t.clone()))
        }
        EqStep::Instantiate { premise, var, term } => {
            well_formed(term)?;
            let e = get(*premise)?;
            Ok(Equation::new(e.lhs.subst_var(var, term), e.rhs.subst_var(var, term)))
        }
        EqStep::Replace { main, eq, paths } => {
            let m = get(*main)?;
            let q = get(*eq)?;
            replace_in_equation(m, &q.lhs, &q.rhs, paths)
        }
    }
}

/// Check that `d` is a derivation from `p` using exactly the four rules.
pub fn check_eq_derivation(p: &Program, d: &EqDerivation) -> EqVerdict {
    let mut concl: Vec<Equation> = Vec::with_capacity(d.steps.len());
    for (i, step) in d.steps.iter().enumerate() {
        match step_conclusion(p, step, &concl[..i.min(concl.len())]) {
            Ok(e) => concl.push(e),
            Err(reason) => return EqVerdict::Invalid { step: i + 1, reason },
        }
    }
    match concl.pop() {
        Some(e) => EqVerdict::Valid(e),
        None => EqVerdict::Invalid { step: 0, reason: "empty derivation".into() },
    }
}

/// Incremental construction of derivations with conclusions tracked alongside.
#[derive(Clone, Debug, Default)]
pub struct DerivationBuilder {
    steps: Vec<EqStep>,
    concl: Vec<Equation>,
    axioms: HashMap<Equation, usize>,
    refls: HashMap<Term, usize>,
}

impl DerivationBuilder {
    pub fn new() -> DerivationBuilder {
        DerivationBuilder::default()
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn conclusion(&self, i: usize) -> &Equation {
        &self.concl[i]
    }

    fn push(&mut self, step: EqStep, e: Equation) -> usize {
        self.steps.push(step);
        self.concl.push(e);
        self.steps.len() - 1
    }

    pub fn axiom(&mut self, e: &Equation) -> usize {
        if let Some(&i) = self.axioms.get(e) {
            return i;
        }
        let i = self.push(EqStep::Axiom(e.clone()), e.clone());
        self.axioms.insert(e.clone(), i);
        i
    }

    pub fn refl(&mut self, t: &Term) -> usize {
        if let Some(&i) = self.refls.get(t) {
            return i;
        }
        let i = self.push(EqStep::Refl(t.clone()), Equation::new(t.clone(), t.clone()));
        self.refls.insert(t.clone(), i);
        i
    }

    pub fn instantiate(&mut self, premise: usize, var: &Name, term: &Term) -> usize {
        let e = &self.concl[premise];
        let out = Equation::new(e.lhs.subst_var(var, term), e.rhs.subst_var(var, term));
        self.push(EqStep::Instantiate { premise, var: var.clone(), term: term.clone() }, out)
    }

    /// Panics if a path does not address an occurrence of the lhs of `eq`.
    pub fn replace(&mut self, main: usize, eq: usize, paths: BTreeSet<Path>) -> usize {
        let q = self.concl[eq].clone();
        let out = replace_in_equation(&self.concl[main], &q.lhs, &q.rhs, &paths)
            .expect("builder replacement must address occurrences");
        self.push(EqStep::Replace { main, eq, paths }, out)
    }

    pub fn replace_one(&mut self, main: usize, eq: usize, path: Path) -> usize {
        self.replace(main, eq, [path].into_iter().collect())
    }

    /// From `l = r` derive `r = l`.
    pub fn symm(&mut self, i: usize) -> usize {
        let l = self.concl[i].lhs.clone();
        let r = self.refl(&l);
        self.replace_one(r, i, vec![0])
    }

    /// From `a = b` and `b = c` derive `a = c`.
    pub fn trans(&mut self, ab: usize, bc: usize) -> usize {
        self.replace_one(ab, bc, vec![1])
    }

    /// Keep only the steps `root` depends on, renumbered in order.
    pub fn extract(&self, root: usize) -> EqDerivation {
        let mut needed = vec![false; root + 1];
        needed[root] = true;
        for i in (0..=root).rev() {
            if !needed[i] {
                continue;
            }
            match &self.steps[i] {
                EqStep::Instantiate { premise, .. } => needed[*premise] = true,
                EqStep::Replace { main, eq, .. } => {
                    needed[*main] = true;
                    needed[*eq] = true;
                }
                _ => {}
            }
        }
        let mut renumber = vec![usize::MAX; root + 1];
        let mut steps = Vec::new();
        for i in 0..=root {
            if !needed[i] {
                continue;
            }
            renumber[i] = steps.len();
            steps.push(match &self.steps[i] {
                EqStep::Instantiate { premise, var, term } => EqStep::Instantiate {
                    premise: renumber[*premise],
                    var: var.clone(),
                    term: term.clone(),
                },
                EqStep::Replace { main, eq, paths } => EqStep::Replace {
                    main: renumber[*main],
                    eq: renumber[*eq],
                    paths: paths.clone(),
                },
                s => s.clone(),
            });
        }
        EqDerivation { steps }
    }
}

impl fmt::Display for EqDerivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.steps.iter().enumerate() {
            write!(f, "{}: ", i + 1)?;
            match s {
                EqStep::Axiom(e) => writeln!(f, "axiom({e})")?,
                EqStep::Refl(t) => writeln!(f, "refl({t})")?,
                EqStep::Instantiate { premise, var, term } => {
                    writeln!(f, "inst({}; {var} := {term})", premise + 1)?
                }
                EqStep::Replace { main, eq, paths } => {
                    let ps: Vec<String> = paths.iter().map(|p| fmt_path(p)).collect();
                    writeln!(f, "replace({}, {}; {})", main + 1, eq + 1, ps.join(", "))?
                }
            }
        }
        Ok(())
    }
}

/// Parse the line-oriented certificate format produced by `Display`.
pub fn parse_certificate(text: &str) -> Result<EqDerivation, SyntaxError> {
    let mut ids: HashMap<u64, usize> = HashMap::new();
    let mut steps = Vec::new();
    for (li, line) in text.lines().enumerate() {
        let mut p = Parser::new(line, li + 1)?;
        if p.at_end() {
            continue;
        }
        let id = p.number()?;
        p.expect(&Tok::Colon)?;
        let rule = p.ident()?;
        p.expect(&Tok::LParen)?;
        let premise = |p: &mut Parser, ids: &HashMap<u64, usize>| -> Result<usize, SyntaxError> {
            let n = p.number()?;
            ids.get(&n).copied().ok_or_else(|| p.error(format!("unknown step id {n}")))
        };
        let step = match rule.as_str() {
            "axiom" => EqStep::Axiom(p.equation()?),
            "refl" => EqStep::Refl(p.term()?),
            "inst" => {
                let premise = premise(&mut p, &ids)?;
                p.expect(&Tok::Semi)?;
                let var = p.variable()?;
                p.expect(&Tok::Assign)?;
                let term = p.term()?;
                EqStep::Instantiate { premise, var, term }
            }
            "replace" => {
                let main = premise(&mut p, &ids)?;
                p.expect(&Tok::Comma)?;
                let eq = premise(&mut p, &ids)?;
                p.expect(&Tok::Semi)?;
                let mut paths = BTreeSet::new();
                if p.peek() != Some(&Tok::RParen) {
                    loop {
                        paths.insert(p.path()?);
                        if !p.eat(&Tok::Comma) {
                            break;
                        }
                    }
                }
                EqStep::Replace { main, eq, paths }
            }
            other => return Err(p.error(format!("unknown equational rule `{other}`"))),
        };
        p.expect(&Tok::RParen)?;
        p.expect_end()?;
        if ids.insert(id, steps.len()).is_some() {
            return Err(SyntaxError { line: li + 1, col: 1, msg: format!("duplicate step id {id}") });
        }
        steps.push(step);
    }
    Ok(EqDerivation { steps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{numeral, parse_equation, parse_program, parse_term};

    fn add() -> Program {
        parse_program("add(x, 0) = x.\nadd(x, S(y)) = S(add(x, y)).").unwrap()
    }

    #[test]
    fn axiom_step() {
        let d = EqDerivation { steps: vec![EqStep::Axiom(parse_equation("add(x, 0) = x").unwrap())] };
        assert!(check_eq_derivation(&add(), &d).is_valid());
        let bad = EqDerivation { steps: vec![EqStep::Axiom(parse_equation("add(0, x) = x").unwrap())] };
        assert!(matches!(check_eq_derivation(&add(), &bad), EqVerdict::Invalid { step: 1, .. }));
    }

    #[test]
    fn reflexivity_under_any_program() {
        let p = parse_program("f(x) = f(x).").unwrap();
        let d = EqDerivation { steps: vec![EqStep::Refl(parse_term("f(x)").unwrap())] };
        assert_eq!(check_eq_derivation(&p, &d), EqVerdict::Valid(parse_equation("f(x) = f(x)").unwrap()));
    }

    #[test]
    fn instantiation_step() {
        let d = EqDerivation {
            steps: vec![
                EqStep::Axiom(parse_equation("add(x, 0) = x").unwrap()),
                EqStep::Instantiate { premise: 0, var: "x".into(), term: numeral(1) },
            ],
        };
        assert_eq!(
            check_eq_derivation(&add(), &d),
            EqVerdict::Valid(parse_equation("add(S(0), 0) = S(0)").unwrap())
        );
    }

    #[test]
    fn replacement_must_address_occurrences() {
        let p = parse_program("c() = 0.\nc() = S(0).").unwrap();
        let ok = EqDerivation {
            steps: vec![
                EqStep::Axiom(parse_equation("c() = S(0)").unwrap()),
                EqStep::Axiom(parse_equation("c() = 0").unwrap()),
                EqStep::Replace { main: 0, eq: 1, paths: [vec![0]].into_iter().collect() },
            ],
        };
        assert_eq!(check_eq_derivation(&p, &ok), EqVerdict::Valid(parse_equation("0 = S(0)").unwrap()));
        let mut bad = ok.clone();
        bad.steps[2] = EqStep::Replace { main: 0, eq: 1, paths: [vec![1]].into_iter().collect() };
        assert!(matches!(check_eq_derivation(&p, &bad), EqVerdict::Invalid { step: 3, .. }));
        let mut fwd = ok;
        fwd.steps[2] = EqStep::Replace { main: 0, eq: 5, paths: BTreeSet::new() };
        assert!(matches!(check_eq_derivation(&p, &fwd), EqVerdict::Invalid { step: 3, .. }));
    }

    #[test]
    fn certificate_text_roundtrip() {
        let mut b = DerivationBuilder::new();
        let a = b.axiom(&parse_equation("add(x, 0) = x").unwrap());
        let i = b.instantiate(a, &"x".into(), &numeral(2));
        let s = b.symm(i);
        let d = b.extract(s);
        let text = d.to_string();
        assert_eq!(parse_certificate(&text).unwrap(), d);
        assert_eq!(
            check_eq_derivation(&add(), &d),
            EqVerdict::Valid(parse_equation("S(S(0)) = add(S(S(0)), 0)").unwrap())
        );
        assert!(parse_certificate("1: refl(0)\n1: refl(0)").is_err());
        assert!(parse_certificate("1: inst(7; x := 0)").is_err());
    }
}
