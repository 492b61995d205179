use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use thiserror::Error;

use super::formula::Formula;
use super::term::{kind_of, Name, Symbol, SymbolKind, Term, SUCC, ZERO};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Equation {
    pub lhs: Term,
    pub rhs: Term,
}

impl Equation {
    pub fn new(lhs: Term, rhs: Term) -> Equation {
        Equation { lhs, rhs }
    }

    pub fn as_formula(&self) -> Formula {
        Formula::Eq(self.lhs.clone(), self.rhs.clone())
    }

    /// Variables in order of first occurrence, lhs before rhs.
    pub fn vars_in_order(&self) -> Vec<Name> {
        let mut vs = self.lhs.vars_in_order();
        for v in self.rhs.vars_in_order() {
            if !vs.contains(&v) {
                vs.push(v);
            }
        }
        vs
    }

    /// The universal closure, quantifying variables in first-occurrence order.
    pub fn closure(&self) -> Formula {
        Formula::forall_many(&self.vars_in_order(), self.as_formula())
    }

    pub fn size(&self) -> usize {
        self.lhs.size().max(self.rhs.size())
    }

    pub fn flip(&self) -> Equation {
        Equation::new(self.rhs.clone(), self.lhs.clone())
    }
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self.lhs, self.rhs)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ProgramError {
    #[error("symbol `{symbol}` used with arities {first} and {second}")]
    ArityConflict { symbol: Name, first: usize, second: usize },
    #[error("symbol `{0}` does not occur in the program")]
    SymbolNotFound(Name),
    #[error("reserved symbol `{0}` used with the wrong arity")]
    ReservedArity(Name),
}

/// A finite set of equations with its inferred signature.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Program {
    equations: Vec<Equation>,
    signature: BTreeMap<Name, usize>,
    main: Option<Name>,
    links: BTreeMap<Name, Name>,
}

fn record(sig: &mut BTreeMap<Name, usize>, t: &Term) -> Result<(), ProgramError> {
    if let Term::App(f, args) = t {
        match kind_of(f) {
            SymbolKind::Zero if !args.is_empty() => return Err(ProgramError::ReservedArity(f.clone())),
            SymbolKind::Succ if args.len() != 1 => return Err(ProgramError::ReservedArity(f.clone())),
            SymbolKind::Program => match sig.get(f) {
                Some(&a) if a != args.len() => {
                    return Err(ProgramError::ArityConflict {
                        symbol: f.clone(),
                        first: a,
                        second: args.len(),
                    })
                }
                Some(_) => {}
                None => {
                    sig.insert(f.clone(), args.len());
                }
            },
            _ => {}
        }
        for a in args {
            record(sig, a)?;
        }
    }
    Ok(())
}

impl Program {
    pub fn new(equations: impl IntoIterator<Item = Equation>) -> Result<Program, ProgramError> {
        let mut p = Program::default();
        p.extend(equations)?;
        Ok(p)
    }

    pub fn extend(&mut self, equations: impl IntoIterator<Item = Equation>) -> Result<(), ProgramError> {
        let mut seen: HashSet<Equation> = self.equations.iter().cloned().collect();
        for e in equations {
            record(&mut self.signature, &e.lhs)?;
            record(&mut self.signature, &e.rhs)?;
            if seen.insert(e.clone()) {
                self.equations.push(e);
            }
        }
        Ok(())
    }

    pub fn with_main(mut self, f: &str) -> Result<Program, ProgramError> {
        if !self.signature.contains_key(f) {
            return Err(ProgramError::SymbolNotFound(f.into()));
        }
        self.main = Some(f.into());
        Ok(self)
    }

    pub fn with_link(mut self, sym: &str, def: &str) -> Result<Program, ProgramError> {
        if !self.signature.contains_key(sym) {
            return Err(ProgramError::SymbolNotFound(sym.into()));
        }
        self.links.insert(sym.into(), def.into());
        Ok(self)
    }

    pub fn equations(&self) -> &[Equation] {
        &self.equations
    }

    pub fn main(&self) -> Option<&Name> {
        self.main.as_ref()
    }

    pub fn links(&self) -> &BTreeMap<Name, Name> {
        &self.links
    }

    pub fn contains(&self, e: &Equation) -> bool {
        self.equations.contains(e)
    }

    /// Arity of a program symbol, or of `0`/`S`.
    pub fn arity(&self, f: &str) -> Option<usize> {
        match kind_of(f) {
            SymbolKind::Zero => Some(0),
            SymbolKind::Succ => Some(1),
            SymbolKind::Program => self.signature.get(f).copied(),
        }
    }

    pub fn signature(&self) -> Vec<Symbol> {
        let mut out = vec![Symbol::zero(), Symbol::succ()];
        out.extend(self.signature.iter().map(|(n, &a)| Symbol::program(n, a)));
        out
    }

    pub fn program_symbols(&self) -> impl Iterator<Item = (&Name, usize)> {
        self.signature.iter().map(|(n, a)| (n, *a))
    }

    pub fn has_symbol(&self, f: &str) -> bool {
        f == ZERO || f == SUCC || self.signature.contains_key(f)
    }

    /// First symbol of `t` that is not in the language, with its used arity.
    pub fn foreign_symbol(&self, t: &Term) -> Option<(Name, usize)> {
        let mut syms = BTreeSet::new();
        t.symbols(&mut syms);
        syms.into_iter().find(|(f, n)| self.arity(f) != Some(*n))
    }

    pub fn foreign_symbol_in(&self, a: &Formula) -> Option<(Name, usize)> {
        let mut syms = BTreeSet::new();
        a.symbols(&mut syms);
        syms.into_iter().find(|(f, n)| self.arity(f) != Some(*n))
    }

    /// Universal closures of all equations.
    pub fn closures(&self) -> Vec<Formula> {
        self.equations.iter().map(Equation::closure).collect()
    }

    /// Equations whose left-hand side is headed by `f`.
    pub fn equations_for<'a>(&'a self, f: &'a str) -> impl Iterator<Item = &'a Equation> + 'a {
        self.equations
            .iter()
            .filter(move |e| matches!(&e.lhs, Term::App(g, _) if &**g == f))
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(m) = &self.main {
            writeln!(f, "!main {m}.")?;
        }
        for (s, d) in &self.links {
            if s == d {
                writeln!(f, "!link {s}.")?;
            } else {
                writeln!(f, "!link {s} = {d}.")?;
            }
        }
        for e in &self.equations {
            writeln!(f, "{e}.")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use crate::syntax::parse::parse_program;

    #[test]
    fn signature_is_inferred() {
        let p = parse_program("add(x, 0) = x.\nadd(x, S(y)) = S(add(x, y)).").unwrap();
        assert_eq!(p.arity("add"), Some(2));
        assert_eq!(p.arity("S"), Some(1));
        assert_eq!(p.arity("mul"), None);
        assert_eq!(p.signature().len(), 3);
    }

    #[test]
    fn closure_order() {
        let p = parse_program("f(x, y) = g(y, z).").unwrap();
        assert_eq!(p.equations()[0].closure().to_string(), "forall x forall y forall z f(x, y) = g(y, z)");
    }

    #[test]
    fn printing_reparses() {
        let text = "!main f.\nf(x) = h(k(g(x, y), x, y)).\nk(0, x, y) = y.\n";
        let p = parse_program(text).unwrap();
        assert_eq!(p.to_string(), text);
        assert_eq!(parse_program(&p.to_string()).unwrap(), p);
    }
}
