use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

/// Interned-ish identifier shared between terms.
pub type Name = Arc<str>;

pub const ZERO: &str = "0";
pub const SUCC: &str = "S";

/// Position of a subterm or subformula: child indices from the root.
pub type Path = Vec<usize>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SymbolKind {
    Zero,
    Succ,
    Program,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol {
    pub name: Name,
    pub arity: usize,
    pub kind: SymbolKind,
}

impl Symbol {
    pub fn zero() -> Symbol {
        Symbol { name: ZERO.into(), arity: 0, kind: SymbolKind::Zero }
    }

    pub fn succ() -> Symbol {
        Symbol { name: SUCC.into(), arity: 1, kind: SymbolKind::Succ }
    }

    pub fn program(name: &str, arity: usize) -> Symbol {
        Symbol { name: name.into(), arity, kind: kind_of(name) }
    }
}

/// Symbols are program symbols unless they are the reserved `0`/`S`.
pub fn kind_of(name: &str) -> SymbolKind {
    match name {
        ZERO => SymbolKind::Zero,
        SUCC => SymbolKind::Succ,
        _ => SymbolKind::Program,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(Name),
    App(Name, Vec<Term>),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.into())
    }

    pub fn app(name: &str, args: Vec<Term>) -> Term {
        Term::App(name.into(), args)
    }

    pub fn zero() -> Term {
        Term::App(ZERO.into(), Vec::new())
    }

    pub fn succ(t: Term) -> Term {
        Term::App(SUCC.into(), vec![t])
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn as_var(&self) -> Option<&Name> {
        match self {
            Term::Var(v) => Some(v),
            Term::App(..) => None,
        }
    }

    /// Number of symbol and variable occurrences.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::App(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<Name>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    /// Variables in order of first occurrence, left to right.
    pub fn vars_in_order(&self) -> Vec<Name> {
        fn go(t: &Term, out: &mut Vec<Name>) {
            match t {
                Term::Var(v) => {
                    if !out.contains(v) {
                        out.push(v.clone());
                    }
                }
                Term::App(_, args) => args.iter().for_each(|a| go(a, out)),
            }
        }
        let mut out = Vec::new();
        go(self, &mut out);
        out
    }

    pub fn contains_var(&self, x: &str) -> bool {
        match self {
            Term::Var(v) => &**v == x,
            Term::App(_, args) => args.iter().any(|a| a.contains_var(x)),
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::App(_, args) => args.iter().all(Term::is_ground),
        }
    }

    /// Replace every occurrence of variable `x` by `t`.
    pub fn subst_var(&self, x: &str, t: &Term) -> Term {
        match self {
            Term::Var(v) if &**v == x => t.clone(),
            Term::Var(_) => self.clone(),
            Term::App(f, args) => {
                Term::App(f.clone(), args.iter().map(|a| a.subst_var(x, t)).collect())
            }
        }
    }

    pub fn subst_with(&self, f: &dyn Fn(&Name) -> Option<Term>) -> Term {
        match self {
            Term::Var(v) => f(v).unwrap_or_else(|| self.clone()),
            Term::App(g, args) => {
                Term::App(g.clone(), args.iter().map(|a| a.subst_with(f)).collect())
            }
        }
    }

    pub fn at(&self, path: &[usize]) -> Option<&Term> {
        match path.split_first() {
            None => Some(self),
            Some((&i, rest)) => match self {
                Term::App(_, args) => args.get(i)?.at(rest),
                Term::Var(_) => None,
            },
        }
    }

    /// Returns `None` when the path does not address a subterm.
    pub fn replace_at(&self, path: &[usize], s: &Term) -> Option<Term> {
        match path.split_first() {
            None => Some(s.clone()),
            Some((&i, rest)) => match self {
                Term::App(f, args) if i < args.len() => {
                    let mut args = args.clone();
                    args[i] = args[i].replace_at(rest, s)?;
                    Some(Term::App(f.clone(), args))
                }
                _ => None,
            },
        }
    }

    /// Paths (relative to this term) of all occurrences of `t`.
    pub fn occurrences(&self, t: &Term) -> Vec<Path> {
        fn go(u: &Term, t: &Term, prefix: &mut Path, out: &mut Vec<Path>) {
            if u == t {
                out.push(prefix.clone());
            }
            if let Term::App(_, args) = u {
                for (i, a) in args.iter().enumerate() {
                    prefix.push(i);
                    go(a, t, prefix, out);
                    prefix.pop();
                }
            }
        }
        let mut out = Vec::new();
        go(self, t, &mut Vec::new(), &mut out);
        out
    }

    /// Every subterm with its path, pre-order.
    pub fn subterms(&self) -> Vec<(Path, &Term)> {
        fn go<'a>(u: &'a Term, prefix: &mut Path, out: &mut Vec<(Path, &'a Term)>) {
            out.push((prefix.clone(), u));
            if let Term::App(_, args) = u {
                for (i, a) in args.iter().enumerate() {
                    prefix.push(i);
                    go(a, prefix, out);
                    prefix.pop();
                }
            }
        }
        let mut out = Vec::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn symbols(&self, out: &mut BTreeSet<(Name, usize)>) {
        if let Term::App(f, args) = self {
            out.insert((f.clone(), args.len()));
            args.iter().for_each(|a| a.symbols(out));
        }
    }

    pub fn collect_names(&self, out: &mut BTreeSet<Name>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::App(f, args) => {
                out.insert(f.clone());
                args.iter().for_each(|a| a.collect_names(out));
            }
        }
    }
}

/// A term is basic when built from `0`, `S` and variables only.
pub fn is_basic(t: &Term) -> bool {
    match t {
        Term::Var(_) => true,
        Term::App(f, args) => match kind_of(f) {
            SymbolKind::Zero | SymbolKind::Succ => args.iter().all(is_basic),
            SymbolKind::Program => false,
        },
    }
}

/// `S` applied `n` times to `0`.
pub fn numeral(n: u64) -> Term {
    let mut t = Term::zero();
    for _ in 0..n {
        t = Term::succ(t);
    }
    t
}

pub fn decode_numeral(t: &Term) -> Option<u64> {
    let mut n = 0u64;
    let mut cur = t;
    loop {
        match cur {
            Term::App(f, args) if &**f == ZERO && args.is_empty() => return Some(n),
            Term::App(f, args) if &**f == SUCC && args.len() == 1 => {
                n += 1;
                cur = &args[0];
            }
            _ => return None,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::App(g, args) if args.is_empty() && &**g == ZERO => write!(f, "0"),
            Term::App(g, args) => {
                write!(f, "{g}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

pub fn fmt_path(p: &[usize]) -> String {
    p.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(".")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_terms() {
        assert!(is_basic(&Term::succ(Term::succ(Term::var("x")))));
        assert!(is_basic(&Term::zero()));
        assert!(!is_basic(&Term::app("f", vec![Term::var("x")])));
        assert!(!is_basic(&Term::succ(Term::app("c", vec![]))));
    }

    #[test]
    fn numerals() {
        assert_eq!(numeral(3).to_string(), "S(S(S(0)))");
        assert_eq!(decode_numeral(&Term::zero()), Some(0));
        assert_eq!(decode_numeral(&Term::app("f", vec![Term::zero()])), None);
        assert_eq!(decode_numeral(&Term::succ(Term::var("x"))), None);
    }

    #[test]
    fn numeral_roundtrip_to_ten_thousand() {
        for n in (0..10_000u64).step_by(7).chain([9_999]) {
            assert_eq!(decode_numeral(&numeral(n)), Some(n));
        }
    }

    #[test]
    fn replace_and_lookup() {
        let t = Term::app("f", vec![Term::var("x"), Term::succ(Term::var("x"))]);
        assert_eq!(t.at(&[1, 0]), Some(&Term::var("x")));
        assert_eq!(t.occurrences(&Term::var("x")), vec![vec![0], vec![1, 0]]);
        let r = t.replace_at(&[1, 0], &Term::zero()).unwrap();
        assert_eq!(r.to_string(), "f(x, S(0))");
        assert!(t.replace_at(&[2], &Term::zero()).is_none());
    }
}
