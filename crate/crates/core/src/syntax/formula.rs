use std::collections::{BTreeSet, HashSet};
use std::fmt;

use thiserror::Error;

use super::term::{fmt_path, Name, Path, Term};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Eq(Term, Term),
    /// The data predicate `N(t)`; only legal in intrinsic mode.
    Nat(Term),
    False,
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Imp(Box<Formula>, Box<Formula>),
    Forall(Name, Box<Formula>),
    Exists(Name, Box<Formula>),
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SubstError {
    #[error("capture-violation: {term} is not free for {var} in {formula}")]
    CaptureViolation { term: Term, var: Name, formula: Formula },
    #[error("bad-position: {} does not address an occurrence of {term}", fmt_path(path))]
    BadPosition { path: Path, term: Term },
    #[error("capture-violation: replacing at {} would capture a variable", fmt_path(path))]
    CapturedOccurrence { path: Path },
}

impl Formula {
    pub fn eq(l: Term, r: Term) -> Formula {
        Formula::Eq(l, r)
    }

    pub fn nat(t: Term) -> Formula {
        Formula::Nat(t)
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn imp(a: Formula, b: Formula) -> Formula {
        Formula::Imp(Box::new(a), Box::new(b))
    }

    /// `~a`, encoded as `a -> false`.
    pub fn not(a: Formula) -> Formula {
        Formula::imp(a, Formula::False)
    }

    pub fn forall(x: &str, body: Formula) -> Formula {
        Formula::Forall(x.into(), Box::new(body))
    }

    pub fn exists(x: &str, body: Formula) -> Formula {
        Formula::Exists(x.into(), Box::new(body))
    }

    /// Prefix `body` with universal quantifiers, outermost first.
    pub fn forall_many<S: AsRef<str>>(vars: &[S], body: Formula) -> Formula {
        vars.iter()
            .rev()
            .fold(body, |acc, v| Formula::forall(v.as_ref(), acc))
    }

    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => vec![a, b],
            Formula::Forall(_, a) | Formula::Exists(_, a) => vec![a],
            _ => Vec::new(),
        }
    }

    pub fn contains_nat(&self) -> bool {
        match self {
            Formula::Nat(_) => true,
            Formula::Eq(..) | Formula::False => false,
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                a.contains_nat() || b.contains_nat()
            }
            Formula::Forall(_, a) | Formula::Exists(_, a) => a.contains_nat(),
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<Name>, out: &mut BTreeSet<Name>) {
        let mut term = |t: &Term, bound: &Vec<Name>| {
            for v in t.free_vars() {
                if !bound.contains(&v) {
                    out.insert(v);
                }
            }
        };
        match self {
            Formula::Eq(l, r) => {
                term(l, bound);
                term(r, bound);
            }
            Formula::Nat(t) => term(t, bound),
            Formula::False => {}
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Forall(x, a) | Formula::Exists(x, a) => {
                bound.push(x.clone());
                a.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    pub fn has_free(&self, x: &str) -> bool {
        match self {
            Formula::Eq(l, r) => l.contains_var(x) || r.contains_var(x),
            Formula::Nat(t) => t.contains_var(x),
            Formula::False => false,
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                a.has_free(x) || b.has_free(x)
            }
            Formula::Forall(y, a) | Formula::Exists(y, a) => &**y != x && a.has_free(x),
        }
    }

    /// Every name (variable, bound variable, symbol) mentioned anywhere.
    pub fn collect_names(&self, out: &mut BTreeSet<Name>) {
        match self {
            Formula::Eq(l, r) => {
                l.collect_names(out);
                r.collect_names(out);
            }
            Formula::Nat(t) => t.collect_names(out),
            Formula::False => {}
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                a.collect_names(out);
                b.collect_names(out);
            }
            Formula::Forall(x, a) | Formula::Exists(x, a) => {
                out.insert(x.clone());
                a.collect_names(out);
            }
        }
    }

    pub fn symbols(&self, out: &mut BTreeSet<(Name, usize)>) {
        match self {
            Formula::Eq(l, r) => {
                l.symbols(out);
                r.symbols(out);
            }
            Formula::Nat(t) => t.symbols(out),
            Formula::False => {}
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                a.symbols(out);
                b.symbols(out);
            }
            Formula::Forall(_, a) | Formula::Exists(_, a) => a.symbols(out),
        }
    }

    /// True iff no free occurrence of `x` lies under a binder of a variable of `t`.
    pub fn free_for(&self, t: &Term, x: &str) -> bool {
        if let Term::Var(v) = t {
            if &**v == x {
                return true;
            }
        }
        let tv = t.free_vars();
        self.free_for_inner(&tv, x)
    }

    fn free_for_inner(&self, tv: &BTreeSet<Name>, x: &str) -> bool {
        match self {
            Formula::Eq(..) | Formula::Nat(_) | Formula::False => true,
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                a.free_for_inner(tv, x) && b.free_for_inner(tv, x)
            }
            Formula::Forall(y, a) | Formula::Exists(y, a) => {
                if &**y == x || !a.has_free(x) {
                    true
                } else {
                    !tv.contains(y) && a.free_for_inner(tv, x)
                }
            }
        }
    }

    /// Capture-avoiding instantiation `self[x := t]`.
    pub fn substitute(&self, x: &str, t: &Term) -> Result<Formula, SubstError> {
        if !self.free_for(t, x) {
            return Err(SubstError::CaptureViolation {
                term: t.clone(),
                var: x.into(),
                formula: self.clone(),
            });
        }
        Ok(self.subst_unchecked(x, t))
    }

    fn subst_unchecked(&self, x: &str, t: &Term) -> Formula {
        match self {
            Formula::Eq(l, r) => Formula::Eq(l.subst_var(x, t), r.subst_var(x, t)),
            Formula::Nat(u) => Formula::Nat(u.subst_var(x, t)),
            Formula::False => Formula::False,
            Formula::And(a, b) => Formula::and(a.subst_unchecked(x, t), b.subst_unchecked(x, t)),
            Formula::Or(a, b) => Formula::or(a.subst_unchecked(x, t), b.subst_unchecked(x, t)),
            Formula::Imp(a, b) => Formula::imp(a.subst_unchecked(x, t), b.subst_unchecked(x, t)),
            Formula::Forall(y, _) | Formula::Exists(y, _) if &**y == x => self.clone(),
            Formula::Forall(y, a) => Formula::Forall(y.clone(), Box::new(a.subst_unchecked(x, t))),
            Formula::Exists(y, a) => Formula::Exists(y.clone(), Box::new(a.subst_unchecked(x, t))),
        }
    }

    /// Substitute `f(v)` for each free variable `v` where `f` answers; the
    /// replacement terms must be closed or otherwise capture-free.
    pub fn map_free_vars(&self, f: &dyn Fn(&Name) -> Option<Term>) -> Formula {
        fn go(a: &Formula, bound: &mut Vec<Name>, f: &dyn Fn(&Name) -> Option<Term>) -> Formula {
            let tm = |t: &Term, bound: &Vec<Name>| {
                t.subst_with(&|v: &Name| if bound.contains(v) { None } else { f(v) })
            };
            match a {
                Formula::Eq(l, r) => Formula::Eq(tm(l, bound), tm(r, bound)),
                Formula::Nat(t) => Formula::Nat(tm(t, bound)),
                Formula::False => Formula::False,
                Formula::And(x, y) => Formula::and(go(x, bound, f), go(y, bound, f)),
                Formula::Or(x, y) => Formula::or(go(x, bound, f), go(y, bound, f)),
                Formula::Imp(x, y) => Formula::imp(go(x, bound, f), go(y, bound, f)),
                Formula::Forall(v, b) | Formula::Exists(v, b) => {
                    bound.push(v.clone());
                    let body = go(b, bound, f);
                    bound.pop();
                    if matches!(a, Formula::Forall(..)) {
                        Formula::Forall(v.clone(), Box::new(body))
                    } else {
                        Formula::Exists(v.clone(), Box::new(body))
                    }
                }
            }
        }
        go(self, &mut Vec::new(), f)
    }

    /// The term at `path`, together with the variables bound above it.
    pub fn term_at(&self, path: &[usize]) -> Option<(&Term, Vec<Name>)> {
        let mut bound = Vec::new();
        let mut cur = self;
        let mut rest = path;
        loop {
            let (&i, tail) = rest.split_first()?;
            match cur {
                Formula::Eq(l, r) => {
                    let side = match i {
                        0 => l,
                        1 => r,
                        _ => return None,
                    };
                    return side.at(tail).map(|t| (t, bound));
                }
                Formula::Nat(t) => {
                    return if i == 0 { t.at(tail).map(|t| (t, bound)) } else { None };
                }
                Formula::False => return None,
                Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                    cur = match i {
                        0 => a,
                        1 => b,
                        _ => return None,
                    };
                }
                Formula::Forall(x, a) | Formula::Exists(x, a) => {
                    if i != 0 {
                        return None;
                    }
                    bound.push(x.clone());
                    cur = a;
                }
            }
            rest = tail;
        }
    }

    fn replace_term_at(&self, path: &[usize], s: &Term) -> Option<Formula> {
        let (&i, tail) = path.split_first()?;
        Some(match self {
            Formula::Eq(l, r) => match i {
                0 => Formula::Eq(l.replace_at(tail, s)?, r.clone()),
                1 => Formula::Eq(l.clone(), r.replace_at(tail, s)?),
                _ => return None,
            },
            Formula::Nat(t) if i == 0 => Formula::Nat(t.replace_at(tail, s)?),
            Formula::Nat(_) | Formula::False => return None,
            Formula::And(a, b) => match i {
                0 => Formula::and(a.replace_term_at(tail, s)?, (**b).clone()),
                1 => Formula::and((**a).clone(), b.replace_term_at(tail, s)?),
                _ => return None,
            },
            Formula::Or(a, b) => match i {
                0 => Formula::or(a.replace_term_at(tail, s)?, (**b).clone()),
                1 => Formula::or((**a).clone(), b.replace_term_at(tail, s)?),
                _ => return None,
            },
            Formula::Imp(a, b) => match i {
                0 => Formula::imp(a.replace_term_at(tail, s)?, (**b).clone()),
                1 => Formula::imp((**a).clone(), b.replace_term_at(tail, s)?),
                _ => return None,
            },
            Formula::Forall(x, a) if i == 0 => {
                Formula::Forall(x.clone(), Box::new(a.replace_term_at(tail, s)?))
            }
            Formula::Exists(x, a) if i == 0 => {
                Formula::Exists(x.clone(), Box::new(a.replace_term_at(tail, s)?))
            }
            Formula::Forall(..) | Formula::Exists(..) => return None,
        })
    }

    /// Replace exactly the addressed occurrences of `t` by `s`. Each addressed
    /// occurrence must be free (no variable of `t` bound above it) and `s`
    /// must not be captured there.
    pub fn replace_occurrences(
        &self,
        t: &Term,
        s: &Term,
        positions: &BTreeSet<Path>,
    ) -> Result<Formula, SubstError> {
        let tv = t.free_vars();
        let sv = s.free_vars();
        let mut out = self.clone();
        for p in positions {
            let bad = || SubstError::BadPosition { path: p.clone(), term: t.clone() };
            let (found, bound) = self.term_at(p).ok_or_else(bad)?;
            if found != t {
                return Err(bad());
            }
            if bound.iter().any(|b| tv.contains(b) || sv.contains(b)) {
                return Err(SubstError::CapturedOccurrence { path: p.clone() });
            }
            out = out.replace_term_at(p, s).ok_or_else(bad)?;
        }
        Ok(out)
    }

    /// Paths of the free occurrences of variable `x`.
    pub fn free_occurrences(&self, x: &str) -> Vec<Path> {
        fn term_occ(t: &Term, x: &str, prefix: &mut Path, out: &mut Vec<Path>) {
            match t {
                Term::Var(v) if &**v == x => out.push(prefix.clone()),
                Term::Var(_) => {}
                Term::App(_, args) => {
                    for (i, a) in args.iter().enumerate() {
                        prefix.push(i);
                        term_occ(a, x, prefix, out);
                        prefix.pop();
                    }
                }
            }
        }
        fn go(a: &Formula, x: &str, prefix: &mut Path, out: &mut Vec<Path>) {
            let mut child = |i: usize, f: &mut dyn FnMut(&mut Path, &mut Vec<Path>)| {
                prefix.push(i);
                f(prefix, out);
                prefix.pop();
            };
            match a {
                Formula::Eq(l, r) => {
                    child(0, &mut |p, o| term_occ(l, x, p, o));
                    child(1, &mut |p, o| term_occ(r, x, p, o));
                }
                Formula::Nat(t) => child(0, &mut |p, o| term_occ(t, x, p, o)),
                Formula::False => {}
                Formula::And(l, r) | Formula::Or(l, r) | Formula::Imp(l, r) => {
                    child(0, &mut |p, o| go(l, x, p, o));
                    child(1, &mut |p, o| go(r, x, p, o));
                }
                Formula::Forall(y, b) | Formula::Exists(y, b) => {
                    if &**y != x {
                        child(0, &mut |p, o| go(b, x, p, o));
                    }
                }
            }
        }
        let mut out = Vec::new();
        go(self, x, &mut Vec::new(), &mut out);
        out
    }

    /// Every term occurrence in the formula with its path.
    pub fn term_occurrences(&self) -> Vec<(Path, Term)> {
        fn go(a: &Formula, prefix: &mut Path, out: &mut Vec<(Path, Term)>) {
            let term = |i: usize, t: &Term, prefix: &mut Path, out: &mut Vec<(Path, Term)>| {
                prefix.push(i);
                for (p, s) in t.subterms() {
                    let mut full = prefix.clone();
                    full.extend(p);
                    out.push((full, s.clone()));
                }
                prefix.pop();
            };
            match a {
                Formula::Eq(l, r) => {
                    term(0, l, prefix, out);
                    term(1, r, prefix, out);
                }
                Formula::Nat(t) => term(0, t, prefix, out),
                Formula::False => {}
                Formula::And(l, r) | Formula::Or(l, r) | Formula::Imp(l, r) => {
                    prefix.push(0);
                    go(l, prefix, out);
                    prefix.pop();
                    prefix.push(1);
                    go(r, prefix, out);
                    prefix.pop();
                }
                Formula::Forall(_, b) | Formula::Exists(_, b) => {
                    prefix.push(0);
                    go(b, prefix, out);
                    prefix.pop();
                }
            }
        }
        let mut out = Vec::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    /// Equality up to renaming of bound variables.
    pub fn alpha_eq(&self, other: &Formula) -> bool {
        alpha(self, other, &mut Vec::new())
    }

    /// Number of connective, quantifier and atom nodes.
    pub fn size(&self) -> usize {
        match self {
            Formula::Eq(l, r) => 1 + l.size() + r.size(),
            Formula::Nat(t) => 1 + t.size(),
            Formula::False => 1,
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => 1 + a.size() + b.size(),
            Formula::Forall(_, a) | Formula::Exists(_, a) => 1 + a.size(),
        }
    }
}

fn alpha_term(a: &Term, b: &Term, env: &[(Name, Name)]) -> bool {
    match (a, b) {
        (Term::Var(x), Term::Var(y)) => {
            let bx = env.iter().rposition(|(l, _)| l == x);
            let by = env.iter().rposition(|(_, r)| r == y);
            match (bx, by) {
                (Some(i), Some(j)) => i == j,
                (None, None) => x == y,
                _ => false,
            }
        }
        (Term::App(f, xs), Term::App(g, ys)) => {
            f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| alpha_term(x, y, env))
        }
        _ => false,
    }
}

fn alpha(a: &Formula, b: &Formula, env: &mut Vec<(Name, Name)>) -> bool {
    match (a, b) {
        (Formula::Eq(l1, r1), Formula::Eq(l2, r2)) => {
            alpha_term(l1, l2, env) && alpha_term(r1, r2, env)
        }
        (Formula::Nat(t1), Formula::Nat(t2)) => alpha_term(t1, t2, env),
        (Formula::False, Formula::False) => true,
        (Formula::And(a1, b1), Formula::And(a2, b2))
        | (Formula::Or(a1, b1), Formula::Or(a2, b2))
        | (Formula::Imp(a1, b1), Formula::Imp(a2, b2)) => alpha(a1, a2, env) && alpha(b1, b2, env),
        (Formula::Forall(x, a1), Formula::Forall(y, a2))
        | (Formula::Exists(x, a1), Formula::Exists(y, a2)) => {
            env.push((x.clone(), y.clone()));
            let r = alpha(a1, a2, env);
            env.pop();
            r
        }
        _ => false,
    }
}

/// Distinct formulas up to alpha-equivalence.
pub fn dedup_alpha(forms: impl IntoIterator<Item = Formula>) -> Vec<Formula> {
    let mut out: Vec<Formula> = Vec::new();
    let mut seen: HashSet<Formula> = HashSet::new();
    for f in forms {
        if seen.contains(&f) || out.iter().any(|g| g.alpha_eq(&f)) {
            continue;
        }
        seen.insert(f.clone());
        out.push(f);
    }
    out
}

// Precedence levels used by the printer; higher binds tighter.
const P_QUANT: u8 = 0;
const P_IMP: u8 = 1;
const P_OR: u8 = 2;
const P_AND: u8 = 3;
const P_NOT: u8 = 4;

fn prec(a: &Formula) -> u8 {
    match a {
        Formula::Forall(..) | Formula::Exists(..) => P_QUANT,
        Formula::Imp(_, b) if **b == Formula::False => P_NOT,
        Formula::Imp(..) => P_IMP,
        Formula::Or(..) => P_OR,
        Formula::And(..) => P_AND,
        _ => 5,
    }
}

fn write_formula(
    f: &mut fmt::Formatter<'_>,
    a: &Formula,
    ctx: u8,
    rightmost: bool,
) -> fmt::Result {
    let p = prec(a);
    let parens = if p == P_QUANT { !rightmost } else { p < ctx };
    if parens {
        write!(f, "(")?;
    }
    let rightmost = rightmost || parens;
    match a {
        Formula::Eq(l, r) => write!(f, "{l} = {r}")?,
        Formula::Nat(t) => write!(f, "N({t})")?,
        Formula::False => write!(f, "false")?,
        Formula::Imp(x, y) if **y == Formula::False => {
            write!(f, "~")?;
            write_formula(f, x, P_NOT, rightmost)?;
        }
        Formula::Imp(x, y) => {
            write_formula(f, x, P_OR, false)?;
            write!(f, " -> ")?;
            write_formula(f, y, P_IMP, rightmost)?;
        }
        Formula::Or(x, y) => {
            write_formula(f, x, P_OR, false)?;
            write!(f, " | ")?;
            write_formula(f, y, P_AND, rightmost)?;
        }
        Formula::And(x, y) => {
            write_formula(f, x, P_AND, false)?;
            write!(f, " & ")?;
            write_formula(f, y, P_NOT, rightmost)?;
        }
        Formula::Forall(x, b) => {
            write!(f, "forall {x} ")?;
            write_formula(f, b, P_QUANT, rightmost)?;
        }
        Formula::Exists(x, b) => {
            write!(f, "exists {x} ")?;
            write_formula(f, b, P_QUANT, rightmost)?;
        }
    }
    if parens {
        write!(f, ")")?;
    }
    Ok(())
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(f, self, P_QUANT, true)
    }
}
