use rustc_hash::{FxHashMap as HashMap, FxHashSet as HashSet};

use thiserror::Error;

use super::derivation::{DerivationBuilder, EqDerivation};
use super::search::{saturate, Goal, SearchBudget};
use crate::syntax::{decode_numeral, numeral, Equation, Name, Program, Term, SUCC, ZERO};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Evaluation {
    pub value: u64,
    pub numeral: Term,
    /// Derivation of `input = numeral`.
    pub certificate: EqDerivation,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("symbol `{0}` does not occur in the program")]
    UnknownSymbol(Name),
    #[error("`{symbol}` expects {expected} arguments, got {got}")]
    Arity { symbol: Name, expected: usize, got: usize },
    #[error("argument {0} is not a numeral")]
    NotANumeral(Term),
    #[error("not-orientable: {0}")]
    NotOrientable(Equation),
}

/// Innermost evaluation to numerals, tracking a certificate for each result.
struct Directed<'a> {
    p: &'a Program,
    cap: usize,
    backtrack: bool,
    fuel: usize,
    exhausted: bool,
    /// Smallest term refused for exceeding the cap.
    over_cap: Option<usize>,
    /// Whether the cap bounded the choice of extra right-hand-side variables.
    guessed: bool,
    b: DerivationBuilder,
    memo: HashMap<Term, (Term, usize)>,
    active: HashSet<Term>,
}

impl<'a> Directed<'a> {
    fn new(p: &'a Program, cap: usize, fuel: usize, backtrack: bool) -> Directed<'a> {
        Directed {
            p,
            cap,
            backtrack,
            fuel,
            exhausted: false,
            over_cap: None,
            guessed: false,
            b: DerivationBuilder::new(),
            memo: HashMap::default(),
            active: HashSet::default(),
        }
    }

    /// A numeral `m` and the step deriving `t = m`.
    fn eval(&mut self, t: &Term) -> Option<(Term, usize)> {
        if self.exhausted {
            return None;
        }
        if decode_numeral(t).is_some() {
            return Some((t.clone(), self.b.refl(t)));
        }
        if let Some(hit) = self.memo.get(t) {
            return Some(hit.clone());
        }
        let Term::App(f, args) = t else { return None };
        let size = t.size();
        if size > self.cap {
            self.over_cap = Some(self.over_cap.map_or(size, |m| m.min(size)));
            return None;
        }
        if !self.active.insert(t.clone()) {
            return None;
        }
        let out = self.eval_app(t, f, args);
        self.active.remove(t);
        if let Some(hit) = &out {
            self.memo.insert(t.clone(), hit.clone());
        }
        out
    }

    fn eval_app(&mut self, t: &Term, f: &Name, args: &[Term]) -> Option<(Term, usize)> {
        let mut vals = Vec::with_capacity(args.len());
        let mut cur = self.b.refl(t);
        for (i, a) in args.iter().enumerate() {
            let (m, d) = self.eval(a)?;
            if m != *a {
                cur = self.b.replace_one(cur, d, vec![1, i]);
            }
            vals.push(m);
        }
        let u = Term::App(f.clone(), vals);
        if &**f == SUCC || &**f == ZERO {
            return Some((u, cur));
        }
        let eqs: Vec<Equation> = self.p.equations_for(f).cloned().collect();
        for eq in &eqs {
            let Some(sigma) = matches(&eq.lhs, &u) else { continue };
            let extra: Vec<Name> = eq.rhs.vars_in_order().into_iter().filter(|v| !sigma.contains_key(v)).collect();
            if !extra.is_empty() && !self.backtrack {
                return None;
            }
            self.guessed |= !extra.is_empty();
            let bound = self.cap.saturating_sub(1) as u64;
            for choice in Tuples::new(extra.len(), bound) {
                if self.fuel == 0 {
                    self.exhausted = true;
                    return None;
                }
                self.fuel -= 1;
                let mut full = sigma.clone();
                for (v, n) in extra.iter().zip(&choice) {
                    full.insert(v.clone(), numeral(*n));
                }
                let rhs = eq.rhs.subst_with(&|v| full.get(v).cloned());
                let size = rhs.size();
                if size > self.cap && decode_numeral(&rhs).is_none() {
                    self.over_cap = Some(self.over_cap.map_or(size, |m| m.min(size)));
                    continue;
                }
                if let Some((m, d)) = self.eval(&rhs) {
                    let mut step = self.b.axiom(eq);
                    for v in eq.vars_in_order() {
                        step = self.b.instantiate(step, &v, &full[&v]);
                    }
                    let mut total = self.b.trans(cur, step);
                    if m != rhs {
                        total = self.b.trans(total, d);
                    }
                    return Some((m, total));
                }
                if self.exhausted {
                    return None;
                }
            }
            if !self.backtrack {
                return None;
            }
        }
        None
    }
}

/// Syntactic matching of a pattern against a ground term.
fn matches(pat: &Term, t: &Term) -> Option<HashMap<Name, Term>> {
    fn go(pat: &Term, t: &Term, s: &mut HashMap<Name, Term>) -> bool {
        match (pat, t) {
            (Term::Var(x), _) => match s.get(x) {
                Some(prev) => prev == t,
                None => {
                    s.insert(x.clone(), t.clone());
                    true
                }
            },
            (Term::App(f, xs), Term::App(g, ys)) => {
                f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| go(x, y, s))
            }
            _ => false,
        }
    }
    let mut s = HashMap::default();
    go(pat, t, &mut s).then_some(s)
}

/// Tuples over `0..=bound` of length `k`, ordered by sum, then lexicographically.
struct Tuples {
    k: usize,
    bound: u64,
    sum: u64,
    pending: Vec<Vec<u64>>,
    done: bool,
}

impl Tuples {
    fn new(k: usize, bound: u64) -> Tuples {
        Tuples { k, bound, sum: 0, pending: Vec::new(), done: false }
    }

    fn with_sum(k: usize, sum: u64, bound: u64) -> Vec<Vec<u64>> {
        if k == 0 {
            return if sum == 0 { vec![Vec::new()] } else { Vec::new() };
        }
        let mut out = Vec::new();
        for first in 0..=sum.min(bound) {
            for mut rest in Tuples::with_sum(k - 1, sum - first, bound) {
                rest.insert(0, first);
                out.push(rest);
            }
        }
        out
    }
}

impl Iterator for Tuples {
    type Item = Vec<u64>;

    fn next(&mut self) -> Option<Vec<u64>> {
        loop {
            if let Some(t) = self.pending.pop() {
                return Some(t);
            }
            if self.done || self.sum > self.bound * self.k as u64 {
                return None;
            }
            let mut batch = Tuples::with_sum(self.k, self.sum, self.bound);
            batch.reverse();
            self.pending = batch;
            if self.k == 0 {
                self.done = true;
            }
            self.sum += 1;
        }
    }
}

fn finish(b: &DerivationBuilder, m: Term, root: usize) -> Evaluation {
    Evaluation {
        value: decode_numeral(&m).expect("evaluation ends in a numeral"),
        numeral: m,
        certificate: b.extract(root),
    }
}

/// Compute `f(args)` to a numeral with a checkable certificate.
///
/// Directed innermost evaluation runs first, deepening the term-size cap to
/// the smallest term the previous run refused; saturation search is the
/// fallback.
pub fn evaluate(p: &Program, f: &str, args: &[Term], b: &SearchBudget) -> Result<Option<Evaluation>, EvalError> {
    let expected = p.arity(f).ok_or_else(|| EvalError::UnknownSymbol(f.into()))?;
    if expected != args.len() {
        return Err(EvalError::Arity { symbol: f.into(), expected, got: args.len() });
    }
    if let Some(a) = args.iter().find(|a| decode_numeral(a).is_none()) {
        return Err(EvalError::NotANumeral(a.clone()));
    }
    let t = Term::App(f.into(), args.to_vec());
    let max = b.max_term_size.max(t.size());
    let mut cap = t.size();
    while cap <= max {
        let mut d = Directed::new(p, cap, b.max_steps, true);
        if let Some((m, root)) = d.eval(&t) {
            return Ok(Some(finish(&d.b, m, root)));
        }
        cap = match (d.over_cap, d.guessed) {
            (_, true) => cap + 1,
            (Some(next), false) => next.max(cap + 1),
            (None, false) => break,
        };
    }
    Ok(saturate(p, Goal::ValueOf(&t), b).map(|certificate| {
        let m = super::check_eq_derivation(p, &certificate)
            .conclusion()
            .map(|e| e.rhs.clone())
            .expect("search produces valid derivations");
        Evaluation { value: decode_numeral(&m).expect("goal is numeric"), numeral: m, certificate }
    }))
}

/// First equation that cannot be read as a left-to-right rewrite rule.
pub fn non_orientable(p: &Program) -> Option<&Equation> {
    p.equations().iter().find(|e| {
        e.lhs.is_var() || {
            let lv = e.lhs.free_vars();
            !e.rhs.free_vars().is_subset(&lv)
        }
    })
}

/// Leftmost-innermost rewriting with the first matching equation.
pub fn rewrite_eval(p: &Program, t: &Term, b: &SearchBudget) -> Result<Option<Evaluation>, EvalError> {
    if let Some(e) = non_orientable(p) {
        return Err(EvalError::NotOrientable(e.clone()));
    }
    let mut d = Directed::new(p, b.max_term_size.max(t.size()), b.max_steps, false);
    Ok(d.eval(t).map(|(m, root)| finish(&d.b, m, root)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equational::{check_eq_derivation, EqVerdict};
    use crate::syntax::{parse_program, parse_term};

    fn add() -> Program {
        parse_program("add(x, 0) = x.\nadd(x, S(y)) = S(add(x, y)).").unwrap()
    }

    fn certified(p: &Program, input: &Term, ev: &Evaluation) {
        assert_eq!(
            check_eq_derivation(p, &ev.certificate),
            EqVerdict::Valid(Equation::new(input.clone(), ev.numeral.clone()))
        );
    }

    #[test]
    fn two_plus_three() {
        let p = add();
        let ev = evaluate(&p, "add", &[numeral(2), numeral(3)], &SearchBudget::default()).unwrap().unwrap();
        assert_eq!(ev.value, 5);
        certified(&p, &parse_term("add(2, 3)").unwrap(), &ev);
    }

    #[test]
    fn adding_zero() {
        let p = add();
        for n in [0, 1, 7, 20] {
            let ev = evaluate(&p, "add", &[numeral(n), numeral(0)], &SearchBudget::default()).unwrap().unwrap();
            assert_eq!(ev.value, n);
        }
    }

    #[test]
    fn looping_program_has_no_value() {
        let p = parse_program("f(x) = f(x).").unwrap();
        let b = SearchBudget::new(300, 6).unwrap();
        assert_eq!(evaluate(&p, "f", &[numeral(0)], &b).unwrap(), None);
    }

    #[test]
    fn extra_variables_are_searched() {
        let p = parse_program("f(x) = k(g(x, y), y).\nk(0, y) = y.\ng(x, y) = monus(x, y).\nmonus(x, 0) = x.\nmonus(0, S(y)) = 0.\nmonus(S(x), S(y)) = monus(x, y).").unwrap();
        let ev = evaluate(&p, "f", &[numeral(3)], &SearchBudget::default()).unwrap().unwrap();
        assert_eq!(ev.value, 3);
        certified(&p, &parse_term("f(3)").unwrap(), &ev);
    }

    #[test]
    fn evaluation_preconditions() {
        let p = add();
        let b = SearchBudget::default();
        assert!(matches!(evaluate(&p, "mul", &[], &b), Err(EvalError::UnknownSymbol(_))));
        assert!(matches!(evaluate(&p, "add", &[numeral(1)], &b), Err(EvalError::Arity { .. })));
        assert!(evaluate(&p, "add", &[Term::var("x"), numeral(1)], &b).is_err());
    }

    #[test]
    fn rewriting() {
        let p = add();
        let b = SearchBudget::default();
        let t = parse_term("add(1, 1)").unwrap();
        let ev = rewrite_eval(&p, &t, &b).unwrap().unwrap();
        assert_eq!(ev.value, 2);
        certified(&p, &t, &ev);
        let four = numeral(4);
        assert_eq!(rewrite_eval(&p, &four, &b).unwrap().unwrap().value, 4);
        let bad = parse_program("x = 0.").unwrap();
        assert!(matches!(rewrite_eval(&bad, &four, &b), Err(EvalError::NotOrientable(_))));
    }

    #[test]
    fn tuples_by_sum() {
        let v: Vec<_> = Tuples::new(2, 1).collect();
        assert_eq!(v, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
        assert_eq!(Tuples::new(0, 5).count(), 1);
        assert_eq!(Tuples::new(1, 3).count(), 4);
    }
}
