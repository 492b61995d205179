//! Totality of `f(xs) = h(k(g(xs, y), xs, y))` where `k(0, xs, y) = y`: the
//! search variable `y` never appears as an eigenterm of a non-basic kind,
//! provided `forall xs exists y g(xs, y) = 0` and the totality of `h` are.

use super::registry::{witness_name, PrError};
use crate::kernel::{Proof, ProofBuilder};
use crate::syntax::{Equation, Formula, Name, Program, Term};

pub const K_SYMBOL: &str = "k";

fn search_params(n: usize) -> Vec<Name> {
    match n {
        0 => Vec::new(),
        1 => vec!["x".into()],
        _ => (1..=n).map(|i| format!("x{i}").into()).collect(),
    }
}

/// Extend `base` with the defining equations of `f` and the selector `k`.
pub fn build_k_program(base: &Program, g: &str, h: &str, f: &str) -> Result<Program, PrError> {
    let ga = base.arity(g).ok_or_else(|| PrError::SymbolNotFound(g.into()))?;
    let ha = base.arity(h).ok_or_else(|| PrError::SymbolNotFound(h.into()))?;
    if ga == 0 {
        return Err(PrError::Arity { name: g.into(), detail: "needs at least one argument".into() });
    }
    if ha != 1 {
        return Err(PrError::Arity { name: h.into(), detail: format!("must be unary, has arity {ha}") });
    }
    for s in [f, K_SYMBOL] {
        if base.has_symbol(s) {
            return Err(PrError::SymbolClash(s.into()));
        }
    }
    let xs: Vec<Term> = search_params(ga - 1).into_iter().map(Term::Var).collect();
    let y = Term::var("y");
    let mut gargs = xs.clone();
    gargs.push(y.clone());
    let mut kargs = vec![Term::app(g, gargs)];
    kargs.extend(xs.iter().cloned());
    kargs.push(y.clone());
    let f_eq = Equation::new(Term::app(f, xs.clone()), Term::app(h, vec![Term::app(K_SYMBOL, kargs)]));
    let mut k0 = vec![Term::zero()];
    k0.extend(xs.iter().cloned());
    k0.push(y.clone());
    let k_eq = Equation::new(Term::app(K_SYMBOL, k0), y);
    let mut p = base.clone();
    p.extend([f_eq, k_eq])?;
    Ok(p.with_main(f)?)
}

fn instantiate_closure(b: &mut ProofBuilder, eq: &Equation) -> usize {
    let mut cur = b.axiom(eq.closure());
    for v in eq.vars_in_order() {
        cur = b.all_e(cur, &Term::Var(v));
    }
    cur
}

/// A basic-policy proof of `forall xs exists z f(xs) = z` in `A(P')`, from
/// basic proofs of `forall xs exists y g(xs, y) = 0` and `forall y exists z h(y) = z`.
pub fn gen_k_totality_proof(
    base: &Program,
    g: &str,
    h: &str,
    f: &str,
    g_proof: &Proof,
    h_proof: &Proof,
) -> Result<Proof, PrError> {
    let p = build_k_program(base, g, h, f)?;
    let n = base.arity(g).expect("checked by build_k_program") - 1;
    let xs = search_params(n);
    let xt: Vec<Term> = xs.iter().cloned().map(Term::Var).collect();
    let y: Name = "y".into();
    let yt = Term::Var(y.clone());

    let mut gargs = xt.clone();
    gargs.push(yt.clone());
    let g_shape = Formula::forall_many(&xs, Formula::exists("y", Formula::eq(Term::app(g, gargs.clone()), Term::zero())));
    let h_shape = Formula::forall("y", Formula::exists("z", Formula::eq(Term::app(h, vec![yt.clone()]), Term::var("z"))));
    let check = |pf: &Proof, want: &Formula| match pf.conclusion() {
        Some(c) if c.alpha_eq(want) => Ok(()),
        Some(c) => Err(PrError::Shape(format!("expected {want}, found {c}"))),
        None => Err(PrError::Shape("empty proof".into())),
    };
    check(g_proof, &g_shape)?;
    check(h_proof, &h_shape)?;

    let mut b = ProofBuilder::new();
    for e in p.equations() {
        b.names.avoid_formula(&e.as_formula());
    }
    let gp = b.import(g_proof);
    let hp = b.import(h_proof);
    let f_eq = p.equations()[p.equations().len() - 2].clone();
    let k_eq = p.equations()[p.equations().len() - 1].clone();

    let mut gi = gp;
    for x in &xt {
        gi = b.all_e(gi, x);
    }
    let a1l = b.fresh_label("g");
    let a1 = b.assume(&a1l, Formula::eq(Term::app(g, gargs), Term::zero()));
    let hi = b.all_e(hp, &yt);
    let z: Name = b.names.prefer("z");
    let a2l = b.fresh_label("h");
    let a2 = b.assume(&a2l, Formula::eq(Term::app(h, vec![yt.clone()]), Term::Var(z.clone())));

    let fe = instantiate_closure(&mut b, &f_eq);
    let s1 = b.eqsub(fe, a1, [vec![1, 0, 0]].into_iter().collect());
    let ke = instantiate_closure(&mut b, &k_eq);
    let s2 = b.eqsub(s1, ke, [vec![1, 0]].into_iter().collect());
    let s3 = b.eqsub(s2, a2, [vec![1]].into_iter().collect());

    let w = if xs.iter().any(|x| &**x == "z") { witness_name(&xs) } else { "z".into() };
    let fx = Term::app(f, xt.clone());
    let intro = b.ex_i(s3, &w, Formula::eq(fx, Term::Var(w.clone())), &Term::Var(z.clone()));
    let e1 = b.ex_e(hi, intro, &z, &a2l);
    let mut cur = b.ex_e(gi, e1, &y, &a1l);
    for x in xs.iter().rev() {
        cur = b.gen(cur, x);
    }
    Ok(b.finish(cur))
}
