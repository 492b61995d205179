use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use super::registry::{witness_name, Fullness, PrDefinition, PrError, PrExpr, PrRegistry};
use crate::kernel::{induction_instance, EigentermPolicy, Proof, ProofBuilder, Rule, TheoryConfig};
use crate::syntax::{is_basic, is_pr_term, Formula, Name, Program, Term, SUCC};

/// `forall vars exists w head(vars) = w`, with `w` the first unused witness name.
pub fn totality_formula(head: &Name, vars: &[Name]) -> Formula {
    let w = witness_name(vars);
    let t = Term::App(head.clone(), vars.iter().cloned().map(Term::Var).collect());
    let body = Formula::exists(&w, Formula::eq(t, Term::Var(w.clone())));
    Formula::forall_many(vars, body)
}

/// `forall vars exists w t = w` over the variables of `t` in order of first occurrence.
pub fn term_totality_formula(t: &Term) -> Formula {
    let vars = t.vars_in_order();
    let w = witness_name(&vars);
    Formula::forall_many(&vars, Formula::exists(&w, Formula::eq(t.clone(), Term::Var(w.clone()))))
}

/// Proof construction in `A(P)` with basic eigenterms only.
pub(crate) struct Gen<'a> {
    reg: &'a PrRegistry,
    program: &'a Program,
    pub b: ProofBuilder,
    lemmas: HashMap<Name, usize>,
}

impl<'a> Gen<'a> {
    pub fn new(reg: &'a PrRegistry, program: &'a Program, b: ProofBuilder) -> Gen<'a> {
        let mut b = b;
        for e in program.equations() {
            b.names.avoid_formula(&e.as_formula());
        }
        Gen { reg, program, b, lemmas: HashMap::new() }
    }

    fn definition(&self, sym: &str) -> Result<&'a PrDefinition, PrError> {
        self.reg.definition_for(self.program, sym).ok_or_else(|| PrError::SymbolNotFound(sym.into()))
    }

    /// The closure of an equation instantiated back to the equation itself.
    fn axiom_instance(&mut self, eq: &crate::syntax::Equation) -> usize {
        let mut cur = self.b.axiom(eq.closure());
        for v in eq.vars_in_order() {
            cur = self.b.all_e(cur, &Term::Var(v));
        }
        cur
    }

    /// A closed node proving `forall xs exists w sym(xs) = w`.
    pub fn lemma(&mut self, sym: &Name) -> Result<usize, PrError> {
        if let Some(&i) = self.lemmas.get(sym) {
            return Ok(i);
        }
        let def = self.definition(sym)?;
        let node = if def.is_successor() {
            let x: Name = "x".into();
            let t = Term::succ(Term::Var(x.clone()));
            let e = self.exists_basic(&t);
            self.b.gen(e, &x)
        } else {
            let eqs = self.reg.equations_for_symbol(self.program, sym)?;
            let vars = self.reg.lhs_vars(&def.name)?;
            let w = witness_name(&vars);
            let root = match &def.body {
                PrExpr::Rec(..) => self.recursion(sym, &vars, &w, &eqs)?,
                _ => {
                    let ax = self.axiom_instance(&eqs[0]);
                    self.close_with(ax, &eqs[0].lhs, &w)?
                }
            };
            let mut cur = root;
            let outer = if matches!(def.body, PrExpr::Rec(..)) { &vars[..vars.len() - 1] } else { &vars[..] };
            for v in outer.iter().rev() {
                cur = self.b.gen(cur, v);
            }
            cur
        };
        self.lemmas.insert(sym.clone(), node);
        Ok(node)
    }

    /// From a node proving `lhs = t`, derive `exists w lhs = w`.
    fn close_with(&mut self, ax: usize, lhs: &Term, w: &Name) -> Result<usize, PrError> {
        let Formula::Eq(_, t) = self.b.concl(ax).clone() else { unreachable!() };
        let ex = self.term_exists(&t)?;
        let v = self.b.fresh_var("v");
        let l = self.b.fresh_label("h");
        let h = self.b.assume(&l, Formula::eq(t.clone(), Term::Var(v.clone())));
        let eq = self.b.trans(ax, h);
        let body = Formula::eq(lhs.clone(), Term::Var(w.clone()));
        let intro = self.b.ex_i(eq, w, body, &Term::Var(v.clone()));
        Ok(self.b.ex_e(ex, intro, &v, &l))
    }

    /// `forall y exists w f(xs, y) = w` by the induction axiom, xs left free.
    fn recursion(&mut self, sym: &Name, vars: &[Name], w: &Name, eqs: &[crate::syntax::Equation]) -> Result<usize, PrError> {
        let (y, xs) = vars.split_last().expect("recursion has a recursion variable");
        let at = |t: Term| {
            let mut args: Vec<Term> = xs.iter().cloned().map(Term::Var).collect();
            args.push(t);
            Term::App(sym.clone(), args)
        };
        let fy = at(Term::Var(y.clone()));
        let a = Formula::exists(w, Formula::eq(fy.clone(), Term::Var(w.clone())));
        let ind = self.b.axiom(induction_instance(&a, y).expect("induction formula is well formed"));

        let base_ax = self.axiom_instance(&eqs[0]);
        let base = self.close_with(base_ax, &at(Term::zero()), w)?;

        let hl = self.b.fresh_label("ih");
        let ih = self.b.assume(&hl, a.clone());
        let v = self.b.fresh_var("v");
        let vl = self.b.fresh_label("h");
        let hv = self.b.assume(&vl, Formula::eq(fy.clone(), Term::Var(v.clone())));
        let step_ax = self.axiom_instance(&eqs[1]);
        let Formula::Eq(_, rhs) = self.b.concl(step_ax).clone() else { unreachable!() };
        let rewritten = if rhs.occurrences(&fy).is_empty() { step_ax } else { self.b.eqsub_all(step_ax, hv) };
        let step_c = self.close_with(rewritten, &at(Term::succ(Term::Var(y.clone()))), w)?;
        let step_c = self.b.ex_e(ih, step_c, &v, &vl);
        let imp = self.b.imp_i(step_c, &hl, a);
        let step = self.b.gen(imp, y);

        let r = self.b.imp_e(ind, base);
        Ok(self.b.imp_e(r, step))
    }

    fn exists_basic(&mut self, t: &Term) -> usize {
        let w = witness_name(&t.vars_in_order());
        let r = self.b.refl(t);
        self.b.ex_i(r, &w, Formula::eq(t.clone(), Term::Var(w.clone())), t)
    }

    /// A closed node proving `exists w t = w` for a primitive recursive term.
    pub fn term_exists(&mut self, t: &Term) -> Result<usize, PrError> {
        if is_basic(t) {
            return Ok(self.exists_basic(t));
        }
        let Term::App(g, args) = t else { unreachable!("variables are basic") };
        let lemma = if &**g == SUCC { None } else { Some(self.lemma(g)?) };
        let bound: BTreeSet<Name> = match lemma {
            Some(l) => bound_names(self.b.concl(l)),
            None => BTreeSet::new(),
        };
        struct Sub {
            idx: usize,
            var: Name,
            exists: usize,
            label: Name,
            hyp: usize,
        }
        let mut subs = Vec::new();
        let mut args2 = args.clone();
        for (i, u) in args.iter().enumerate() {
            if is_basic(u) && u.free_vars().is_disjoint(&bound) {
                continue;
            }
            let exists = self.term_exists(u)?;
            let var = self.b.fresh_var("v");
            let label = self.b.fresh_label("h");
            let hyp = self.b.assume(&label, Formula::eq(u.clone(), Term::Var(var.clone())));
            args2[i] = Term::Var(var.clone());
            subs.push(Sub { idx: i, var, exists, label, hyp });
        }
        let t2 = Term::App(g.clone(), args2.clone());
        let ex2 = match lemma {
            None => self.exists_basic(&t2),
            Some(mut cur) => {
                for a in &args2 {
                    cur = self.b.all_e(cur, a);
                }
                cur
            }
        };
        let z = self.b.fresh_var("z");
        let zl = self.b.fresh_label("h");
        let mut cur = self.b.assume(&zl, Formula::eq(t2, Term::Var(z.clone())));
        for s in &subs {
            let back = self.b.symm(s.hyp);
            cur = self.b.eqsub(cur, back, [vec![0, s.idx]].into_iter().collect());
        }
        let w = witness_name(&t.vars_in_order());
        let intro = self.b.ex_i(cur, &w, Formula::eq(t.clone(), Term::Var(w.clone())), &Term::Var(z.clone()));
        let mut res = self.b.ex_e(ex2, intro, &z, &zl);
        for s in subs.iter().rev() {
            res = self.b.ex_e(s.exists, res, &s.var, &s.label);
        }
        Ok(res)
    }
}

fn bound_names(a: &Formula) -> BTreeSet<Name> {
    let mut out = BTreeSet::new();
    let mut cur = a;
    loop {
        match cur {
            Formula::Forall(x, b) | Formula::Exists(x, b) => {
                out.insert(x.clone());
                cur = b;
            }
            _ => return out,
        }
    }
}

/// The kernel configuration for `A(P)` with `P`'s linked symbols as the
/// primitive recursive language.
pub fn pr_config(reg: &PrRegistry, p: &Program, policy: EigentermPolicy) -> TheoryConfig {
    TheoryConfig::arithmetic(p.clone(), policy).with_pr(Arc::new(reg.language_for(p)))
}

/// A basic-policy proof of `forall xs exists y d(xs) = y` in `A(P)` for the
/// minimal full program `P` of `d`.
pub fn gen_totality_proof(reg: &PrRegistry, d: &str) -> Result<Proof, PrError> {
    let p = reg.minimal_program(d)?;
    let def = reg.get(d).ok_or_else(|| PrError::UnknownDefinition(d.into()))?;
    let mut g = Gen::new(reg, &p, ProofBuilder::new());
    let root = g.lemma(&def.name)?;
    Ok(g.b.finish(root))
}

/// A basic-policy proof of `forall xs exists y t = y` for a primitive recursive term.
pub fn gen_term_totality_proof(reg: &PrRegistry, p: &Program, t: &Term) -> Result<Proof, PrError> {
    if !is_pr_term(t, &reg.language_for(p)) {
        return Err(PrError::NotPrTerm(t.clone()));
    }
    let mut b = ProofBuilder::new();
    b.names.avoid_term(t);
    let mut g = Gen::new(reg, p, b);
    let mut root = g.term_exists(t)?;
    for v in t.vars_in_order().iter().rev() {
        root = g.b.gen(root, v);
    }
    Ok(g.b.finish(root))
}

/// Replace every non-basic eigenterm of a proof by a fresh variable bound
/// through a totality lemma. A proof that is already basic is returned as is.
pub fn lower_eigenterms(reg: &PrRegistry, p: &Program, pf: &Proof) -> Result<Proof, PrError> {
    let needs = pf.nodes.iter().any(|n| n.rule.eigenterm().is_some_and(|t| !is_basic(t)));
    if !needs {
        return Ok(pf.clone());
    }
    if let Fullness::Missing { symbol, equations } = reg.is_full(p)? {
        return Err(PrError::NotFull { symbol, missing: equations });
    }
    let lang = reg.language_for(p);
    let mut b = ProofBuilder::new();
    for n in &pf.nodes {
        b.names.avoid_formula(&n.conclusion);
    }
    for name in pf.names() {
        b.names.avoid(&name);
    }
    let mut g = Gen::new(reg, p, b);
    let mut map: Vec<usize> = Vec::with_capacity(pf.nodes.len());
    for n in &pf.nodes {
        let prems: Vec<usize> = n.premises.iter().map(|&i| map[i]).collect();
        let idx = match &n.rule {
            Rule::AllE(t) if !is_basic(t) => {
                if !is_pr_term(t, &lang) {
                    return Err(PrError::NotPrTerm(t.clone()));
                }
                let ex = g.term_exists(t)?;
                let v = g.b.fresh_var("e");
                let l = g.b.fresh_label("h");
                let h = g.b.assume(&l, Formula::eq(t.clone(), Term::Var(v.clone())));
                let inst = g.b.all_e(prems[0], &Term::Var(v.clone()));
                let Formula::Forall(x, body) = g.b.concl(prems[0]).clone() else {
                    return Err(PrError::Shape(format!("allE premise at {} is not universal", n.id)));
                };
                let back = g.b.symm(h);
                let paths = body.free_occurrences(&x).into_iter().collect();
                let res = g.b.eqsub(inst, back, paths);
                debug_assert!(g.b.concl(res).alpha_eq(&n.conclusion));
                g.b.ex_e(ex, res, &v, &l)
            }
            Rule::ExI(t) if !is_basic(t) => {
                if !is_pr_term(t, &lang) {
                    return Err(PrError::NotPrTerm(t.clone()));
                }
                let Formula::Exists(x, body) = &n.conclusion else {
                    return Err(PrError::Shape(format!("exI at {} does not conclude an existential", n.id)));
                };
                let ex = g.term_exists(t)?;
                let v = g.b.fresh_var("e");
                let l = g.b.fresh_label("h");
                let h = g.b.assume(&l, Formula::eq(t.clone(), Term::Var(v.clone())));
                let paths = body.free_occurrences(x).into_iter().collect();
                let swapped = g.b.eqsub(prems[0], h, paths);
                let intro = g.b.ex_i(swapped, x, (**body).clone(), &Term::Var(v.clone()));
                g.b.ex_e(ex, intro, &v, &l)
            }
            _ => g.b.node(n.rule.clone(), prems, n.conclusion.clone()),
        };
        map.push(idx);
    }
    let root = *map.last().ok_or_else(|| PrError::Shape("empty proof".into()))?;
    Ok(g.b.finish(root))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::check_proof;
    use crate::syntax::{parse_formula, parse_term};

    fn basic_ok(reg: &PrRegistry, p: &Program, pf: &Proof) {
        let v = check_proof(&pr_config(reg, p, EigentermPolicy::Basic), pf);
        assert!(v.is_accepted(), "{v}\n{pf}");
        let j = v.judgment().unwrap();
        assert!(j.assumptions.is_empty(), "{j}");
    }

    #[test]
    fn successor_proof_has_three_nodes() {
        let reg = PrRegistry::catalog();
        let pf = gen_totality_proof(&reg, "S").unwrap();
        assert_eq!(pf.len(), 3);
        assert!(pf.conclusion().unwrap().alpha_eq(&parse_formula("forall x exists y S(x) = y").unwrap()));
        basic_ok(&reg, &reg.minimal_program("S").unwrap(), &pf);
    }

    #[test]
    fn every_catalog_definition_is_total() {
        let reg = PrRegistry::catalog();
        for d in reg.user_definitions() {
            let pf = gen_totality_proof(&reg, &d.name).unwrap();
            let p = reg.minimal_program(&d.name).unwrap();
            basic_ok(&reg, &p, &pf);
            let want = totality_formula(&d.name, &reg.lhs_vars(&d.name).unwrap());
            assert_eq!(pf.conclusion().unwrap(), &want, "{}", d.name);
        }
        let add = gen_totality_proof(&reg, "add").unwrap();
        assert_eq!(add.conclusion().unwrap(), &parse_formula("forall x forall y exists z add(x, y) = z").unwrap());
    }

    #[test]
    fn term_totality() {
        let reg = PrRegistry::catalog();
        let p = reg.program_for(&["add".into(), "mul".into()]).unwrap();
        for s in ["x", "0", "S(S(x))", "add(mul(x, y), S(z))", "add(y, add(x, y))", "mul(add(y, 0), w)"] {
            let t = parse_term(s).unwrap();
            let pf = gen_term_totality_proof(&reg, &p, &t).unwrap();
            basic_ok(&reg, &p, &pf);
            assert!(pf.conclusion().unwrap().alpha_eq(&term_totality_formula(&t)), "{s}");
        }
        assert!(matches!(
            gen_term_totality_proof(&reg, &p, &parse_term("f(x)").unwrap()),
            Err(PrError::NotPrTerm(_))
        ));
    }

    #[test]
    fn lowering_keeps_the_judgment() {
        let reg = PrRegistry::catalog();
        let p = reg.minimal_program("add").unwrap();
        let mut b = ProofBuilder::new();
        let tot = gen_totality_proof(&reg, "add").unwrap();
        let root = b.import(&tot);
        let t = parse_term("add(x, x)").unwrap();
        let e1 = b.all_e(root, &t);
        let e2 = b.all_e(e1, &Term::zero());
        let pf = b.finish(e2);
        let cfg = pr_config(&reg, &p, EigentermPolicy::PrimitiveRecursive);
        let before = check_proof(&cfg, &pf);
        assert!(before.is_accepted(), "{before}");
        assert!(!check_proof(&pr_config(&reg, &p, EigentermPolicy::Basic), &pf).is_accepted());
        let low = lower_eigenterms(&reg, &p, &pf).unwrap();
        let after = check_proof(&pr_config(&reg, &p, EigentermPolicy::Basic), &low);
        assert!(after.is_accepted(), "{after}\n{low}");
        assert!(after.judgment().unwrap().same_as(before.judgment().unwrap()));
        assert_eq!(lower_eigenterms(&reg, &p, &low).unwrap(), low);
    }
}
