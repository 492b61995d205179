use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use super::relativize::{relativize, relativized_path};
use crate::kernel::{
    check_induction_instance, check_proof, is_axiom, open_labels, AxiomKind, EigentermPolicy, Label, Proof,
    ProofBuilder, Rule, TheoryConfig,
};
use crate::prlib::{pr_config, Fullness, PrError, PrExpr, PrRegistry};
use crate::syntax::{is_pr_term, Equation, Formula, Name, Program, Term, SUCC};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum IntrinsicError {
    #[error(transparent)]
    Pr(#[from] PrError),
    #[error("not-full: `{symbol}` lacks {count} defining equation(s)")]
    NotFull { symbol: Name, count: usize },
    #[error("not-pr-term: {0}")]
    NotPrTerm(Term),
    #[error("free-variable: {0} is not among the supplied variables")]
    FreeVariable(Name),
    #[error("not-accepted: the input proof is rejected under policy pr: {0}")]
    NotAccepted(String),
    #[error("wrong-shape: {0}")]
    Shape(String),
}

/// Label of the hypothesis `N(x)`.
pub fn nat_label(x: &str) -> Label {
    format!("_N_{x}").into()
}

/// Label of the `i`-th program closure (0-based) in `forall P`.
pub fn program_label(i: usize) -> Label {
    format!("_P{}", i + 1).into()
}

/// The assumption set `forall P`: one closure per program equation.
pub fn program_assumptions(p: &Program) -> Vec<(Label, Formula)> {
    p.equations().iter().enumerate().map(|(i, e)| (program_label(i), e.closure())).collect()
}

fn ensure_full(reg: &PrRegistry, p: &Program) -> Result<(), IntrinsicError> {
    match reg.is_full(p)? {
        Fullness::Full => Ok(()),
        Fullness::Missing { symbol, equations } => Err(IntrinsicError::NotFull { symbol, count: equations.len() }),
    }
}

/// Proof construction in the intrinsic theory with `forall P` as open assumptions.
pub(crate) struct Intr<'a> {
    reg: &'a PrRegistry,
    p: &'a Program,
    pub b: ProofBuilder,
    lemmas: HashMap<Name, usize>,
}

impl<'a> Intr<'a> {
    pub fn new(reg: &'a PrRegistry, p: &'a Program, mut b: ProofBuilder) -> Intr<'a> {
        for (l, f) in program_assumptions(p) {
            b.names.avoid(&l);
            b.names.avoid_formula(&f);
        }
        Intr { reg, p, b, lemmas: HashMap::new() }
    }

    fn nat_hyp(&mut self, x: &Name) -> usize {
        self.b.assume(&nat_label(x), Formula::nat(Term::Var(x.clone())))
    }

    /// Close `N(x) -> ...` and `forall x` over `xs`, innermost last.
    fn guard_all(&mut self, mut cur: usize, xs: &[Name]) -> usize {
        for x in xs.iter().rev() {
            cur = self.b.imp_i(cur, &nat_label(x), Formula::nat(Term::Var(x.clone())));
            cur = self.b.gen(cur, x);
        }
        cur
    }

    /// `eq` instantiated at `args` from its `forall P` assumption.
    fn equation_instance(&mut self, eq: &Equation, args: &[Term]) -> Result<usize, IntrinsicError> {
        let i = self
            .p
            .equations()
            .iter()
            .position(|e| e == eq)
            .ok_or_else(|| IntrinsicError::NotFull { symbol: eq.lhs.to_string().into(), count: 1 })?;
        let mut cur = self.b.assume(&program_label(i), eq.closure());
        for a in args {
            cur = self.b.all_e(cur, a);
        }
        Ok(cur)
    }

    /// From `N(rhs)` and `lhs = rhs` derive `N(lhs)`.
    fn nat_back(&mut self, n_rhs: usize, eq: usize) -> usize {
        let back = self.b.symm(eq);
        self.b.eqsub(n_rhs, back, [vec![0]].into_iter().collect())
    }

    /// `forall a1 (N(a1) -> ... -> N(g(a1, ..)))` with fresh bound names.
    fn lemma(&mut self, g: &Name) -> Result<usize, IntrinsicError> {
        if let Some(&i) = self.lemmas.get(g) {
            return Ok(i);
        }
        let def = self.reg.definition_for(self.p, g).ok_or_else(|| PrError::SymbolNotFound(g.clone()))?;
        let eqs = self.reg.equations_for_symbol(self.p, g)?;
        let vars: Vec<Name> = (0..def.arity).map(|_| self.b.fresh_var("a")).collect();
        let vt: Vec<Term> = vars.iter().cloned().map(Term::Var).collect();
        let head = |args: Vec<Term>| Term::App(g.clone(), args);
        let body = match &def.body {
            PrExpr::Rec(..) => {
                let (y, xs) = vt.split_last().expect("recursion has a recursion variable");
                let with = |t: Term| {
                    let mut a = xs.to_vec();
                    a.push(t);
                    head(a)
                };
                let inst0 = self.equation_instance(&eqs[0], xs)?;
                let Formula::Eq(_, base_rhs) = self.b.concl(inst0).clone() else { unreachable!() };
                let n_base = self.derive(&base_rhs, &HashMap::new())?;
                let n_f0 = self.nat_back(n_base, inst0);
                let nz = self.b.nzero();
                let base = self.b.and_i(nz, n_f0);

                let u = self.b.fresh_var("u");
                let ut = Term::Var(u.clone());
                let a_u = Formula::and(Formula::nat(ut.clone()), Formula::nat(with(ut.clone())));
                let kl = self.b.fresh_label("k");
                let k = self.b.assume(&kl, a_u.clone());
                let n_u = self.b.and_el(k);
                let n_fu = self.b.and_er(k);
                let mut step_args = xs.to_vec();
                step_args.push(ut.clone());
                let inst1 = self.equation_instance(&eqs[1], &step_args)?;
                let Formula::Eq(_, step_rhs) = self.b.concl(inst1).clone() else { unreachable!() };
                let known: HashMap<Term, usize> = [(ut.clone(), n_u), (with(ut.clone()), n_fu)].into_iter().collect();
                let n_step = self.derive(&step_rhs, &known)?;
                let n_fsu = self.nat_back(n_step, inst1);
                let n_su = self.b.nsucc(n_u);
                let both = self.b.and_i(n_su, n_fsu);
                let imp = self.b.imp_i(both, &kl, a_u);
                let step = self.b.gen(imp, &u);

                let y_name = y.as_var().expect("fresh variable").clone();
                let ny = self.nat_hyp(&y_name);
                let ind = self.b.nind(ny, base, step);
                self.b.and_er(ind)
            }
            _ => {
                let inst = self.equation_instance(&eqs[0], &vt)?;
                let Formula::Eq(_, rhs) = self.b.concl(inst).clone() else { unreachable!() };
                let n_rhs = self.derive(&rhs, &HashMap::new())?;
                self.nat_back(n_rhs, inst)
            }
        };
        let node = self.guard_all(body, &vars);
        self.lemmas.insert(g.clone(), node);
        Ok(node)
    }

    /// `N(t)` from `N` of its variables, `forall P` and the `known` facts.
    pub fn derive(&mut self, t: &Term, known: &HashMap<Term, usize>) -> Result<usize, IntrinsicError> {
        if let Some(&i) = known.get(t) {
            return Ok(i);
        }
        match t {
            Term::Var(x) => Ok(self.nat_hyp(x)),
            Term::App(f, args) if args.is_empty() && &**f == crate::syntax::ZERO => Ok(self.b.nzero()),
            Term::App(f, args) if &**f == SUCC => {
                let n = self.derive(&args[0], known)?;
                Ok(self.b.nsucc(n))
            }
            Term::App(g, args) => {
                let mut cur = self.lemma(g)?;
                for a in args {
                    cur = self.b.all_e(cur, a);
                    let na = self.derive(a, known)?;
                    cur = self.b.imp_e(cur, na);
                }
                Ok(cur)
            }
        }
    }

    /// From a node proving a closure `forall xs B`, `B` quantifier free,
    /// derive its relativization.
    fn guard_closure(&mut self, node: usize) -> usize {
        let mut xs = Vec::new();
        let mut cur = node;
        while let Formula::Forall(x, _) = self.b.concl(cur).clone() {
            cur = self.b.all_e(cur, &Term::Var(x.clone()));
            xs.push(x);
        }
        self.guard_all(cur, &xs)
    }

    /// `B^N[0] -> forall x (N(x) -> B^N[x] -> B^N[S(x)]) -> forall x (N(x) -> B^N[x])`.
    pub fn relativized_induction(&mut self, b: &Formula, x: &Name) -> usize {
        let bn = relativize(b);
        let at = |t: &Term| bn.substitute(x, t).expect("numerals and variables are free for x");
        let xt = Term::Var(x.clone());
        let h0_f = at(&Term::zero());
        let hs_f = Formula::forall(
            x,
            Formula::imp(Formula::nat(xt.clone()), Formula::imp(bn.clone(), at(&Term::succ(xt.clone())))),
        );
        let h0l = self.b.fresh_label("base");
        let hsl = self.b.fresh_label("step");
        let h0 = self.b.assume(&h0l, h0_f.clone());
        let hs = self.b.assume(&hsl, hs_f.clone());

        let u = self.b.fresh_var("u");
        let ut = Term::Var(u.clone());
        let a = |t: &Term| Formula::and(Formula::nat(t.clone()), at(t));
        let nz = self.b.nzero();
        let base = self.b.and_i(nz, h0);
        let kl = self.b.fresh_label("k");
        let k = self.b.assume(&kl, a(&ut));
        let nu = self.b.and_el(k);
        let bu = self.b.and_er(k);
        let s1 = self.b.all_e(hs, &ut);
        let s2 = self.b.imp_e(s1, nu);
        let bsu = self.b.imp_e(s2, bu);
        let nsu = self.b.nsucc(nu);
        let both = self.b.and_i(nsu, bsu);
        let imp = self.b.imp_i(both, &kl, a(&ut));
        let step = self.b.gen(imp, &u);

        let v = self.b.fresh_var("y");
        let vl = nat_label(&v);
        let nv = self.b.assume(&vl, Formula::nat(Term::Var(v.clone())));
        let ind = self.b.nind(nv, base, step);
        let bv = self.b.and_er(ind);
        let imp = self.b.imp_i(bv, &vl, Formula::nat(Term::Var(v.clone())));
        let all = self.b.all_i(imp, &v, x);
        let i1 = self.b.imp_i(all, &hsl, hs_f);
        self.b.imp_i(i1, &h0l, h0_f)
    }

    /// Add unused assumptions to the root so the judgment lists them.
    fn pad(&mut self, root: usize, wanted: &[(Label, Formula)]) -> usize {
        let open = open_labels(&self.b.finish(root));
        let mut cur = root;
        for (l, f) in wanted {
            if !open.contains(l) {
                let a = self.b.assume(l, f.clone());
                let both = self.b.and_i(cur, a);
                cur = self.b.and_el(both);
            }
        }
        cur
    }

    /// Discharge `N(z)` for variables outside `vars` by instantiating them at 0.
    fn ground(&mut self, root: usize, vars: &[Name]) -> usize {
        let open = open_labels(&self.b.finish(root));
        let mut cur = root;
        let keep: BTreeSet<Label> = vars.iter().map(|v| nat_label(v)).collect();
        for l in open {
            let Some(z) = l.strip_prefix("_N_") else { continue };
            if keep.contains(&l) {
                continue;
            }
            let z: Name = z.into();
            let i = self.b.imp_i(cur, &l, Formula::nat(Term::Var(z.clone())));
            let g = self.b.gen(i, &z);
            let e = self.b.all_e(g, &Term::zero());
            let nz = self.b.nzero();
            cur = self.b.imp_e(e, nz);
        }
        cur
    }

    fn finish_judgment(&mut self, root: usize, vars: &[Name]) -> Proof {
        let root = self.ground(root, vars);
        let mut wanted: Vec<(Label, Formula)> =
            vars.iter().map(|v| (nat_label(v), Formula::nat(Term::Var(v.clone())))).collect();
        wanted.extend(program_assumptions(self.p));
        let root = self.pad(root, &wanted);
        self.b.finish(root)
    }
}

/// An intrinsic proof of `N(vars), forall P => N(t)`.
pub fn derive_n_of_term(reg: &PrRegistry, p: &Program, t: &Term, vars: &[Name]) -> Result<Proof, IntrinsicError> {
    ensure_full(reg, p)?;
    if !is_pr_term(t, &reg.language_for(p)) {
        return Err(IntrinsicError::NotPrTerm(t.clone()));
    }
    if let Some(v) = t.free_vars().into_iter().find(|v| !vars.contains(v)) {
        return Err(IntrinsicError::FreeVariable(v));
    }
    let mut b = ProofBuilder::new();
    b.names.avoid_term(t);
    vars.iter().for_each(|v| b.names.avoid(v));
    let mut it = Intr::new(reg, p, b);
    let root = it.derive(t, &HashMap::new())?;
    Ok(it.finish_judgment(root, vars))
}

/// The closed intrinsic proof of the relativized induction axiom for `b` over `x`.
pub fn relativized_induction_proof(b: &Formula, x: &str) -> Proof {
    let reg = PrRegistry::parse("").expect("empty registry");
    let p = Program::default();
    let mut pb = ProofBuilder::new();
    pb.names.avoid_formula(b);
    let mut it = Intr::new(&reg, &p, pb);
    let root = it.relativized_induction(b, &x.into());
    it.b.finish(root)
}

/// Translate a proof with primitive recursive eigenterms in `A(P)` into the
/// intrinsic theory: the result proves `N(vars), Gamma^N, forall P => A^N`.
pub fn translate_pr_proof(reg: &PrRegistry, p: &Program, pf: &Proof, vars: &[Name]) -> Result<Proof, IntrinsicError> {
    ensure_full(reg, p)?;
    let cfg = pr_config(reg, p, EigentermPolicy::PrimitiveRecursive);
    let verdict = check_proof(&cfg, pf);
    let judgment = verdict.judgment().ok_or_else(|| IntrinsicError::NotAccepted(verdict.to_string()))?;
    let mut fv = judgment.conclusion.free_vars();
    for a in &judgment.assumptions {
        fv.extend(a.free_vars());
    }
    if let Some(v) = fv.into_iter().find(|v| !vars.contains(v)) {
        return Err(IntrinsicError::FreeVariable(v));
    }

    let mut b = ProofBuilder::new();
    for n in &pf.nodes {
        b.names.avoid_formula(&n.conclusion);
    }
    for name in pf.names() {
        b.names.avoid(&name);
    }
    vars.iter().for_each(|v| b.names.avoid(v));
    let mut it = Intr::new(reg, p, b);
    let mut map: Vec<usize> = Vec::with_capacity(pf.nodes.len());
    for n in &pf.nodes {
        let ps: Vec<usize> = n.premises.iter().map(|&i| map[i]).collect();
        let c = &n.conclusion;
        let cn = relativize(c);
        let idx = match &n.rule {
            Rule::Assume(l) => it.b.assume(l, cn),
            Rule::Axiom => match is_axiom(&cfg, c) {
                Some(AxiomKind::Program) | Some(AxiomKind::Separation) => {
                    let src = match p.equations().iter().position(|e| c.alpha_eq(&e.closure())) {
                        Some(i) => it.b.assume(&program_label(i), p.equations()[i].closure()),
                        None => it.b.axiom(c.clone()),
                    };
                    it.guard_closure(src)
                }
                Some(AxiomKind::Induction) => {
                    let (a, x) = check_induction_instance(c).expect("classified as induction");
                    it.relativized_induction(&a, &x)
                }
                None => return Err(IntrinsicError::NotAccepted(format!("{} is not an axiom", n.id))),
            },
            Rule::Refl | Rule::ImpE | Rule::AndI | Rule::AndEl | Rule::AndEr | Rule::OrIl | Rule::OrIr => {
                it.b.node(n.rule.clone(), ps, cn)
            }
            Rule::OrE(..) | Rule::BotE | Rule::Dne | Rule::ImpI(_) => it.b.node(n.rule.clone(), ps, cn),
            Rule::EqSub(paths) => {
                let orig = &pf.nodes[n.premises[0]].conclusion;
                let mapped = paths.iter().map(|q| relativized_path(orig, q)).collect();
                it.b.node(Rule::EqSub(mapped), ps, cn)
            }
            Rule::AllI(y) => {
                let imp = it.b.imp_i(ps[0], &nat_label(y), Formula::nat(Term::Var(y.clone())));
                it.b.node(Rule::AllI(y.clone()), vec![imp], cn)
            }
            Rule::AllE(t) => {
                let inst = it.b.all_e(ps[0], t);
                let nt = it.derive(t, &HashMap::new())?;
                it.b.imp_e(inst, nt)
            }
            Rule::ExI(t) => {
                let nt = it.derive(t, &HashMap::new())?;
                let both = it.b.and_i(nt, ps[0]);
                it.b.node(Rule::ExI(t.clone()), vec![both], cn)
            }
            Rule::ExE(y, l) => {
                let Formula::Exists(x, body) = it.b.concl(ps[0]).clone() else {
                    return Err(IntrinsicError::Shape(format!("exE major premise at {} is not existential", n.id)));
                };
                let k_f = body.substitute(&x, &Term::Var(y.clone())).map_err(|e| IntrinsicError::Shape(e.to_string()))?;
                let Formula::And(ny_f, by_f) = k_f.clone() else { unreachable!("relativized existential") };
                let i1 = it.b.imp_i(ps[1], l, *by_f);
                let i2 = it.b.imp_i(i1, &nat_label(y), *ny_f);
                let kl = it.b.fresh_label("k");
                let k = it.b.assume(&kl, k_f);
                let left = it.b.and_el(k);
                let right = it.b.and_er(k);
                let e1 = it.b.imp_e(i2, left);
                let e2 = it.b.imp_e(e1, right);
                it.b.ex_e(ps[0], e2, y, &kl)
            }
            Rule::NZero | Rule::NSucc | Rule::NInd => {
                return Err(IntrinsicError::NotAccepted(format!("{} uses an intrinsic rule", n.id)))
            }
        };
        map.push(idx);
    }
    let root = *map.last().ok_or_else(|| IntrinsicError::Shape("empty proof".into()))?;
    Ok(it.finish_judgment(root, vars))
}

/// From `forall xs (N(xs) -> exists y (N(y) & f(xs) = y))` derive
/// `forall xs (N(xs) -> N(f(xs)))`.
pub fn totality_to_n(pf: &Proof, f: &str) -> Result<Proof, IntrinsicError> {
    let concl = pf.conclusion().ok_or_else(|| IntrinsicError::Shape("empty proof".into()))?;
    let mut xs: Vec<Name> = Vec::new();
    let mut cur = concl;
    loop {
        match cur {
            Formula::Forall(x, b) => match &**b {
                Formula::Imp(g, rest) if **g == Formula::nat(Term::Var(x.clone())) && !xs.contains(x) => {
                    xs.push(x.clone());
                    cur = rest;
                }
                _ => return Err(IntrinsicError::Shape(format!("unguarded quantifier in {concl}"))),
            },
            Formula::Exists(y, b) => {
                let yt = Term::Var(y.clone());
                let want = Term::App(f.into(), xs.iter().cloned().map(Term::Var).collect());
                match &**b {
                    Formula::And(g, e) if **g == Formula::nat(yt.clone()) && **e == Formula::eq(want, yt) => break,
                    _ => return Err(IntrinsicError::Shape(format!("expected N({y}) & {f}(..) = {y} in {concl}"))),
                }
            }
            _ => return Err(IntrinsicError::Shape(format!("{concl} is not a relativized totality statement"))),
        }
    }
    if xs.iter().any(|x| !matches!(cur, Formula::Exists(y, _) if y != x)) {
        return Err(IntrinsicError::Shape("witness variable clashes with an argument".into()));
    }

    let mut b = ProofBuilder::new();
    let root = b.import(pf);
    let hyp_labels: Vec<Vec<Label>> = xs
        .iter()
        .map(|x| {
            let nx = Formula::nat(Term::Var(x.clone()));
            let mut ls: Vec<Label> = pf
                .nodes
                .iter()
                .filter_map(|n| match &n.rule {
                    Rule::Assume(l) if n.conclusion == nx => Some(l.clone()),
                    _ => None,
                })
                .collect();
            ls.sort();
            ls.dedup();
            if ls.is_empty() {
                ls.push(nat_label(x));
            }
            ls
        })
        .collect();
    let mut cur = root;
    for (x, ls) in xs.iter().zip(&hyp_labels) {
        cur = b.all_e(cur, &Term::Var(x.clone()));
        let h = b.assume(&ls[0], Formula::nat(Term::Var(x.clone())));
        cur = b.imp_e(cur, h);
    }
    let Formula::Exists(y, body) = b.concl(cur).clone() else { unreachable!() };
    let v = b.fresh_var("v");
    let kl = b.fresh_label("k");
    let k_f = body.substitute(&y, &Term::Var(v.clone())).map_err(|e| IntrinsicError::Shape(e.to_string()))?;
    let k = b.assume(&kl, k_f);
    let nv = b.and_el(k);
    let eq = b.and_er(k);
    let back = b.symm(eq);
    let nf = b.eqsub(nv, back, [vec![0]].into_iter().collect());
    let mut out = b.ex_e(cur, nf, &v, &kl);
    for (x, ls) in xs.iter().zip(&hyp_labels).rev() {
        let nx = Formula::nat(Term::Var(x.clone()));
        for l in ls {
            out = b.imp_i(out, l, nx.clone());
        }
        out = b.gen(out, x);
    }
    Ok(b.finish(out))
}

/// The intermediate proofs of the totality pipeline for one definition.
#[derive(Clone, Debug)]
pub struct PipelineRun {
    pub program: Program,
    pub vars: Vec<Name>,
    pub totality: Proof,
    pub translated: Proof,
    pub n_closure: Proof,
}

/// Basic totality proof, its intrinsic translation, and the `N`-closure of `d`.
pub fn pipeline(reg: &PrRegistry, d: &str) -> Result<PipelineRun, IntrinsicError> {
    let program = reg.minimal_program(d)?;
    let vars = reg.lhs_vars(d)?;
    let totality = crate::prlib::gen_totality_proof(reg, d)?;
    let translated = translate_pr_proof(reg, &program, &totality, &vars)?;
    let n_closure = totality_to_n(&translated, d)?;
    Ok(PipelineRun { program, vars, totality, translated, n_closure })
}

/// The intrinsic configuration for `P`.
pub fn intrinsic_config(p: &Program) -> TheoryConfig {
    TheoryConfig::intrinsic(p.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intrinsic::is_relativized;
    use crate::kernel::{Judgment, ProofBuilder};
    use crate::syntax::{parse_formula, parse_term};

    fn judgment_of(p: &Program, pf: &Proof) -> Judgment {
        let v = check_proof(&intrinsic_config(p), pf);
        v.judgment().cloned().unwrap_or_else(|| panic!("{v}\n{pf}"))
    }

    fn expected(p: &Program, vars: &[&str], gamma: &[Formula], a: Formula) -> Judgment {
        let mut hs: Vec<Formula> = vars.iter().map(|v| Formula::nat(Term::var(v))).collect();
        hs.extend(gamma.iter().cloned());
        hs.extend(program_assumptions(p).into_iter().map(|(_, f)| f));
        Judgment::new(hs, a)
    }

    #[test]
    fn n_of_terms() {
        let reg = PrRegistry::catalog();
        let p = reg.program_for(&["add".into(), "mul".into()]).unwrap();
        for (s, vars) in [("0", vec![]), ("S(S(x))", vec!["x"]), ("add(x, y)", vec!["x", "y"]), ("mul(add(x, y), S(y))", vec!["x", "y", "z"])] {
            let t = parse_term(s).unwrap();
            let vs: Vec<Name> = vars.iter().map(|v| Name::from(*v)).collect();
            let pf = derive_n_of_term(&reg, &p, &t, &vs).unwrap();
            let j = judgment_of(&p, &pf);
            assert!(j.same_as(&expected(&p, &vars, &[], Formula::nat(t))), "{s}: {j}");
        }
        let zero = derive_n_of_term(&reg, &Program::default(), &Term::zero(), &[]).unwrap();
        assert_eq!(zero.len(), 1);
        assert!(matches!(
            derive_n_of_term(&reg, &p, &parse_term("add(x, y)").unwrap(), &["x".into()]),
            Err(IntrinsicError::FreeVariable(_))
        ));
    }

    #[test]
    fn relativized_induction() {
        let p = Program::default();
        for (b, x) in [("x = x", "x"), ("exists z add(y, z) = S(z)", "y")] {
            let b = parse_formula(b).unwrap();
            let pf = relativized_induction_proof(&b, x);
            let prog = if b.to_string().contains("add") {
                PrRegistry::catalog().minimal_program("add").unwrap()
            } else {
                p.clone()
            };
            let v = check_proof(&intrinsic_config(&prog), &pf);
            assert!(v.is_accepted(), "{v}\n{pf}");
            let j = v.judgment().unwrap();
            assert!(j.assumptions.is_empty());
            let want = relativize(&crate::kernel::induction_instance(&b, x).unwrap());
            assert!(j.conclusion.alpha_eq(&want), "{}", j.conclusion);
            assert!(is_relativized(&j.conclusion));
        }
    }

    #[test]
    fn atom_from_program_axiom() {
        let reg = PrRegistry::catalog();
        let p = reg.minimal_program("add").unwrap();
        let mut b = ProofBuilder::new();
        let ax = b.axiom(parse_formula("forall x add(x, 0) = x").unwrap());
        let inst = b.all_e(ax, &Term::var("x"));
        let pf = b.finish(inst);
        let out = translate_pr_proof(&reg, &p, &pf, &["x".into()]).unwrap();
        let j = judgment_of(&p, &out);
        assert!(j.same_as(&expected(&p, &["x"], &[], parse_formula("add(x, 0) = x").unwrap())), "{j}");
    }

    #[test]
    fn catalog_pipeline() {
        let reg = PrRegistry::catalog();
        for d in reg.user_definitions() {
            let run = pipeline(&reg, &d.name).unwrap();
            let j = judgment_of(&run.program, &run.translated);
            let vs: Vec<&str> = run.vars.iter().map(|v| &**v).collect();
            let want = relativize(run.totality.conclusion().unwrap());
            assert!(j.same_as(&expected(&run.program, &vs, &[], want)), "{}: {j}", d.name);
            let j2 = judgment_of(&run.program, &run.n_closure);
            let fx = Term::App(d.name.clone(), run.vars.iter().cloned().map(Term::Var).collect());
            let want2 = relativize(&Formula::forall_many(&run.vars, Formula::nat(fx)));
            assert!(j2.conclusion.alpha_eq(&want2), "{}: {}", d.name, j2.conclusion);
        }
    }

    #[test]
    fn eigenterm_with_successor() {
        let reg = PrRegistry::catalog();
        let p = reg.minimal_program("add").unwrap();
        let mut b = ProofBuilder::new();
        let r = b.refl(&parse_term("S(x)").unwrap());
        let e = b.ex_i(r, &"y".into(), parse_formula("S(x) = y").unwrap(), &parse_term("S(x)").unwrap());
        let pf = b.finish(e);
        let out = translate_pr_proof(&reg, &p, &pf, &["x".into()]).unwrap();
        assert!(out.nodes.iter().any(|n| n.rule == Rule::NSucc));
        let j = judgment_of(&p, &out);
        assert!(j.same_as(&expected(&p, &["x"], &[], parse_formula("exists y (N(y) & S(x) = y)").unwrap())));
    }

    #[test]
    fn wrong_shape() {
        let reg = PrRegistry::catalog();
        let pf = crate::prlib::gen_totality_proof(&reg, "add").unwrap();
        assert!(matches!(totality_to_n(&pf, "add"), Err(IntrinsicError::Shape(_))));
    }

    #[test]
    fn nullary_totality() {
        let reg = PrRegistry::catalog();
        let run = pipeline(&reg, "z").unwrap();
        let j = judgment_of(&run.program, &run.n_closure);
        assert_eq!(j.conclusion, parse_formula("N(z())").unwrap());
    }
}
