//! The shipped corpus: every file re-parses, proofs carry the expected
//! verdicts, and generated files match their generators. Run with
//! `PROVREC_BLESS=1` to rewrite the generated files.

use std::fs;
use std::path::PathBuf;

use provrec::kernel::{
    check_proof, induction_instance, parse_proof, separation_succ, separation_zero, EigentermPolicy, Proof,
    ProofBuilder, TheoryConfig,
};
use provrec::prlib::{gen_totality_proof, lower_eigenterms, pr_config, PrRegistry};
use provrec::syntax::{is_basic, parse_formula, parse_program, parse_term, Formula, Name, Program, Term};

fn corpus(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus").join(name)
}

/// Compare `text` with the file, or write it when blessing.
fn fixture(name: &str, text: &str) {
    let path = corpus(name);
    if std::env::var_os("PROVREC_BLESS").is_some() {
        fs::create_dir_all(path.parent().unwrap()).unwrap();
        fs::write(&path, text).unwrap();
    }
    let on_disk = fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing {name}; run with PROVREC_BLESS=1"));
    assert_eq!(on_disk, text, "{name} is out of date; run with PROVREC_BLESS=1");
}

fn program(name: &str) -> Program {
    parse_program(&fs::read_to_string(corpus(name)).unwrap()).unwrap()
}

fn proof(name: &str) -> Proof {
    parse_proof(&fs::read_to_string(corpus(name)).unwrap()).unwrap()
}

const LOWERING_SYMBOLS: [&str; 7] = ["add", "mul", "pred", "monus", "sign", "sadd", "double"];

fn arith_program(reg: &PrRegistry) -> Program {
    let names: Vec<Name> = LOWERING_SYMBOLS.iter().map(|s| Name::from(*s)).collect();
    reg.program_for(&names).unwrap()
}

fn trivial_proof() -> Proof {
    let mut b = ProofBuilder::new();
    let t = parse_term("f(x)").unwrap();
    let r = b.refl(&t);
    let e = b.ex_i(r, &"y".into(), parse_formula("f(x) = y").unwrap(), &t);
    let root = b.gen(e, &"x".into());
    b.finish(root)
}

/// `false` from the two program equations, the separation axioms and induction.
fn inconsistency_proof() -> Proof {
    let mut b = ProofBuilder::new();
    let x = Term::var("x");
    let sx = Term::succ(x.clone());
    let a = Formula::not(Formula::eq(x.clone(), sx.clone()));
    let ind = b.axiom(induction_instance(&a, "x").unwrap());

    let h: Name = "H".into();
    let hyp = b.assume(&h, parse_formula("0 = S(0)").unwrap());
    let flipped = b.symm(hyp);
    let sz = b.axiom(separation_zero());
    let sz0 = b.all_e(sz, &Term::zero());
    let bot = b.imp_e(sz0, flipped);
    let base = b.imp_i(bot, &h, parse_formula("0 = S(0)").unwrap());

    let (ih, k): (Name, Name) = ("IH".into(), "K".into());
    let ihn = b.assume(&ih, a.clone());
    let kf = Formula::eq(sx.clone(), Term::succ(sx.clone()));
    let kn = b.assume(&k, kf.clone());
    let ss = b.axiom(separation_succ());
    let ss = b.all_e(ss, &x);
    let ss = b.all_e(ss, &sx);
    let eq = b.imp_e(ss, kn);
    let bot = b.imp_e(ihn, eq);
    let step = b.imp_i(bot, &k, kf);
    let step = b.imp_i(step, &ih, a);
    let step = b.gen(step, &"x".into());
    let r = b.imp_e(ind, base);
    let all = b.imp_e(r, step);

    let g0 = parse_term("g(0)").unwrap();
    let neq = b.all_e(all, &g0);
    let ax1 = b.axiom(parse_formula("forall x f(x) = g(0)").unwrap());
    let fg = b.all_e(ax1, &g0);
    let ax2 = b.axiom(parse_formula("f(g(0)) = S(g(0))").unwrap());
    let back = b.symm(fg);
    let loop_eq = b.trans(back, ax2);
    let root = b.imp_e(neq, loop_eq);
    b.finish(root)
}

fn toy_g_proof() -> Proof {
    let mut b = ProofBuilder::new();
    let x = Term::var("x");
    let a = parse_formula("g(x, S(x)) = 0").unwrap();
    let ind = b.axiom(induction_instance(&a, "x").unwrap());
    let e01 = b.axiom(parse_formula("forall y g(0, S(y)) = d(y)").unwrap());
    let e01 = b.all_e(e01, &Term::zero());
    let d0 = b.axiom(parse_formula("d(0) = 0").unwrap());
    let base = b.trans(e01, d0);
    let ih = b.assume(&"IH".into(), a.clone());
    let ess = b.axiom(parse_formula("forall x forall y g(S(x), S(y)) = g(x, y)").unwrap());
    let ess = b.all_e(ess, &x);
    let ess = b.all_e(ess, &Term::succ(x.clone()));
    let step = b.trans(ess, ih);
    let step = b.imp_i(step, &"IH".into(), a);
    let step = b.gen(step, &"x".into());
    let r = b.imp_e(ind, base);
    let all = b.imp_e(r, step);
    let inst = b.all_e(all, &x);
    let ex = b.ex_i(inst, &"y".into(), parse_formula("g(x, y) = 0").unwrap(), &Term::succ(x));
    let root = b.gen(ex, &"x".into());
    b.finish(root)
}

fn toy_h_proof() -> Proof {
    let mut b = ProofBuilder::new();
    let ax = b.axiom(parse_formula("forall x h(x) = x").unwrap());
    let inst = b.all_e(ax, &Term::var("y"));
    let ex = b.ex_i(inst, &"z".into(), parse_formula("h(y) = z").unwrap(), &Term::var("y"));
    let root = b.gen(ex, &"y".into());
    b.finish(root)
}

/// `exists w t = w` by reflexivity, then generalized over `vars`.
fn witness_proof(t: &str, vars: &[&str]) -> Proof {
    let mut b = ProofBuilder::new();
    let t = parse_term(t).unwrap();
    let r = b.refl(&t);
    let mut cur = b.ex_i(r, &"w".into(), Formula::eq(t.clone(), Term::var("w")), &t);
    for v in vars.iter().rev() {
        cur = b.gen(cur, &(*v).into());
    }
    b.finish(cur)
}

/// Proofs whose quantifier rules use non-basic primitive recursive eigenterms.
fn lowering_proofs(reg: &PrRegistry) -> Vec<(&'static str, Proof)> {
    let mut out = Vec::new();

    let mut b = ProofBuilder::new();
    let tot = b.import(&gen_totality_proof(reg, "add").unwrap());
    let e1 = b.all_e(tot, &parse_term("add(x, x)").unwrap());
    let e2 = b.all_e(e1, &Term::zero());
    let root = b.gen(e2, &"x".into());
    out.push(("lower_add_self.ndp", b.finish(root)));

    out.push(("lower_witness.ndp", witness_proof("add(x, S(0))", &["x"])));

    let mut b = ProofBuilder::new();
    let ax = b.axiom(parse_formula("forall x add(x, 0) = x").unwrap());
    let inst = b.all_e(ax, &parse_term("mul(x, y)").unwrap());
    out.push(("lower_axiom_instance.ndp", b.finish(inst)));

    out.push(("lower_nested.ndp", witness_proof("mul(S(x), pred(x))", &["x"])));

    let mut b = ProofBuilder::new();
    let tot = b.import(&gen_totality_proof(reg, "add").unwrap());
    let e1 = b.all_e(tot, &parse_term("monus(S(x), x)").unwrap());
    let e2 = b.all_e(e1, &parse_term("sign(x)").unwrap());
    let root = b.gen(e2, &"x".into());
    out.push(("lower_two_terms.ndp", b.finish(root)));

    let mut b = ProofBuilder::new();
    let t = parse_term("sadd(pred(x), double(x))").unwrap();
    let r = b.refl(&t);
    let body = Formula::eq(parse_term("sadd(u, double(x))").unwrap(), t.clone());
    let e1 = b.ex_i(r, &"u".into(), body, &parse_term("pred(x)").unwrap());
    let root = b.gen(e1, &"x".into());
    out.push(("lower_composition.ndp", b.finish(root)));

    out
}

#[test]
fn generated_files_are_current() {
    let reg = PrRegistry::catalog();
    fixture("trivial.ndp", &trivial_proof().to_string());
    fixture("inconsistency.ndp", &inconsistency_proof().to_string());
    fixture("toy_g.ndp", &toy_g_proof().to_string());
    fixture("toy_h.ndp", &toy_h_proof().to_string());
    fixture("add.hg", &reg.minimal_program("add").unwrap().to_string());
    fixture("arith.hg", &arith_program(&reg).to_string());
    for (name, pf) in lowering_proofs(&reg) {
        fixture(&format!("lowering/{name}"), &pf.to_string());
    }
}

#[test]
fn trivial_proof_discriminates() {
    let p = program("trivial.hg");
    let pf = proof("trivial.ndp");
    assert!(check_proof(&TheoryConfig::arithmetic(p.clone(), EigentermPolicy::Unrestricted), &pf).is_accepted());
    assert!(!check_proof(&TheoryConfig::arithmetic(p, EigentermPolicy::Basic), &pf).is_accepted());
}

#[test]
fn inconsistency_needs_a_non_basic_instance() {
    let p = program("inconsistent.hg");
    let pf = proof("inconsistency.ndp");
    let v = check_proof(&TheoryConfig::arithmetic(p.clone(), EigentermPolicy::Unrestricted), &pf);
    assert_eq!(v.judgment().map(|j| (j.assumptions.len(), j.conclusion.clone())), Some((0, Formula::False)));
    assert!(!check_proof(&TheoryConfig::arithmetic(p, EigentermPolicy::Basic), &pf).is_accepted());
}

#[test]
fn lowering_corpus() {
    let reg = PrRegistry::catalog();
    let p = program("arith.hg");
    let mut files: Vec<_> = fs::read_dir(corpus("lowering")).unwrap().map(|e| e.unwrap().path()).collect();
    files.sort();
    assert!(files.len() >= 5);
    for f in files {
        let pf = parse_proof(&fs::read_to_string(&f).unwrap()).unwrap();
        assert!(pf.nodes.iter().any(|n| n.rule.eigenterm().is_some_and(|t| !is_basic(t))), "{}", f.display());
        let before = check_proof(&pr_config(&reg, &p, EigentermPolicy::PrimitiveRecursive), &pf);
        assert!(before.is_accepted(), "{}: {before}", f.display());
        assert!(!check_proof(&pr_config(&reg, &p, EigentermPolicy::Basic), &pf).is_accepted());
        let low = lower_eigenterms(&reg, &p, &pf).unwrap();
        let after = check_proof(&pr_config(&reg, &p, EigentermPolicy::Basic), &low);
        assert!(after.is_accepted(), "{}: {after}", f.display());
        assert!(after.judgment().unwrap().same_as(before.judgment().unwrap()));
    }
}

#[test]
fn every_file_round_trips() {
    let mut stack = vec![corpus("")];
    while let Some(dir) = stack.pop() {
        for e in fs::read_dir(dir).unwrap() {
            let path = e.unwrap().path();
            if path.is_dir() {
                stack.push(path);
                continue;
            }
            let text = fs::read_to_string(&path).unwrap();
            match path.extension().and_then(|e| e.to_str()) {
                Some("ndp") => {
                    let pf = parse_proof(&text).unwrap();
                    assert_eq!(parse_proof(&pf.to_string()).unwrap(), pf, "{}", path.display());
                }
                Some("hg") => {
                    let p = parse_program(&text).unwrap();
                    assert_eq!(parse_program(&p.to_string()).unwrap(), p, "{}", path.display());
                }
                Some("pr") => {
                    let r = PrRegistry::parse(&text).unwrap();
                    assert_eq!(PrRegistry::parse(&r.to_string()).unwrap(), r);
                }
                _ => {}
            }
        }
    }
}
