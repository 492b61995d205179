//! Natural deduction checker for A(P) and for the intrinsic theory, with
//! eigenterm policies on universal elimination and existential introduction.

mod check;
mod proof;
mod script;

pub use check::{
    check_induction_instance, check_proof, check_report, induction_instance, is_axiom, separation_succ,
    separation_zero, AxiomKind, CheckReport, EigentermPolicy, Judgment, Mode, Reason, TheoryConfig, Verdict,
};
pub use proof::{open_labels, replaceable_occurrences, Label, Node, Proof, ProofBuilder, Rule};
pub use script::parse_proof;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_formula, parse_program, parse_term, Formula, Program, Term};

    fn arith(p: &str, policy: EigentermPolicy) -> TheoryConfig {
        TheoryConfig::arithmetic(parse_program(p).unwrap(), policy)
    }

    const TRIVIAL: &str = "\
n1: refl |- f(x) = f(x)
n2: exI n1 [term f(x)] |- exists y f(x) = y
n3: allI n2 [var x] |- forall x exists y f(x) = y
";

    #[test]
    fn trivial_totality_discriminates_policies() {
        let pf = parse_proof(TRIVIAL).unwrap();
        let v = check_proof(&arith("f(0) = 0.", EigentermPolicy::Unrestricted), &pf);
        let j = v.judgment().expect("accepted");
        assert!(j.assumptions.is_empty());
        assert_eq!(j.conclusion, parse_formula("forall x exists y f(x) = y").unwrap());
        let v = check_proof(&arith("f(0) = 0.", EigentermPolicy::Basic), &pf);
        assert_eq!(
            v,
            Verdict::Rejected {
                node: "n2".into(),
                reason: Reason::EigentermPolicyViolation(parse_term("f(x)").unwrap())
            }
        );
    }

    #[test]
    fn reflexivity_leaf() {
        let pf = parse_proof("r: refl |- 0 = 0").unwrap();
        let v = check_proof(&TheoryConfig::arithmetic(Program::default(), EigentermPolicy::Basic), &pf);
        assert!(v.judgment().unwrap().assumptions.is_empty());
    }

    #[test]
    fn axiom_kinds() {
        let cfg = arith("add(x, 0) = x.\nadd(x, S(y)) = S(add(x, y)).", EigentermPolicy::Basic);
        let f = |s: &str| parse_formula(s).unwrap();
        assert_eq!(is_axiom(&cfg, &f("forall u add(u, 0) = u")), Some(AxiomKind::Program));
        assert_eq!(is_axiom(&cfg, &f("forall x ~S(x) = 0")), Some(AxiomKind::Separation));
        assert_eq!(is_axiom(&cfg, &f("forall x forall y (S(x) = S(y) -> x = y)")), Some(AxiomKind::Separation));
        assert_eq!(is_axiom(&cfg, &f("f(0) = 0")), None);
        assert_eq!(is_axiom(&cfg, &f("0 = 0 -> (forall x (x = x -> S(x) = S(x))) -> forall x x = x")), Some(AxiomKind::Induction));
    }

    #[test]
    fn induction_instances() {
        let f = |s: &str| parse_formula(s).unwrap();
        let (a, x) = check_induction_instance(&f("0 = 0 -> (forall x (x = x -> S(x) = S(x))) -> forall x x = x")).unwrap();
        assert_eq!((a, &*x), (f("x = x"), "x"));
        let body = f("exists y add(x, y) = y");
        let inst = induction_instance(&body, "x").unwrap();
        let (a, x) = check_induction_instance(&inst).unwrap();
        assert!(a.alpha_eq(&body));
        assert_eq!(&*x, "x");
        assert!(check_induction_instance(&f("0 = 0 -> 0 = 0 -> forall x x = x")).is_none());
        assert!(check_induction_instance(&f("0 = 0 -> (forall x (x = x -> S(x) = x)) -> forall x x = x")).is_none());
    }

    #[test]
    fn intrinsic_rules() {
        let cfg = TheoryConfig::intrinsic(Program::default());
        let pf = parse_proof("z: nzero |- N(0)").unwrap();
        assert!(check_proof(&cfg, &pf).is_accepted());
        let pf = parse_proof("a: assume H |- N(x)\ns: nsucc a |- N(S(x))").unwrap();
        let v = check_proof(&cfg, &pf);
        assert_eq!(v.judgment().unwrap().assumptions, vec![Formula::nat(Term::var("x"))]);
        let pf = parse_proof(
            "a: assume H |- N(y)\n\
             b: refl |- 0 = 0\n\
             r: refl |- S(x) = S(x)\n\
             i: impI r [discharge K] |- x = x -> S(x) = S(x)\n\
             s: allI i [var x] |- forall x (x = x -> S(x) = S(x))\n\
             c: nind a b s |- y = y",
        )
        .unwrap();
        assert!(check_proof(&cfg, &pf).is_accepted());
        let arith = TheoryConfig::arithmetic(Program::default(), EigentermPolicy::Unrestricted);
        assert_eq!(check_proof(&arith, &parse_proof("z: nzero |- N(0)").unwrap()).reason(), Some(&Reason::IntrinsicRuleInArithmetic));
    }

    #[test]
    fn eigenvariable_conditions() {
        let cfg = arith("f(0) = 0.", EigentermPolicy::Unrestricted);
        let bad = parse_proof("a: assume H |- f(x) = 0\nb: allI a [var x] |- forall x f(x) = 0").unwrap();
        assert!(matches!(check_proof(&cfg, &bad).reason(), Some(Reason::Eigenvariable { .. })));
        let ok = parse_proof(
            "a: assume H |- f(x) = 0\nb: impI a [discharge H] |- f(x) = 0 -> f(x) = 0\nc: allI b [var x] |- forall x (f(x) = 0 -> f(x) = 0)",
        )
        .unwrap();
        assert!(check_proof(&cfg, &ok).is_accepted());
        let bad_exe = parse_proof(
            "m: assume M |- exists x f(x) = 0\n\
             h: assume H |- f(y) = 0\n\
             o: assume O |- y = y\n\
             c: exE m h [var y] [discharge H] |- f(y) = 0",
        )
        .unwrap();
        assert!(matches!(check_proof(&cfg, &bad_exe).reason(), Some(Reason::Eigenvariable { .. })));
    }

    #[test]
    fn script_round_trip() {
        let text = "\
a: assume H |- forall x f(x) = 0
b: allE a [term S(0)] |- f(S(0)) = 0
c: refl |- f(S(0)) = f(S(0))
d: eqsub c b [paths 1] |- f(S(0)) = 0
e: impI d [discharge H] |- (forall x f(x) = 0) -> f(S(0)) = 0
";
        let pf = parse_proof(text).unwrap();
        assert_eq!(pf.to_string(), text);
        let cfg = arith("f(0) = 0.", EigentermPolicy::Basic);
        assert!(check_proof(&cfg, &pf).is_accepted());
        assert!(parse_proof("a: refl |- 0 = 0\na: refl |- 0 = 0").is_err());
        assert!(parse_proof("a: impE b c |- false").is_err());
    }

    #[test]
    fn natom_rejected_in_arithmetic() {
        let cfg = arith("f(0) = 0.", EigentermPolicy::Unrestricted);
        let pf = parse_proof("a: assume H |- N(0)").unwrap();
        assert_eq!(check_proof(&cfg, &pf).reason(), Some(&Reason::NatInArithmetic));
    }

    #[test]
    fn builder_shares_and_imports() {
        let mut b = ProofBuilder::new();
        let r1 = b.refl(&Term::zero());
        let r2 = b.refl(&Term::zero());
        assert_eq!(r1, r2);
        let pf = parse_proof(TRIVIAL).unwrap();
        let root = b.import(&pf);
        let out = b.finish(root);
        assert_eq!(out.len(), 3);
        let cfg = arith("f(0) = 0.", EigentermPolicy::Unrestricted);
        assert!(check_proof(&cfg, &out).is_accepted());
    }
}
