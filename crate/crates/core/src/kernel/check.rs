use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use super::proof::{Label, Proof, Rule};
use crate::syntax::{is_basic, is_pr_term, dedup_alpha, Formula, Name, PrLanguage, Program, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EigentermPolicy {
    Unrestricted,
    PrimitiveRecursive,
    Basic,
}

impl EigentermPolicy {
    pub const ALL: [EigentermPolicy; 3] =
        [EigentermPolicy::Unrestricted, EigentermPolicy::PrimitiveRecursive, EigentermPolicy::Basic];

    pub fn name(&self) -> &'static str {
        match self {
            EigentermPolicy::Unrestricted => "unrestricted",
            EigentermPolicy::PrimitiveRecursive => "pr",
            EigentermPolicy::Basic => "basic",
        }
    }

    pub fn parse(s: &str) -> Option<EigentermPolicy> {
        match s {
            "unrestricted" => Some(EigentermPolicy::Unrestricted),
            "pr" | "primitive-recursive" => Some(EigentermPolicy::PrimitiveRecursive),
            "basic" => Some(EigentermPolicy::Basic),
            _ => None,
        }
    }
}

impl fmt::Display for EigentermPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// The theory A(P).
    Arithmetic,
    /// IT(N) with the closures of P as ordinary assumptions.
    Intrinsic,
}

/// Which theory a proof is checked in.
#[derive(Clone)]
pub struct TheoryConfig {
    pub mode: Mode,
    pub program: Program,
    pub policy: EigentermPolicy,
    pub pr: Option<Arc<dyn PrLanguage + Send + Sync>>,
}

impl fmt::Debug for TheoryConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TheoryConfig")
            .field("mode", &self.mode)
            .field("policy", &self.policy)
            .field("program", &self.program.to_string())
            .finish()
    }
}

impl TheoryConfig {
    pub fn arithmetic(program: Program, policy: EigentermPolicy) -> TheoryConfig {
        TheoryConfig { mode: Mode::Arithmetic, program, policy, pr: None }
    }

    pub fn intrinsic(program: Program) -> TheoryConfig {
        TheoryConfig { mode: Mode::Intrinsic, program, policy: EigentermPolicy::Unrestricted, pr: None }
    }

    pub fn with_pr(mut self, pr: Arc<dyn PrLanguage + Send + Sync>) -> TheoryConfig {
        self.pr = Some(pr);
        self
    }

    pub fn with_policy(mut self, policy: EigentermPolicy) -> TheoryConfig {
        self.policy = policy;
        self
    }

    pub fn admits(&self, t: &Term) -> bool {
        match self.policy {
            EigentermPolicy::Unrestricted => true,
            EigentermPolicy::Basic => is_basic(t),
            EigentermPolicy::PrimitiveRecursive => match &self.pr {
                Some(reg) => is_pr_term(t, reg.as_ref()),
                None => is_basic(t),
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AxiomKind {
    Program,
    Separation,
    Induction,
}

impl AxiomKind {
    pub fn name(&self) -> &'static str {
        match self {
            AxiomKind::Program => "program-axiom",
            AxiomKind::Separation => "separation",
            AxiomKind::Induction => "induction",
        }
    }
}

/// `forall x ~(S(x) = 0)`.
pub fn separation_zero() -> Formula {
    let x = Term::var("x");
    Formula::forall("x", Formula::not(Formula::eq(Term::succ(x), Term::zero())))
}

/// `forall x forall y (S(x) = S(y) -> x = y)`.
pub fn separation_succ() -> Formula {
    let (x, y) = (Term::var("x"), Term::var("y"));
    Formula::forall(
        "x",
        Formula::forall(
            "y",
            Formula::imp(Formula::eq(Term::succ(x.clone()), Term::succ(y.clone())), Formula::eq(x, y)),
        ),
    )
}

/// The induction instance for `a` over `x`.
pub fn induction_instance(a: &Formula, x: &str) -> Option<Formula> {
    let base = a.substitute(x, &Term::zero()).ok()?;
    let next = a.substitute(x, &Term::succ(Term::var(x))).ok()?;
    Some(Formula::imp(
        base,
        Formula::imp(
            Formula::forall(x, Formula::imp(a.clone(), next)),
            Formula::forall(x, a.clone()),
        ),
    ))
}

/// Recognize `A[0] -> forall x (A[x] -> A[S(x)]) -> forall x A[x]`.
pub fn check_induction_instance(a: &Formula) -> Option<(Formula, Name)> {
    let Formula::Imp(base, rest) = a else { return None };
    let Formula::Imp(step, concl) = &**rest else { return None };
    let Formula::Forall(x, body) = &**concl else { return None };
    let Formula::Forall(..) = &**step else { return None };
    let expected = induction_instance(body, x)?;
    let Formula::Imp(eb, erest) = &expected else { unreachable!() };
    let Formula::Imp(es, _) = &**erest else { unreachable!() };
    (base.alpha_eq(eb) && step.alpha_eq(es)).then(|| ((**body).clone(), x.clone()))
}

pub fn is_axiom(cfg: &TheoryConfig, a: &Formula) -> Option<AxiomKind> {
    if a.alpha_eq(&separation_zero()) || a.alpha_eq(&separation_succ()) {
        return Some(AxiomKind::Separation);
    }
    if cfg.mode == Mode::Intrinsic {
        return None;
    }
    if cfg.program.equations().iter().any(|e| a.alpha_eq(&e.closure())) {
        return Some(AxiomKind::Program);
    }
    check_induction_instance(a).map(|_| AxiomKind::Induction)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Reason {
    EmptyProof,
    PremiseCount { expected: usize, got: usize },
    ForwardReference(usize),
    NotInLanguage { symbol: Name, arity: usize },
    NatInArithmetic,
    IntrinsicRuleInArithmetic,
    LabelReuse(Label),
    DischargeMismatch(Label),
    NotAnAxiom,
    EigentermPolicyViolation(Term),
    CaptureViolation(String),
    Eigenvariable { var: Name, detail: String },
    BadPosition(String),
    Shape(String),
}

impl fmt::Display for Reason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Reason::EmptyProof => write!(f, "empty-proof"),
            Reason::PremiseCount { expected, got } => {
                write!(f, "premise-count: expected {expected}, got {got}")
            }
            Reason::ForwardReference(i) => write!(f, "forward-reference: premise {i}"),
            Reason::NotInLanguage { symbol, arity } => {
                write!(f, "not-in-language: {symbol}/{arity}")
            }
            Reason::NatInArithmetic => write!(f, "natom-in-arithmetic"),
            Reason::IntrinsicRuleInArithmetic => write!(f, "intrinsic-rule-in-arithmetic"),
            Reason::LabelReuse(l) => write!(f, "label-reuse: {l}"),
            Reason::DischargeMismatch(l) => write!(f, "discharge-mismatch: {l}"),
            Reason::NotAnAxiom => write!(f, "not-an-axiom"),
            Reason::EigentermPolicyViolation(t) => write!(f, "eigenterm-policy-violation {t}"),
            Reason::CaptureViolation(s) => write!(f, "capture-violation: {s}"),
            Reason::Eigenvariable { var, detail } => write!(f, "eigenvariable-condition: {var} {detail}"),
            Reason::BadPosition(s) => write!(f, "bad-position: {s}"),
            Reason::Shape(s) => write!(f, "shape-mismatch: {s}"),
        }
    }
}

/// `Γ ⇒ A`, with `Γ` deduplicated up to alpha-equivalence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Judgment {
    pub assumptions: Vec<Formula>,
    pub conclusion: Formula,
}

impl Judgment {
    pub fn new(assumptions: impl IntoIterator<Item = Formula>, conclusion: Formula) -> Judgment {
        let mut assumptions = dedup_alpha(assumptions);
        assumptions.sort();
        Judgment { assumptions, conclusion }
    }

    /// Same conclusion and same assumption set, up to alpha-equivalence.
    pub fn same_as(&self, other: &Judgment) -> bool {
        let covers = |xs: &[Formula], ys: &[Formula]| xs.iter().all(|x| ys.iter().any(|y| x.alpha_eq(y)));
        self.conclusion.alpha_eq(&other.conclusion)
            && covers(&self.assumptions, &other.assumptions)
            && covers(&other.assumptions, &self.assumptions)
    }
}

impl fmt::Display for Judgment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gamma: Vec<String> = self.assumptions.iter().map(|a| a.to_string()).collect();
        write!(f, "{} => {}", gamma.join(", "), self.conclusion)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Accepted(Judgment),
    Rejected { node: String, reason: Reason },
}

impl Verdict {
    pub fn is_accepted(&self) -> bool {
        matches!(self, Verdict::Accepted(_))
    }

    pub fn judgment(&self) -> Option<&Judgment> {
        match self {
            Verdict::Accepted(j) => Some(j),
            Verdict::Rejected { .. } => None,
        }
    }

    pub fn reason(&self) -> Option<&Reason> {
        match self {
            Verdict::Accepted(_) => None,
            Verdict::Rejected { reason, .. } => Some(reason),
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Accepted(j) => write!(f, "accepted: {j}"),
            Verdict::Rejected { node, reason } => write!(f, "rejected at {node}: {reason}"),
        }
    }
}

/// Verdict plus the bookkeeping a report needs.
#[derive(Clone, Debug)]
pub struct CheckReport {
    pub verdict: Verdict,
    pub policy: EigentermPolicy,
    pub mode: Mode,
    pub rule_counts: BTreeMap<&'static str, usize>,
    pub nodes: usize,
}

impl CheckReport {
    pub fn text(&self) -> String {
        let mode = match self.mode {
            Mode::Arithmetic => "arith",
            Mode::Intrinsic => "intrinsic",
        };
        format!("{} [theory {mode}, policy {}, {} nodes]", self.verdict, self.policy, self.nodes)
    }

    /// One `key value` pair per line.
    pub fn porcelain(&self) -> String {
        let mut out = String::new();
        match &self.verdict {
            Verdict::Accepted(j) => {
                out.push_str("verdict accepted\n");
                for a in &j.assumptions {
                    out.push_str(&format!("assumption {a}\n"));
                }
                out.push_str(&format!("conclusion {}\n", j.conclusion));
            }
            Verdict::Rejected { node, reason } => {
                out.push_str("verdict rejected\n");
                out.push_str(&format!("node {node}\n"));
                out.push_str(&format!("reason {reason}\n"));
            }
        }
        out.push_str(&format!("policy {}\n", self.policy));
        out.push_str(&format!("nodes {}\n", self.nodes));
        for (r, n) in &self.rule_counts {
            out.push_str(&format!("rule {r} {n}\n"));
        }
        out
    }
}

struct Checker<'a> {
    cfg: &'a TheoryConfig,
    pf: &'a Proof,
    labels: HashMap<Label, Formula>,
    open: Vec<BTreeSet<Label>>,
}

type Check = Result<BTreeSet<Label>, Reason>;

fn shape(msg: impl Into<String>) -> Reason {
    Reason::Shape(msg.into())
}

impl Checker<'_> {
    fn concl(&self, i: usize) -> &Formula {
        &self.pf.nodes[i].conclusion
    }

    fn open_of(&self, i: usize) -> BTreeSet<Label> {
        self.open[i].clone()
    }

    fn union(&self, ps: &[usize]) -> BTreeSet<Label> {
        ps.iter().flat_map(|&p| self.open[p].iter().cloned()).collect()
    }

    fn in_language(&self, a: &Formula) -> Result<(), Reason> {
        if self.cfg.mode == Mode::Arithmetic && a.contains_nat() {
            return Err(Reason::NatInArithmetic);
        }
        match self.cfg.program.foreign_symbol_in(a) {
            Some((symbol, arity)) => Err(Reason::NotInLanguage { symbol, arity }),
            None => Ok(()),
        }
    }

    fn term_in_language(&self, t: &Term) -> Result<(), Reason> {
        match self.cfg.program.foreign_symbol(t) {
            Some((symbol, arity)) => Err(Reason::NotInLanguage { symbol, arity }),
            None => Ok(()),
        }
    }

    /// Remove `l` from `open`, checking the discharged formula.
    fn discharge(&self, mut open: BTreeSet<Label>, l: &Label, a: &Formula) -> Check {
        if open.remove(l) {
            let assumed = &self.labels[l];
            if !assumed.alpha_eq(a) {
                return Err(Reason::DischargeMismatch(l.clone()));
            }
        }
        Ok(open)
    }

    fn free_in_open(&self, open: &BTreeSet<Label>, y: &str) -> Option<Label> {
        open.iter().find(|l| self.labels[*l].has_free(y)).cloned()
    }

    fn instance(&self, body: &Formula, x: &str, t: &Term) -> Result<Formula, Reason> {
        body.substitute(x, t)
            .map_err(|_| Reason::CaptureViolation(format!("{t} is not free for {x}")))
    }

    fn eigenterm(&self, t: &Term) -> Result<(), Reason> {
        self.term_in_language(t)?;
        if self.cfg.admits(t) {
            Ok(())
        } else {
            Err(Reason::EigentermPolicyViolation(t.clone()))
        }
    }

    fn node(&mut self, i: usize) -> Check {
        let n = &self.pf.nodes[i];
        if n.premises.len() != n.rule.arity() {
            return Err(Reason::PremiseCount { expected: n.rule.arity(), got: n.premises.len() });
        }
        if let Some(&p) = n.premises.iter().find(|&&p| p >= i) {
            return Err(Reason::ForwardReference(p));
        }
        if n.rule.is_intrinsic() && self.cfg.mode == Mode::Arithmetic {
            return Err(Reason::IntrinsicRuleInArithmetic);
        }
        self.in_language(&n.conclusion)?;
        let c = &n.conclusion;
        let ps = &n.premises;
        match &n.rule {
            Rule::Assume(l) => {
                match self.labels.get(l) {
                    Some(prev) if !prev.alpha_eq(c) => return Err(Reason::LabelReuse(l.clone())),
                    Some(_) => {}
                    None => {
                        self.labels.insert(l.clone(), c.clone());
                    }
                }
                Ok([l.clone()].into_iter().collect())
            }
            Rule::Axiom => match is_axiom(self.cfg, c) {
                Some(_) => Ok(BTreeSet::new()),
                None => Err(Reason::NotAnAxiom),
            },
            Rule::Refl => match c {
                Formula::Eq(l, r) if l == r => Ok(BTreeSet::new()),
                _ => Err(shape("refl concludes t = t")),
            },
            Rule::EqSub(paths) => {
                let Formula::Eq(t, s) = self.concl(ps[1]) else {
                    return Err(shape("second premise of eqsub must be an equation"));
                };
                let out = self
                    .concl(ps[0])
                    .replace_occurrences(t, s, paths)
                    .map_err(|e| Reason::BadPosition(e.to_string()))?;
                if !out.alpha_eq(c) {
                    return Err(shape(format!("eqsub yields {out}")));
                }
                Ok(self.union(ps))
            }
            Rule::ImpI(l) => {
                let Formula::Imp(a, b) = c else { return Err(shape("impI concludes an implication")) };
                if !b.alpha_eq(self.concl(ps[0])) {
                    return Err(shape("impI consequent differs from premise"));
                }
                self.discharge(self.open_of(ps[0]), l, a)
            }
            Rule::ImpE => {
                let Formula::Imp(a, b) = self.concl(ps[0]) else {
                    return Err(shape("impE major premise must be an implication"));
                };
                if !a.alpha_eq(self.concl(ps[1])) || !b.alpha_eq(c) {
                    return Err(shape("impE premises do not fit"));
                }
                Ok(self.union(ps))
            }
            Rule::AndI => {
                let Formula::And(a, b) = c else { return Err(shape("andI concludes a conjunction")) };
                if !a.alpha_eq(self.concl(ps[0])) || !b.alpha_eq(self.concl(ps[1])) {
                    return Err(shape("andI premises do not fit"));
                }
                Ok(self.union(ps))
            }
            Rule::AndEl | Rule::AndEr => {
                let Formula::And(a, b) = self.concl(ps[0]) else {
                    return Err(shape("and-elimination premise must be a conjunction"));
                };
                let side = if n.rule == Rule::AndEl { a } else { b };
                if !side.alpha_eq(c) {
                    return Err(shape("and-elimination conclusion differs"));
                }
                Ok(self.union(ps))
            }
            Rule::OrIl | Rule::OrIr => {
                let Formula::Or(a, b) = c else { return Err(shape("or-introduction concludes a disjunction")) };
                let side = if n.rule == Rule::OrIl { a } else { b };
                if !side.alpha_eq(self.concl(ps[0])) {
                    return Err(shape("or-introduction premise differs"));
                }
                Ok(self.union(ps))
            }
            Rule::OrE(la, lb) => {
                let Formula::Or(a, b) = self.concl(ps[0]) else {
                    return Err(shape("orE major premise must be a disjunction"));
                };
                if !self.concl(ps[1]).alpha_eq(c) || !self.concl(ps[2]).alpha_eq(c) {
                    return Err(shape("orE minor premises must prove the conclusion"));
                }
                let mut open = self.open_of(ps[0]);
                open.extend(self.discharge(self.open_of(ps[1]), la, a)?);
                open.extend(self.discharge(self.open_of(ps[2]), lb, b)?);
                Ok(open)
            }
            Rule::BotE => {
                if *self.concl(ps[0]) != Formula::False {
                    return Err(shape("botE premise must be false"));
                }
                Ok(self.union(ps))
            }
            Rule::Dne => {
                let expected = Formula::not(Formula::not(c.clone()));
                if !self.concl(ps[0]).alpha_eq(&expected) {
                    return Err(shape("dne premise must be ~~A"));
                }
                Ok(self.union(ps))
            }
            Rule::AllI(y) => {
                let Formula::Forall(x, body) = c else { return Err(shape("allI concludes a universal")) };
                let inst = self.instance(body, x, &Term::Var(y.clone()))?;
                if !inst.alpha_eq(self.concl(ps[0])) {
                    return Err(shape("allI premise is not the eigenvariable instance"));
                }
                if c.has_free(y) {
                    return Err(Reason::Eigenvariable { var: y.clone(), detail: "is free in the conclusion".into() });
                }
                let open = self.open_of(ps[0]);
                if let Some(l) = self.free_in_open(&open, y) {
                    return Err(Reason::Eigenvariable {
                        var: y.clone(),
                        detail: format!("is free in open assumption {l}"),
                    });
                }
                Ok(open)
            }
            Rule::AllE(t) => {
                let Formula::Forall(x, body) = self.concl(ps[0]) else {
                    return Err(shape("allE premise must be universal"));
                };
                let inst = self.instance(body, x, t)?;
                if !inst.alpha_eq(c) {
                    return Err(shape(format!("allE yields {inst}")));
                }
                self.eigenterm(t)?;
                Ok(self.union(ps))
            }
            Rule::ExI(t) => {
                let Formula::Exists(x, body) = c else { return Err(shape("exI concludes an existential")) };
                let inst = self.instance(body, x, t)?;
                if !inst.alpha_eq(self.concl(ps[0])) {
                    return Err(shape("exI premise is not the eigenterm instance"));
                }
                self.eigenterm(t)?;
                Ok(self.union(ps))
            }
            Rule::ExE(y, l) => {
                let major = self.concl(ps[0]);
                let Formula::Exists(x, body) = major else {
                    return Err(shape("exE major premise must be existential"));
                };
                if !self.concl(ps[1]).alpha_eq(c) {
                    return Err(shape("exE minor premise must prove the conclusion"));
                }
                let inst = self.instance(body, x, &Term::Var(y.clone()))?;
                let bad = |detail: String| Reason::Eigenvariable { var: y.clone(), detail };
                if major.has_free(y) {
                    return Err(bad("is free in the major premise".into()));
                }
                if c.has_free(y) {
                    return Err(bad("is free in the conclusion".into()));
                }
                let minor = self.discharge(self.open_of(ps[1]), l, &inst)?;
                if let Some(other) = self.free_in_open(&minor, y) {
                    return Err(bad(format!("is free in open assumption {other}")));
                }
                let mut open = self.open_of(ps[0]);
                open.extend(minor);
                Ok(open)
            }
            Rule::NZero => {
                if *c != Formula::nat(Term::zero()) {
                    return Err(shape("nzero concludes N(0)"));
                }
                Ok(BTreeSet::new())
            }
            Rule::NSucc => match (self.concl(ps[0]), c) {
                (Formula::Nat(t), Formula::Nat(u)) if Term::succ(t.clone()) == *u => Ok(self.union(ps)),
                _ => Err(shape("nsucc derives N(S(t)) from N(t)")),
            },
            Rule::NInd => {
                let Formula::Nat(t) = self.concl(ps[0]) else {
                    return Err(shape("nind first premise must be N(t)"));
                };
                let Formula::Forall(x, step) = self.concl(ps[2]) else {
                    return Err(shape("nind step premise must be universal"));
                };
                let Formula::Imp(a, a_next) = &**step else {
                    return Err(shape("nind step premise must be an implication"));
                };
                let next = self.instance(a, x, &Term::succ(Term::Var(x.clone())))?;
                if !next.alpha_eq(a_next) {
                    return Err(shape("nind step is not A[x] -> A[S(x)]"));
                }
                let base = self.instance(a, x, &Term::zero())?;
                if !base.alpha_eq(self.concl(ps[1])) {
                    return Err(shape("nind base is not A[0]"));
                }
                let target = self.instance(a, x, t)?;
                if !target.alpha_eq(c) {
                    return Err(shape("nind conclusion is not A[t]"));
                }
                Ok(self.union(ps))
            }
        }
    }
}

/// Check every node of `pf`; the verdict names the first failing node.
pub fn check_proof(cfg: &TheoryConfig, pf: &Proof) -> Verdict {
    if pf.nodes.is_empty() {
        return Verdict::Rejected { node: String::new(), reason: Reason::EmptyProof };
    }
    let mut ck = Checker { cfg, pf, labels: HashMap::new(), open: Vec::with_capacity(pf.nodes.len()) };
    for i in 0..pf.nodes.len() {
        match ck.node(i) {
            Ok(open) => ck.open.push(open),
            Err(reason) => return Verdict::Rejected { node: pf.nodes[i].id.clone(), reason },
        }
    }
    let root = ck.open.last().expect("non-empty");
    let gamma = root.iter().map(|l| ck.labels[l].clone());
    Verdict::Accepted(Judgment::new(gamma, pf.nodes.last().expect("non-empty").conclusion.clone()))
}

pub fn check_report(cfg: &TheoryConfig, pf: &Proof) -> CheckReport {
    let mut rule_counts = BTreeMap::new();
    for n in &pf.nodes {
        *rule_counts.entry(n.rule.name()).or_insert(0) += 1;
    }
    CheckReport { verdict: check_proof(cfg, pf), policy: cfg.policy, mode: cfg.mode, rule_counts, nodes: pf.len() }
}
