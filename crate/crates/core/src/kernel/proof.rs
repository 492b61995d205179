use std::collections::{BTreeSet, HashMap};

use crate::syntax::{Formula, Name, NameSupply, Path, Term};

pub type Label = Name;

/// A rule application together with its instantiation data.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    /// Open assumption carrying a discharge label.
    Assume(Label),
    Axiom,
    /// `t = t`.
    Refl,
    /// From `A[t]` and `t = s` infer `A[s]`, replacing the addressed occurrences.
    EqSub(BTreeSet<Path>),
    ImpI(Label),
    ImpE,
    AndI,
    AndEl,
    AndEr,
    OrIl,
    OrIr,
    OrE(Label, Label),
    BotE,
    /// From `~~A` infer `A`.
    Dne,
    /// Eigenvariable.
    AllI(Name),
    /// Eigenterm.
    AllE(Term),
    /// Eigenterm.
    ExI(Term),
    /// Eigenvariable and the label of the discharged instance.
    ExE(Name, Label),
    NZero,
    NSucc,
    /// Premises `N(t)`, `A[0]`, `forall x (A[x] -> A[S(x)])`; conclusion `A[t]`.
    NInd,
}

impl Rule {
    pub fn name(&self) -> &'static str {
        match self {
            Rule::Assume(_) => "assume",
            Rule::Axiom => "axiom",
            Rule::Refl => "refl",
            Rule::EqSub(_) => "eqsub",
            Rule::ImpI(_) => "impI",
            Rule::ImpE => "impE",
            Rule::AndI => "andI",
            Rule::AndEl => "andEl",
            Rule::AndEr => "andEr",
            Rule::OrIl => "orIl",
            Rule::OrIr => "orIr",
            Rule::OrE(..) => "orE",
            Rule::BotE => "botE",
            Rule::Dne => "dne",
            Rule::AllI(_) => "allI",
            Rule::AllE(_) => "allE",
            Rule::ExI(_) => "exI",
            Rule::ExE(..) => "exE",
            Rule::NZero => "nzero",
            Rule::NSucc => "nsucc",
            Rule::NInd => "nind",
        }
    }

    pub fn arity(&self) -> usize {
        match self {
            Rule::Assume(_) | Rule::Axiom | Rule::Refl | Rule::NZero => 0,
            Rule::ImpI(_)
            | Rule::AndEl
            | Rule::AndEr
            | Rule::OrIl
            | Rule::OrIr
            | Rule::BotE
            | Rule::Dne
            | Rule::AllI(_)
            | Rule::AllE(_)
            | Rule::ExI(_)
            | Rule::NSucc => 1,
            Rule::EqSub(_) | Rule::ImpE | Rule::AndI | Rule::ExE(..) => 2,
            Rule::OrE(..) | Rule::NInd => 3,
        }
    }

    /// The term a policy constrains, if any.
    pub fn eigenterm(&self) -> Option<&Term> {
        match self {
            Rule::AllE(t) | Rule::ExI(t) => Some(t),
            _ => None,
        }
    }

    pub fn discharges(&self) -> Vec<&Label> {
        match self {
            Rule::ImpI(l) | Rule::ExE(_, l) => vec![l],
            Rule::OrE(a, b) => vec![a, b],
            _ => Vec::new(),
        }
    }

    pub fn is_intrinsic(&self) -> bool {
        matches!(self, Rule::NZero | Rule::NSucc | Rule::NInd)
    }

    fn map_labels(&self, f: &dyn Fn(&Label) -> Label) -> Rule {
        match self {
            Rule::Assume(l) => Rule::Assume(f(l)),
            Rule::ImpI(l) => Rule::ImpI(f(l)),
            Rule::ExE(y, l) => Rule::ExE(y.clone(), f(l)),
            Rule::OrE(a, b) => Rule::OrE(f(a), f(b)),
            r => r.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Node {
    pub id: String,
    pub rule: Rule,
    pub premises: Vec<usize>,
    pub conclusion: Formula,
}

/// A proof as a list of nodes whose premises point backwards; the last node
/// is the root. Shared subproofs are shared nodes.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Proof {
    pub nodes: Vec<Node>,
}

impl Proof {
    pub fn root(&self) -> Option<&Node> {
        self.nodes.last()
    }

    pub fn conclusion(&self) -> Option<&Formula> {
        self.root().map(|n| &n.conclusion)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Every name used anywhere in the proof: variables, symbols, labels.
    pub fn names(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        for n in &self.nodes {
            n.conclusion.collect_names(&mut out);
            match &n.rule {
                Rule::AllE(t) | Rule::ExI(t) => t.collect_names(&mut out),
                Rule::AllI(y) => {
                    out.insert(y.clone());
                }
                Rule::ExE(y, _) => {
                    out.insert(y.clone());
                }
                _ => {}
            }
            for l in n.rule.discharges() {
                out.insert(l.clone());
            }
            if let Rule::Assume(l) = &n.rule {
                out.insert(l.clone());
            }
        }
        out
    }
}

/// Builds proofs bottom-up, sharing structurally identical nodes.
#[derive(Clone, Debug, Default)]
pub struct ProofBuilder {
    nodes: Vec<Node>,
    memo: HashMap<(Rule, Vec<usize>, Formula), usize>,
    pub names: NameSupply,
}

impl ProofBuilder {
    pub fn new() -> ProofBuilder {
        ProofBuilder::default()
    }

    /// A builder whose fresh names avoid everything in `avoid`.
    pub fn avoiding<'a>(avoid: impl IntoIterator<Item = &'a Formula>) -> ProofBuilder {
        let mut b = ProofBuilder::new();
        for a in avoid {
            b.names.avoid_formula(a);
        }
        b
    }

    pub fn concl(&self, i: usize) -> &Formula {
        &self.nodes[i].conclusion
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&mut self, rule: Rule, premises: Vec<usize>, conclusion: Formula) -> usize {
        let key = (rule, premises, conclusion);
        if let Some(&i) = self.memo.get(&key) {
            return i;
        }
        let (rule, premises, conclusion) = key.clone();
        self.names.avoid_formula(&conclusion);
        let id = format!("n{}", self.nodes.len() + 1);
        self.nodes.push(Node { id, rule, premises, conclusion });
        self.memo.insert(key, self.nodes.len() - 1);
        self.nodes.len() - 1
    }

    pub fn fresh_label(&mut self, hint: &str) -> Label {
        self.names.fresh(hint)
    }

    pub fn fresh_var(&mut self, hint: &str) -> Name {
        self.names.fresh(hint)
    }

    pub fn assume(&mut self, label: &Label, a: Formula) -> usize {
        self.node(Rule::Assume(label.clone()), Vec::new(), a)
    }

    pub fn axiom(&mut self, a: Formula) -> usize {
        self.node(Rule::Axiom, Vec::new(), a)
    }

    pub fn refl(&mut self, t: &Term) -> usize {
        self.node(Rule::Refl, Vec::new(), Formula::eq(t.clone(), t.clone()))
    }

    /// Replace the addressed occurrences of `t` by `s`, where `eq` proves `t = s`.
    pub fn eqsub(&mut self, prem: usize, eq: usize, paths: BTreeSet<Path>) -> usize {
        let Formula::Eq(t, s) = self.concl(eq).clone() else {
            panic!("eqsub: second premise must be an equation");
        };
        let out = self
            .concl(prem)
            .replace_occurrences(&t, &s, &paths)
            .expect("eqsub: paths must address free occurrences");
        self.node(Rule::EqSub(paths), vec![prem, eq], out)
    }

    /// Replace every replaceable occurrence of the lhs of `eq`.
    pub fn eqsub_all(&mut self, prem: usize, eq: usize) -> usize {
        let Formula::Eq(t, s) = self.concl(eq).clone() else {
            panic!("eqsub: second premise must be an equation");
        };
        let paths = replaceable_occurrences(self.concl(prem), &t, &s);
        self.eqsub(prem, eq, paths)
    }

    /// From `t = s` derive `s = t`.
    pub fn symm(&mut self, eq: usize) -> usize {
        let Formula::Eq(t, _) = self.concl(eq).clone() else {
            panic!("symm: premise must be an equation");
        };
        let r = self.refl(&t);
        self.eqsub(r, eq, [vec![0]].into_iter().collect())
    }

    /// From `a = b` and `b = c` derive `a = c`.
    pub fn trans(&mut self, ab: usize, bc: usize) -> usize {
        self.eqsub(ab, bc, [vec![1]].into_iter().collect())
    }

    pub fn imp_i(&mut self, prem: usize, label: &Label, a: Formula) -> usize {
        let out = Formula::imp(a, self.concl(prem).clone());
        self.node(Rule::ImpI(label.clone()), vec![prem], out)
    }

    pub fn imp_e(&mut self, imp: usize, arg: usize) -> usize {
        let Formula::Imp(_, b) = self.concl(imp).clone() else {
            panic!("impE: major premise must be an implication");
        };
        self.node(Rule::ImpE, vec![imp, arg], *b)
    }

    pub fn and_i(&mut self, a: usize, b: usize) -> usize {
        let out = Formula::and(self.concl(a).clone(), self.concl(b).clone());
        self.node(Rule::AndI, vec![a, b], out)
    }

    pub fn and_el(&mut self, prem: usize) -> usize {
        let Formula::And(a, _) = self.concl(prem).clone() else {
            panic!("andEl: premise must be a conjunction");
        };
        self.node(Rule::AndEl, vec![prem], *a)
    }

    pub fn and_er(&mut self, prem: usize) -> usize {
        let Formula::And(_, b) = self.concl(prem).clone() else {
            panic!("andEr: premise must be a conjunction");
        };
        self.node(Rule::AndEr, vec![prem], *b)
    }

    pub fn bot_e(&mut self, prem: usize, c: Formula) -> usize {
        self.node(Rule::BotE, vec![prem], c)
    }

    /// `forall x A[x]` from a proof of `A[y]`.
    pub fn all_i(&mut self, prem: usize, y: &Name, x: &Name) -> usize {
        let body = if x == y {
            self.concl(prem).clone()
        } else {
            self.concl(prem)
                .substitute(y, &Term::Var(x.clone()))
                .expect("allI: bound name must be free for the eigenvariable")
        };
        self.node(Rule::AllI(y.clone()), vec![prem], Formula::Forall(x.clone(), Box::new(body)))
    }

    /// `forall y A[y]` from a proof of `A[y]`.
    pub fn gen(&mut self, prem: usize, y: &Name) -> usize {
        self.all_i(prem, y, y)
    }

    pub fn all_e(&mut self, prem: usize, t: &Term) -> usize {
        let Formula::Forall(x, body) = self.concl(prem).clone() else {
            panic!("allE: premise must be universal");
        };
        let out = body.substitute(&x, t).expect("allE: eigenterm must be free for the bound variable");
        self.node(Rule::AllE(t.clone()), vec![prem], out)
    }

    /// `exists x B` from a proof of `B[x := t]`.
    pub fn ex_i(&mut self, prem: usize, x: &Name, body: Formula, t: &Term) -> usize {
        self.node(Rule::ExI(t.clone()), vec![prem], Formula::Exists(x.clone(), Box::new(body)))
    }

    pub fn ex_e(&mut self, major: usize, minor: usize, y: &Name, label: &Label) -> usize {
        let out = self.concl(minor).clone();
        self.node(Rule::ExE(y.clone(), label.clone()), vec![major, minor], out)
    }

    pub fn nzero(&mut self) -> usize {
        self.node(Rule::NZero, Vec::new(), Formula::nat(Term::zero()))
    }

    pub fn nsucc(&mut self, prem: usize) -> usize {
        let Formula::Nat(t) = self.concl(prem).clone() else {
            panic!("nsucc: premise must be N(t)");
        };
        self.node(Rule::NSucc, vec![prem], Formula::nat(Term::succ(t)))
    }

    pub fn nind(&mut self, nat: usize, base: usize, step: usize) -> usize {
        let Formula::Nat(t) = self.concl(nat).clone() else {
            panic!("nind: first premise must be N(t)");
        };
        let Formula::Forall(x, body) = self.concl(step).clone() else {
            panic!("nind: step premise must be universal");
        };
        let Formula::Imp(a, _) = *body else {
            panic!("nind: step premise must be an implication");
        };
        let out = a.substitute(&x, &t).expect("nind: term must be free for the variable");
        self.node(Rule::NInd, vec![nat, base, step], out)
    }

    /// Copy `pf` into this builder. Labels discharged inside `pf` are renamed
    /// apart; open labels are kept. Returns the index of `pf`'s root.
    pub fn import(&mut self, pf: &Proof) -> usize {
        for n in &pf.nodes {
            self.names.avoid_formula(&n.conclusion);
        }
        for name in pf.names() {
            self.names.avoid(&name);
        }
        let open = open_labels(pf);
        let mut rename: HashMap<Label, Label> = HashMap::new();
        for n in &pf.nodes {
            for l in n.rule.discharges() {
                if !rename.contains_key(l) && !open.contains(l) {
                    let fresh = self.names.fresh("L");
                    rename.insert(l.clone(), fresh);
                }
            }
        }
        let mut map = Vec::with_capacity(pf.nodes.len());
        for n in &pf.nodes {
            let rule = n.rule.map_labels(&|l| rename.get(l).cloned().unwrap_or_else(|| l.clone()));
            let premises = n.premises.iter().map(|&p| map[p]).collect();
            map.push(self.node(rule, premises, n.conclusion.clone()));
        }
        *map.last().expect("imported proof is non-empty")
    }

    /// The proof rooted at `root`, keeping only the nodes it depends on.
    pub fn finish(&self, root: usize) -> Proof {
        let mut needed = vec![false; root + 1];
        needed[root] = true;
        for i in (0..=root).rev() {
            if needed[i] {
                for &p in &self.nodes[i].premises {
                    needed[p] = true;
                }
            }
        }
        let mut renumber = vec![usize::MAX; root + 1];
        let mut nodes = Vec::new();
        for i in 0..=root {
            if !needed[i] {
                continue;
            }
            renumber[i] = nodes.len();
            let n = &self.nodes[i];
            nodes.push(Node {
                id: format!("n{}", nodes.len() + 1),
                rule: n.rule.clone(),
                premises: n.premises.iter().map(|&p| renumber[p]).collect(),
                conclusion: n.conclusion.clone(),
            });
        }
        Proof { nodes }
    }
}

/// Labels of the assumptions left open at the root.
pub fn open_labels(pf: &Proof) -> BTreeSet<Label> {
    let mut open: Vec<BTreeSet<Label>> = Vec::with_capacity(pf.nodes.len());
    for n in &pf.nodes {
        let mut here = BTreeSet::new();
        if let Rule::Assume(l) = &n.rule {
            here.insert(l.clone());
        }
        for (k, &p) in n.premises.iter().enumerate() {
            let mut from = open.get(p).cloned().unwrap_or_default();
            match &n.rule {
                Rule::ImpI(l) => {
                    from.remove(l);
                }
                Rule::ExE(_, l) if k == 1 => {
                    from.remove(l);
                }
                Rule::OrE(a, _) if k == 1 => {
                    from.remove(a);
                }
                Rule::OrE(_, b) if k == 2 => {
                    from.remove(b);
                }
                _ => {}
            }
            here.extend(from);
        }
        open.push(here);
    }
    open.pop().unwrap_or_default()
}

/// Occurrences of `t` in `a` that the equality rule may replace by `s`.
pub fn replaceable_occurrences(a: &Formula, t: &Term, s: &Term) -> BTreeSet<Path> {
    let tv = t.free_vars();
    let sv = s.free_vars();
    a.term_occurrences()
        .into_iter()
        .filter(|(_, u)| u == t)
        .filter(|(p, _)| {
            let (_, bound) = a.term_at(p).expect("occurrence path");
            !bound.iter().any(|b| tv.contains(b) || sv.contains(b))
        })
        .map(|(p, _)| p)
        .collect()
}
