use rustc_hash::{FxHashMap as HashMap, FxHashSet as HashSet};

use thiserror::Error;

use super::derivation::{DerivationBuilder, EqDerivation};
use crate::syntax::{decode_numeral, numeral, Equation, Program, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchBudget {
    pub max_steps: usize,
    pub max_term_size: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Error)]
#[error("search budgets must be positive")]
pub struct BudgetError;

impl SearchBudget {
    pub fn new(max_steps: usize, max_term_size: usize) -> Result<SearchBudget, BudgetError> {
        if max_steps == 0 || max_term_size == 0 {
            return Err(BudgetError);
        }
        Ok(SearchBudget { max_steps, max_term_size })
    }

    /// Componentwise order on budgets.
    pub fn le(&self, other: &SearchBudget) -> bool {
        self.max_steps <= other.max_steps && self.max_term_size <= other.max_term_size
    }
}

impl Default for SearchBudget {
    fn default() -> SearchBudget {
        SearchBudget { max_steps: 10_000, max_term_size: 64 }
    }
}

/// Candidates examined per admitted step before a run gives up.
const WORK_PER_STEP: usize = 64;

#[derive(Clone, Copy, Debug)]
pub(crate) enum Goal<'a> {
    Equation(&'a Equation),
    /// `t = m` for some numeral `m`.
    ValueOf(&'a Term),
    /// `m = n` for distinct numerals.
    DistinctNumerals,
}

impl Goal<'_> {
    fn hit(&self, e: &Equation) -> bool {
        match self {
            Goal::Equation(g) => *g == e,
            Goal::ValueOf(t) => &e.lhs == *t && decode_numeral(&e.rhs).is_some(),
            Goal::DistinctNumerals => match (decode_numeral(&e.lhs), decode_numeral(&e.rhs)) {
                (Some(m), Some(n)) => m != n,
                _ => false,
            },
        }
    }

    fn min_cap(&self) -> usize {
        match self {
            Goal::Equation(g) => g.size(),
            Goal::ValueOf(t) => t.size(),
            Goal::DistinctNumerals => 2,
        }
    }

    fn terms(&self) -> Vec<Term> {
        match self {
            Goal::Equation(g) => vec![g.lhs.clone(), g.rhs.clone()],
            Goal::ValueOf(t) => vec![(*t).clone()],
            Goal::DistinctNumerals => Vec::new(),
        }
    }
}

/// One forward-chaining run with a fixed term-size cap.
struct Run<'a> {
    p: &'a Program,
    goal: Goal<'a>,
    cap: usize,
    max_steps: usize,
    work_left: usize,
    b: DerivationBuilder,
    known: HashMap<Equation, usize>,
    /// Builder step of each admitted equation, in admission order.
    clauses: Vec<usize>,
    by_lhs: HashMap<Term, Vec<usize>>,
    containing: HashMap<Term, Vec<usize>>,
    pool: Vec<Term>,
    pool_set: HashSet<Term>,
    pool_sizes: Vec<usize>,
    found: Option<usize>,
    stopped: bool,
}

enum Make {
    Axiom(Equation),
    Inst(usize, crate::syntax::Name, Term),
    Replace(usize, usize, crate::syntax::Path),
}

impl<'a> Run<'a> {
    fn new(p: &'a Program, goal: Goal<'a>, cap: usize, max_steps: usize) -> Run<'a> {
        let mut r = Run {
            p,
            goal,
            cap,
            max_steps,
            work_left: max_steps.saturating_mul(WORK_PER_STEP),
            b: DerivationBuilder::new(),
            known: HashMap::default(),
            clauses: Vec::new(),
            by_lhs: HashMap::default(),
            containing: HashMap::default(),
            pool: Vec::new(),
            pool_set: HashSet::default(),
            pool_sizes: Vec::new(),
            found: None,
            stopped: false,
        };
        for n in 0..cap as u64 {
            r.add_to_pool(&numeral(n));
        }
        for t in goal.terms() {
            r.add_to_pool(&t);
        }
        r
    }

    fn done(&self) -> bool {
        self.found.is_some() || self.stopped
    }

    fn add_to_pool(&mut self, t: &Term) {
        for (_, s) in t.subterms() {
            if self.pool_set.contains(s) {
                continue;
            }
            let size = s.size();
            if size <= self.cap {
                self.pool_set.insert(s.clone());
                self.pool.push(s.clone());
                self.pool_sizes.push(size);
            }
        }
    }

    /// Account for one candidate; false once the run is over.
    fn charge(&mut self) -> bool {
        if self.done() {
            return false;
        }
        if self.work_left == 0 {
            self.stopped = true;
            return false;
        }
        self.work_left -= 1;
        true
    }

    fn offer(&mut self, e: Equation, make: Make) {
        if !self.charge() {
            return;
        }
        if self.known.contains_key(&e) || e.size() > self.cap {
            return;
        }
        if self.b.len() + 1 > self.max_steps {
            self.stopped = true;
            return;
        }
        let idx = match make {
            Make::Axiom(a) => self.b.axiom(&a),
            Make::Inst(i, x, t) => self.b.instantiate(i, &x, &t),
            Make::Replace(m, q, path) => self.b.replace_one(m, q, path),
        };
        debug_assert_eq!(self.b.conclusion(idx), &e);
        self.record(e, idx);
        if self.done() {
            return;
        }
        let flipped = self.b.conclusion(idx).flip();
        if !self.known.contains_key(&flipped) {
            if self.b.len() + 2 > self.max_steps {
                self.stopped = true;
                return;
            }
            let s = self.b.symm(idx);
            self.record(flipped, s);
        }
    }

    fn record(&mut self, e: Equation, idx: usize) {
        let pos = self.clauses.len();
        self.known.insert(e.clone(), idx);
        self.clauses.push(idx);
        self.by_lhs.entry(e.lhs.clone()).or_default().push(pos);
        let mut seen: HashSet<&Term> = HashSet::default();
        for side in [&e.lhs, &e.rhs] {
            for (_, s) in side.subterms() {
                if seen.insert(s) {
                    match self.containing.get_mut(s) {
                        Some(v) => v.push(pos),
                        None => {
                            self.containing.insert(s.clone(), vec![pos]);
                        }
                    }
                }
            }
        }
        self.add_to_pool(&e.lhs);
        self.add_to_pool(&e.rhs);
        if self.goal.hit(&e) {
            self.found = Some(idx);
        }
    }

    /// Rewrite single occurrences of `q`'s lhs inside `m`.
    fn pair(&mut self, m: usize, q: usize) {
        let main = self.b.conclusion(m).clone();
        let eq = self.b.conclusion(q).clone();
        if eq.lhs == eq.rhs {
            return;
        }
        for (side, t) in [(0usize, &main.lhs), (1usize, &main.rhs)] {
            for occ in t.occurrences(&eq.lhs) {
                if self.done() {
                    return;
                }
                let mut out = main.clone();
                let target = if side == 0 { &mut out.lhs } else { &mut out.rhs };
                *target = target.replace_at(&occ, &eq.rhs).expect("occurrence path");
                let mut path = vec![side];
                path.extend(occ);
                self.offer(out, Make::Replace(m, q, path));
            }
        }
    }

    fn process(&mut self, pos: usize) {
        let ci = self.clauses[pos];
        let e = self.b.conclusion(ci).clone();

        let mut subs: Vec<&Term> = Vec::new();
        let mut seen: HashSet<&Term> = HashSet::default();
        for side in [&e.lhs, &e.rhs] {
            for (_, s) in side.subterms() {
                if seen.insert(s) {
                    subs.push(s);
                }
            }
        }
        for s in subs {
            let partners: Vec<usize> = self
                .by_lhs
                .get(s)
                .map(|v| v.iter().copied().take_while(|&j| j <= pos).collect())
                .unwrap_or_default();
            for j in partners {
                let cj = self.clauses[j];
                self.pair(ci, cj);
            }
        }
        let hosts: Vec<usize> = self
            .containing
            .get(&e.lhs)
            .map(|v| v.iter().copied().take_while(|&j| j < pos).collect())
            .unwrap_or_default();
        for j in hosts {
            let cj = self.clauses[j];
            self.pair(cj, ci);
        }

        let snapshot = self.pool.len();
        let (ls, rs) = (e.lhs.size(), e.rhs.size());
        for x in e.vars_in_order() {
            let count = |t: &Term| t.subterms().iter().filter(|(_, s)| s.as_var() == Some(&x)).count();
            let (lo, ro) = (count(&e.lhs), count(&e.rhs));
            for k in 0..snapshot {
                if self.done() {
                    return;
                }
                // Oversized instances are refused by `offer`; skip building them.
                let grow = self.pool_sizes[k] - 1;
                if (ls + lo * grow).max(rs + ro * grow) > self.cap {
                    if !self.charge() {
                        return;
                    }
                    continue;
                }
                let c = self.pool[k].clone();
                if c.as_var() == Some(&x) {
                    continue;
                }
                let out = Equation::new(e.lhs.subst_var(&x, &c), e.rhs.subst_var(&x, &c));
                self.offer(out, Make::Inst(ci, x.clone(), c));
            }
        }
    }

    fn go(mut self) -> Option<EqDerivation> {
        for e in self.p.equations() {
            self.offer(e.clone(), Make::Axiom(e.clone()));
        }
        let mut pos = 0;
        while !self.done() && pos < self.clauses.len() {
            self.process(pos);
            pos += 1;
        }
        self.found.map(|i| self.b.extract(i))
    }
}

/// Iterative deepening over the term-size cap. Each run is deterministic
/// and a run with more steps extends a run with fewer, so a goal found at
/// some budget is found at every larger one.
pub(crate) fn saturate(p: &Program, goal: Goal<'_>, b: &SearchBudget) -> Option<EqDerivation> {
    let start = goal.min_cap().max(1);
    (start..=b.max_term_size).find_map(|cap| Run::new(p, goal, cap, b.max_steps).go())
}

/// Search for an equational derivation of `goal` from `p` within `b`.
pub fn derive_bounded(p: &Program, goal: &Equation, b: &SearchBudget) -> Option<EqDerivation> {
    if p.foreign_symbol(&goal.lhs).is_some() || p.foreign_symbol(&goal.rhs).is_some() {
        return None;
    }
    if goal.lhs == goal.rhs {
        let mut builder = DerivationBuilder::new();
        let i = builder.refl(&goal.lhs);
        return Some(builder.extract(i));
    }
    saturate(p, Goal::Equation(goal), b)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoherenceProbe {
    Incoherent { witness: EqDerivation, equation: Equation },
    /// No equation between distinct numerals was derived within the budget.
    NoWitnessWithin(SearchBudget),
}

impl CoherenceProbe {
    pub fn is_incoherent(&self) -> bool {
        matches!(self, CoherenceProbe::Incoherent { .. })
    }
}

/// Look for a derivation of `m = n` with `m != n`. Never concludes coherence.
pub fn coherence_probe(p: &Program, b: &SearchBudget) -> CoherenceProbe {
    match saturate(p, Goal::DistinctNumerals, b) {
        Some(witness) => {
            let equation = super::check_eq_derivation(p, &witness)
                .conclusion()
                .cloned()
                .expect("search produces valid derivations");
            CoherenceProbe::Incoherent { witness, equation }
        }
        None => CoherenceProbe::NoWitnessWithin(*b),
    }
}
