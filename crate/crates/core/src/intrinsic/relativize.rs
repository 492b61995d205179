use crate::syntax::{Formula, Path, Term};

/// Guard every quantifier with the data predicate:
/// `forall x B` becomes `forall x (N(x) -> B)` and `exists x B` becomes
/// `exists x (N(x) & B)`.
pub fn relativize(a: &Formula) -> Formula {
    match a {
        Formula::Eq(..) | Formula::Nat(_) | Formula::False => a.clone(),
        Formula::And(l, r) => Formula::and(relativize(l), relativize(r)),
        Formula::Or(l, r) => Formula::or(relativize(l), relativize(r)),
        Formula::Imp(l, r) => Formula::imp(relativize(l), relativize(r)),
        Formula::Forall(x, b) => {
            Formula::forall(x, Formula::imp(Formula::nat(Term::Var(x.clone())), relativize(b)))
        }
        Formula::Exists(x, b) => {
            Formula::exists(x, Formula::and(Formula::nat(Term::Var(x.clone())), relativize(b)))
        }
    }
}

fn guard_of(x: &str, g: &Formula) -> bool {
    matches!(g, Formula::Nat(Term::Var(v)) if &**v == x)
}

/// Invert [`relativize`]; `None` when some quantifier is unguarded or an
/// `N` atom occurs outside a guard.
pub fn unguard(a: &Formula) -> Option<Formula> {
    Some(match a {
        Formula::Eq(..) | Formula::False => a.clone(),
        Formula::Nat(_) => return None,
        Formula::And(l, r) => Formula::and(unguard(l)?, unguard(r)?),
        Formula::Or(l, r) => Formula::or(unguard(l)?, unguard(r)?),
        Formula::Imp(l, r) => Formula::imp(unguard(l)?, unguard(r)?),
        Formula::Forall(x, b) => match &**b {
            Formula::Imp(g, body) if guard_of(x, g) => Formula::forall(x, unguard(body)?),
            _ => return None,
        },
        Formula::Exists(x, b) => match &**b {
            Formula::And(g, body) if guard_of(x, g) => Formula::exists(x, unguard(body)?),
            _ => return None,
        },
    })
}

/// Every quantifier is guarded by `N` of its bound variable.
pub fn is_relativized(a: &Formula) -> bool {
    unguard(a).is_some()
}

/// The position in `relativize(a)` corresponding to `path` in `a`.
pub fn relativized_path(a: &Formula, path: &[usize]) -> Path {
    let Some((&first, rest)) = path.split_first() else {
        return Vec::new();
    };
    match a {
        Formula::Forall(_, b) | Formula::Exists(_, b) => {
            let mut out = vec![0, 1];
            out.extend(relativized_path(b, rest));
            out
        }
        Formula::And(l, r) | Formula::Or(l, r) | Formula::Imp(l, r) => {
            let mut out = vec![first];
            out.extend(relativized_path(if first == 0 { l } else { r }, rest));
            out
        }
        _ => path.to_vec(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::separation_succ;
    use crate::syntax::parse_formula;

    #[test]
    fn totality_formula() {
        let a = parse_formula("forall x exists y f(x) = y").unwrap();
        let r = relativize(&a);
        assert_eq!(r, parse_formula("forall x (N(x) -> exists y (N(y) & f(x) = y))").unwrap());
        assert!(is_relativized(&r));
        assert_eq!(unguard(&r), Some(a));
    }

    #[test]
    fn quantifier_free_is_fixed() {
        let a = parse_formula("S(x) = 0 -> false").unwrap();
        assert_eq!(relativize(&a), a);
    }

    #[test]
    fn separation_closure() {
        let r = relativize(&separation_succ());
        assert_eq!(r, parse_formula("forall x (N(x) -> forall y (N(y) -> (S(x) = S(y) -> x = y)))").unwrap());
        assert!(is_relativized(&r));
        assert!(!is_relativized(&separation_succ()));
    }

    #[test]
    fn paths_follow_guards() {
        let a = parse_formula("forall x (f(x) = 0 & exists y g(y) = x)").unwrap();
        let r = relativize(&a);
        let p = vec![0, 1, 0, 1];
        let q = relativized_path(&a, &p);
        assert_eq!(a.term_at(&p).unwrap().0, r.term_at(&q).unwrap().0);
    }
}
