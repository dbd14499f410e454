//! Syntactic unification with occur-check, producing solved-form equation
//! sets.

use std::collections::BTreeMap;

use crate::syntax::term::Term;
use crate::varset::{Var, VarSet};

/// Equations `x = t` in solved form: every left-hand variable occurs once
/// as a left-hand side and in no right-hand side.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct EquationSet {
    bindings: BTreeMap<Var, Term>,
}

impl EquationSet {
    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    /// Bindings in variable order.
    pub fn iter(&self) -> impl Iterator<Item = (Var, &Term)> {
        self.bindings.iter().map(|(v, t)| (*v, t))
    }

    pub fn get(&self, v: Var) -> Option<&Term> {
        self.bindings.get(&v)
    }

    /// Applies the (idempotent) substitution.
    pub fn apply(&self, t: &Term) -> Term {
        t.substitute(&|v| self.bindings.get(&v).cloned())
    }

    pub fn lhs_vars(&self) -> VarSet {
        self.bindings.keys().copied().collect()
    }

    /// Checks the solved-form invariant.
    pub fn is_solved(&self) -> bool {
        let lhs = self.lhs_vars();
        self.bindings.values().all(|t| !t.vars().meets(lhs))
    }
}

/// Computes the solved form of `t1 = t2`, or `None` when the terms do not
/// unify (functor clash, arity mismatch or occur-check failure).
pub fn solve(t1: &Term, t2: &Term) -> Option<EquationSet> {
    // Triangular bindings, resolved on lookup.
    let mut subst: BTreeMap<Var, Term> = BTreeMap::new();
    let mut stack: Vec<(Term, Term)> = vec![(t1.clone(), t2.clone())];

    fn walk(t: &Term, subst: &BTreeMap<Var, Term>) -> Term {
        let mut cur = t.clone();
        while let Term::Var(v) = cur {
            match subst.get(&v) {
                Some(next) => cur = next.clone(),
                None => break,
            }
        }
        cur
    }

    fn occurs(v: Var, t: &Term, subst: &BTreeMap<Var, Term>) -> bool {
        match walk(t, subst) {
            Term::Var(w) => w == v,
            Term::Compound { args, .. } => args.iter().any(|a| occurs(v, a, subst)),
        }
    }

    while let Some((a, b)) = stack.pop() {
        let a = walk(&a, &subst);
        let b = walk(&b, &subst);
        match (&a, &b) {
            (Term::Var(x), Term::Var(y)) if x == y => {}
            (Term::Var(x), other) | (other, Term::Var(x)) => {
                if occurs(*x, other, &subst) {
                    return None;
                }
                subst.insert(*x, other.clone());
            }
            (
                Term::Compound { functor: f, args: xs },
                Term::Compound { functor: g, args: ys },
            ) => {
                if f != g || xs.len() != ys.len() {
                    return None;
                }
                stack.extend(xs.iter().cloned().zip(ys.iter().cloned()));
            }
        }
    }

    fn resolve(t: &Term, subst: &BTreeMap<Var, Term>) -> Term {
        match walk(t, subst) {
            Term::Var(v) => Term::Var(v),
            Term::Compound { functor, args } => Term::Compound {
                functor,
                args: args.iter().map(|a| resolve(a, subst)).collect(),
            },
        }
    }

    let bindings = subst
        .keys()
        .map(|&v| (v, resolve(&Term::Var(v), &subst)))
        .collect();
    let eqs = EquationSet { bindings };
    debug_assert!(eqs.is_solved());
    Some(eqs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parser::parse_term;

    /// Parses two terms sharing one variable namespace.
    fn pair(a: &str, b: &str) -> (Term, Term) {
        let (t, _) = parse_term(&format!("pair({a}, {b})")).unwrap();
        (t.args()[0].clone(), t.args()[1].clone())
    }

    #[test]
    fn variable_to_variable() {
        let (a, b) = pair("p(X,Y)", "p(A,B)");
        let eqs = solve(&a, &b).unwrap();
        assert_eq!(eqs.len(), 2);
        assert_eq!(eqs.apply(&a), eqs.apply(&b));
    }

    #[test]
    fn functor_clash_fails() {
        let (a, b) = pair("f(a)", "f(b)");
        assert!(solve(&a, &b).is_none());
        let (a, b) = pair("f(a)", "f(a, b)");
        assert!(solve(&a, &b).is_none());
    }

    #[test]
    fn occur_check_fails() {
        let (a, b) = pair("X", "f(X)");
        assert!(solve(&a, &b).is_none());
        let (a, b) = pair("f(X, Y)", "f(Y, g(X))");
        assert!(solve(&a, &b).is_none());
    }

    #[test]
    fn solved_form_after_chains() {
        let (a, b) = pair("f(X, Y, Z)", "f(Y, Z, g(W))");
        let eqs = solve(&a, &b).unwrap();
        assert!(eqs.is_solved());
        assert_eq!(eqs.apply(&a), eqs.apply(&b));
    }
}
