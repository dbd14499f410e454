use std::fmt;
use std::sync::Arc;

use indexmap::IndexMap;

use crate::notation::VarNames;
use crate::varset::{Var, VarSet};

/// A first-order term. Predicate atoms and data terms share this
/// representation; atoms are compounds with no arguments.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(Var),
    Compound { functor: Arc<str>, args: Vec<Term> },
}

impl Term {
    pub fn var(v: Var) -> Term {
        Term::Var(v)
    }

    pub fn atom(name: &str) -> Term {
        Term::Compound {
            functor: Arc::from(name),
            args: Vec::new(),
        }
    }

    pub fn compound(name: &str, args: Vec<Term>) -> Term {
        Term::Compound {
            functor: Arc::from(name),
            args,
        }
    }

    pub fn as_var(&self) -> Option<Var> {
        match self {
            Term::Var(v) => Some(*v),
            Term::Compound { .. } => None,
        }
    }

    pub fn functor(&self) -> Option<&str> {
        match self {
            Term::Var(_) => None,
            Term::Compound { functor, .. } => Some(functor),
        }
    }

    pub fn arity(&self) -> usize {
        match self {
            Term::Var(_) => 0,
            Term::Compound { args, .. } => args.len(),
        }
    }

    pub fn args(&self) -> &[Term] {
        match self {
            Term::Var(_) => &[],
            Term::Compound { args, .. } => args,
        }
    }

    /// Predicate indicator of an atom; `None` for variables.
    pub fn pred_key(&self) -> Option<PredKey> {
        match self {
            Term::Var(_) => None,
            Term::Compound { functor, args } => Some(PredKey::new(functor, args.len())),
        }
    }

    /// The set of variables occurring in the term.
    pub fn vars(&self) -> VarSet {
        let mut acc = VarSet::EMPTY;
        self.visit_vars(&mut |v| acc.insert(v));
        acc
    }

    /// Variables in order of first occurrence (left to right, depth first).
    pub fn var_list(&self) -> Vec<Var> {
        let mut out = Vec::new();
        let mut seen = VarSet::EMPTY;
        self.visit_vars(&mut |v| {
            if !seen.contains(v) {
                seen.insert(v);
                out.push(v);
            }
        });
        out
    }

    pub fn visit_vars(&self, f: &mut impl FnMut(Var)) {
        match self {
            Term::Var(v) => f(*v),
            Term::Compound { args, .. } => {
                for a in args {
                    a.visit_vars(f);
                }
            }
        }
    }

    /// True when no variable occurs twice.
    pub fn is_linear(&self) -> bool {
        let mut seen = VarSet::EMPTY;
        let mut linear = true;
        self.visit_vars(&mut |v| {
            if seen.contains(v) {
                linear = false;
            }
            seen.insert(v);
        });
        linear
    }

    pub fn occurs(&self, v: Var) -> bool {
        match self {
            Term::Var(w) => *w == v,
            Term::Compound { args, .. } => args.iter().any(|a| a.occurs(v)),
        }
    }

    pub fn is_ground(&self) -> bool {
        self.vars().is_empty()
    }

    pub fn rename(&self, f: &impl Fn(Var) -> Var) -> Term {
        match self {
            Term::Var(v) => Term::Var(f(*v)),
            Term::Compound { functor, args } => Term::Compound {
                functor: functor.clone(),
                args: args.iter().map(|a| a.rename(f)).collect(),
            },
        }
    }

    /// Replaces variables by terms; unmapped variables stay.
    pub fn substitute(&self, f: &impl Fn(Var) -> Option<Term>) -> Term {
        match self {
            Term::Var(v) => f(*v).unwrap_or(Term::Var(*v)),
            Term::Compound { functor, args } => Term::Compound {
                functor: functor.clone(),
                args: args.iter().map(|a| a.substitute(f)).collect(),
            },
        }
    }

    pub fn display<'a, N: VarNames + ?Sized>(&'a self, names: &'a N) -> TermDisplay<'a, N> {
        TermDisplay { term: self, names }
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = |v: Var| format!("_{}", v.0);
        write!(f, "{}", self.display(&names))
    }
}

pub struct TermDisplay<'a, N: VarNames + ?Sized> {
    term: &'a Term,
    names: &'a N,
}

impl<N: VarNames + ?Sized> fmt::Display for TermDisplay<'_, N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go<N: VarNames + ?Sized>(
            t: &Term,
            names: &N,
            f: &mut fmt::Formatter<'_>,
        ) -> fmt::Result {
            match t {
                Term::Var(v) => write!(f, "{}", names.name(*v)),
                Term::Compound { functor, args } if &**functor == "." && args.len() == 2 => {
                    write!(f, "[")?;
                    go(&args[0], names, f)?;
                    let mut rest = &args[1];
                    loop {
                        match rest {
                            Term::Compound { functor, args }
                                if &**functor == "." && args.len() == 2 =>
                            {
                                write!(f, ",")?;
                                go(&args[0], names, f)?;
                                rest = &args[1];
                            }
                            Term::Compound { functor, args }
                                if &**functor == "[]" && args.is_empty() =>
                            {
                                break
                            }
                            other => {
                                write!(f, "|")?;
                                go(other, names, f)?;
                                break;
                            }
                        }
                    }
                    write!(f, "]")
                }
                Term::Compound { functor, args } => {
                    write!(f, "{functor}")?;
                    if !args.is_empty() {
                        write!(f, "(")?;
                        for (i, a) in args.iter().enumerate() {
                            if i > 0 {
                                write!(f, ",")?;
                            }
                            go(a, names, f)?;
                        }
                        write!(f, ")")?;
                    }
                    Ok(())
                }
            }
        }
        go(self.term, self.names, f)
    }
}

/// Predicate indicator `name/arity`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct PredKey {
    pub name: Arc<str>,
    pub arity: usize,
}

impl PredKey {
    pub fn new(name: &str, arity: usize) -> Self {
        PredKey {
            name: Arc::from(name),
            arity,
        }
    }
}

impl fmt::Display for PredKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.name, self.arity)
    }
}

/// `head :- body`, with variables interned as `0..names.len()`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Clause {
    pub head: Term,
    pub body: Vec<Term>,
    /// Display name per variable id.
    pub names: Vec<String>,
}

impl Clause {
    pub fn vars(&self) -> VarSet {
        self.body
            .iter()
            .fold(self.head.vars(), |acc, b| acc.union(b.vars()))
    }

    /// Variables of the body that do not occur in the head.
    pub fn body_only_vars(&self) -> VarSet {
        let body = self.body.iter().fold(VarSet::EMPTY, |a, b| a.union(b.vars()));
        body.difference(self.head.vars())
    }

    /// Number of variable ids the clause uses (`max id + 1`).
    pub fn var_count(&self) -> usize {
        self.vars().max().map_or(0, |v| v.index() + 1).max(self.names.len())
    }

    /// Renames every variable to a fresh id disjoint from `taken`.
    ///
    /// Ids are shifted past the largest taken id, so repeated renaming
    /// against the accumulated set yields pairwise disjoint clauses.
    pub fn rename_apart(&self, taken: VarSet) -> Clause {
        let offset = taken.max().map_or(0, |v| v.0 + 1);
        let shift = |v: Var| Var(v.0 + offset);
        let mut names = vec![String::new(); offset as usize];
        names.extend(self.names.iter().map(|n| format!("{n}{}", offset.max(1))));
        for (i, n) in names.iter_mut().enumerate().take(offset as usize) {
            *n = format!("_{i}");
        }
        Clause {
            head: self.head.rename(&shift),
            body: self.body.iter().map(|b| b.rename(&shift)).collect(),
            names,
        }
    }

    pub fn display(&self) -> String {
        let head = self.head.display(&self.names).to_string();
        if self.body.is_empty() {
            format!("{head}.")
        } else {
            let body: Vec<String> = self
                .body
                .iter()
                .map(|b| b.display(&self.names).to_string())
                .collect();
            format!("{head} :- {}.", body.join(", "))
        }
    }
}

/// A `:- entry Goal : Modes.` declaration.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct EntryDecl {
    pub goal: Term,
    pub names: Vec<String>,
    /// Variables annotated `ground(V)`.
    pub ground: VarSet,
    /// Variables annotated `free(V)`.
    pub free: VarSet,
}

impl EntryDecl {
    pub fn display(&self) -> String {
        let mut s = self.goal.display(&self.names).to_string();
        let mut modes: Vec<String> = Vec::new();
        modes.extend(self.ground.iter().map(|v| format!("ground({})", self.names.name(v))));
        modes.extend(self.free.iter().map(|v| format!("free({})", self.names.name(v))));
        if !modes.is_empty() {
            s.push_str(" : ");
            s.push_str(&modes.join(", "));
        }
        s
    }
}

#[derive(Clone, Debug, Default)]
pub struct Program {
    pub predicates: IndexMap<PredKey, Vec<Clause>>,
    pub entries: Vec<EntryDecl>,
}

impl Program {
    pub fn clauses(&self, key: &PredKey) -> Option<&[Clause]> {
        self.predicates.get(key).map(Vec::as_slice)
    }

    pub fn clause_count(&self) -> usize {
        self.predicates.values().map(Vec::len).sum()
    }
}
