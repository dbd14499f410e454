//! The plain set-sharing domain: sharing sets over a variable domain,
//! abstract unification and the top-down project / augment / extend.

use crate::error::DomainError;
use crate::groups::GroupSet;
use crate::notation::{render_groups, VarNames};
use crate::syntax::Term;
use crate::varset::{Var, VarSet};

/// A set of sharing groups over the variables in `domain`.
///
/// The empty set means every variable of the domain is ground; unreachable
/// states are represented one level up, by the `Bottom` substitution.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct SharingSet {
    domain: VarSet,
    groups: GroupSet,
}

impl SharingSet {
    /// # Panics
    /// If a group is not contained in the domain.
    pub fn new(domain: VarSet, groups: GroupSet) -> Self {
        assert!(
            groups.iter().all(|g| g.is_subset(domain)),
            "sharing group outside of domain"
        );
        SharingSet { domain, groups }
    }

    /// Domain taken as the union of the groups.
    pub fn from_groups(groups: GroupSet) -> Self {
        SharingSet {
            domain: groups.vars(),
            groups,
        }
    }

    pub fn empty(domain: VarSet) -> Self {
        SharingSet {
            domain,
            groups: GroupSet::new(),
        }
    }

    /// Worst case: every nonempty subset of `vars`.
    pub fn top(vars: VarSet) -> Self {
        SharingSet {
            domain: vars,
            groups: GroupSet::powerset(vars),
        }
    }

    pub fn domain(&self) -> VarSet {
        self.domain
    }

    pub fn groups(&self) -> &GroupSet {
        &self.groups
    }

    pub fn into_groups(self) -> GroupSet {
        self.groups
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    /// Variables of the domain occurring in no group.
    pub fn ground_vars(&self) -> VarSet {
        self.domain.difference(self.groups.vars())
    }

    pub fn rel(&self, vars: VarSet) -> GroupSet {
        self.groups.rel(vars)
    }

    pub fn irrel(&self, vars: VarSet) -> GroupSet {
        self.groups.irrel(vars)
    }

    /// `irrel(xt) ∪ (sh_x* bin sh_t*)`
    pub fn amgu(&self, x: Var, t: &Term) -> SharingSet {
        let xt = t.vars().union(VarSet::singleton(x));
        let sh_x = self.rel(VarSet::singleton(x));
        let sh_t = self.rel(t.vars());
        let groups = self.irrel(xt).union(&sh_x.star().bin(&sh_t.star()));
        SharingSet {
            domain: self.domain,
            groups,
        }
    }

    /// Projection onto `vars`; the result ranges over `vars ∩ domain`.
    pub fn project(&self, vars: VarSet) -> SharingSet {
        SharingSet {
            domain: vars.intersection(self.domain),
            groups: self.groups.project(vars),
        }
    }

    /// Adds `vars` as fresh, independent variables.
    pub fn augment(&self, vars: VarSet) -> Result<SharingSet, DomainError> {
        if vars.meets(self.domain) {
            return Err(DomainError::NotFresh(vars.intersection(self.domain)));
        }
        Ok(SharingSet {
            domain: self.domain.union(vars),
            groups: self.groups.union(&GroupSet::singletons(vars)),
        })
    }

    /// Success of a goal with variables `g` under `self`, given its success
    /// substitution `prime` on `g`.
    pub fn extend(&self, g: VarSet, prime: &SharingSet) -> SharingSet {
        let star = self.rel(g).star();
        let kept = star.filter(|s| prime.groups.contains(s.intersection(g)));
        SharingSet {
            domain: self.domain,
            groups: self.irrel(g).union(&kept),
        }
    }

    pub fn lub(&self, other: &SharingSet) -> SharingSet {
        SharingSet {
            domain: self.domain.union(other.domain),
            groups: self.groups.union(&other.groups),
        }
    }

    pub fn leq(&self, other: &SharingSet) -> bool {
        self.groups.is_subset(&other.groups)
    }

    pub fn rename(&self, f: impl Fn(Var) -> Var) -> SharingSet {
        SharingSet {
            domain: self.domain.map(&f),
            groups: self.groups.rename(f),
        }
    }

    pub fn render(&self, names: &(impl VarNames + ?Sized)) -> String {
        render_groups(&self.groups, names)
    }
}
