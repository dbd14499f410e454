//! Families of variable sets: the carrier for both sharing sets and clique
//! sets, with the set-of-sets primitives they share.

use std::collections::HashSet;

use crate::varset::{Var, VarSet};

/// A canonical (sorted, duplicate-free) family of nonempty variable sets.
///
/// Elements are ordered by bitmask value. Empty sets are never stored.
#[derive(Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct GroupSet(Vec<VarSet>);

impl GroupSet {
    pub fn new() -> Self {
        GroupSet(Vec::new())
    }

    pub fn singleton(g: VarSet) -> Self {
        std::iter::once(g).collect()
    }

    /// `{ {v} | v ∈ vars }`
    pub fn singletons(vars: VarSet) -> Self {
        vars.iter().map(VarSet::singleton).collect()
    }

    /// All nonempty subsets of `vars`.
    pub fn powerset(vars: VarSet) -> Self {
        vars.nonempty_subsets().collect()
    }

    fn from_sorted_unchecked(v: Vec<VarSet>) -> Self {
        debug_assert!(v.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(v.iter().all(|g| !g.is_empty()));
        GroupSet(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::iter::Copied<std::slice::Iter<'_, VarSet>> {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[VarSet] {
        &self.0
    }

    pub fn contains(&self, g: VarSet) -> bool {
        self.0.binary_search(&g).is_ok()
    }

    pub fn insert(&mut self, g: VarSet) -> bool {
        if g.is_empty() {
            return false;
        }
        match self.0.binary_search(&g) {
            Ok(_) => false,
            Err(pos) => {
                self.0.insert(pos, g);
                true
            }
        }
    }

    /// Union of every member.
    pub fn vars(&self) -> VarSet {
        self.iter().fold(VarSet::EMPTY, VarSet::union)
    }

    pub fn union(&self, other: &GroupSet) -> GroupSet {
        let mut out = Vec::with_capacity(self.len() + other.len());
        let (mut a, mut b) = (self.0.iter().peekable(), other.0.iter().peekable());
        loop {
            match (a.peek(), b.peek()) {
                (Some(&&x), Some(&&y)) => {
                    if x < y {
                        out.push(x);
                        a.next();
                    } else if y < x {
                        out.push(y);
                        b.next();
                    } else {
                        out.push(x);
                        a.next();
                        b.next();
                    }
                }
                (Some(&&x), None) => {
                    out.push(x);
                    a.next();
                }
                (None, Some(&&y)) => {
                    out.push(y);
                    b.next();
                }
                (None, None) => break,
            }
        }
        GroupSet::from_sorted_unchecked(out)
    }

    pub fn difference(&self, other: &GroupSet) -> GroupSet {
        self.filter(|g| !other.contains(g))
    }

    pub fn is_subset(&self, other: &GroupSet) -> bool {
        self.len() <= other.len() && self.iter().all(|g| other.contains(g))
    }

    pub fn filter(&self, mut keep: impl FnMut(VarSet) -> bool) -> GroupSet {
        GroupSet::from_sorted_unchecked(self.iter().filter(|&g| keep(g)).collect())
    }

    /// Maps every member, dropping empty images.
    pub fn map(&self, f: impl FnMut(VarSet) -> VarSet) -> GroupSet {
        self.iter().map(f).collect()
    }

    /// Members meeting `vars` (the relevance filter `sh_t`).
    pub fn rel(&self, vars: VarSet) -> GroupSet {
        self.filter(|g| g.meets(vars))
    }

    /// Members disjoint from `vars` (the complement of [`GroupSet::rel`]).
    pub fn irrel(&self, vars: VarSet) -> GroupSet {
        self.filter(|g| !g.meets(vars))
    }

    /// Members containing `v`.
    pub fn containing(&self, v: Var) -> GroupSet {
        self.filter(|g| g.contains(v))
    }

    /// `{ g ∩ vars | g ∈ self } \ {∅}`
    pub fn project(&self, vars: VarSet) -> GroupSet {
        self.map(|g| g.intersection(vars))
    }

    /// `{ g \ vars | g ∈ self } \ {∅}`: the clique removal used when the
    /// variables in `vars` become ground.
    pub fn rel_bar(&self, vars: VarSet) -> GroupSet {
        self.map(|g| g.difference(vars))
    }

    /// Binary union: `{ g1 ∪ g2 | g1 ∈ self, g2 ∈ other }`.
    pub fn bin(&self, other: &GroupSet) -> GroupSet {
        let mut out = HashSet::with_capacity(self.len() * other.len());
        for a in self.iter() {
            for b in other.iter() {
                out.insert(a.union(b));
            }
        }
        out.into_iter().collect()
    }

    /// Star union: the closure of `self` under pairwise union.
    ///
    /// Worklist over generators: after processing generators `g1..gk` the
    /// accumulator holds every nonempty union of a subset of them.
    pub fn star(&self) -> GroupSet {
        let mut closed: HashSet<VarSet> = HashSet::with_capacity(self.len() * 2);
        let mut order: Vec<VarSet> = Vec::with_capacity(self.len() * 2);
        for g in self.iter() {
            if closed.contains(&g) {
                // Already generated; unions with it are already present.
                continue;
            }
            let existing = order.len();
            closed.insert(g);
            order.push(g);
            for i in 0..existing {
                let u = order[i].union(g);
                if closed.insert(u) {
                    order.push(u);
                }
            }
        }
        order.into_iter().collect()
    }

    /// Keeps only the maximal members (no member is a proper subset of
    /// another).
    pub fn maximal(&self) -> GroupSet {
        GroupSet::maximal_of(self.0.clone()).into_iter().collect()
    }

    /// Maximal members of an arbitrary list of sets, duplicates removed.
    pub fn maximal_of(mut sets: Vec<VarSet>) -> Vec<VarSet> {
        // Larger sets first so each candidate is only checked against
        // already-kept supersets.
        sets.sort_by_key(|g| std::cmp::Reverse(g.len()));
        let mut kept: Vec<VarSet> = Vec::new();
        for g in sets {
            if !kept.iter().any(|k| g.is_subset(*k)) {
                kept.push(g);
            }
        }
        kept
    }

    /// True when `g` is a subset of some member.
    pub fn covers(&self, g: VarSet) -> bool {
        self.iter().any(|c| g.is_subset(c))
    }

    /// Renames every variable; the mapping must be injective on the
    /// variables that occur.
    pub fn rename(&self, f: impl Fn(Var) -> Var) -> GroupSet {
        self.map(|g| g.map(&f))
    }

    /// Groups sorted in printing order.
    pub fn lex_sorted(&self) -> Vec<VarSet> {
        let mut v = self.0.clone();
        v.sort_by(|a, b| a.cmp_lex(*b));
        v
    }
}

impl FromIterator<VarSet> for GroupSet {
    fn from_iter<I: IntoIterator<Item = VarSet>>(iter: I) -> Self {
        let mut v: Vec<VarSet> = iter.into_iter().filter(|g| !g.is_empty()).collect();
        v.sort_unstable();
        v.dedup();
        GroupSet(v)
    }
}

impl Extend<VarSet> for GroupSet {
    fn extend<I: IntoIterator<Item = VarSet>>(&mut self, iter: I) {
        let more: GroupSet = iter.into_iter().collect();
        *self = self.union(&more);
    }
}

impl IntoIterator for GroupSet {
    type Item = VarSet;
    type IntoIter = std::vec::IntoIter<VarSet>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.into_iter()
    }
}

impl<'a> IntoIterator for &'a GroupSet {
    type Item = VarSet;
    type IntoIter = std::iter::Copied<std::slice::Iter<'a, VarSet>>;

    fn into_iter(self) -> Self::IntoIter {
        self.iter()
    }
}

impl std::fmt::Debug for GroupSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", crate::notation::render_groups(self, &crate::notation::Letters))
    }
}
