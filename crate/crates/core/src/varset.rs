//! Program variables and fixed-width sets of them.

use std::fmt;

/// Maximum number of distinct variables a single abstract substitution can
/// range over.
pub const MAX_VARS: usize = 128;

/// An interned program variable. Ids are clause-local; the total order on
/// ids is the canonical order used for printing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize)]
pub struct Var(pub u32);

impl Var {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A set of variables stored as a bitmask over variable ids.
///
/// Used both for sharing groups / cliques (nonempty by convention) and for
/// plain variable sets such as domains and freeness components.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct VarSet(u128);

impl VarSet {
    pub const EMPTY: VarSet = VarSet(0);

    #[inline]
    pub const fn from_bits(bits: u128) -> Self {
        VarSet(bits)
    }

    #[inline]
    pub const fn bits(self) -> u128 {
        self.0
    }

    /// # Panics
    /// If the variable id does not fit in the bitmask.
    #[inline]
    pub fn singleton(v: Var) -> Self {
        assert!(v.index() < MAX_VARS, "variable id {} out of range", v.0);
        VarSet(1u128 << v.0)
    }

    /// The set `{0, .., n-1}`.
    pub fn first_n(n: usize) -> Self {
        assert!(n <= MAX_VARS);
        if n == MAX_VARS {
            VarSet(u128::MAX)
        } else {
            VarSet((1u128 << n) - 1)
        }
    }

    #[inline]
    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    #[inline]
    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    #[inline]
    pub fn contains(self, v: Var) -> bool {
        v.index() < MAX_VARS && self.0 & (1u128 << v.0) != 0
    }

    #[inline]
    pub fn insert(&mut self, v: Var) {
        *self = self.union(VarSet::singleton(v));
    }

    #[inline]
    pub fn remove(&mut self, v: Var) {
        if v.index() < MAX_VARS {
            self.0 &= !(1u128 << v.0);
        }
    }

    #[inline]
    pub fn union(self, other: VarSet) -> VarSet {
        VarSet(self.0 | other.0)
    }

    #[inline]
    pub fn intersection(self, other: VarSet) -> VarSet {
        VarSet(self.0 & other.0)
    }

    #[inline]
    pub fn difference(self, other: VarSet) -> VarSet {
        VarSet(self.0 & !other.0)
    }

    #[inline]
    pub fn meets(self, other: VarSet) -> bool {
        self.0 & other.0 != 0
    }

    #[inline]
    pub fn is_subset(self, other: VarSet) -> bool {
        self.0 & !other.0 == 0
    }

    #[inline]
    pub fn is_proper_subset(self, other: VarSet) -> bool {
        self != other && self.is_subset(other)
    }

    pub fn min(self) -> Option<Var> {
        if self.0 == 0 {
            None
        } else {
            Some(Var(self.0.trailing_zeros()))
        }
    }

    pub fn max(self) -> Option<Var> {
        if self.0 == 0 {
            None
        } else {
            Some(Var(127 - self.0.leading_zeros()))
        }
    }

    pub fn iter(self) -> VarSetIter {
        VarSetIter(self.0)
    }

    /// Every subset of `self` (including the empty set), in increasing
    /// bitmask order restricted to `self`.
    pub fn subsets(self) -> Subsets {
        Subsets {
            mask: self.0,
            next: Some(0),
        }
    }

    /// Every nonempty subset of `self`.
    pub fn nonempty_subsets(self) -> impl Iterator<Item = VarSet> {
        self.subsets().filter(|s| !s.is_empty())
    }

    /// Applies a variable mapping elementwise.
    pub fn map(self, mut f: impl FnMut(Var) -> Var) -> VarSet {
        self.iter().map(&mut f).collect()
    }

    /// Lexicographic comparison of the ascending element sequences, which is
    /// the order used when printing groups (`x < xy < xyz < xz < y`).
    pub fn cmp_lex(self, other: VarSet) -> std::cmp::Ordering {
        use std::cmp::Ordering::*;
        let diff = self.0 ^ other.0;
        if diff == 0 {
            return Equal;
        }
        let low = diff.trailing_zeros();
        let above = if low == 127 { 0 } else { u128::MAX << (low + 1) };
        let (with, without) = if self.0 & (1u128 << low) != 0 {
            (self, other)
        } else {
            (other, self)
        };
        // `without` continues past the shared prefix with a larger element,
        // or stops there.
        let with_first = without.0 & above != 0;
        let ord = if with_first { Less } else { Greater };
        if with.0 == self.0 {
            ord
        } else {
            ord.reverse()
        }
    }
}

impl fmt::Debug for VarSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter().map(|v| v.0)).finish()
    }
}

impl FromIterator<Var> for VarSet {
    fn from_iter<I: IntoIterator<Item = Var>>(iter: I) -> Self {
        iter.into_iter()
            .fold(VarSet::EMPTY, |acc, v| acc.union(VarSet::singleton(v)))
    }
}

impl From<Var> for VarSet {
    fn from(v: Var) -> Self {
        VarSet::singleton(v)
    }
}

pub struct VarSetIter(u128);

impl Iterator for VarSetIter {
    type Item = Var;

    #[inline]
    fn next(&mut self) -> Option<Var> {
        if self.0 == 0 {
            return None;
        }
        let tz = self.0.trailing_zeros();
        self.0 &= self.0 - 1;
        Some(Var(tz))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for VarSetIter {}

/// Walks the subsets of a mask via `next = (cur - mask) & mask`.
pub struct Subsets {
    mask: u128,
    next: Option<u128>,
}

impl Iterator for Subsets {
    type Item = VarSet;

    fn next(&mut self) -> Option<VarSet> {
        let cur = self.next?;
        let succ = cur.wrapping_sub(self.mask) & self.mask;
        self.next = if succ == 0 { None } else { Some(succ) };
        Some(VarSet(cur))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(ids: &[u32]) -> VarSet {
        ids.iter().map(|&i| Var(i)).collect()
    }

    #[test]
    fn basic_ops() {
        let a = set(&[0, 2, 5]);
        assert_eq!(a.len(), 3);
        assert!(a.contains(Var(2)));
        assert!(!a.contains(Var(1)));
        assert!(!a.contains(Var(500)));
        assert_eq!(a.min(), Some(Var(0)));
        assert_eq!(a.max(), Some(Var(5)));
        assert_eq!(a.iter().collect::<Vec<_>>(), vec![Var(0), Var(2), Var(5)]);
        assert!(set(&[2]).is_proper_subset(a));
        assert!(!a.is_proper_subset(a));
        assert_eq!(VarSet::singleton(Var(127)).max(), Some(Var(127)));
    }

    #[test]
    fn subsets_enumerates_powerset() {
        let a = set(&[1, 3, 4]);
        let subs: Vec<_> = a.subsets().collect();
        assert_eq!(subs.len(), 8);
        assert!(subs.iter().all(|s| s.is_subset(a)));
        assert_eq!(a.nonempty_subsets().count(), 7);
        assert_eq!(VarSet::EMPTY.subsets().count(), 1);
    }

    #[test]
    fn lexicographic_order() {
        // x=0, y=1, z=2
        let mut groups = vec![set(&[1]), set(&[0, 2]), set(&[0, 1, 2]), set(&[0]), set(&[0, 1])];
        groups.sort_by(|a, b| a.cmp_lex(*b));
        assert_eq!(
            groups,
            vec![set(&[0]), set(&[0, 1]), set(&[0, 1, 2]), set(&[0, 2]), set(&[1])]
        );
    }

    proptest::proptest! {
        #[test]
        fn cmp_lex_matches_sequence_order(a in 0u128..1024, b in 0u128..1024) {
            let (a, b) = (VarSet::from_bits(a), VarSet::from_bits(b));
            let sa: Vec<_> = a.iter().collect();
            let sb: Vec<_> = b.iter().collect();
            proptest::prop_assert_eq!(a.cmp_lex(b), sa.cmp(&sb));
        }
    }
}
