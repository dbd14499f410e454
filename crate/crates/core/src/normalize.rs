//! Representation maintenance for clique pairs: minimization, clique
//! detection, regularization and the threshold widening.
//!
//! None of these except [`widen`] changes the represented sharing.

use serde::{Deserialize, Serialize};

use crate::clique::CliquePair;
use crate::error::DomainError;
use crate::groups::GroupSet;
use crate::varset::VarSet;

/// Places in the fixpoint where a clique pair may be normalized.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Site {
    Extend,
    Call2entry,
    Lub,
    Compare,
}

impl Site {
    pub const ALL: [Site; 4] = [Site::Extend, Site::Call2entry, Site::Lub, Site::Compare];

    pub fn name(self) -> &'static str {
        match self {
            Site::Extend => "extend",
            Site::Call2entry => "call2entry",
            Site::Lub => "lub",
            Site::Compare => "compare",
        }
    }

    pub fn parse(s: &str) -> Option<Site> {
        Site::ALL.into_iter().find(|site| site.name() == s)
    }
}

/// Where to normalize, and whether detection should over-approximate.
///
/// `extend` and `compare` are required for correctness and cannot be
/// switched off.
#[derive(Clone, Copy, PartialEq, Debug, Serialize, Deserialize)]
pub struct NormalizePolicy {
    pub at_call2entry: bool,
    pub at_lub: bool,
    /// Fraction in `(0, 1]`; `None` means exact detection.
    pub widening_threshold: Option<f64>,
}

impl Default for NormalizePolicy {
    fn default() -> Self {
        NormalizePolicy {
            at_call2entry: true,
            at_lub: false,
            widening_threshold: None,
        }
    }
}

impl NormalizePolicy {
    /// Only the mandatory sites.
    pub fn minimal() -> Self {
        NormalizePolicy {
            at_call2entry: false,
            at_lub: false,
            widening_threshold: None,
        }
    }

    /// Builds a policy from a list of sites; mandatory sites are implied.
    pub fn from_sites(sites: &[Site]) -> Self {
        NormalizePolicy {
            at_call2entry: sites.contains(&Site::Call2entry),
            at_lub: sites.contains(&Site::Lub),
            widening_threshold: None,
        }
    }

    pub fn applies_at(&self, site: Site) -> bool {
        match site {
            Site::Extend | Site::Compare => true,
            Site::Call2entry => self.at_call2entry,
            Site::Lub => self.at_lub,
        }
    }

    pub fn sites(&self) -> Vec<Site> {
        Site::ALL.into_iter().filter(|s| self.applies_at(*s)).collect()
    }

    /// Normalization (or widening, if a threshold is set) at `site`;
    /// the identity where the policy does not apply.
    pub fn apply(&self, site: Site, p: &CliquePair) -> CliquePair {
        if !self.applies_at(site) {
            return p.clone();
        }
        match self.widening_threshold {
            Some(t) if t < 1.0 => widen(p, t),
            _ => normalize(p),
        }
    }
}

/// Keeps only the maximal cliques.
pub fn regularize(cl: &GroupSet) -> GroupSet {
    cl.maximal()
}

/// Drops groups already represented by a clique.
pub fn minimize(p: &CliquePair) -> CliquePair {
    let sh = p.sh.filter(|s| !p.cl.covers(s));
    p.with_parts(p.cl.clone(), sh)
}

/// Number of nonempty subsets of `s` that lie inside some clique of `cl`.
///
/// Inclusion–exclusion over `I = { s ∩ C | C ∈ cl } \ {∅}`; every index
/// subset of `I` contributes its intersection, so equal intersections are
/// counted with multiplicity. Branches whose running intersection is empty
/// contribute nothing and are cut. Large `I` falls back to a direct downset
/// count, which yields the same number.
pub fn count_covered(s: VarSet, cl: &GroupSet) -> u128 {
    let items: Vec<VarSet> = cl
        .iter()
        .map(|c| c.intersection(s))
        .filter(|i| !i.is_empty())
        .collect();
    // Elements inside another element add nothing to the union.
    let kept = GroupSet::maximal_of(items);
    if kept.is_empty() {
        return 0;
    }
    if kept.len() > INCLUSION_EXCLUSION_LIMIT {
        return downset_size(&kept) - 1;
    }
    let total = inclusion_exclusion(&kept, 0, None, 0);
    u128::try_from(total).expect("inclusion-exclusion produced a negative count")
}

const INCLUSION_EXCLUSION_LIMIT: usize = 20;

/// Sum over nonempty index subsets `A ⊆ items[from..]` extending the
/// current choice (of size `depth`, intersection `acc`).
fn inclusion_exclusion(items: &[VarSet], from: usize, acc: Option<VarSet>, depth: u32) -> i128 {
    let mut total: i128 = 0;
    for (k, item) in items.iter().enumerate().skip(from) {
        let inter = acc.map_or(*item, |a| a.intersection(*item));
        if inter.is_empty() {
            continue;
        }
        let size = depth + 1;
        let term = (1i128 << inter.len()) - 1;
        if size % 2 == 1 {
            total = total.wrapping_add(term);
        } else {
            total = total.wrapping_sub(term);
        }
        total = total.wrapping_add(inclusion_exclusion(items, k + 1, Some(inter), size));
    }
    total
}

/// Number of sets (the empty set included) contained in some member of
/// `family`; 0 for an empty family.
pub fn downset_size(family: &[VarSet]) -> u128 {
    fn go(family: Vec<VarSet>) -> u128 {
        if family.is_empty() {
            return 0;
        }
        let maximal = GroupSet::maximal_of(family);
        if maximal.len() == 1 {
            return 1u128 << maximal[0].len();
        }
        let all = maximal.iter().fold(VarSet::EMPTY, |a, b| a.union(*b));
        let v = match all.min() {
            Some(v) => v,
            None => return 1,
        };
        let bit = VarSet::singleton(v);
        let without: Vec<VarSet> = maximal.iter().map(|m| m.difference(bit)).collect();
        let with: Vec<VarSet> = maximal
            .iter()
            .filter(|m| m.contains(v))
            .map(|m| m.difference(bit))
            .collect();
        go(without) + go(with)
    }
    go(family.to_vec())
}

/// Number of sharing groups represented by `p`, without enumerating them.
pub fn represented_count(p: &CliquePair) -> u128 {
    let cl: Vec<VarSet> = p.cl.iter().collect();
    let from_cliques = if cl.is_empty() { 0 } else { downset_size(&cl) - 1 };
    let extra = p.sh.iter().filter(|s| !p.cl.covers(*s)).count() as u128;
    from_cliques + extra
}

/// Exact clique detection. The input must be minimal: a redundant group
/// would be miscounted as missing.
pub fn detect_cliques(p: &CliquePair) -> Result<CliquePair, DomainError> {
    if !is_minimal(p) {
        return Err(DomainError::NotMinimal);
    }
    Ok(detect(p, None))
}

/// Clique detection that accepts a candidate once at least `threshold` of
/// its missing subsets are present. May add sharing.
///
/// # Panics
/// If `threshold` is outside `(0, 1]`.
pub fn widen(p: &CliquePair, threshold: f64) -> CliquePair {
    assert!(
        threshold > 0.0 && threshold <= 1.0,
        "widening threshold must lie in (0, 1]"
    );
    let p = minimize(&p.with_parts(regularize(&p.cl), p.sh.clone()));
    if threshold >= 1.0 {
        return detect(&p, None);
    }
    detect(&p, Some(threshold))
}

/// `detect_cliques(minimize(p))` with regular cliques.
pub fn normalize(p: &CliquePair) -> CliquePair {
    let p = minimize(&p.with_parts(regularize(&p.cl), p.sh.clone()));
    detect(&p, None)
}

pub fn is_minimal(p: &CliquePair) -> bool {
    p.sh.iter().all(|s| !p.cl.covers(s))
}

/// Checks the normalized property by scanning every candidate: no set `c`
/// with at least two variables has all its nonempty subsets represented
/// while one of them is an explicit group. Exponential in candidate size.
pub fn is_normalized(p: &CliquePair) -> bool {
    p.sh.iter().filter(|c| c.len() >= 2).all(|c| {
        let complete = c
            .nonempty_subsets()
            .all(|s| p.sh.contains(s) || p.cl.covers(s));
        !complete
    })
}

fn detect(p: &CliquePair, threshold: Option<f64>) -> CliquePair {
    let mut cl = p.cl.clone();
    let mut sh = p.sh.clone();
    let n = sh.len();
    if cl.is_empty() && n < 3 {
        return p.clone();
    }
    let largest = sh.iter().map(VarSet::len).max().unwrap_or(0);
    // Without cliques a candidate of size m needs all 2^m - 1 groups
    // present, which bounds the starting size.
    let mut i = if cl.is_empty() && threshold.is_none() {
        let mut m = 0;
        while m < 127 && (1u128 << (m + 1)) - 1 <= n as u128 {
            m += 1;
        }
        m.min(largest)
    } else {
        largest
    };
    while i > 1 {
        let candidates: Vec<VarSet> = sh.iter().filter(|s| s.len() == i).collect();
        for s in candidates {
            if !sh.contains(s) {
                continue;
            }
            let present = sh.iter().filter(|g| g.is_subset(s)).count() as f64;
            let missing = ((1u128 << i) - 1 - count_covered(s, &cl)) as f64;
            let accept = match threshold {
                None => present == missing,
                Some(t) => present + 1e-9 >= t * missing,
            };
            if accept {
                cl.insert(s);
                cl = cl.maximal();
                sh = sh.filter(|g| !g.is_subset(s));
            }
        }
        i -= 1;
    }
    p.with_parts(cl, sh)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::notation::{groups, vars};
    use crate::oracle;
    use proptest::prelude::*;

    fn pair(cl: &str, sh: &str) -> CliquePair {
        let (cl, sh) = (groups(cl), groups(sh));
        CliquePair::new(cl.vars().union(sh.vars()), cl, sh)
    }

    fn parts(p: &CliquePair) -> (GroupSet, GroupSet) {
        (p.cl.clone(), p.sh.clone())
    }

    #[test]
    fn minimize_examples() {
        assert_eq!(parts(&minimize(&pair("xy", "x, xy, z"))), (groups("xy"), groups("z")));
        assert_eq!(parts(&minimize(&pair("", "x, yz"))), (groups(""), groups("x, yz")));
        assert_eq!(parts(&minimize(&pair("xyz", "xy, z, u"))), (groups("xyz"), groups("u")));
    }

    #[test]
    fn count_covered_examples() {
        assert_eq!(count_covered(vars("xyz"), &groups("")), 0);
        assert_eq!(count_covered(vars("xyz"), &groups("xy")), 3);
        assert_eq!(count_covered(vars("xyz"), &groups("xy, yz")), 5);
    }

    #[test]
    fn detect_examples() {
        assert_eq!(parts(&detect_cliques(&pair("", "x, y, xy")).unwrap()), (groups("xy"), groups("")));
        assert_eq!(
            parts(&detect_cliques(&pair("xy", "xyz, xz, yz, z")).unwrap()),
            (groups("xyz"), groups(""))
        );
        assert_eq!(parts(&detect_cliques(&pair("", "x, y")).unwrap()), (groups(""), groups("x, y")));
        assert_eq!(detect_cliques(&pair("xy", "x")), Err(DomainError::NotMinimal));
    }

    #[test]
    fn regularize_examples() {
        assert_eq!(regularize(&groups("xy, xyz")), groups("xyz"));
        assert_eq!(regularize(&groups("xy, zu")), groups("xy, zu"));
        assert_eq!(regularize(&groups("x, xy, yz")), groups("xy, yz"));
    }

    #[test]
    fn normalize_examples() {
        let p = pair("xyz, xyzu, xyzv, xyzuv", "u, v, uv");
        assert_eq!(parts(&normalize(&p)), (groups("xyzuv"), groups("")));
        assert_eq!(parts(&normalize(&pair("", ""))), (groups(""), groups("")));
        let full = CliquePair::new(vars("xyz"), GroupSet::new(), GroupSet::powerset(vars("xyz")));
        assert_eq!(parts(&normalize(&full)), (groups("xyz"), groups("")));
    }

    #[test]
    fn widen_examples() {
        let p = pair("", "x, y, xy, xz, yz, xyz");
        assert_eq!(parts(&widen(&p, 6.0 / 7.0)), (groups("xyz"), groups("")));
        assert_eq!(widen(&p, 1.0), normalize(&p));
        assert_eq!(parts(&widen(&pair("", "x, y"), 0.1)), (groups(""), groups("x, y")));
    }

    #[test]
    fn policy_sites() {
        let d = NormalizePolicy::default();
        assert_eq!(d.sites(), vec![Site::Extend, Site::Call2entry, Site::Compare]);
        assert_eq!(NormalizePolicy::minimal().sites(), vec![Site::Extend, Site::Compare]);
        assert_eq!(Site::parse("lub"), Some(Site::Lub));
    }

    fn arb_pair(n: u32) -> impl Strategy<Value = CliquePair> {
        let set = 1u128..(1u128 << n);
        (
            proptest::collection::vec(set.clone(), 0..3),
            proptest::collection::vec(set, 0..12),
        )
            .prop_map(move |(cl, sh)| {
                CliquePair::new(
                    VarSet::first_n(n as usize),
                    cl.into_iter().map(VarSet::from_bits).collect(),
                    sh.into_iter().map(VarSet::from_bits).collect(),
                )
            })
    }

    proptest! {
        #[test]
        fn normalize_preserves_sharing(p in arb_pair(5)) {
            let e = oracle::expand(&p).unwrap();
            let n = normalize(&p);
            prop_assert_eq!(oracle::expand(&n).unwrap(), e.clone());
            prop_assert_eq!(oracle::expand(&minimize(&p)).unwrap(), e.clone());
            let r = p.with_parts(regularize(&p.cl), p.sh.clone());
            prop_assert_eq!(oracle::expand(&r).unwrap(), e);
            prop_assert!(is_normalized(&n));
            prop_assert_eq!(normalize(&n), n);
        }

        #[test]
        fn widen_is_extensive(p in arb_pair(5), t in 0.05f64..1.0) {
            let e = oracle::expand(&p).unwrap();
            let w = oracle::expand(&widen(&p, t)).unwrap();
            prop_assert!(e.is_subset(&w));
        }

        #[test]
        fn count_covered_matches_enumeration(s in 0u128..64, cl in proptest::collection::vec(1u128..64, 0..5)) {
            let s = VarSet::from_bits(s);
            let cl: GroupSet = cl.into_iter().map(VarSet::from_bits).collect();
            prop_assert_eq!(count_covered(s, &cl), oracle::count_covered(s, &cl));
        }

        #[test]
        fn represented_count_matches_expansion(p in arb_pair(5)) {
            prop_assert_eq!(represented_count(&p), oracle::expand(&p).unwrap().len() as u128);
        }
    }
}
