//! The Clique-Sharing domain: pairs `(cl, sh)` where every clique `C ∈ cl`
//! stands for all nonempty subsets of `C`.

use crate::error::DomainError;
use crate::groups::GroupSet;
use crate::normalize;
use crate::notation::{render_groups, VarNames};
use crate::sharing::SharingSet;
use crate::syntax::Term;
use crate::varset::{Var, VarSet};

/// Cliques larger than this are not enumerated by `clsh`; the clique itself
/// is emitted into the clique component instead.
pub const DEFAULT_CLSH_LIMIT: usize = 24;

/// A clique set plus a sharing set over a shared variable domain.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct CliquePair {
    domain: VarSet,
    pub cl: GroupSet,
    pub sh: GroupSet,
}

impl CliquePair {
    /// # Panics
    /// If a clique or group falls outside the domain.
    pub fn new(domain: VarSet, cl: GroupSet, sh: GroupSet) -> Self {
        assert!(
            cl.iter().chain(sh.iter()).all(|g| g.is_subset(domain)),
            "clique pair component outside of domain"
        );
        CliquePair { domain, cl, sh }
    }

    /// Embeds a plain sharing set with an empty clique component.
    pub fn from_sharing(sh: &SharingSet) -> Self {
        CliquePair {
            domain: sh.domain(),
            cl: GroupSet::new(),
            sh: sh.groups().clone(),
        }
    }

    pub fn empty(domain: VarSet) -> Self {
        CliquePair {
            domain,
            cl: GroupSet::new(),
            sh: GroupSet::new(),
        }
    }

    /// `({vars}, ∅)`: the whole domain as one clique.
    pub fn top(vars: VarSet) -> Self {
        CliquePair {
            domain: vars,
            cl: if vars.is_empty() {
                GroupSet::new()
            } else {
                GroupSet::singleton(vars)
            },
            sh: GroupSet::new(),
        }
    }

    pub fn domain(&self) -> VarSet {
        self.domain
    }

    pub(crate) fn with_parts(&self, cl: GroupSet, sh: GroupSet) -> CliquePair {
        CliquePair {
            domain: self.domain,
            cl,
            sh,
        }
    }

    /// Variables that occur in some clique or group.
    pub fn nonground_vars(&self) -> VarSet {
        self.cl.vars().union(self.sh.vars())
    }

    pub fn ground_vars(&self) -> VarSet {
        self.domain.difference(self.nonground_vars())
    }

    /// Number of cliques plus number of explicit groups.
    pub fn size(&self) -> usize {
        self.cl.len() + self.sh.len()
    }

    /// Three-case abstract unification for `x = t`.
    pub fn amgu(&self, x: Var, t: &Term) -> CliquePair {
        let xv = VarSet::singleton(x);
        let tv = t.vars();
        let xt = xv.union(tv);
        let (cl_x, cl_t) = (self.cl.rel(xv), self.cl.rel(tv));
        let (sh_x, sh_t) = (self.sh.rel(xv), self.sh.rel(tv));

        if cl_x.is_empty() && cl_t.is_empty() {
            let sh = self.sh.irrel(xt).union(&sh_x.star().bin(&sh_t.star()));
            return self.with_parts(self.cl.clone(), sh);
        }
        let cl = self.cl.rel_bar(xt);
        let sh = self.sh.irrel(xt);
        if (cl_x.is_empty() && sh_x.is_empty()) || (cl_t.is_empty() && sh_t.is_empty()) {
            return self.with_parts(cl, sh);
        }
        let clique = cl_x.vars().union(cl_t.vars()).union(sh_x.vars()).union(sh_t.vars());
        let mut cl = cl;
        cl.insert(clique);
        self.with_parts(cl.maximal(), sh)
    }

    /// Componentwise projection onto `vars`, cliques regularized.
    pub fn project(&self, vars: VarSet) -> CliquePair {
        CliquePair {
            domain: vars.intersection(self.domain),
            cl: self.cl.project(vars).maximal(),
            sh: self.sh.project(vars),
        }
    }

    /// New variables enter as singleton groups; cliques are unchanged.
    pub fn augment(&self, vars: VarSet) -> Result<CliquePair, DomainError> {
        if vars.meets(self.domain) {
            return Err(DomainError::NotFresh(vars.intersection(self.domain)));
        }
        Ok(CliquePair {
            domain: self.domain.union(vars),
            cl: self.cl.clone(),
            sh: self.sh.union(&GroupSet::singletons(vars)),
        })
    }

    /// The worst-case pair `(cl', sh')` for the part of `self` relevant to
    /// `g`, normalized.
    pub fn extend_worstcase(&self, g: VarSet) -> CliquePair {
        let cl_star = self.cl.rel(g).star();
        let sh_star = self.sh.rel(g).star();
        let cl = cl_star.union(&cl_star.bin(&sh_star));
        normalize::normalize(&self.with_parts(cl, sh_star))
    }

    /// Success of `g` under `self` given `prime` (normalized, over `g`).
    pub fn extend(&self, g: VarSet, prime: &CliquePair) -> CliquePair {
        self.extend_traced(g, prime, DEFAULT_CLSH_LIMIT).0
    }

    pub fn extend_with_limit(&self, g: VarSet, prime: &CliquePair, clsh_limit: usize) -> CliquePair {
        self.extend_traced(g, prime, clsh_limit).0
    }

    /// As [`CliquePair::extend`], also returning the intermediate sets.
    pub fn extend_traced(
        &self,
        g: VarSet,
        prime: &CliquePair,
        clsh_limit: usize,
    ) -> (CliquePair, ExtendTrace) {
        let worst = self.extend_worstcase(g);
        let extsh = extsh(&self.sh, g, &prime.sh, &worst.sh);
        let mut extcl = extcl(&self.cl, g, &prime.cl, &worst.cl);
        let (clsh, overflow) = clsh_bounded(&worst.cl, g, &prime.sh, clsh_limit);
        let shcl = shcl(&worst.sh, g, &prime.cl);

        let unreg_cl = extcl.clone();
        for c in overflow.iter() {
            extcl.insert(c);
        }
        let sh = extsh.union(&clsh).union(&shcl);
        let out = self.with_parts(extcl.maximal(), sh);
        let trace = ExtendTrace {
            worst,
            extsh,
            extcl: unreg_cl,
            clsh,
            shcl,
            clsh_overflow: overflow,
        };
        (out, trace)
    }

    /// Componentwise union, cliques regularized.
    pub fn lub(&self, other: &CliquePair) -> CliquePair {
        CliquePair {
            domain: self.domain.union(other.domain),
            cl: self.cl.union(&other.cl).maximal(),
            sh: self.sh.union(&other.sh),
        }
    }

    /// Sufficient ordering check: every clique of `self` lies inside a
    /// clique of `other`, and every group of `self` is a group of `other` or
    /// lies inside one of its cliques. Sound but incomplete.
    pub fn leq(&self, other: &CliquePair) -> bool {
        self.cl.iter().all(|c| other.cl.covers(c))
            && self
                .sh
                .iter()
                .all(|s| other.sh.contains(s) || other.cl.covers(s))
    }

    pub fn rename(&self, f: impl Fn(Var) -> Var) -> CliquePair {
        CliquePair {
            domain: self.domain.map(&f),
            cl: self.cl.rename(&f),
            sh: self.sh.rename(&f),
        }
    }

    pub fn render(&self, names: &(impl VarNames + ?Sized)) -> String {
        format!(
            "({}, {})",
            render_groups(&self.cl, names),
            render_groups(&self.sh, names)
        )
    }
}

/// Intermediate values of one `extend` computation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtendTrace {
    pub worst: CliquePair,
    pub extsh: GroupSet,
    /// Before regularization.
    pub extcl: GroupSet,
    pub clsh: GroupSet,
    pub shcl: GroupSet,
    /// Cliques of the worst case too large to enumerate in `clsh`.
    pub clsh_overflow: GroupSet,
}

/// `irrel(g, sh1) ∪ { s ∈ sh' | s ∩ g ∈ sh2 }`
pub fn extsh(sh1: &GroupSet, g: VarSet, sh2: &GroupSet, sh_worst: &GroupSet) -> GroupSet {
    sh1.irrel(g)
        .union(&sh_worst.filter(|s| sh2.contains(s.intersection(g))))
}

/// `rel_bar(g, cl1) ∪ { (s' ∩ s) ∪ (s' \ g) | s' ∈ cl', s ∈ cl2 }`
pub fn extcl(cl1: &GroupSet, g: VarSet, cl2: &GroupSet, cl_worst: &GroupSet) -> GroupSet {
    let mut out = cl1.rel_bar(g);
    for sp in cl_worst.iter() {
        for s in cl2.iter() {
            out.insert(sp.intersection(s).union(sp.difference(g)));
        }
    }
    out
}

/// `{ s | s ⊆ c ∈ cl', s ∩ g ∈ sh2 }`
pub fn clsh(cl_worst: &GroupSet, g: VarSet, sh2: &GroupSet) -> GroupSet {
    clsh_bounded(cl_worst, g, sh2, usize::MAX).0
}

/// `clsh` with an enumeration bound: cliques with more than `limit`
/// variables are returned in the second component instead of being
/// enumerated.
pub fn clsh_bounded(
    cl_worst: &GroupSet,
    g: VarSet,
    sh2: &GroupSet,
    limit: usize,
) -> (GroupSet, GroupSet) {
    let mut out = Vec::new();
    let mut overflow = GroupSet::new();
    for c in cl_worst.iter() {
        let inside: Vec<VarSet> = sh2.iter().filter(|t| t.is_subset(c)).collect();
        if inside.is_empty() {
            continue;
        }
        if c.len() > limit {
            overflow.insert(c);
            continue;
        }
        // s = t ∪ r with t = s ∩ g ∈ sh2 and r ⊆ c \ g.
        let outside = c.difference(g);
        for t in inside {
            for r in outside.subsets() {
                out.push(t.union(r));
            }
        }
    }
    (out.into_iter().collect(), overflow)
}

/// `{ s ∈ sh' | s ∩ g ⊆ c for some c ∈ cl2 }`
pub fn shcl(sh_worst: &GroupSet, g: VarSet, cl2: &GroupSet) -> GroupSet {
    sh_worst.filter(|s| cl2.covers(s.intersection(g)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::notation::{groups, vars};
    use crate::oracle::expand;

    fn pair(cl: &str, sh: &str, dom: &str) -> CliquePair {
        CliquePair::new(vars(dom), groups(cl), groups(sh))
    }

    fn v(c: &str) -> Var {
        vars(c).min().unwrap()
    }

    #[test]
    fn amgu_case_one_is_plain_amgu() {
        let p = pair("", "x, y, z", "xyz");
        let out = p.amgu(v("x"), &Term::Var(v("y")));
        assert_eq!(out, pair("", "xy, z", "xyz"));
    }

    #[test]
    fn amgu_case_two_ground_term() {
        let p = pair("xy", "xz, u", "xyzu");
        let out = p.amgu(v("x"), &Term::atom("a"));
        assert_eq!(out, pair("y", "u", "xyzu"));
    }

    #[test]
    fn amgu_case_three_builds_clique() {
        let p = pair("xz", "y, u", "xyzu");
        let out = p.amgu(v("x"), &Term::Var(v("y")));
        assert_eq!(out, pair("xyz", "u", "xyzu"));
    }

    #[test]
    fn project_examples() {
        assert_eq!(
            pair("xy", "z", "xyz").project(vars("x")),
            pair("x", "", "x")
        );
        assert_eq!(pair("", "", "xy").project(vars("x")), pair("", "", "x"));
        assert_eq!(
            pair("xyz", "yu, u", "xyzu").project(vars("xy")),
            pair("xy", "y", "xy")
        );
    }

    #[test]
    fn augment_examples() {
        let p = pair("xy", "z", "xyz");
        assert_eq!(p.augment(vars("u")).unwrap(), pair("xy", "z, u", "xyzu"));
        assert_eq!(p.augment(VarSet::EMPTY).unwrap(), p);
        assert_eq!(
            pair("", "", "").augment(vars("uv")).unwrap(),
            pair("", "u, v", "uv")
        );
        assert!(p.augment(vars("zu")).is_err());
    }

    #[test]
    fn worstcase_examples() {
        let call = pair("xyz", "u, v", "xyzuv");
        let w = call.extend_worstcase(vars("xuv"));
        assert_eq!((w.cl, w.sh), (groups("xyzuv"), groups("")));

        let w = pair("", "", "xy").extend_worstcase(vars("xy"));
        assert!(w.cl.is_empty() && w.sh.is_empty());

        let w = pair("", "x, y", "xy").extend_worstcase(vars("xy"));
        assert_eq!((w.cl, w.sh), (groups("xy"), groups("")));
    }

    #[test]
    fn helper_examples() {
        let g = vars("xuv");
        assert_eq!(extsh(&groups("u, v"), g, &groups("uv"), &groups("")), groups(""));
        assert_eq!(
            extsh(&groups("xz, y"), vars("x"), &groups(""), &groups("xz")),
            groups("y")
        );
        assert_eq!(
            extsh(&groups("xu, z"), vars("x"), &groups("x"), &groups("xu")),
            groups("xu, z")
        );

        assert_eq!(
            extcl(&groups("xyz"), g, &groups("x"), &groups("xyzuv")),
            groups("xyz, yz")
        );
        assert_eq!(extcl(&groups(""), g, &groups(""), &groups("")), groups(""));
        assert_eq!(
            extcl(&groups("xy"), vars("x"), &groups(""), &groups("xy")),
            groups("y")
        );

        assert_eq!(
            clsh(&groups("xyzuv"), g, &groups("uv")),
            groups("yzuv, yuv, zuv, uv")
        );
        assert_eq!(clsh(&groups(""), g, &groups("uv")), groups(""));
        assert_eq!(clsh(&groups("xy"), vars("x"), &groups("x")), groups("x, xy"));

        assert_eq!(shcl(&groups(""), g, &groups("x")), groups(""));
        assert_eq!(shcl(&groups("xu"), vars("x"), &groups("xy")), groups("xu"));
        assert_eq!(shcl(&groups("uv"), vars("x"), &groups("")), groups(""));
    }

    #[test]
    fn clsh_limit_emits_clique() {
        let (sets, overflow) = clsh_bounded(&groups("xyzuv"), vars("xuv"), &groups("uv"), 3);
        assert!(sets.is_empty());
        assert_eq!(overflow, groups("xyzuv"));
    }

    #[test]
    fn extend_worked_example() {
        let call = pair("xyz", "u, v", "xyzuv");
        let prime = pair("x", "uv", "xuv");
        let (out, trace) = call.extend_traced(vars("xuv"), &prime, DEFAULT_CLSH_LIMIT);
        assert_eq!(trace.extsh, groups(""));
        assert_eq!(trace.extcl, groups("xyz, yz"));
        assert_eq!(trace.clsh, groups("yzuv, yuv, zuv, uv"));
        assert_eq!(trace.shcl, groups(""));
        assert_eq!(out, pair("xyz", "yzuv, yuv, zuv, uv", "xyzuv"));
    }

    #[test]
    fn extend_ground_success() {
        let call = pair("xyz", "u, v", "xyzuv");
        let g = vars("xuv");
        let out = call.extend(g, &CliquePair::empty(g));
        assert_eq!(out, pair("yz", "", "xyzuv"));
    }

    #[test]
    fn extend_without_cliques_degenerates() {
        let call = pair("", "xu, z", "xzu");
        let out = call.extend(vars("x"), &pair("", "x", "x"));
        assert_eq!(out, pair("", "xu, z", "xzu"));
    }

    #[test]
    fn lattice_examples() {
        let a = pair("xy", "", "xyz");
        let b = pair("", "z", "xyz");
        assert_eq!(a.lub(&b), pair("xy", "z", "xyz"));
        assert!(pair("", "x", "xy").leq(&pair("xy", "", "xy")));
        assert_eq!(CliquePair::top(vars("xy")), pair("xy", "", "xy"));

        // Equal expansions, but the syntactic check cannot see it.
        let c = pair("xy", "", "xy");
        let d = pair("", "x, y, xy", "xy");
        assert_eq!(expand(&c).unwrap(), expand(&d).unwrap());
        assert!(!c.leq(&d));
        assert!(d.leq(&c));
    }
}
