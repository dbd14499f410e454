//! Freeness-augmented domains. A free variable is known to be unbound at
//! run time; the free set is paired with either a plain sharing set or a
//! clique pair.
//!
//! After every operation the free set is intersected with the non-ground
//! variables, so a variable occurring in no group is never reported free.

use crate::clique::{CliquePair, DEFAULT_CLSH_LIMIT};
use crate::error::DomainError;
use crate::groups::GroupSet;
use crate::notation::{render_vars, VarNames};
use crate::sharing::SharingSet;
use crate::syntax::Term;
use crate::varset::{Var, VarSet};

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct SharingFreeness {
    pub sh: SharingSet,
    pub free: VarSet,
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct CliqueSharingFreeness {
    pub pair: CliquePair,
    pub free: VarSet,
}

/// `t` is linear and every relevant group or clique meets `vars(t)` in
/// exactly one variable.
pub fn lin_s(t: &Term, p: &CliquePair) -> bool {
    if !t.is_linear() {
        return false;
    }
    let tv = t.vars();
    let ok = p
        .cl
        .rel(tv)
        .iter()
        .chain(p.sh.rel(tv).iter())
        .all(|s| s.intersection(tv).len() == 1);
    debug_assert_eq!(ok, lin_pairwise(t, p));
    ok
}

/// Pairwise form of the independence test: for distinct `y, z` in
/// `vars(t)`, no group and no clique contains both.
pub fn lin_pairwise(t: &Term, p: &CliquePair) -> bool {
    let vs: Vec<Var> = t.vars().iter().collect();
    vs.iter().enumerate().all(|(i, &y)| {
        vs[i + 1..].iter().all(|&z| {
            let both = VarSet::singleton(y).union(VarSet::singleton(z));
            !p.cl.iter().chain(p.sh.iter()).any(|s| both.is_subset(s))
        })
    })
}

/// `{ ∪ family }`, or the empty family when `family` is empty.
fn union_family(family: &GroupSet) -> GroupSet {
    let u = family.vars();
    if u.is_empty() {
        GroupSet::new()
    } else {
        GroupSet::singleton(u)
    }
}

impl CliqueSharingFreeness {
    pub fn new(pair: CliquePair, free: VarSet) -> Self {
        CliqueSharingFreeness { pair, free }.swept()
    }

    pub fn from_sharing(s: &SharingFreeness) -> Self {
        CliqueSharingFreeness {
            pair: CliquePair::from_sharing(&s.sh),
            free: s.free,
        }
    }

    pub fn domain(&self) -> VarSet {
        self.pair.domain()
    }

    fn swept(mut self) -> Self {
        self.free = self.free.intersection(self.pair.nonground_vars());
        self
    }

    fn is_free_term(&self, t: &Term) -> bool {
        t.as_var().is_some_and(|v| self.free.contains(v))
    }

    /// Abstract unification for `x = t`, choosing the free, linear or
    /// general case.
    pub fn amgu(&self, x: Var, t: &Term) -> CliqueSharingFreeness {
        let p = &self.pair;
        let xv = VarSet::singleton(x);
        let tv = t.vars();
        let xt = xv.union(tv);
        let (cl_x, cl_t) = (p.cl.rel(xv), p.cl.rel(tv));
        let (sh_x, sh_t) = (p.sh.rel(xv), p.sh.rel(tv));
        let x_free = self.free.contains(x);
        let t_free = self.is_free_term(t);

        let pair = if x_free || t_free {
            amgu_sff(p, xt, &cl_x, &cl_t, &sh_x, &sh_t)
        } else if lin_s(t, p) {
            amgu_sfl(p, xt, &cl_x, &cl_t, &sh_x, &sh_t)
        } else {
            p.amgu(x, t)
        };

        let x_side = cl_x.vars().union(sh_x.vars());
        let t_side = cl_t.vars().union(sh_t.vars());
        let free = match (x_free, t_free) {
            (true, true) => self.free,
            (true, false) => self.free.difference(x_side),
            (false, true) => self.free.difference(t_side),
            (false, false) => self.free.difference(x_side.union(t_side)),
        };
        CliqueSharingFreeness { pair, free }.swept()
    }

    pub fn project(&self, vars: VarSet) -> CliqueSharingFreeness {
        CliqueSharingFreeness {
            pair: self.pair.project(vars),
            free: self.free.intersection(vars),
        }
        .swept()
    }

    /// New variables are free and independent.
    pub fn augment(&self, vars: VarSet) -> Result<CliqueSharingFreeness, DomainError> {
        Ok(CliqueSharingFreeness {
            pair: self.pair.augment(vars)?,
            free: self.free.union(vars),
        })
    }

    pub fn extend(&self, g: VarSet, prime: &CliqueSharingFreeness) -> CliqueSharingFreeness {
        self.extend_with_limit(g, prime, DEFAULT_CLSH_LIMIT)
    }

    pub fn extend_with_limit(
        &self,
        g: VarSet,
        prime: &CliqueSharingFreeness,
        clsh_limit: usize,
    ) -> CliqueSharingFreeness {
        let pair = self.pair.extend_with_limit(g, &prime.pair, clsh_limit);
        let free = extend_free(self.free, g, prime.free, |x| {
            pair.cl
                .containing(x)
                .vars()
                .union(pair.sh.containing(x).vars())
        });
        CliqueSharingFreeness { pair, free }.swept()
    }

    pub fn lub(&self, other: &CliqueSharingFreeness) -> CliqueSharingFreeness {
        CliqueSharingFreeness {
            pair: self.pair.lub(&other.pair),
            free: self.free.intersection(other.free),
        }
        .swept()
    }

    pub fn leq(&self, other: &CliqueSharingFreeness) -> bool {
        self.pair.leq(&other.pair) && other.free.is_subset(self.free)
    }

    pub fn rename(&self, f: impl Fn(Var) -> Var) -> CliqueSharingFreeness {
        CliqueSharingFreeness {
            pair: self.pair.rename(&f),
            free: self.free.map(&f),
        }
    }

    pub fn render(&self, names: &(impl VarNames + ?Sized)) -> String {
        format!(
            "({}, free: {})",
            self.pair.render(names),
            render_vars(self.free, names)
        )
    }
}

/// `f2 ∪ { x ∈ f1 \ g | (sharing partners of x) ∩ g ⊆ f2 }`
fn extend_free(f1: VarSet, g: VarSet, f2: VarSet, partners: impl Fn(Var) -> VarSet) -> VarSet {
    let kept: VarSet = f1
        .difference(g)
        .iter()
        .filter(|&x| partners(x).intersection(g).is_subset(f2))
        .collect();
    f2.union(kept)
}

fn amgu_sff(
    p: &CliquePair,
    xt: VarSet,
    cl_x: &GroupSet,
    cl_t: &GroupSet,
    sh_x: &GroupSet,
    sh_t: &GroupSet,
) -> CliquePair {
    let cl = p
        .cl
        .rel_bar(xt)
        .union(&cl_x.union(sh_x).bin(cl_t))
        .union(&cl_x.bin(sh_t));
    let sh = p.sh.irrel(xt).union(&sh_x.bin(sh_t));
    p.with_parts(cl.maximal(), sh)
}

fn amgu_sfl(
    p: &CliquePair,
    xt: VarSet,
    cl_x: &GroupSet,
    cl_t: &GroupSet,
    sh_x: &GroupSet,
    sh_t: &GroupSet,
) -> CliquePair {
    let rest = p.cl.rel_bar(xt);
    if cl_t.is_empty() {
        let cl = rest.union(&cl_x.bin(&union_family(sh_t)));
        let sh = p.sh.irrel(xt).union(&sh_x.bin(&sh_t.star()));
        p.with_parts(cl.maximal(), sh)
    } else {
        let cl = rest.union(&cl_x.union(sh_x).bin(&union_family(&cl_t.union(sh_t))));
        p.with_parts(cl.maximal(), p.sh.irrel(xt))
    }
}

impl SharingFreeness {
    pub fn new(sh: SharingSet, free: VarSet) -> Self {
        SharingFreeness { sh, free }.swept()
    }

    pub fn domain(&self) -> VarSet {
        self.sh.domain()
    }

    fn swept(mut self) -> Self {
        self.free = self.free.intersection(self.sh.groups().vars());
        self
    }

    /// The clique-free instance of [`CliqueSharingFreeness::amgu`].
    pub fn amgu(&self, x: Var, t: &Term) -> SharingFreeness {
        let out = CliqueSharingFreeness::from_sharing(self).amgu(x, t);
        debug_assert!(out.pair.cl.is_empty());
        SharingFreeness {
            sh: SharingSet::new(out.pair.domain(), out.pair.sh),
            free: out.free,
        }
    }

    pub fn project(&self, vars: VarSet) -> SharingFreeness {
        SharingFreeness {
            sh: self.sh.project(vars),
            free: self.free.intersection(vars),
        }
        .swept()
    }

    pub fn augment(&self, vars: VarSet) -> Result<SharingFreeness, DomainError> {
        Ok(SharingFreeness {
            sh: self.sh.augment(vars)?,
            free: self.free.union(vars),
        })
    }

    pub fn extend(&self, g: VarSet, prime: &SharingFreeness) -> SharingFreeness {
        let sh = self.sh.extend(g, &prime.sh);
        let free = extend_free(self.free, g, prime.free, |x| {
            sh.groups().containing(x).vars()
        });
        SharingFreeness { sh, free }.swept()
    }

    pub fn lub(&self, other: &SharingFreeness) -> SharingFreeness {
        SharingFreeness {
            sh: self.sh.lub(&other.sh),
            free: self.free.intersection(other.free),
        }
        .swept()
    }

    pub fn leq(&self, other: &SharingFreeness) -> bool {
        self.sh.leq(&other.sh) && other.free.is_subset(self.free)
    }

    pub fn rename(&self, f: impl Fn(Var) -> Var) -> SharingFreeness {
        SharingFreeness {
            sh: self.sh.rename(&f),
            free: self.free.map(&f),
        }
    }

    pub fn render(&self, names: &(impl VarNames + ?Sized)) -> String {
        format!(
            "({}, free: {})",
            self.sh.render(names),
            render_vars(self.free, names)
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::notation::{groups, vars, Letters};
    use crate::oracle;
    use proptest::prelude::*;

    fn v(c: &str) -> Var {
        vars(c).min().unwrap()
    }

    fn csf(cl: &str, sh: &str, free: &str, dom: &str) -> CliqueSharingFreeness {
        CliqueSharingFreeness::new(CliquePair::new(vars(dom), groups(cl), groups(sh)), vars(free))
    }

    fn sf(sh: &str, free: &str, dom: &str) -> SharingFreeness {
        SharingFreeness::new(SharingSet::new(vars(dom), groups(sh)), vars(free))
    }

    fn yz() -> Term {
        Term::compound("f", vec![Term::Var(v("y")), Term::Var(v("z"))])
    }

    #[test]
    fn lin_examples() {
        let indep = CliquePair::new(vars("yz"), groups(""), groups("y, z"));
        assert!(lin_s(&yz(), &indep));
        let yy = Term::compound("f", vec![Term::Var(v("y")), Term::Var(v("y"))]);
        assert!(!lin_s(&yy, &indep));
        let clique = CliquePair::new(vars("yz"), groups("yz"), groups(""));
        assert!(!lin_s(&yz(), &clique));
    }

    #[test]
    fn amgu_both_free() {
        let s = csf("", "x, y, z", "xy", "xyz");
        let out = s.amgu(v("x"), &Term::Var(v("y")));
        assert_eq!(out, csf("", "xy, z", "xy", "xyz"));
    }

    #[test]
    fn amgu_free_with_ground_term() {
        let s = csf("", "x, u", "x", "xu");
        let t = Term::compound("f", vec![Term::atom("a")]);
        assert_eq!(s.amgu(v("x"), &t), csf("", "u", "", "xu"));
    }

    #[test]
    fn amgu_general_case_falls_through() {
        let p = CliquePair::new(vars("xyz"), groups("yz"), groups("x"));
        let s = CliqueSharingFreeness::new(p.clone(), VarSet::EMPTY);
        let out = s.amgu(v("x"), &yz());
        assert_eq!(out.pair, p.amgu(v("x"), &yz()));
    }

    #[test]
    fn amgu_f_examples() {
        let s = sf("x, y, z", "xy", "xyz");
        assert_eq!(s.amgu(v("x"), &Term::Var(v("y"))), sf("xy, z", "xy", "xyz"));

        let s = sf("x, xu, u", "x", "xu");
        let out = s.amgu(v("x"), &Term::atom("a"));
        assert_eq!(out, sf("u", "", "xu"));

        let s = sf("x, y, z", "", "xyz");
        let yy = Term::compound("f", vec![Term::Var(v("y")), Term::Var(v("y"))]);
        let out = s.amgu(v("x"), &yy);
        assert_eq!(out.sh, s.sh.amgu(v("x"), &yy));
    }

    #[test]
    fn project_augment_examples() {
        assert_eq!(csf("xy", "", "xy", "xy").project(vars("x")), csf("x", "", "x", "x"));
        assert_eq!(
            csf("", "", "", "").augment(vars("u")).unwrap(),
            csf("", "u", "u", "u")
        );
        assert_eq!(csf("xy", "z", "z", "xyz").project(vars("z")), csf("", "z", "z", "z"));
        assert!(csf("", "x", "x", "x").augment(vars("x")).is_err());
    }

    #[test]
    fn extend_f_examples() {
        let call = sf("xy", "xy", "xy");
        let out = call.extend(vars("x"), &sf("x", "x", "x"));
        assert_eq!(out, sf("xy", "xy", "xy"));

        let out = call.extend(vars("x"), &sf("x", "", "x"));
        assert_eq!(out.free, VarSet::EMPTY);

        let call = sf("x, y", "y", "xy");
        let out = call.extend(vars("x"), &sf("", "", "x"));
        assert_eq!(out, sf("y", "y", "xy"));
    }

    #[test]
    fn extend_sf_examples() {
        let call = csf("xyz", "u, v", "", "xyzuv");
        let prime = csf("x", "uv", "", "xuv");
        let out = call.extend(vars("xuv"), &prime);
        assert_eq!(out, csf("xyz", "yzuv, yuv, zuv, uv", "", "xyzuv"));

        let call = csf("", "xy", "xy", "xy");
        let out = call.extend(vars("x"), &csf("", "x", "x", "x"));
        assert_eq!(out, csf("", "xy", "xy", "xy"));

        let call = csf("xy", "", "xy", "xy");
        let out = call.extend(vars("x"), &csf("x", "", "", "x"));
        assert!(!out.free.contains(v("y")));
    }

    #[test]
    fn rendering() {
        let s = csf("xy", "z", "x", "xyz");
        assert_eq!(s.render(&Letters), "(({xy}, {z}), free: {x})");
    }

    fn arb_state(n: u32) -> impl Strategy<Value = CliqueSharingFreeness> {
        let set = 1u128..(1u128 << n);
        (
            proptest::collection::vec(set.clone(), 0..3),
            proptest::collection::vec(set, 0..8),
            0u128..(1u128 << n),
        )
            .prop_map(move |(cl, sh, free)| {
                let pair = CliquePair::new(
                    VarSet::first_n(n as usize),
                    cl.into_iter().map(VarSet::from_bits).collect(),
                    sh.into_iter().map(VarSet::from_bits).collect(),
                );
                CliqueSharingFreeness::new(pair, VarSet::from_bits(free))
            })
    }

    fn arb_term(n: u32) -> impl Strategy<Value = Term> {
        prop_oneof![
            (0..n).prop_map(|i| Term::Var(Var(i))),
            proptest::collection::vec(prop_oneof![
                (0..n).prop_map(|i| Term::Var(Var(i))),
                Just(Term::atom("a")),
            ], 0..4)
            .prop_map(|args| Term::compound("f", args)),
        ]
    }

    proptest! {
        #[test]
        fn embedding_is_coherent(s in arb_state(4), x in 0u32..4, t in arb_term(4)) {
            prop_assume!(!t.occurs(Var(x)));
            let plain = SharingFreeness::new(
                SharingSet::new(s.domain(), s.pair.sh.clone()),
                s.free,
            );
            let via_cliques = CliqueSharingFreeness::from_sharing(&plain).amgu(Var(x), &t);
            let direct = plain.amgu(Var(x), &t);
            prop_assert!(via_cliques.pair.cl.is_empty());
            prop_assert_eq!(&via_cliques.pair.sh, direct.sh.groups());
            prop_assert_eq!(via_cliques.free, direct.free);
        }

        #[test]
        fn dispatch_refines_general_case(s in arb_state(4), x in 0u32..4, t in arb_term(4)) {
            prop_assume!(!t.occurs(Var(x)));
            let out = oracle::expand(&s.amgu(Var(x), &t).pair).unwrap();
            let general = oracle::expand(&s.pair.amgu(Var(x), &t)).unwrap();
            prop_assert!(out.is_subset(&general));
        }

        #[test]
        fn free_never_ground(s in arb_state(4), x in 0u32..4, t in arb_term(4)) {
            prop_assume!(!t.occurs(Var(x)));
            let out = s.amgu(Var(x), &t);
            prop_assert!(out.free.is_subset(out.pair.nonground_vars()));
        }
    }
}
