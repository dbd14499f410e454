//! Brute-force reference implementations used to cross-check the optimized
//! operations. Everything here enumerates; keep inputs small.

use std::collections::BTreeSet;

use crate::clique::CliquePair;
use crate::error::DomainError;
use crate::groups::GroupSet;
use crate::sharing::SharingSet;
use crate::syntax::Term;
use crate::varset::{Var, VarSet};

/// Largest clique [`expand`] will enumerate.
pub const EXPAND_LIMIT: usize = 20;

/// `⇓cl ∪ sh`: every clique replaced by all of its nonempty subsets.
pub fn expand(p: &CliquePair) -> Result<GroupSet, DomainError> {
    let mut out: BTreeSet<VarSet> = p.sh.iter().collect();
    for c in p.cl.iter() {
        if c.len() > EXPAND_LIMIT {
            return Err(DomainError::ExpansionTooLarge(c.len()));
        }
        out.extend(c.nonempty_subsets());
    }
    Ok(out.into_iter().collect())
}

/// [`expand`] as a sharing set over the pair's domain.
pub fn expand_sharing(p: &CliquePair) -> Result<SharingSet, DomainError> {
    Ok(SharingSet::new(p.domain(), expand(p)?))
}

pub fn ref_bin(a: &GroupSet, b: &GroupSet) -> GroupSet {
    let mut out = BTreeSet::new();
    for x in a.iter() {
        for y in b.iter() {
            out.insert(x.union(y));
        }
    }
    out.into_iter().collect()
}

/// Least superset closed under pairwise union, by naive iteration.
pub fn ref_star(s: &GroupSet) -> GroupSet {
    let mut cur: BTreeSet<VarSet> = s.iter().collect();
    loop {
        let mut next = cur.clone();
        for a in &cur {
            for b in &cur {
                next.insert(a.union(*b));
            }
        }
        if next.len() == cur.len() {
            return cur.into_iter().collect();
        }
        cur = next;
    }
}

fn relevant(s: &GroupSet, vars: VarSet) -> GroupSet {
    s.iter().filter(|g| g.meets(vars)).collect()
}

fn irrelevant(s: &GroupSet, vars: VarSet) -> GroupSet {
    s.iter().filter(|g| !g.meets(vars)).collect()
}

/// Plain sharing amgu for `x = t`.
pub fn ref_amgu(x: Var, t: &Term, sh: &GroupSet) -> GroupSet {
    let xv = VarSet::singleton(x);
    let tv = t.vars();
    let sx = ref_star(&relevant(sh, xv));
    let st = ref_star(&relevant(sh, tv));
    let mut out: BTreeSet<VarSet> = irrelevant(sh, xv.union(tv)).iter().collect();
    out.extend(ref_bin(&sx, &st).iter());
    out.into_iter().collect()
}

/// Sharing+freeness amgu for `x = t` on a plain sharing set, with
/// linearity decided pairwise and the freeness update taken case by case.
pub fn ref_amgu_f(x: Var, t: &Term, sh: &GroupSet, f: VarSet) -> (GroupSet, VarSet) {
    let xv = VarSet::singleton(x);
    let tv = t.vars();
    let sh_x = relevant(sh, xv);
    let sh_t = relevant(sh, tv);
    let x_free = f.contains(x);
    let t_free = t.as_var().is_some_and(|v| f.contains(v));
    let linear = t.is_linear()
        && tv.iter().all(|y| {
            tv.iter()
                .filter(|&z| z != y)
                .all(|z| sh.iter().all(|g| !(g.contains(y) && g.contains(z))))
        });
    let mut out: BTreeSet<VarSet> = irrelevant(sh, xv.union(tv)).iter().collect();
    if x_free || t_free {
        out.extend(ref_bin(&sh_x, &sh_t).iter());
    } else if linear {
        out.extend(ref_bin(&sh_x, &ref_star(&sh_t)).iter());
    } else {
        return (ref_amgu(x, t, sh), f.difference(sh_x.vars()).difference(sh_t.vars()));
    }
    let free = match (x_free, t_free) {
        (true, true) => f,
        (true, false) => f.difference(sh_x.vars()),
        (false, true) => f.difference(sh_t.vars()),
        (false, false) => f.difference(sh_x.vars()).difference(sh_t.vars()),
    };
    (out.into_iter().collect(), free)
}

/// Plain sharing extend.
pub fn ref_extend(call: &GroupSet, g: VarSet, prime: &GroupSet) -> GroupSet {
    let mut out: BTreeSet<VarSet> = irrelevant(call, g).iter().collect();
    for s in ref_star(&relevant(call, g)).iter() {
        if prime.contains(s.intersection(g)) {
            out.insert(s);
        }
    }
    out.into_iter().collect()
}

/// Freeness extend on plain sharing sets, straight from the formula
/// (no ground sweep).
pub fn ref_extend_f(
    call: &GroupSet,
    f1: VarSet,
    g: VarSet,
    prime: &GroupSet,
    f2: VarSet,
) -> (GroupSet, VarSet) {
    let sh = ref_extend(call, g, prime);
    let mut f = f2;
    for x in f1.difference(g).iter() {
        let partners = sh
            .iter()
            .filter(|s| s.contains(x))
            .fold(VarSet::EMPTY, |a, s| a.union(s));
        if partners.intersection(g).is_subset(f2) {
            f.insert(x);
        }
    }
    (sh, f)
}

/// `|℘⁰(s) ∩ ⇓cl|` by enumerating the subsets of `s`.
pub fn count_covered(s: VarSet, cl: &GroupSet) -> u128 {
    s.nonempty_subsets()
        .filter(|sub| cl.iter().any(|c| sub.is_subset(c)))
        .count() as u128
}

/// Exhaustive check of the normalized property over every variable set of
/// size at least two drawn from the pair's variables.
pub fn is_normalized(p: &CliquePair) -> Result<bool, DomainError> {
    let e: BTreeSet<VarSet> = expand(p)?.iter().collect();
    let vars = p.cl.vars().union(p.sh.vars());
    Ok(vars.nonempty_subsets().filter(|c| c.len() >= 2).all(|c| {
        let complete = c.nonempty_subsets().all(|s| e.contains(&s));
        !complete || c.nonempty_subsets().all(|s| !p.sh.contains(s))
    }))
}
