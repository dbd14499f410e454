//! Top-down multivariant analysis: head unification through `amgu`, body
//! traversal, success propagation through `extend`, and a tabulating
//! fixpoint over canonical call patterns.

mod fixpoint;
mod substitution;
pub mod verify;

pub use fixpoint::{
    analyze, Analysis, CallKey, ClauseRecord, Diagnostic, EntryResult, PointId, Severity,
    TableEntry, Variant,
};
pub use substitution::{AbstractSubstitution, DomainKind, PlainView};

use serde::{Deserialize, Serialize};

use crate::clique::DEFAULT_CLSH_LIMIT;
use crate::error::DomainError;
use crate::normalize::NormalizePolicy;
use crate::syntax::{builtin_kind, solve, BuiltinKind, EquationSet, Term};
use crate::varset::VarSet;

/// Knobs of one analysis run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisOptions {
    pub domain: DomainKind,
    pub policy: NormalizePolicy,
    /// Head unification treats head variables as free, then drops freeness.
    pub free_head_call2entry: bool,
    /// Per-predicate variant cap; further call patterns share one merged
    /// slot.
    pub max_variants: Option<usize>,
    /// Calls to undefined predicates abort the analysis instead of being
    /// approximated by the most general success.
    pub unknown_is_error: bool,
    /// Abort when a substitution holds more than this many groups and
    /// cliques.
    pub max_groups: Option<usize>,
    pub max_passes: usize,
    /// Largest clique the clique `extend` enumerates subsets of.
    pub clsh_limit: usize,
    /// Cross-check every `amgu` and `extend` step on small substitutions
    /// against the brute-force references.
    pub verify: bool,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            domain: DomainKind::CliqueSharing,
            policy: NormalizePolicy::default(),
            free_head_call2entry: false,
            max_variants: None,
            unknown_is_error: false,
            max_groups: Some(1 << 20),
            max_passes: 500,
            clsh_limit: DEFAULT_CLSH_LIMIT,
            verify: false,
        }
    }
}

impl AnalysisOptions {
    pub fn with_domain(domain: DomainKind) -> Self {
        AnalysisOptions {
            domain,
            ..AnalysisOptions::default()
        }
    }
}

/// Folds `amgu` over a solved equation set.
pub fn amgu_all(asub: &AbstractSubstitution, eqs: &EquationSet) -> AbstractSubstitution {
    eqs.iter()
        .fold(asub.clone(), |acc, (x, t)| acc.amgu(x, t))
}

/// `project(t1, Amgu(solve(t1 = t2), augment(t1, asub)))`. The variables of
/// `t1` must be fresh for `asub`.
pub fn unify(
    asub: &AbstractSubstitution,
    t1: &Term,
    t2: &Term,
) -> Result<AbstractSubstitution, DomainError> {
    let v1 = t1.vars();
    let augmented = asub.augment(v1)?;
    if augmented.is_bottom() {
        return Ok(AbstractSubstitution::Bottom(v1));
    }
    Ok(match solve(t1, t2) {
        None => AbstractSubstitution::Bottom(v1),
        Some(eqs) => amgu_all(&augmented, &eqs).project(v1),
    })
}

/// Substitution on the head variables after unifying `goal` (described by
/// `proj`) with `head`. With `free_head`, unification runs in the freeness
/// extension of the domain with the head variables free and the freeness
/// component is then dropped.
pub fn call2entry(
    proj: &AbstractSubstitution,
    goal: &Term,
    head: &Term,
    free_head: bool,
) -> Result<AbstractSubstitution, DomainError> {
    let plain = proj.kind().is_some_and(|k| !k.has_freeness());
    if free_head && plain {
        Ok(unify(&proj.with_free(VarSet::EMPTY), head, goal)?.without_free())
    } else {
        unify(proj, head, goal)
    }
}

/// Substitution on the goal variables after unifying `head` (described by
/// `exit`, already projected on the head) with `goal`.
pub fn exit2succ(
    exit: &AbstractSubstitution,
    goal: &Term,
    head: &Term,
) -> Result<AbstractSubstitution, DomainError> {
    unify(exit, goal, head)
}

/// Transfer function of a builtin; `None` if `atom` is not a builtin.
pub fn builtin_transfer(atom: &Term, asub: &AbstractSubstitution) -> Option<AbstractSubstitution> {
    let kind = builtin_kind(&atom.pred_key()?)?;
    if asub.is_bottom() {
        return Some(asub.clone());
    }
    Some(match kind {
        BuiltinKind::Unify => {
            let args = atom.args();
            match solve(&args[0], &args[1]) {
                None => AbstractSubstitution::Bottom(asub.domain()),
                Some(eqs) => amgu_all(asub, &eqs),
            }
        }
        BuiltinKind::Grounding => {
            let constant = Term::atom("0");
            atom.vars()
                .iter()
                .fold(asub.clone(), |acc, v| acc.amgu(v, &constant))
        }
        BuiltinKind::Identity => asub.clone(),
        BuiltinKind::Fail => AbstractSubstitution::Bottom(asub.domain()),
    })
}
