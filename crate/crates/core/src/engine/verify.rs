//! Oracle-backed checking of analysis runs.
//!
//! Two layers: every `amgu`-based builtin and every `extend` step on a
//! small substitution is recomputed by the brute-force references, and a
//! clique-domain run is compared point by point with a run of its plain
//! counterpart.

use serde::Serialize;

use super::fixpoint::{analyze, Analysis, Diagnostic, Severity};
use super::substitution::{AbstractSubstitution, DomainKind, PlainView};
use super::AnalysisOptions;
use crate::error::AnalysisError;
use crate::groups::GroupSet;
use crate::oracle;
use crate::syntax::{builtin_kind, solve, BuiltinKind, Program, Term};
use crate::varset::VarSet;

/// Substitutions over more variables than this are not step-checked.
pub const STEP_CHECK_VARS: usize = 10;

pub(crate) struct StepChecker {
    enabled: bool,
    pub(crate) checks: usize,
    pub(crate) violations: Vec<String>,
}

impl StepChecker {
    pub(crate) fn new(enabled: bool) -> Self {
        StepChecker {
            enabled,
            checks: 0,
            violations: Vec::new(),
        }
    }

    fn applicable(&self, s: &AbstractSubstitution) -> bool {
        self.enabled && !s.is_bottom() && s.domain().len() <= STEP_CHECK_VARS
    }

    /// Compares a builtin's effect on the sharing component with the
    /// reference `amgu`. Freeness domains may legitimately be more precise
    /// than plain `amgu`, so only the plain and clique domains are checked.
    pub(crate) fn check_builtin(
        &mut self,
        before: &AbstractSubstitution,
        atom: &Term,
        after: &AbstractSubstitution,
    ) -> Result<(), AnalysisError> {
        let Some(kind) = before.kind() else { return Ok(()) };
        if !self.applicable(before) || kind.has_freeness() {
            return Ok(());
        }
        let eqs: Vec<(crate::Var, Term)> = match atom.pred_key().and_then(|k| builtin_kind(&k)) {
            Some(BuiltinKind::Unify) => match solve(&atom.args()[0], &atom.args()[1]) {
                Some(eqs) => eqs.iter().map(|(v, t)| (v, t.clone())).collect(),
                None => return Ok(()),
            },
            Some(BuiltinKind::Grounding) => {
                atom.vars().iter().map(|v| (v, Term::atom("0"))).collect()
            }
            _ => return Ok(()),
        };
        let mut expected = groups_of(&before.plain_view()?);
        for (x, t) in &eqs {
            expected = oracle::ref_amgu(*x, t, &expected);
        }
        let got = groups_of(&after.plain_view()?);
        self.checks += 1;
        let ok = if kind.has_cliques() {
            expected.is_subset(&got)
        } else {
            expected == got
        };
        if !ok {
            self.violations.push(format!(
                "{kind}: builtin {atom:?} gave {got:?}, reference {expected:?}"
            ));
        }
        Ok(())
    }

    /// Recomputes `extend` on the plain readings of its arguments.
    pub(crate) fn check_extend(
        &mut self,
        call: &AbstractSubstitution,
        g: VarSet,
        prime: &AbstractSubstitution,
        out: &AbstractSubstitution,
    ) -> Result<(), AnalysisError> {
        let Some(kind) = call.kind() else { return Ok(()) };
        if !self.applicable(call) || prime.is_bottom() {
            return Ok(());
        }
        let (cv, pv, ov) = (call.plain_view()?, prime.plain_view()?, out.plain_view()?);
        let (expected, ref_free) = oracle::ref_extend_f(
            &groups_of(&cv),
            cv.free.unwrap_or(VarSet::EMPTY),
            g,
            &groups_of(&pv),
            pv.free.unwrap_or(VarSet::EMPTY),
        );
        let got = groups_of(&ov);
        self.checks += 1;
        let sharing_ok = if kind.has_cliques() {
            expected.is_subset(&got)
        } else {
            expected == got
        };
        let free_ok = match ov.free {
            None => true,
            Some(f) if kind.has_cliques() => f.is_subset(ref_free),
            Some(f) => f == ref_free.intersection(expected.vars()),
        };
        if !sharing_ok || !free_ok {
            self.violations.push(format!(
                "{kind}: extend on {:?} gave {got:?} (free {:?}), reference {expected:?} (free {ref_free:?})",
                g, ov.free
            ));
        }
        Ok(())
    }
}

fn groups_of(v: &PlainView) -> GroupSet {
    v.groups.clone().unwrap_or_default()
}

/// Outcome of comparing a clique-domain run with its plain counterpart.
#[derive(Clone, Debug, Default, Serialize)]
pub struct Differential {
    pub points_compared: usize,
    pub violations: Vec<String>,
}

/// Checks, per program point, that the clique run's expansion contains the
/// plain run's sharing and that its free set is contained in the plain
/// one. Entry successes are compared the same way.
pub fn differential(plain: &Analysis, clique: &Analysis) -> Result<Differential, AnalysisError> {
    let pv = plain.point_views()?;
    let cv = clique.point_views()?;
    let mut out = Differential::default();
    for (id, p) in &pv {
        out.points_compared += 1;
        let where_ = format!("{} clause {} point {}", id.pred, id.clause + 1, id.point);
        match cv.get(id) {
            Some(c) => compare_views(p, c, &where_, &mut out.violations),
            None if p.groups.is_some() => out
                .violations
                .push(format!("{where_}: reached only by the plain analysis")),
            None => {}
        }
    }
    for (pe, ce) in plain.entries.iter().zip(&clique.entries) {
        out.points_compared += 1;
        let where_ = format!("entry {}", pe.index + 1);
        compare_views(
            &pe.success.plain_view()?,
            &ce.success.plain_view()?,
            &where_,
            &mut out.violations,
        );
    }
    Ok(out)
}

fn compare_views(plain: &PlainView, clique: &PlainView, where_: &str, violations: &mut Vec<String>) {
    let Some(pg) = &plain.groups else { return };
    match &clique.groups {
        None => violations.push(format!("{where_}: unreachable in the clique analysis only")),
        Some(cg) => {
            if !pg.is_subset(cg) {
                violations.push(format!(
                    "{where_}: clique sharing {cg:?} misses plain groups {:?}",
                    pg.difference(cg)
                ));
            }
        }
    }
    if let (Some(pf), Some(cf)) = (plain.free, clique.free) {
        if clique.groups.is_some() && !cf.is_subset(pf) {
            violations.push(format!(
                "{where_}: clique free set {cf:?} exceeds plain free set {pf:?}"
            ));
        }
    }
}

/// A verified run: step checks on the requested domain and, for clique
/// domains, a differential comparison with the plain counterpart.
pub struct VerifiedRun {
    pub analysis: Analysis,
    pub counterpart: Option<Analysis>,
    pub differential: Option<Differential>,
}

impl VerifiedRun {
    pub fn violations(&self) -> impl Iterator<Item = &str> {
        self.analysis
            .diagnostics
            .iter()
            .filter(|d| d.severity == Severity::Error)
            .map(|d| d.message.as_str())
            .chain(
                self.differential
                    .iter()
                    .flat_map(|d| d.violations.iter().map(String::as_str)),
            )
    }

    pub fn passed(&self) -> bool {
        self.violations().next().is_none()
    }
}

/// Runs `program` with step checking and, for clique domains, the
/// differential against the plain counterpart under the same options.
pub fn verify_run(program: &Program, options: &AnalysisOptions) -> Result<VerifiedRun, AnalysisError> {
    let opts = AnalysisOptions {
        verify: true,
        ..options.clone()
    };
    let analysis = analyze(program, &opts)?;
    let (counterpart, differential) = if opts.domain.has_cliques() {
        let plain_opts = AnalysisOptions {
            domain: opts.domain.plain_counterpart(),
            ..opts.clone()
        };
        let plain = analyze(program, &plain_opts)?;
        let d = differential(&plain, &analysis)?;
        (Some(plain), Some(d))
    } else {
        (None, None)
    };
    Ok(VerifiedRun {
        analysis,
        counterpart,
        differential,
    })
}

pub(crate) fn violation_diagnostics(violations: Vec<String>) -> Vec<Diagnostic> {
    violations
        .into_iter()
        .map(|message| Diagnostic {
            severity: Severity::Error,
            message: format!("verify: {message}"),
        })
        .collect()
}

/// Domains whose runs are compared by [`differential`].
pub fn counterpart_pairs() -> [(DomainKind, DomainKind); 2] {
    [
        (DomainKind::Sharing, DomainKind::CliqueSharing),
        (DomainKind::SharingFreeness, DomainKind::CliqueSharingFreeness),
    ]
}
