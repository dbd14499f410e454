use std::collections::{BTreeMap, HashMap, VecDeque};
use std::time::{Duration, Instant};

use indexmap::IndexMap;
use serde::Serialize;

use super::substitution::{AbstractSubstitution, PlainView};
use super::verify::{violation_diagnostics, StepChecker};
use super::{builtin_transfer, call2entry, exit2succ, unify, AnalysisOptions};
use crate::error::AnalysisError;
use crate::normalize::Site;
use crate::syntax::{is_builtin, Clause, PredKey, Program, Term};
use crate::varset::{Var, VarSet, MAX_VARS};

/// Distinguishes exact call patterns from the merged slot used once a
/// predicate exceeds its variant cap.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Variant {
    Exact(AbstractSubstitution),
    Merged,
}

/// A call pattern: the goal with its variables renamed to `0..k` in order
/// of first occurrence, and the projected call substitution renamed alike.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct CallKey {
    pub pred: PredKey,
    pub goal: Term,
    pub variant: Variant,
}

/// Substitutions at the program points of one clause for one call pattern:
/// index 0 is the entry, index `i` the state after the `i`-th body atom.
/// Variables are the clause's own ids.
#[derive(Clone, Debug)]
pub struct ClauseRecord {
    pub points: Vec<AbstractSubstitution>,
    /// Table slots called from this clause.
    pub callees: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct TableEntry {
    /// Call substitution over the canonical goal variables.
    pub proj: AbstractSubstitution,
    /// Success substitution over the canonical goal variables.
    pub prime: AbstractSubstitution,
    pub clauses: Vec<ClauseRecord>,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub message: String,
}

/// Result of one entry declaration.
#[derive(Clone, Debug)]
pub struct EntryResult {
    pub index: usize,
    pub call: AbstractSubstitution,
    pub success: AbstractSubstitution,
    /// Table slot analyzed for the entry; `None` for builtin goals.
    pub slot: Option<usize>,
}

/// Identifies a program point independently of the call variant.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize)]
pub struct PointId {
    pub pred: String,
    pub clause: usize,
    pub point: usize,
}

pub struct Analysis {
    pub options: AnalysisOptions,
    pub table: IndexMap<CallKey, TableEntry>,
    /// Slots reachable from the entries at the fixpoint, in table order.
    pub reachable: Vec<usize>,
    pub entries: Vec<EntryResult>,
    pub diagnostics: Vec<Diagnostic>,
    pub passes: usize,
    pub elapsed: Duration,
    /// Oracle comparisons performed in verify mode.
    pub verify_checks: usize,
}

impl Analysis {
    /// Number of reachable call variants per predicate.
    pub fn variant_counts(&self) -> BTreeMap<String, usize> {
        let mut out = BTreeMap::new();
        for &i in &self.reachable {
            let (key, _) = self.table.get_index(i).expect("slot index");
            *out.entry(key.pred.to_string()).or_insert(0) += 1;
        }
        out
    }

    /// Every recorded substitution of the reachable variants, with its point.
    pub fn points(&self) -> impl Iterator<Item = (PointId, &AbstractSubstitution)> + '_ {
        self.reachable.iter().flat_map(move |&i| {
            let (key, entry) = self.table.get_index(i).expect("slot index");
            entry.clauses.iter().enumerate().flat_map(move |(ci, rec)| {
                rec.points.iter().enumerate().map(move |(pi, s)| {
                    (
                        PointId {
                            pred: key.pred.to_string(),
                            clause: ci,
                            point: pi,
                        },
                        s,
                    )
                })
            })
        })
    }

    /// Per program point, the plain reading joined over all reachable
    /// variants: groups united, free sets intersected.
    pub fn point_views(&self) -> Result<BTreeMap<PointId, PlainView>, AnalysisError> {
        let mut out: BTreeMap<PointId, PlainView> = BTreeMap::new();
        for (id, s) in self.points() {
            let view = s.plain_view()?;
            match out.get_mut(&id) {
                None => {
                    out.insert(id, view);
                }
                Some(acc) => join_views(acc, &view),
            }
        }
        Ok(out)
    }

    pub fn has_errors(&self) -> bool {
        self.diagnostics.iter().any(|d| d.severity == Severity::Error)
    }
}

fn join_views(acc: &mut PlainView, view: &PlainView) {
    acc.domain = acc.domain.union(view.domain);
    let Some(g) = &view.groups else { return };
    match &mut acc.groups {
        None => {
            acc.groups = Some(g.clone());
            acc.free = view.free;
        }
        Some(ag) => {
            *ag = ag.union(g);
            acc.free = match (acc.free, view.free) {
                (Some(a), Some(b)) => Some(a.intersection(b)),
                _ => None,
            };
        }
    }
}

/// Runs the fixpoint for every entry declaration of `program`. Without
/// declarations, each predicate is entered with its most general goal and
/// the top call substitution.
pub fn analyze(program: &Program, options: &AnalysisOptions) -> Result<Analysis, AnalysisError> {
    let start = Instant::now();
    let mut an = Analyzer {
        program,
        opts: options,
        table: IndexMap::new(),
        diagnostics: Vec::new(),
        variants: HashMap::new(),
        changed: false,
        checker: StepChecker::new(options.verify),
    };

    let seeds = an.seeds()?;
    let mut passes = 0;
    loop {
        passes += 1;
        if passes > options.max_passes {
            return Err(AnalysisError::NoConvergence(options.max_passes));
        }
        an.changed = false;
        for (goal, call) in &seeds {
            an.seed_slot(goal, call)?;
        }
        let mut i = 0;
        while i < an.table.len() {
            an.analyze_slot(i)?;
            i += 1;
        }
        if !an.changed {
            break;
        }
    }

    let mut entries = Vec::new();
    let mut roots = Vec::new();
    for (index, (goal, call)) in seeds.iter().enumerate() {
        let g = goal.vars();
        let (success, slot) = match an.seed_slot(goal, call)? {
            None => (builtin_transfer(goal, call).expect("builtin entry"), None),
            Some(slot) => {
                let prime = an.table[slot].prime.clone();
                let success =
                    call.extend(g, &prime, &options.policy, options.clsh_limit)?;
                roots.push(slot);
                (success, Some(slot))
            }
        };
        entries.push(EntryResult {
            index,
            call: call.clone(),
            success,
            slot,
        });
    }
    let reachable = reachable_from(&an.table, &roots);
    let mut diagnostics = an.diagnostics;
    diagnostics.extend(violation_diagnostics(std::mem::take(&mut an.checker.violations)));

    Ok(Analysis {
        options: options.clone(),
        table: an.table,
        reachable,
        entries,
        diagnostics,
        passes,
        elapsed: start.elapsed(),
        verify_checks: an.checker.checks,
    })
}

fn reachable_from(table: &IndexMap<CallKey, TableEntry>, roots: &[usize]) -> Vec<usize> {
    let mut seen = vec![false; table.len()];
    let mut queue: VecDeque<usize> = roots.iter().copied().collect();
    while let Some(i) = queue.pop_front() {
        if std::mem::replace(&mut seen[i], true) {
            continue;
        }
        for rec in &table[i].clauses {
            queue.extend(rec.callees.iter().copied().filter(|&c| !seen[c]));
        }
    }
    (0..table.len()).filter(|&i| seen[i]).collect()
}

/// Renaming of a goal's variables to `0..k` by first occurrence.
struct Canon {
    vars: Vec<Var>,
}

impl Canon {
    fn of(goal: &Term) -> Canon {
        Canon {
            vars: goal.var_list(),
        }
    }

    fn to_canon(&self, v: Var) -> Var {
        let i = self.vars.iter().position(|&w| w == v).expect("goal variable");
        Var(i as u32)
    }

    fn uncanon(&self, v: Var) -> Var {
        self.vars[v.index()]
    }
}

fn shift(by: u32) -> impl Fn(Var) -> Var {
    move |v| Var(v.0 + by)
}

fn unshift(by: u32) -> impl Fn(Var) -> Var {
    move |v| Var(v.0 - by)
}

struct Analyzer<'a> {
    program: &'a Program,
    opts: &'a AnalysisOptions,
    table: IndexMap<CallKey, TableEntry>,
    diagnostics: Vec<Diagnostic>,
    variants: HashMap<PredKey, usize>,
    changed: bool,
    checker: StepChecker,
}

impl Analyzer<'_> {
    fn warn(&mut self, message: String) {
        let d = Diagnostic {
            severity: Severity::Warning,
            message,
        };
        if !self.diagnostics.contains(&d) {
            self.diagnostics.push(d);
        }
    }

    fn check_size(&self, s: &AbstractSubstitution) -> Result<(), AnalysisError> {
        match self.opts.max_groups {
            Some(limit) if s.size() > limit => Err(AnalysisError::ResourceLimit(limit)),
            _ => Ok(()),
        }
    }

    fn top(&self, vars: VarSet, free: VarSet) -> Result<AbstractSubstitution, AnalysisError> {
        if !self.opts.domain.has_cliques() {
            if let Some(limit) = self.opts.max_groups {
                if vars.len() >= 64 || (1u128 << vars.len()) - 1 > limit as u128 {
                    return Err(AnalysisError::ResourceLimit(limit));
                }
            }
        }
        Ok(AbstractSubstitution::top(self.opts.domain, vars, free))
    }

    /// Entry goals with their call substitutions.
    fn seeds(&mut self) -> Result<Vec<(Term, AbstractSubstitution)>, AnalysisError> {
        let mut out = Vec::new();
        if self.program.entries.is_empty() {
            self.warn("no entry declarations; analyzing every predicate with a most general call".into());
            for key in self.program.predicates.keys() {
                let goal = Term::compound(
                    &key.name,
                    (0..key.arity as u32).map(|i| Term::Var(Var(i))).collect(),
                );
                let call = self.top(goal.vars(), VarSet::EMPTY)?;
                out.push((goal, call));
            }
            return Ok(out);
        }
        for e in &self.program.entries {
            let vars = e.goal.vars();
            let nonground = vars.difference(e.ground);
            let mut call = self.top(nonground, e.free.intersection(nonground))?;
            call = call.augment(e.ground)?;
            let constant = Term::atom("0");
            for v in e.ground.iter() {
                call = call.amgu(v, &constant);
            }
            out.push((e.goal.clone(), call));
        }
        Ok(out)
    }

    /// Makes sure the entry goal has a slot and returns it; `None` for
    /// builtin goals, which are transferred directly.
    fn seed_slot(
        &mut self,
        goal: &Term,
        call: &AbstractSubstitution,
    ) -> Result<Option<usize>, AnalysisError> {
        let Some(pred) = goal.pred_key() else {
            return Err(AnalysisError::UnknownPredicate(format!("{goal:?}")));
        };
        if self.program.clauses(&pred).is_none() {
            if is_builtin(&pred) {
                return Ok(None);
            }
            return Err(AnalysisError::UnknownPredicate(pred.to_string()));
        }
        let proj = call.project(goal.vars());
        let (slot, _) = self.lookup(&pred, goal, &proj)?;
        Ok(Some(slot))
    }

    /// Success of `goal` (caller variables) under the projected call
    /// substitution `proj`, from the current table. Registers the slot on
    /// first sight.
    fn lookup(
        &mut self,
        pred: &PredKey,
        goal: &Term,
        proj: &AbstractSubstitution,
    ) -> Result<(usize, AbstractSubstitution), AnalysisError> {
        let canon = Canon::of(goal);
        let goal_c = goal.rename(&|v| canon.to_canon(v));
        let proj_c = proj.rename(|v| canon.to_canon(v));
        let k = canon.vars.len() as u32;

        let exact = CallKey {
            pred: pred.clone(),
            goal: goal_c.clone(),
            variant: Variant::Exact(proj_c.clone()),
        };
        let (slot, prime_c) = if let Some(i) = self.table.get_index_of(&exact) {
            (i, self.table[i].prime.clone())
        } else if self
            .opts
            .max_variants
            .is_some_and(|cap| self.variants.get(pred).copied().unwrap_or(0) >= cap)
        {
            self.lookup_merged(pred, &goal_c, &proj_c)?
        } else {
            *self.variants.entry(pred.clone()).or_insert(0) += 1;
            let bottom = AbstractSubstitution::Bottom(VarSet::first_n(k as usize));
            let (i, _) = self.table.insert_full(
                exact,
                TableEntry {
                    proj: proj_c,
                    prime: bottom.clone(),
                    clauses: Vec::new(),
                },
            );
            self.changed = true;
            (i, bottom)
        };
        let prime = prime_c.rename(|v| canon.uncanon(v));
        Ok((slot, prime))
    }

    /// Variant-capped lookup: the call is generalized to the most general
    /// goal of the predicate, and the shared slot's call substitution grows
    /// by lub.
    fn lookup_merged(
        &mut self,
        pred: &PredKey,
        goal_c: &Term,
        proj_c: &AbstractSubstitution,
    ) -> Result<(usize, AbstractSubstitution), AnalysisError> {
        let n = pred.arity as u32;
        let general = Term::compound(&pred.name, (0..n).map(|i| Term::Var(Var(i))).collect());
        let goal_s = goal_c.rename(&shift(n));
        let proj_s = proj_c.rename(shift(n));
        let proj_g = unify(&proj_s, &general, &goal_s)?;
        let key = CallKey {
            pred: pred.clone(),
            goal: general.clone(),
            variant: Variant::Merged,
        };
        let slot = match self.table.get_index_of(&key) {
            Some(i) => {
                let old = &self.table[i].proj;
                if !proj_g.leq(old)? {
                    let merged = old.lub(&proj_g)?;
                    self.table[i].proj = merged;
                    self.changed = true;
                }
                i
            }
            None => {
                let (i, _) = self.table.insert_full(
                    key,
                    TableEntry {
                        proj: proj_g,
                        prime: AbstractSubstitution::Bottom(general.vars()),
                        clauses: Vec::new(),
                    },
                );
                self.changed = true;
                i
            }
        };
        let prime_g = self.table[slot].prime.clone();
        let prime_s = exit2succ(&prime_g, &goal_s, &general)?;
        Ok((slot, prime_s.rename(unshift(n))))
    }

    fn analyze_slot(&mut self, i: usize) -> Result<(), AnalysisError> {
        let (key, entry) = self.table.get_index(i).expect("slot index");
        let goal = key.goal.clone();
        let pred = key.pred.clone();
        let proj = entry.proj.clone();
        let clauses: Vec<Clause> = self.program.clauses(&pred).unwrap_or(&[]).to_vec();
        let k = goal.vars().len();

        let mut prime = AbstractSubstitution::Bottom(goal.vars());
        let mut records = Vec::with_capacity(clauses.len());
        for clause in &clauses {
            let m = clause.var_count() as u32;
            if m as usize + k > MAX_VARS {
                return Err(AnalysisError::TooManyVariables(pred.to_string(), MAX_VARS));
            }
            let goal_s = goal.rename(&shift(m));
            let proj_s = proj.rename(shift(m));
            let (exit, record) = self.solve_clause(clause, &goal_s, &proj_s)?;
            let head_exit = exit.project(clause.head.vars());
            let succ = exit2succ(&head_exit, &goal_s, &clause.head)?.rename(unshift(m));
            prime = prime.lub(&succ)?.normalized_at(Site::Lub, &self.opts.policy);
            records.push(record);
        }

        let policy = &self.opts.policy;
        let new = prime.normalized_at(Site::Compare, policy);
        let old = &self.table[i].prime;
        if !new.leq(old)? {
            let merged = old.lub(&new)?.normalized_at(Site::Compare, policy);
            self.table[i].prime = merged;
            self.changed = true;
        }
        self.table[i].clauses = records;
        Ok(())
    }

    /// Entry, body traversal and exit of one clause for a call given over
    /// goal variables disjoint from the clause's.
    fn solve_clause(
        &mut self,
        clause: &Clause,
        goal: &Term,
        proj: &AbstractSubstitution,
    ) -> Result<(AbstractSubstitution, ClauseRecord), AnalysisError> {
        let entry = call2entry(proj, goal, &clause.head, self.opts.free_head_call2entry)?
            .normalized_at(Site::Call2entry, &self.opts.policy);
        let mut cur = entry.augment(clause.body_only_vars())?;
        let mut points = vec![cur.clone()];
        let mut callees = Vec::new();
        for atom in &clause.body {
            cur = self.solve_atom(&cur, atom, &mut callees)?;
            self.check_size(&cur)?;
            points.push(cur.clone());
        }
        Ok((cur, ClauseRecord { points, callees }))
    }

    fn solve_atom(
        &mut self,
        cur: &AbstractSubstitution,
        atom: &Term,
        callees: &mut Vec<usize>,
    ) -> Result<AbstractSubstitution, AnalysisError> {
        if cur.is_bottom() {
            return Ok(cur.clone());
        }
        let Some(pred) = atom.pred_key() else {
            return Err(AnalysisError::UnknownPredicate(format!("{atom:?}")));
        };
        let defined = self.program.clauses(&pred).is_some();
        if !defined && is_builtin(&pred) {
            let out = builtin_transfer(atom, cur).expect("builtin");
            self.checker.check_builtin(cur, atom, &out)?;
            return Ok(out);
        }

        let g = atom.vars();
        let prime = if defined {
            let proj = cur.project(g);
            let (slot, prime) = self.lookup(&pred, atom, &proj)?;
            callees.push(slot);
            prime
        } else {
            if self.opts.unknown_is_error {
                return Err(AnalysisError::UnknownPredicate(pred.to_string()));
            }
            self.warn(format!(
                "call to undefined predicate {pred}; assuming any sharing among its arguments"
            ));
            self.top(g, VarSet::EMPTY)?
        };
        let out = cur.extend(g, &prime, &self.opts.policy, self.opts.clsh_limit)?;
        self.checker.check_extend(cur, g, &prime, &out)?;
        Ok(out)
    }
}
