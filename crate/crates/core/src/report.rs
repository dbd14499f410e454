//! Report assembly. The table and JSON renderings are produced from the
//! same [`RunReport`] value.

use std::fmt::Write as _;

use serde::Serialize;

use crate::engine::{Analysis, Diagnostic, DomainKind};
use crate::metrics::{Metrics, Totals};
use crate::normalize::NormalizePolicy;
use crate::notation::render_vars;
use crate::syntax::Program;

#[derive(Clone, Debug, Serialize)]
pub struct PolicyReport {
    pub sites: Vec<&'static str>,
    pub widening_threshold: Option<f64>,
}

impl From<&NormalizePolicy> for PolicyReport {
    fn from(p: &NormalizePolicy) -> Self {
        PolicyReport {
            sites: p.sites().into_iter().map(|s| s.name()).collect(),
            widening_threshold: p.widening_threshold,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EntryReport {
    pub goal: String,
    pub call: String,
    pub success: String,
    /// `None` when the success is unreachable.
    pub ground: Option<String>,
    /// `None` for domains without freeness.
    pub free: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub step_checks: usize,
    pub points_compared: usize,
    pub violations: Vec<String>,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub program: String,
    pub domain: DomainKind,
    pub policy: PolicyReport,
    pub free_head_call2entry: bool,
    pub time_ms: f64,
    pub passes: usize,
    pub totals: Totals,
    pub variant_counts: std::collections::BTreeMap<String, usize>,
    pub entries: Vec<EntryReport>,
    pub points: Vec<crate::metrics::PointMetrics>,
    pub diagnostics: Vec<Diagnostic>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verify: Option<VerifyReport>,
}

impl RunReport {
    pub fn new(name: &str, program: &Program, analysis: &Analysis) -> RunReport {
        let metrics = Metrics::of(analysis);
        let entries = analysis
            .entries
            .iter()
            .map(|e| {
                let decl = program.entries.get(e.index);
                let names: Vec<String> = match decl {
                    Some(decl) => decl.names.clone(),
                    None => default_names(e.call.domain()),
                };
                let goal = match decl {
                    Some(decl) => decl.display(),
                    None => format!("entry {}", e.index + 1),
                };
                EntryReport {
                    goal,
                    call: e.call.render(&names),
                    success: e.success.render(&names),
                    ground: e.success.ground_vars().map(|g| render_vars(g, &names)),
                    free: if e.success.is_bottom() {
                        None
                    } else {
                        e.success.free_vars().map(|f| render_vars(f, &names))
                    },
                }
            })
            .collect();
        RunReport {
            program: name.to_string(),
            domain: analysis.options.domain,
            policy: PolicyReport::from(&analysis.options.policy),
            free_head_call2entry: analysis.options.free_head_call2entry,
            time_ms: metrics.time_ms,
            passes: metrics.passes,
            totals: metrics.totals,
            variant_counts: metrics.variant_counts,
            entries,
            points: metrics.points,
            diagnostics: analysis.diagnostics.clone(),
            verify: None,
        }
    }

    /// `groups (worst)` as printed in the precision column.
    pub fn precision(&self) -> String {
        format!("{} ({})", self.totals.groups, self.totals.worst)
    }
}

fn default_names(domain: crate::VarSet) -> Vec<String> {
    let n = domain.iter().map(|v| v.index() + 1).max().unwrap_or(0);
    (0..n).map(|i| format!("V{i}")).collect()
}

/// Program summary rows (one per run) followed by each run's entries.
pub fn render_table(runs: &[RunReport]) -> String {
    let mut out = String::new();
    let header = ["program", "domain", "time (ms)", "precision", "#C", "variants", "points"];
    let rows: Vec<[String; 7]> = runs
        .iter()
        .map(|r| {
            [
                r.program.clone(),
                r.domain.to_string(),
                format!("{:.2}", r.time_ms),
                r.precision(),
                r.totals.cliques.to_string(),
                r.totals.variants.to_string(),
                r.totals.points.to_string(),
            ]
        })
        .collect();
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: Vec<&str>, out: &mut String| {
        let padded: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}", w = *w))
            .collect();
        let _ = writeln!(out, "{}", padded.join("  ").trim_end());
    };
    line(header.to_vec(), &mut out);
    for row in &rows {
        line(row.iter().map(String::as_str).collect(), &mut out);
    }
    for r in runs {
        let _ = writeln!(out);
        let _ = writeln!(
            out,
            "{} [{}; normalize at {}{}]",
            r.program,
            r.domain,
            r.policy.sites.join(","),
            r.policy
                .widening_threshold
                .map_or(String::new(), |t| format!("; widening {t}"))
        );
        for e in &r.entries {
            let _ = writeln!(out, "  entry {}", e.goal);
            let _ = writeln!(out, "    call:    {}", e.call);
            let _ = writeln!(out, "    success: {}", e.success);
            if let Some(g) = &e.ground {
                let _ = writeln!(out, "    ground:  {g}");
            }
            if let Some(f) = &e.free {
                let _ = writeln!(out, "    free:    {f}");
            }
        }
        for d in &r.diagnostics {
            let sev = match d.severity {
                crate::engine::Severity::Warning => "warning",
                crate::engine::Severity::Error => "error",
            };
            let _ = writeln!(out, "  {sev}: {}", d.message);
        }
        if let Some(v) = &r.verify {
            let _ = writeln!(
                out,
                "  verify: {} ({} step checks, {} points compared)",
                if v.passed { "passed" } else { "FAILED" },
                v.step_checks,
                v.points_compared
            );
            for msg in &v.violations {
                let _ = writeln!(out, "    {msg}");
            }
        }
    }
    out
}

pub fn render_json(runs: &[RunReport]) -> String {
    serde_json::to_string_pretty(runs).expect("report serializes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{analyze, AnalysisOptions};
    use crate::syntax::parse_program;

    fn report(src: &str, d: DomainKind) -> RunReport {
        let program = parse_program(src).unwrap();
        let a = analyze(&program, &AnalysisOptions::with_domain(d)).unwrap();
        RunReport::new("toy", &program, &a)
    }

    const APP: &str = ":- entry app(A, B, C) : ground(A), free(C).\n\
                       app([], L, L).\napp([H|T], L, [H|R]) :- app(T, L, R).\n";

    #[test]
    fn plain_sharing_has_no_cliques() {
        let r = report(APP, DomainKind::Sharing);
        assert_eq!(r.totals.cliques, 0);
        assert!(render_table(&[r]).contains("sharing"));
    }

    #[test]
    fn formats_agree() {
        let runs = vec![report(APP, DomainKind::Sharing), report(APP, DomainKind::CliqueSharing)];
        let table = render_table(&runs);
        let json: serde_json::Value = serde_json::from_str(&render_json(&runs)).unwrap();
        for (i, r) in runs.iter().enumerate() {
            let j = &json[i];
            assert_eq!(j["totals"]["cliques"], r.totals.cliques);
            assert_eq!(j["totals"]["groups"].as_u64().unwrap() as u128, r.totals.groups);
            assert_eq!(j["entries"][0]["success"], r.entries[0].success.as_str());
            assert!(table.contains(&r.precision()));
            assert!(table.contains(&r.entries[0].success));
            let sum: u64 = j["points"].as_array().unwrap().iter().map(|p| p["groups"].as_u64().unwrap()).sum();
            assert_eq!(sum as u128, r.totals.groups);
        }
        assert!(runs[1].totals.groups <= runs[1].totals.worst);
    }
}
