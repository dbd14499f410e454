//! Corpus benchmarking: every program under every domain and policy, with
//! trimmed-mean timing, rendered as a Markdown or JSON matrix.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Duration;

use serde::Serialize;

use crate::engine::verify::differential;
use crate::engine::{analyze, Analysis, AnalysisOptions, DomainKind};
use crate::metrics::Metrics;
use crate::normalize::NormalizePolicy;
use crate::report::PolicyReport;
use crate::syntax::{parse_program, Program};

#[derive(Clone, Debug)]
pub struct NamedPolicy {
    pub name: String,
    pub policy: NormalizePolicy,
}

impl NamedPolicy {
    pub fn new(name: &str, policy: NormalizePolicy) -> Self {
        NamedPolicy {
            name: name.to_string(),
            policy,
        }
    }

    /// The default and minimal normalization policies.
    pub fn standard() -> Vec<NamedPolicy> {
        vec![
            NamedPolicy::new("default", NormalizePolicy::default()),
            NamedPolicy::new("minimal", NormalizePolicy::minimal()),
        ]
    }
}

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub domains: Vec<DomainKind>,
    pub policies: Vec<NamedPolicy>,
    /// Timed runs per cell; with three or more the best and worst are
    /// dropped before averaging.
    pub runs: usize,
    /// Options shared by all cells; domain and policy are overridden.
    pub base: AnalysisOptions,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            domains: DomainKind::ALL.to_vec(),
            policies: NamedPolicy::standard(),
            runs: 5,
            base: AnalysisOptions::default(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CellResult {
    pub time_ms: f64,
    pub passes: usize,
    pub groups: u128,
    pub worst: u128,
    pub cliques: usize,
    pub size: usize,
    pub peak_size: usize,
    pub variants: usize,
    pub points: usize,
    pub warnings: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct BenchCell {
    pub program: String,
    pub domain: DomainKind,
    pub policy: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<CellResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Comparison of a clique-domain cell with its plain counterpart under the
/// same policy.
#[derive(Clone, Debug, Serialize)]
pub struct SoundnessCheck {
    pub program: String,
    pub policy: String,
    pub plain: DomainKind,
    pub clique: DomainKind,
    pub points_compared: usize,
    pub violations: Vec<String>,
    /// Points where both runs describe the same sharing but the clique
    /// representation is larger than the plain group count.
    pub larger_on_equal: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct BenchReport {
    pub runs: usize,
    pub domains: Vec<DomainKind>,
    pub policies: Vec<(String, PolicyReport)>,
    pub programs: Vec<String>,
    pub cells: Vec<BenchCell>,
    pub checks: Vec<SoundnessCheck>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stress: Option<StressReport>,
}

impl BenchReport {
    pub fn cell(&self, program: &str, domain: DomainKind, policy: &str) -> Option<&BenchCell> {
        self.cells
            .iter()
            .find(|c| c.program == program && c.domain == domain && c.policy == policy)
    }

    pub fn failures(&self) -> impl Iterator<Item = &BenchCell> {
        self.cells.iter().filter(|c| c.error.is_some())
    }
}

/// Mean after dropping the best and worst sample (when at least three).
pub fn trimmed_mean(samples: &[Duration]) -> Duration {
    if samples.is_empty() {
        return Duration::ZERO;
    }
    let mut s = samples.to_vec();
    s.sort();
    let kept = if s.len() >= 3 { &s[1..s.len() - 1] } else { &s[..] };
    kept.iter().sum::<Duration>() / kept.len() as u32
}

/// `.pl` files of `dir`, sorted by name.
pub fn corpus_files(dir: &Path) -> std::io::Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "pl"))
        .collect();
    files.sort();
    Ok(files)
}

fn program_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

/// Loads every corpus program; unreadable or unparsable ones carry the
/// error message.
pub fn load_corpus(dir: &Path) -> std::io::Result<Vec<(String, Result<Program, String>)>> {
    Ok(corpus_files(dir)?
        .into_iter()
        .map(|path| {
            let program = std::fs::read_to_string(&path)
                .map_err(|e| e.to_string())
                .and_then(|src| parse_program(&src).map_err(|e| e.to_string()));
            (program_name(&path), program)
        })
        .collect())
}

fn timed_cell(program: &Program, options: &AnalysisOptions, runs: usize) -> Result<(Analysis, CellResult), String> {
    let mut samples = Vec::with_capacity(runs.max(1));
    let mut last = None;
    for _ in 0..runs.max(1) {
        let a = analyze(program, options).map_err(|e| e.to_string())?;
        samples.push(a.elapsed);
        last = Some(a);
    }
    let a = last.expect("at least one run");
    let m = Metrics::of(&a);
    let result = CellResult {
        time_ms: trimmed_mean(&samples).as_secs_f64() * 1e3,
        passes: m.passes,
        groups: m.totals.groups,
        worst: m.totals.worst,
        cliques: m.totals.cliques,
        size: m.totals.size,
        peak_size: m.totals.peak_size,
        variants: m.totals.variants,
        points: m.totals.points,
        warnings: a.diagnostics.len(),
    };
    Ok((a, result))
}

fn larger_on_equal(plain: &Analysis, clique: &Analysis) -> Result<usize, String> {
    let pv = plain.point_views().map_err(|e| e.to_string())?;
    let mut count = 0;
    for (id, s) in clique.points() {
        if let Some(p) = pv.get(&id) {
            let (Some(pg), Ok(cv)) = (&p.groups, s.plain_view()) else { continue };
            if cv.groups.as_ref() == Some(pg) && s.size() > pg.len() {
                count += 1;
            }
        }
    }
    Ok(count)
}

pub fn bench_programs(programs: &[(String, Result<Program, String>)], config: &BenchConfig) -> BenchReport {
    let mut cells = Vec::new();
    let mut checks = Vec::new();
    for (name, program) in programs {
        for np in &config.policies {
            let mut analyses: Vec<(DomainKind, Analysis)> = Vec::new();
            for &domain in &config.domains {
                let options = AnalysisOptions {
                    domain,
                    policy: np.policy,
                    ..config.base.clone()
                };
                let outcome = match program {
                    Err(e) => Err(format!("parse: {e}")),
                    Ok(p) => timed_cell(p, &options, config.runs),
                };
                let (result, error) = match outcome {
                    Ok((a, r)) => {
                        analyses.push((domain, a));
                        (Some(r), None)
                    }
                    Err(e) => (None, Some(e)),
                };
                cells.push(BenchCell {
                    program: name.clone(),
                    domain,
                    policy: np.name.clone(),
                    result,
                    error,
                });
            }
            for (plain_kind, clique_kind) in crate::engine::verify::counterpart_pairs() {
                let find = |k| analyses.iter().find(|(d, _)| *d == k).map(|(_, a)| a);
                let (Some(plain), Some(clique)) = (find(plain_kind), find(clique_kind)) else {
                    continue;
                };
                let check = match differential(plain, clique) {
                    Ok(d) => SoundnessCheck {
                        program: name.clone(),
                        policy: np.name.clone(),
                        plain: plain_kind,
                        clique: clique_kind,
                        points_compared: d.points_compared,
                        violations: d.violations,
                        larger_on_equal: larger_on_equal(plain, clique).unwrap_or(0),
                    },
                    Err(e) => SoundnessCheck {
                        program: name.clone(),
                        policy: np.name.clone(),
                        plain: plain_kind,
                        clique: clique_kind,
                        points_compared: 0,
                        violations: vec![format!("comparison failed: {e}")],
                        larger_on_equal: 0,
                    },
                };
                checks.push(check);
            }
        }
    }
    BenchReport {
        runs: config.runs,
        domains: config.domains.clone(),
        policies: config
            .policies
            .iter()
            .map(|p| (p.name.clone(), PolicyReport::from(&p.policy)))
            .collect(),
        programs: programs.iter().map(|(n, _)| n.clone()).collect(),
        cells,
        checks,
        stress: None,
    }
}

pub fn bench_dir(dir: &Path, config: &BenchConfig) -> std::io::Result<BenchReport> {
    Ok(bench_programs(&load_corpus(dir)?, config))
}

fn cell_text(c: &BenchCell) -> String {
    match (&c.result, &c.error) {
        (Some(r), _) => format!("{:.2} ms, {} ({}), #C {}", r.time_ms, r.groups, r.worst, r.cliques),
        (None, Some(e)) => format!("error: {}", e.replace('|', "\\|")),
        (None, None) => "-".to_string(),
    }
}

pub fn render_markdown(report: &BenchReport) -> String {
    let mut out = String::new();
    for (pname, policy) in &report.policies {
        let _ = writeln!(
            out,
            "### policy `{pname}` (normalize at {}{})\n",
            policy.sites.join(", "),
            policy
                .widening_threshold
                .map_or(String::new(), |t| format!("; widening threshold {t}"))
        );
        let _ = write!(out, "| program |");
        for d in &report.domains {
            let _ = write!(out, " {d} |");
        }
        let _ = writeln!(out);
        let _ = write!(out, "|---|");
        for _ in &report.domains {
            let _ = write!(out, "---|");
        }
        let _ = writeln!(out);
        for prog in &report.programs {
            let _ = write!(out, "| {prog} |");
            for &d in &report.domains {
                let text = report.cell(prog, d, pname).map_or("-".to_string(), cell_text);
                let _ = write!(out, " {text} |");
            }
            let _ = writeln!(out);
        }
        let _ = writeln!(out);
    }
    let _ = writeln!(
        out,
        "Cells: trimmed mean time over {} runs, accumulated groups (worst case), clique count.\n",
        report.runs
    );
    if !report.checks.is_empty() {
        let _ = writeln!(out, "### differential soundness\n");
        let _ = writeln!(out, "| program | policy | pair | points | violations | larger on equal |");
        let _ = writeln!(out, "|---|---|---|---|---|---|");
        for c in &report.checks {
            let _ = writeln!(
                out,
                "| {} | {} | {} vs {} | {} | {} | {} |",
                c.program,
                c.policy,
                c.clique,
                c.plain,
                c.points_compared,
                c.violations.len(),
                c.larger_on_equal
            );
        }
        let _ = writeln!(out);
    }
    if let Some(s) = &report.stress {
        let _ = writeln!(out, "{}", s.render_markdown());
    }
    out
}

pub fn render_bench_json(report: &BenchReport) -> String {
    serde_json::to_string_pretty(report).expect("bench report serializes")
}

/// A program whose analysis carries sharing close to the full powerset of
/// `n` variables through several program points.
pub fn stress_program(n: usize) -> String {
    assert!(n >= 2, "stress program needs at least two variables");
    let vs: Vec<String> = (1..=n).map(|i| format!("V{i}")).collect();
    let args = vs.join(", ");
    let mut src = String::new();
    let _ = writeln!(src, ":- entry s({args}).");
    let _ = writeln!(src, "s({args}) :- V1 = f(V2, W), r({args}, W), t({args}).");
    let _ = writeln!(src, "r({args}, W).");
    let _ = writeln!(src, "t({args}) :- r({args}, _).");
    src
}

#[derive(Clone, Debug, Serialize)]
pub struct StressRow {
    pub domain: DomainKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<CellResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct StressReport {
    pub vars: usize,
    pub rows: Vec<StressRow>,
    /// Plain-sharing peak size over clique-sharing peak size, when both
    /// completed.
    pub peak_ratio: Option<f64>,
}

impl StressReport {
    pub fn render_markdown(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "### stress program ({} variables)\n", self.vars);
        let _ = writeln!(out, "| domain | time (ms) | groups (worst) | peak size | #C |");
        let _ = writeln!(out, "|---|---|---|---|---|");
        for row in &self.rows {
            match (&row.result, &row.error) {
                (Some(r), _) => {
                    let _ = writeln!(
                        out,
                        "| {} | {:.2} | {} ({}) | {} | {} |",
                        row.domain, r.time_ms, r.groups, r.worst, r.peak_size, r.cliques
                    );
                }
                (None, e) => {
                    let _ = writeln!(out, "| {} | error: {} | | | |", row.domain, e.clone().unwrap_or_default());
                }
            }
        }
        if let Some(r) = self.peak_ratio {
            let _ = writeln!(out, "\nPeak representation size ratio, sharing / clique-sharing: {r:.1}");
        }
        out
    }
}

/// Runs the stress program over all four domains.
pub fn stress(n: usize, base: &AnalysisOptions, runs: usize) -> StressReport {
    let program = parse_program(&stress_program(n)).expect("generated program parses");
    let rows: Vec<StressRow> = DomainKind::ALL
        .into_iter()
        .map(|domain| {
            let options = AnalysisOptions {
                domain,
                ..base.clone()
            };
            match timed_cell(&program, &options, runs) {
                Ok((_, r)) => StressRow {
                    domain,
                    result: Some(r),
                    error: None,
                },
                Err(e) => StressRow {
                    domain,
                    result: None,
                    error: Some(e),
                },
            }
        })
        .collect();
    let peak = |d: DomainKind| {
        rows.iter()
            .find(|r| r.domain == d)
            .and_then(|r| r.result.as_ref())
            .map(|r| r.peak_size.max(1) as f64)
    };
    let peak_ratio = match (peak(DomainKind::Sharing), peak(DomainKind::CliqueSharing)) {
        (Some(p), Some(c)) => Some(p / c),
        _ => None,
    };
    StressReport {
        vars: n,
        rows,
        peak_ratio,
    }
}
