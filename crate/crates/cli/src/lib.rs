//! Command-line driver: `analyze` a program or `bench` a corpus directory.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};

use cliquesh_core::bench::{self, BenchConfig, NamedPolicy};
use cliquesh_core::engine::verify::verify_run;
use cliquesh_core::engine::{analyze, AnalysisOptions, DomainKind, Severity};
use cliquesh_core::report::{render_json, render_table, RunReport, VerifyReport};
use cliquesh_core::syntax::parse_program;
use cliquesh_core::{NormalizePolicy, Site};

/// Exit status of a successful run.
pub const EXIT_OK: i32 = 0;
/// Error diagnostics, failed verification or an aborted analysis.
pub const EXIT_ANALYSIS: i32 = 1;
/// Bad flags, unreadable or unparsable input.
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "cliquesh", version, about = "Set-sharing analysis with clique-based domains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Analyze one program from its entry declarations.
    Analyze(AnalyzeArgs),
    /// Run every `.pl` file of a directory under several domains and policies.
    Bench(BenchArgs),
}

#[derive(Args, Debug)]
struct AnalysisFlags {
    /// Normalize clique pairs here as well as at the mandatory extend and
    /// compare sites.
    #[arg(long = "normalize-at", value_name = "SITE", value_parser = parse_site)]
    normalize_at: Vec<Site>,
    /// Widen instead of normalizing: accept a candidate clique when at least
    /// this fraction of its subsets is present.
    #[arg(long, value_name = "F", value_parser = parse_threshold)]
    widening_threshold: Option<f64>,
    /// Unify heads under freeness, assuming head variables free.
    #[arg(long)]
    free_head_call2entry: bool,
    /// Fail on calls to undefined predicates.
    #[arg(long)]
    unknown_is_error: bool,
    /// Per-predicate cap on call variants.
    #[arg(long, value_name = "N")]
    max_variants: Option<usize>,
    /// Abort when a substitution grows past this many groups.
    #[arg(long, value_name = "N", default_value_t = 1 << 20)]
    max_groups: usize,
    #[arg(long, value_name = "N", default_value_t = 500)]
    max_passes: usize,
}

impl AnalysisFlags {
    fn policy(&self) -> NormalizePolicy {
        let mut policy = if self.normalize_at.is_empty() {
            NormalizePolicy::default()
        } else {
            NormalizePolicy::from_sites(&self.normalize_at)
        };
        policy.widening_threshold = self.widening_threshold;
        policy
    }

    fn options(&self, domain: DomainKind) -> AnalysisOptions {
        AnalysisOptions {
            domain,
            policy: self.policy(),
            free_head_call2entry: self.free_head_call2entry,
            max_variants: self.max_variants,
            unknown_is_error: self.unknown_is_error,
            max_groups: Some(self.max_groups),
            max_passes: self.max_passes,
            ..AnalysisOptions::default()
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ReportFormat {
    Table,
    Json,
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    file: PathBuf,
    /// Repeat (or separate with commas) to compare domains side by side.
    #[arg(long, value_name = "DOMAIN", value_parser = parse_domain, value_delimiter = ',',
          default_value = "clique-sharing")]
    domain: Vec<DomainKind>,
    #[command(flatten)]
    flags: AnalysisFlags,
    #[arg(long, value_enum, default_value_t = ReportFormat::Table)]
    report: ReportFormat,
    /// Cross-check small steps against the reference implementations and
    /// compare clique domains with their plain counterparts.
    #[arg(long)]
    verify: bool,
    /// Treat warnings as errors for the exit status.
    #[arg(long)]
    deny_warnings: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum BenchFormat {
    Markdown,
    Json,
}

#[derive(Args, Debug)]
struct BenchArgs {
    dir: PathBuf,
    #[arg(long, value_name = "DOMAIN", value_parser = parse_domain, value_delimiter = ',')]
    domain: Vec<DomainKind>,
    #[command(flatten)]
    flags: AnalysisFlags,
    /// Timed runs per cell.
    #[arg(long, default_value_t = 5)]
    runs: usize,
    #[arg(long, value_enum, default_value_t = BenchFormat::Markdown)]
    format: BenchFormat,
    /// Also run the generated stress program over this many variables.
    #[arg(long, value_name = "N")]
    stress: Option<usize>,
}

fn parse_site(s: &str) -> Result<Site, String> {
    Site::parse(s).ok_or_else(|| {
        let names: Vec<&str> = Site::ALL.iter().map(|s| s.name()).collect();
        format!("expected one of {}", names.join(", "))
    })
}

fn parse_domain(s: &str) -> Result<DomainKind, String> {
    DomainKind::parse(s).ok_or_else(|| {
        let names: Vec<&str> = DomainKind::ALL.iter().map(|d| d.name()).collect();
        format!("expected one of {}", names.join(", "))
    })
}

fn parse_threshold(s: &str) -> Result<f64, String> {
    let t: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if t > 0.0 && t <= 1.0 {
        Ok(t)
    } else {
        Err("threshold must lie in (0, 1]".to_string())
    }
}

/// Failure carrying the exit status it maps to.
struct Failure {
    code: i32,
    error: anyhow::Error,
}

fn usage(error: anyhow::Error) -> Failure {
    Failure {
        code: EXIT_USAGE,
        error,
    }
}

fn analysis_failure(error: anyhow::Error) -> Failure {
    Failure {
        code: EXIT_ANALYSIS,
        error,
    }
}

/// Parses `args` (including the program name) and runs the command,
/// writing the report to `out` and messages to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
            } else {
                let _ = write!(out, "{text}");
            }
            return code;
        }
    };
    let result = match cli.command {
        Command::Analyze(a) => run_analyze(a, out, err),
        Command::Bench(b) => run_bench(b, out, err),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {:#}", f.error);
            f.code
        }
    }
}

fn run_analyze(args: AnalyzeArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    let source = std::fs::read_to_string(&args.file)
        .with_context(|| format!("cannot read {}", args.file.display()))
        .map_err(usage)?;
    let program = parse_program(&source)
        .with_context(|| format!("{}", args.file.display()))
        .map_err(usage)?;
    let name = args
        .file
        .file_stem()
        .map_or_else(|| args.file.display().to_string(), |s| s.to_string_lossy().into_owned());

    let mut reports = Vec::new();
    let mut failed = false;
    for &domain in &args.domain {
        let options = args.flags.options(domain);
        let context = || format!("analysis of {name} over {domain}");
        let report = if args.verify {
            let run = verify_run(&program, &options)
                .with_context(context)
                .map_err(analysis_failure)?;
            let mut report = RunReport::new(&name, &program, &run.analysis);
            let violations: Vec<String> = run.violations().map(str::to_string).collect();
            report.verify = Some(VerifyReport {
                step_checks: run.analysis.verify_checks,
                points_compared: run.differential.as_ref().map_or(0, |d| d.points_compared),
                passed: violations.is_empty(),
                violations,
            });
            report
        } else {
            let analysis = analyze(&program, &options)
                .with_context(context)
                .map_err(analysis_failure)?;
            RunReport::new(&name, &program, &analysis)
        };
        failed |= report.verify.as_ref().is_some_and(|v| !v.passed);
        failed |= report.diagnostics.iter().any(|d| {
            d.severity == Severity::Error || (args.deny_warnings && d.severity == Severity::Warning)
        });
        reports.push(report);
    }

    let text = match args.report {
        ReportFormat::Table => render_table(&reports),
        ReportFormat::Json => render_json(&reports) + "\n",
    };
    write_out(out, &text)?;
    if failed {
        let _ = writeln!(err, "analysis reported errors");
        Ok(EXIT_ANALYSIS)
    } else {
        Ok(EXIT_OK)
    }
}

fn run_bench(args: BenchArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    let mut policies = if args.flags.normalize_at.is_empty() {
        NamedPolicy::standard()
    } else {
        vec![NamedPolicy::new("custom", NormalizePolicy::from_sites(&args.flags.normalize_at))]
    };
    if let Some(t) = args.flags.widening_threshold {
        let mut widened = policies[0].policy;
        widened.widening_threshold = Some(t);
        policies.push(NamedPolicy::new(&format!("widen-{t}"), widened));
    }
    let base = args.flags.options(DomainKind::CliqueSharing);
    let config = BenchConfig {
        domains: if args.domain.is_empty() {
            DomainKind::ALL.to_vec()
        } else {
            args.domain.clone()
        },
        policies,
        runs: args.runs,
        base: base.clone(),
    };
    let mut report = bench::bench_dir(&args.dir, &config)
        .with_context(|| format!("cannot read corpus directory {}", args.dir.display()))
        .map_err(usage)?;
    if let Some(n) = args.stress {
        if n < 2 {
            return Err(usage(anyhow::anyhow!("--stress needs at least 2 variables")));
        }
        report.stress = Some(bench::stress(n, &base, args.runs));
    }
    let text = match args.format {
        BenchFormat::Markdown => bench::render_markdown(&report),
        BenchFormat::Json => bench::render_bench_json(&report) + "\n",
    };
    write_out(out, &text)?;

    let failures = report.failures().count();
    let violations: usize = report.checks.iter().map(|c| c.violations.len()).sum();
    for cell in report.failures() {
        let _ = writeln!(
            err,
            "{} [{}; {}]: {}",
            cell.program,
            cell.domain,
            cell.policy,
            cell.error.as_deref().unwrap_or_default()
        );
    }
    if failures > 0 || violations > 0 {
        let _ = writeln!(err, "{failures} failed cells, {violations} soundness violations");
        Ok(EXIT_ANALYSIS)
    } else {
        Ok(EXIT_OK)
    }
}

fn write_out(out: &mut dyn Write, text: &str) -> Result<(), Failure> {
    out.write_all(text.as_bytes())
        .and_then(|_| out.flush())
        .context("cannot write report")
        .map_err(analysis_failure)
}
