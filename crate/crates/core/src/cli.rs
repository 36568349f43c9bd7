//! Command-line front end.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 invalid input, 3 internal
//! invariant violation.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use crate::corpus::{parse_corpus, validate_document, Document, Finding, Severity};
use crate::eval::{document_report, StatsReport};
use crate::render::{render_stats, render_trace};
use crate::segmenter::{run, AnalysisTrace, SegmentationError};

pub const EXIT_OK: u8 = 0;
pub const EXIT_IO: u8 = 1;
pub const EXIT_INVALID: u8 = 2;
pub const EXIT_INVARIANT: u8 = 3;

pub const DEFAULT_DEPTH_WARN: u32 = 7;

#[derive(Debug, Parser)]
#[command(
    name = "centered-seg",
    version,
    about = "Centered discourse segmentation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Segment each document and emit its analysis trace.
    Analyze(CommonArgs),
    /// Print the segmentation table for a corpus or a saved trace.
    Render(CommonArgs),
    /// Corpus statistics and resolution outcomes.
    Stats(CommonArgs),
    /// Check corpus files against the annotation schema.
    Validate(CommonArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Input files (a corpus, or for `render` also a trace).
    #[arg(required = true)]
    pub inputs: Vec<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Warn when the embedding depth exceeds this many levels.
    #[arg(long = "depth-warn", default_value_t = DEFAULT_DEPTH_WARN,
          value_parser = clap::value_parser!(u32).range(1..))]
    pub depth_warn: u32,
    /// Write artifacts here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl Command {
    pub fn args(&self) -> &CommonArgs {
        match self {
            Command::Analyze(a) | Command::Render(a) | Command::Stats(a) | Command::Validate(a) => {
                a
            }
        }
    }
}

/// A failed step, already formatted for the diagnostic stream.
#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn io(path: &Path, err: &io::Error) -> Self {
        Failure {
            code: EXIT_IO,
            message: format!("{}: {err}", path.display()),
        }
    }

    fn invalid(message: String) -> Self {
        Failure {
            code: EXIT_INVALID,
            message,
        }
    }
}

impl From<SegmentationError> for Failure {
    fn from(err: SegmentationError) -> Self {
        let code = match err {
            SegmentationError::Invariant(_) => EXIT_INVARIANT,
            _ => EXIT_INVALID,
        };
        Failure {
            code,
            message: err.to_string(),
        }
    }
}

struct Loaded {
    docs: Vec<Document>,
    findings: Vec<Finding>,
}

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    std::fs::read(path).map_err(|e| Failure::io(path, &e))
}

fn load(path: &Path) -> Result<Loaded, Failure> {
    let bytes = read(path)?;
    let docs =
        parse_corpus(&bytes).map_err(|e| Failure::invalid(format!("{}: {e}", path.display())))?;
    let findings = docs
        .iter()
        .flat_map(|d| validate_document(d).findings)
        .collect();
    Ok(Loaded { docs, findings })
}

fn has_errors(findings: &[Finding]) -> bool {
    findings.iter().any(|f| f.severity == Severity::Error)
}

type Analyzed = (Vec<(Document, AnalysisTrace)>, Vec<Finding>);

/// Load, validate and analyze one input.
fn analyze_file(path: &Path) -> Result<Analyzed, Failure> {
    let loaded = load(path)?;
    if has_errors(&loaded.findings) {
        let mut message = format!("{}: validation failed", path.display());
        for f in &loaded.findings {
            let _ = write!(message, "\n  {f}");
        }
        return Err(Failure::invalid(message));
    }
    let mut out = Vec::with_capacity(loaded.docs.len());
    for doc in loaded.docs {
        let trace = run(&doc)?;
        out.push((doc, trace));
    }
    Ok((out, loaded.findings))
}

/// Runs `f` over all inputs in parallel, keeping input order. Reports every
/// failure; the first one in input order decides the exit code.
fn per_input<T: Send>(
    inputs: &[PathBuf],
    err: &mut dyn Write,
    f: impl Fn(&Path) -> Result<T, Failure> + Sync,
) -> Result<Vec<T>, u8> {
    let results: Vec<Result<T, Failure>> = inputs.par_iter().map(|p| f(p)).collect();
    let mut ok = Vec::with_capacity(results.len());
    let mut code = None;
    for r in results {
        match r {
            Ok(v) => ok.push(v),
            Err(fail) => {
                let _ = writeln!(err, "error: {}", fail.message);
                code.get_or_insert(fail.code);
            }
        }
    }
    code.map_or(Ok(ok), Err)
}

fn report_warnings(findings: &[Finding], err: &mut dyn Write) {
    for f in findings {
        let _ = writeln!(err, "{f}");
    }
}

fn file_stem(id: &str) -> String {
    id.chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.') {
                c
            } else {
                '_'
            }
        })
        .collect()
}

/// Unique artifact names: a repeated document id gets a numeric suffix.
fn artifact_names<'a>(ids: impl Iterator<Item = &'a str>, ext: &str) -> Vec<String> {
    let mut seen = BTreeSet::new();
    ids.map(|id| {
        let stem = file_stem(id);
        let mut name = format!("{stem}.{ext}");
        let mut n = 2;
        while !seen.insert(name.clone()) {
            name = format!("{stem}-{n}.{ext}");
            n += 1;
        }
        name
    })
    .collect()
}

fn write_artifacts(dir: &Path, artifacts: &[(String, String)], err: &mut dyn Write) -> u8 {
    if let Err(e) = std::fs::create_dir_all(dir) {
        let _ = writeln!(err, "error: {}", Failure::io(dir, &e).message);
        return EXIT_IO;
    }
    for (name, body) in artifacts {
        let path = dir.join(name);
        if let Err(e) = std::fs::write(&path, body) {
            let _ = writeln!(err, "error: {}", Failure::io(&path, &e).message);
            return EXIT_IO;
        }
    }
    EXIT_OK
}

fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("in-memory serialization");
    s.push('\n');
    s
}

fn emit(text: &str, out: &mut dyn Write, err: &mut dyn Write) -> u8 {
    if let Err(e) = out.write_all(text.as_bytes()) {
        let _ = writeln!(err, "error: stdout: {e}");
        return EXIT_IO;
    }
    EXIT_OK
}

/// One line per step; the compact text form of a trace.
pub fn trace_summary(trace: &AnalysisTrace) -> String {
    let mut s = format!("document {}\n", trace.document);
    for step in &trace.steps {
        let cb = step
            .centering
            .cb
            .as_ref()
            .map_or("--", |e| trace.display_name(e));
        let open: Vec<String> = step
            .open_segments
            .iter()
            .map(|sp| format!("({},{},{})", sp.level, sp.beg, sp.end))
            .collect();
        let _ = writeln!(
            s,
            "U{} level={} block={} cb={} trans={} open={}",
            step.utterance,
            step.level,
            step.block_label(),
            cb,
            step.centering.transition.label(),
            open.join("")
        );
    }
    s
}

pub fn run_analyze(args: &CommonArgs, out: &mut dyn Write, err: &mut dyn Write) -> u8 {
    let analyzed = match per_input(&args.inputs, err, analyze_file) {
        Ok(v) => v,
        Err(code) => return code,
    };
    let mut traces = Vec::new();
    for (pairs, findings) in analyzed {
        report_warnings(&findings, err);
        traces.extend(pairs.into_iter().map(|(_, t)| t));
    }
    let body = |t: &AnalysisTrace| match args.format {
        Format::Json => to_json(t),
        Format::Text => trace_summary(t),
    };
    match &args.out {
        Some(dir) => {
            let ext = match args.format {
                Format::Json => "trace.json",
                Format::Text => "trace.txt",
            };
            let names = artifact_names(traces.iter().map(|t| t.document.as_str()), ext);
            let artifacts: Vec<_> = names.into_iter().zip(traces.iter().map(body)).collect();
            write_artifacts(dir, &artifacts, err)
        }
        None => {
            let text = match args.format {
                Format::Json => to_json(&traces),
                Format::Text => traces.iter().map(body).collect::<Vec<_>>().join("\n"),
            };
            emit(&text, out, err)
        }
    }
}

/// A render input is either a saved trace (object or array) or a corpus.
fn render_input(path: &Path) -> Result<Vec<AnalysisTrace>, Failure> {
    let bytes = read(path)?;
    if let Ok(trace) = serde_json::from_slice::<AnalysisTrace>(&bytes) {
        return Ok(vec![trace]);
    }
    if let Ok(traces) = serde_json::from_slice::<Vec<AnalysisTrace>>(&bytes) {
        if !traces.is_empty() {
            return Ok(traces);
        }
    }
    let (pairs, _) = analyze_file(path)?;
    Ok(pairs.into_iter().map(|(_, t)| t).collect())
}

pub fn run_render(args: &CommonArgs, out: &mut dyn Write, err: &mut dyn Write) -> u8 {
    let traces: Vec<AnalysisTrace> = match per_input(&args.inputs, err, render_input) {
        Ok(v) => v.into_iter().flatten().collect(),
        Err(code) => return code,
    };
    let body = |t: &AnalysisTrace| match args.format {
        Format::Text => render_trace(t),
        Format::Json => to_json(t),
    };
    match &args.out {
        Some(dir) => {
            let ext = match args.format {
                Format::Text => "table.txt",
                Format::Json => "trace.json",
            };
            let names = artifact_names(traces.iter().map(|t| t.document.as_str()), ext);
            let artifacts: Vec<_> = names.into_iter().zip(traces.iter().map(body)).collect();
            write_artifacts(dir, &artifacts, err)
        }
        None => {
            let text = match args.format {
                Format::Text => traces.iter().map(body).collect::<Vec<_>>().join("\n"),
                Format::Json => to_json(&traces),
            };
            emit(&text, out, err)
        }
    }
}

#[derive(Serialize)]
struct NamedReport<'a> {
    document: &'a str,
    report: &'a StatsReport,
}

#[derive(Serialize)]
struct StatsOutput<'a> {
    documents: Vec<NamedReport<'a>>,
    total: &'a StatsReport,
    depth_warn: u32,
    depth_exceeded: bool,
}

pub fn run_stats(args: &CommonArgs, out: &mut dyn Write, err: &mut dyn Write) -> u8 {
    let analyzed = match per_input(&args.inputs, err, analyze_file) {
        Ok(v) => v,
        Err(code) => return code,
    };
    let mut reports = Vec::new();
    for (pairs, findings) in &analyzed {
        report_warnings(findings, err);
        for (doc, trace) in pairs {
            reports.push((doc.id.clone(), document_report(doc, trace)));
        }
    }
    let mut total = StatsReport::default();
    for (_, r) in &reports {
        total.merge(r);
    }
    let threshold = args.depth_warn as usize;
    let exceeded = total.max_depth > threshold;
    for (id, r) in &reports {
        if r.max_depth > threshold {
            let _ = writeln!(
                err,
                "warning: {id}: embedding depth {} exceeds {threshold}",
                r.max_depth
            );
        }
    }
    let text = match args.format {
        Format::Text => render_stats(&reports, &total),
        Format::Json => to_json(&StatsOutput {
            documents: reports
                .iter()
                .map(|(id, report)| NamedReport {
                    document: id,
                    report,
                })
                .collect(),
            total: &total,
            depth_warn: args.depth_warn,
            depth_exceeded: exceeded,
        }),
    };
    match &args.out {
        Some(dir) => {
            let name = match args.format {
                Format::Text => "stats.txt",
                Format::Json => "stats.json",
            };
            write_artifacts(dir, &[(name.to_owned(), text)], err)
        }
        None => emit(&text, out, err),
    }
}

#[derive(Serialize)]
struct FileValidation {
    file: String,
    documents: Vec<String>,
    findings: Vec<Finding>,
}

pub fn run_validate(args: &CommonArgs, out: &mut dyn Write, err: &mut dyn Write) -> u8 {
    let checked = match per_input(&args.inputs, err, |p| {
        load(p).map(|l| FileValidation {
            file: p.display().to_string(),
            documents: l.docs.iter().map(|d| d.id.clone()).collect(),
            findings: l.findings,
        })
    }) {
        Ok(v) => v,
        Err(code) => return code,
    };
    let failed = checked.iter().any(|c| has_errors(&c.findings));
    let text = match args.format {
        Format::Json => to_json(&checked),
        Format::Text => {
            let mut s = String::new();
            for c in &checked {
                let status = if has_errors(&c.findings) {
                    "invalid"
                } else {
                    "ok"
                };
                let _ = writeln!(s, "{}: {status} ({} documents)", c.file, c.documents.len());
                for f in &c.findings {
                    let _ = writeln!(s, "  {f}");
                }
            }
            s
        }
    };
    for f in checked.iter().flat_map(|c| &c.findings) {
        let _ = writeln!(err, "{f}");
    }
    let code = match &args.out {
        Some(dir) => {
            let name = match args.format {
                Format::Text => "validation.txt",
                Format::Json => "validation.json",
            };
            write_artifacts(dir, &[(name.to_owned(), text)], err)
        }
        None => emit(&text, out, err),
    };
    if code != EXIT_OK {
        code
    } else if failed {
        EXIT_INVALID
    } else {
        EXIT_OK
    }
}

pub fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> u8 {
    match &cli.command {
        Command::Analyze(a) => run_analyze(a, out, err),
        Command::Render(a) => run_render(a, out, err),
        Command::Stats(a) => run_stats(a, out, err),
        Command::Validate(a) => run_validate(a, out, err),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn depth_warn_must_be_positive() {
        let parsed = Cli::try_parse_from(["centered-seg", "stats", "a.json", "--depth-warn", "0"]);
        assert!(parsed.is_err());
        let parsed = Cli::try_parse_from(["centered-seg", "stats", "a.json"]).unwrap();
        assert_eq!(parsed.command.args().depth_warn, 7);
    }

    #[test]
    fn inputs_are_required() {
        assert!(Cli::try_parse_from(["centered-seg", "validate"]).is_err());
    }

    #[test]
    fn repeated_ids_get_distinct_names() {
        let names = artifact_names(["a b", "a b", "c"].into_iter(), "trace.json");
        assert_eq!(
            names,
            ["a_b.trace.json", "a_b-2.trace.json", "c.trace.json"]
        );
    }
}
