//! Plain-text rendering of analysis traces and statistics.
//!
//! Output is pure ASCII apart from the entity surfaces themselves, and
//! depends only on the input, so it is byte-stable across runs.

use std::fmt::Write as _;

use crate::corpus::{CfEntry, ExpressionCategory};
use crate::eval::{DistanceBucket, LocusCategory, StatsReport};
use crate::registry::SegmentStatus;
use crate::segmenter::AnalysisTrace;

const LEGEND: &str =
    "levels: '+-' begins a segment, '|' extends it; '~' marks a Cf entry mediated by ellipsis";

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mark {
    Empty,
    Begin,
    Extend,
}

fn level_marks(trace: &AnalysisTrace, utterance: usize, levels: usize) -> Vec<Mark> {
    (1..=levels)
        .map(|level| {
            let segs = trace
                .final_registry
                .archive()
                .iter()
                .filter(|s| s.level == level);
            let mut mark = Mark::Empty;
            for seg in segs {
                if seg.beg == utterance {
                    return Mark::Begin;
                }
                // Absorbed segments collapse into the level they were lifted to.
                if seg.status != SegmentStatus::Absorbed && seg.contains(utterance) {
                    mark = Mark::Extend;
                }
            }
            mark
        })
        .collect()
}

fn cf_text(trace: &AnalysisTrace, cf: &[CfEntry]) -> String {
    let items: Vec<String> = cf
        .iter()
        .map(|e| {
            let name = trace.display_name(&e.entity);
            if e.mediated {
                format!("~{name}")
            } else {
                name.to_owned()
            }
        })
        .collect();
    format!("[{}]", items.join(", "))
}

fn push_line(out: &mut String, line: &str) {
    out.push_str(line.trim_end());
    out.push('\n');
}

/// Table of utterances with centering data, transition, segment levels,
/// and the block that fired.
pub fn render_trace(trace: &AnalysisTrace) -> String {
    let levels = trace.final_registry.max_level().max(1);
    let rows: Vec<[String; 5]> = trace
        .steps
        .iter()
        .map(|step| {
            let cb = step
                .centering
                .cb
                .as_ref()
                .map_or("--", |cb| trace.display_name(cb));
            [
                format!("({})", step.utterance),
                format!("Cb: {cb}"),
                format!("Cf: {}", cf_text(trace, &step.cf)),
                step.centering.transition.label().to_owned(),
                step.block_label(),
            ]
        })
        .collect();

    let width = |col: usize, header: &str| {
        rows.iter()
            .map(|r| r[col].chars().count())
            .chain(std::iter::once(header.chars().count()))
            .max()
            .unwrap_or(0)
    };
    let w_u = width(0, "U_i");
    let w_c = width(1, "Centering Data").max(width(2, ""));
    let w_t = width(3, "Trans.");
    let w_l = levels * 3;

    let mut out = String::new();
    let _ = writeln!(out, "Document: {}", trace.document);
    push_line(&mut out, LEGEND);
    out.push('\n');
    let level_header: String = (1..=levels).map(|l| format!("{l:<3}")).collect();
    push_line(
        &mut out,
        &format!(
            "{:<w_u$} | {:<w_c$} | {:<w_t$} | {:<w_l$} | Block",
            "U_i", "Centering Data", "Trans.", level_header
        ),
    );
    push_line(
        &mut out,
        &format!(
            "{}-+-{}-+-{}-+-{}-+-{}",
            "-".repeat(w_u),
            "-".repeat(w_c),
            "-".repeat(w_t),
            "-".repeat(w_l),
            "-".repeat(5)
        ),
    );
    for (step, row) in trace.steps.iter().zip(&rows) {
        let marks = level_marks(trace, step.utterance, levels);
        let first: String = marks
            .iter()
            .map(|m| match m {
                Mark::Empty => "   ",
                Mark::Begin => "+- ",
                Mark::Extend => "|  ",
            })
            .collect();
        let second: String = marks
            .iter()
            .map(|m| if *m == Mark::Empty { "   " } else { "|  " })
            .collect();
        push_line(
            &mut out,
            &format!(
                "{:<w_u$} | {:<w_c$} | {:<w_t$} | {:<w_l$} | {}",
                row[0], row[1], row[3], first, row[4]
            ),
        );
        push_line(
            &mut out,
            &format!(
                "{:<w_u$} | {:<w_c$} | {:<w_t$} | {:<w_l$} |",
                "", row[2], "", second
            ),
        );
    }
    out
}

/// Monospace table: left-aligned label column, right-aligned value columns.
fn table(title: &str, columns: &[String], rows: &[(String, Vec<String>)]) -> String {
    let label_w = rows
        .iter()
        .map(|(l, _)| l.chars().count())
        .max()
        .unwrap_or(0);
    let widths: Vec<usize> = columns
        .iter()
        .enumerate()
        .map(|(c, h)| {
            rows.iter()
                .map(|(_, v)| v[c].chars().count())
                .chain(std::iter::once(h.chars().count()))
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = String::new();
    push_line(&mut out, title);
    let mut header = format!("{:<label_w$}", "");
    for (h, w) in columns.iter().zip(&widths) {
        let _ = write!(header, " | {h:>w$}");
    }
    push_line(&mut out, &header);
    let mut rule = "-".repeat(label_w);
    for w in &widths {
        let _ = write!(rule, "-+-{}", "-".repeat(*w));
    }
    push_line(&mut out, &rule);
    for (label, values) in rows {
        let mut line = format!("{label:<label_w$}");
        for (v, w) in values.iter().zip(&widths) {
            let _ = write!(line, " | {v:>w$}");
        }
        push_line(&mut out, &line);
    }
    out
}

/// Statistics tables; one column per named report plus a total column.
pub fn render_stats(reports: &[(String, StatsReport)], total: &StatsReport) -> String {
    let all: Vec<&StatsReport> = reports.iter().map(|(_, r)| r).chain([total]).collect();
    let mut columns: Vec<String> = reports.iter().map(|(n, _)| n.clone()).collect();
    columns.push("Sum".to_owned());

    let row = |label: &str, f: &dyn Fn(&StatsReport) -> String| {
        (
            label.to_owned(),
            all.iter().map(|r| f(r)).collect::<Vec<_>>(),
        )
    };
    let gold_row = |label: &str, f: &dyn Fn(&StatsReport) -> String| {
        row(label, &|r: &StatsReport| {
            if r.has_gold() {
                f(r)
            } else {
                "n/a".to_owned()
            }
        })
    };

    let mut out = String::new();
    out.push_str(&table(
        "Test set",
        &columns,
        &[
            row("anaphors", &|r| r.counts.anaphors.to_string()),
            row("ellipses", &|r| r.counts.ellipses.to_string()),
            row("utterances", &|r| r.counts.utterances.to_string()),
            row("words", &|r| r.counts.words.to_string()),
            row("max depth", &|r| r.max_depth.to_string()),
        ],
    ));

    for (category, title) in [
        (
            ExpressionCategory::Anaphor,
            "Anaphoric antecedent in utterance U_x",
        ),
        (
            ExpressionCategory::Ellipsis,
            "Elliptical antecedent in utterance U_x",
        ),
    ] {
        let rows: Vec<_> = DistanceBucket::ALL
            .iter()
            .map(|&b| {
                gold_row(&b.to_string(), &|r: &StatsReport| {
                    r.distance.get(category).get(b).to_string()
                })
            })
            .collect();
        out.push('\n');
        out.push_str(&table(title, &columns, &rows));
    }

    let deepest = all
        .iter()
        .flat_map(|r| [&r.locus.anaphors, &r.locus.ellipses])
        .flat_map(|h| h.rows.keys())
        .filter_map(|c| match c {
            LocusCategory::SegEndCp(k) => Some(*k),
            _ => None,
        })
        .max()
        .unwrap_or(1);
    let mut categories = vec![
        LocusCategory::IntraUtterance,
        LocusCategory::PrevCf,
        LocusCategory::PrevSegEndCp,
        LocusCategory::PrevSegEndCf,
    ];
    categories.extend((2..=deepest).map(LocusCategory::SegEndCp));

    for (category, title) in [
        (
            ExpressionCategory::Anaphor,
            "Anaphoric antecedent in center_x",
        ),
        (
            ExpressionCategory::Ellipsis,
            "Elliptical antecedent in center_x",
        ),
    ] {
        let mut rows: Vec<_> = categories
            .iter()
            .map(|&c| {
                gold_row(&c.to_string(), &|r: &StatsReport| {
                    r.locus.get(category).get(c).to_string()
                })
            })
            .collect();
        rows.push(gold_row("errors", &|r| {
            r.locus.get(category).errors.to_string()
        }));
        rows.push(gold_row("false positives", &|r| {
            format!("({})", r.locus.get(category).false_positives)
        }));
        out.push('\n');
        out.push_str(&table(title, &columns, &rows));
    }
    out
}
