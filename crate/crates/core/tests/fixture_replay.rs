mod common;

use centered_seg::centering::TransitionType;
use centered_seg::corpus::ExpressionCategory;
use centered_seg::eval::{document_report, score, DistanceBucket, LocusCategory, OutcomeKind};
use centered_seg::registry::SegmentStatus;
use centered_seg::render::render_trace;
use centered_seg::resolver::{is_reachable, LocusClause};
use centered_seg::segmenter::{lift, run, Segmenter};

use common::{id, sample};

#[test]
fn block_column() {
    let doc = sample();
    let trace = run(&doc).unwrap();
    let blocks: Vec<String> = trace.steps[1..].iter().map(|s| s.block_label()).collect();
    assert_eq!(
        blocks,
        ["1", "1", "2c", "3", "1, Lift", "1", "3", "3", "3", "1, Lift", "2b", "1"]
    );
}

#[test]
fn backward_centers_and_transitions() {
    let doc = sample();
    let trace = run(&doc).unwrap();
    let cbs: Vec<&str> = trace.steps[1..]
        .iter()
        .map(|s| {
            s.centering
                .cb
                .as_ref()
                .map_or("-", |e| trace.display_name(e))
        })
        .collect();
    assert_eq!(
        cbs,
        [
            "1260",
            "1260",
            "-",
            "Handbuch",
            "Handbuch",
            "Handbuch",
            "Inhaltsverzeichnis",
            "Kapitel",
            "1260",
            "Auto-Continue-Funktion",
            "-",
            "1260"
        ]
    );
    use TransitionType::*;
    let transitions: Vec<TransitionType> = trace.steps[1..]
        .iter()
        .map(|s| s.centering.transition)
        .collect();
    assert_eq!(
        transitions,
        [
            Continue,
            Continue,
            None,
            Continue,
            Continue,
            Continue,
            SmoothShift,
            SmoothShift,
            RoughShift,
            SmoothShift,
            None,
            Continue
        ]
    );
}

#[test]
fn segment_set() {
    let doc = sample();
    let trace = run(&doc).unwrap();
    let segs: Vec<(usize, usize, usize, SegmentStatus)> = trace
        .final_registry
        .archive()
        .iter()
        .map(|s| (s.level, s.beg, s.end, s.status))
        .collect();
    use SegmentStatus::*;
    let mut expected = vec![
        (1, 1, 3, Open),
        (2, 4, 7, Open),
        (3, 5, 5, Absorbed),
        (3, 8, 11, Closed),
        (4, 9, 10, Absorbed),
        (5, 10, 10, Absorbed),
        (3, 12, 13, Open),
    ];
    let mut got = segs.clone();
    got.sort_by_key(|s| (s.1, s.0));
    expected.sort_by_key(|s| (s.1, s.0));
    assert_eq!(got, expected);
    assert_eq!(trace.max_depth(), 5);
}

#[test]
fn lift_on_sample_states() {
    let doc = sample();
    let mut seg = Segmenter::new(&doc).unwrap();
    for _ in 0..4 {
        seg.advance().unwrap();
    }
    // State after U5, before U6.
    let out = lift(&doc, seg.registry(), 3, 6);
    assert_eq!(out.level, 2);
    assert_eq!(out.hops, [(2, 5)]);
    for _ in 0..5 {
        seg.advance().unwrap();
    }
    // State after U10, before U11.
    let out = lift(&doc, seg.registry(), 5, 11);
    assert_eq!(out.level, 3);
    assert_eq!(out.hops, [(4, 10), (3, 9)]);
    assert_eq!(lift(&doc, seg.registry(), 2, 11).level, 2);
}

#[test]
fn reachability_on_sample_states() {
    let doc = sample();
    let mut seg = Segmenter::new(&doc).unwrap();
    for _ in 0..4 {
        seg.advance().unwrap();
    }
    let snap = seg.registry().reachable_snapshot(&doc);
    assert_eq!(snap.next_utterance, 6);
    assert_eq!(
        snap.previous.as_ref().map(|v| (v.level, v.utterance)),
        Some((3, 5))
    );
    assert_eq!(
        snap.segment_end.as_ref().map(|v| (v.level, v.utterance)),
        Some((2, 4))
    );
    let deeper: Vec<_> = snap
        .deeper
        .iter()
        .map(|v| (v.level, v.utterance, v.entry.entity.clone()))
        .collect();
    assert_eq!(deeper, [(1, 3, id("hl1260"))]);

    seg.advance().unwrap();
    // After U6: the manual is the preferred center of the previous utterance.
    let locus = is_reachable(&doc, seg.registry(), &id("handbuch"), 2, 7);
    assert_eq!(locus.clause, LocusClause::PrevCf);
    assert_eq!((locus.utterance, locus.rank), (Some(6), Some(1)));

    for _ in 0..5 {
        seg.advance().unwrap();
    }
    // After U11: levels 4 and 5 are gone, so the printer is found at the
    // end of level 2.
    let locus = is_reachable(&doc, seg.registry(), &id("hl1260"), 3, 12);
    assert_eq!(locus.clause, LocusClause::PrevSegEndCf);
    assert_eq!((locus.level, locus.utterance), (Some(2), Some(7)));
    let snap = seg.registry().reachable_snapshot(&doc);
    assert_eq!(snap.previous.as_ref().map(|v| v.utterance), Some(11));
    assert_eq!(snap.segment_end.as_ref().map(|v| v.utterance), Some(7));
}

#[test]
fn outcomes() {
    let doc = sample();
    let trace = run(&doc).unwrap();
    let scoring = score(&doc, &trace);
    assert_eq!(scoring.scored.len(), 17);
    let not_correct: Vec<_> = scoring
        .scored
        .iter()
        .filter(|s| s.outcome.value != OutcomeKind::Correct)
        .map(|s| (s.expression.0.as_str(), s.outcome.value))
        .collect();
    assert_eq!(not_correct, [("u12.1", OutcomeKind::FalsePositive)]);
}

#[test]
fn statistics() {
    let doc = sample();
    let trace = run(&doc).unwrap();
    let report = document_report(&doc, &trace);
    assert_eq!(report.counts.anaphors, 9);
    assert_eq!(report.counts.ellipses, 8);
    assert_eq!(report.counts.utterances, 13);
    assert_eq!(report.counts.words, 159);
    assert_eq!(report.max_depth, 5);

    let ana = report.distance.get(ExpressionCategory::Anaphor);
    assert_eq!(ana.get(DistanceBucket::Back(1)), 8);
    assert_eq!(ana.get(DistanceBucket::Back(2)), 1);
    assert_eq!(ana.total(), 9);
    let ell = report.distance.get(ExpressionCategory::Ellipsis);
    assert_eq!(ell.get(DistanceBucket::Back(1)), 5);
    assert_eq!(ell.get(DistanceBucket::Back(2)), 3);
    assert_eq!(ell.total(), 8);

    let ana = report.locus.get(ExpressionCategory::Anaphor);
    assert_eq!(ana.get(LocusCategory::PrevCf), 8);
    assert_eq!(ana.get(LocusCategory::PrevSegEndCf), 1);
    assert_eq!(ana.false_positives, 1);
    assert_eq!(ana.errors, 0);
    let ell = report.locus.get(ExpressionCategory::Ellipsis);
    assert_eq!(ell.get(LocusCategory::PrevCf), 5);
    assert_eq!(ell.get(LocusCategory::PrevSegEndCp), 1);
    assert_eq!(ell.get(LocusCategory::PrevSegEndCf), 2);
    assert_eq!(ell.false_positives, 0);
    assert_eq!(ell.errors, 0);
}

#[test]
fn rendered_table_matches_golden_file() {
    let doc = sample();
    let trace = run(&doc).unwrap();
    let text = render_trace(&trace);
    let golden = include_str!("../fixtures/sample_table.txt");
    assert_eq!(text, golden);

    let row8 = text.lines().find(|l| l.starts_with("(8)")).unwrap();
    assert!(row8.contains("Cb: Inhaltsverzeichnis"));
    assert!(row8.contains("| SS "));
    assert!(row8.trim_end().ends_with("| 3"));
    let row6 = text.lines().find(|l| l.starts_with("(6)")).unwrap();
    assert!(row6.ends_with("| 1, Lift"));
}
