//! Scoring resolutions against gold annotation and aggregating the
//! distance, locus, error, and depth statistics.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::ser::{Serialize, SerializeMap, Serializer};
use serde::Serialize as DeriveSerialize;

use crate::corpus::{Document, ExpressionCategory, ExpressionId, GoldAntecedent};
use crate::resolver::{Locus, LocusClause, ResolutionResult};
use crate::segmenter::AnalysisTrace;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, DeriveSerialize)]
#[serde(rename_all = "snake_case")]
pub enum OutcomeKind {
    Correct,
    Error,
    /// Right entity, but found at the hierarchically most recent mention
    /// rather than the linearly most recent one.
    FalsePositive,
    IntraUtterance,
}

#[derive(Debug, Clone, PartialEq, Eq, DeriveSerialize)]
pub struct Outcome {
    pub value: OutcomeKind,
    pub locus: Locus,
}

pub fn classify_outcome(result: &ResolutionResult, gold: &GoldAntecedent) -> Outcome {
    let value = if gold.utterance == result.utterance {
        OutcomeKind::IntraUtterance
    } else {
        match &result.entity {
            Some(e) if e == &gold.entity => {
                if result.locus.utterance == Some(gold.utterance) {
                    OutcomeKind::Correct
                } else {
                    OutcomeKind::FalsePositive
                }
            }
            _ => OutcomeKind::Error,
        }
    };
    Outcome {
        value,
        locus: result.locus.clone(),
    }
}

/// Outcome of one gold-annotated expression, with what aggregation needs.
#[derive(Debug, Clone, PartialEq, Eq, DeriveSerialize)]
pub struct ScoredExpression {
    pub expression: ExpressionId,
    pub utterance: usize,
    pub category: ExpressionCategory,
    /// Segment level the expression was resolved from.
    pub level: usize,
    pub outcome: Outcome,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Scoring {
    pub scored: Vec<ScoredExpression>,
    /// Anaphoric expressions without gold annotation.
    pub unscored: Vec<ExpressionId>,
}

/// Pairs every anaphoric expression of `doc` with its result in `trace`.
pub fn score(doc: &Document, trace: &AnalysisTrace) -> Scoring {
    let results: HashMap<&ExpressionId, &ResolutionResult> = trace
        .steps
        .iter()
        .flat_map(|s| s.resolutions.iter())
        .map(|r| (&r.expression, r))
        .collect();
    let mut out = Scoring::default();
    for utt in &doc.utterances {
        for x in &utt.expressions {
            let Some(category) = x.kind.category() else {
                continue;
            };
            let Some(gold) = &x.gold else {
                out.unscored.push(x.id.clone());
                continue;
            };
            let level = trace.final_registry.level_of(utt.index).unwrap_or(1);
            let missing;
            let result = match results.get(&x.id) {
                Some(r) => *r,
                None => {
                    missing = ResolutionResult {
                        expression: x.id.clone(),
                        utterance: utt.index,
                        level,
                        entity: None,
                        locus: Locus::unreachable(),
                    };
                    &missing
                }
            };
            out.scored.push(ScoredExpression {
                expression: x.id.clone(),
                utterance: utt.index,
                category,
                level: result.level,
                outcome: classify_outcome(result, gold),
            });
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DistanceBucket {
    /// Same utterance, or `i - n` for `n` in 1..=5.
    Back(usize),
    Back6To10,
    Back11To15,
    Back16To20,
    Beyond20,
}

impl DistanceBucket {
    pub const ALL: [DistanceBucket; 10] = [
        DistanceBucket::Back(0),
        DistanceBucket::Back(1),
        DistanceBucket::Back(2),
        DistanceBucket::Back(3),
        DistanceBucket::Back(4),
        DistanceBucket::Back(5),
        DistanceBucket::Back6To10,
        DistanceBucket::Back11To15,
        DistanceBucket::Back16To20,
        DistanceBucket::Beyond20,
    ];

    pub fn of(distance: usize) -> Self {
        match distance {
            0..=5 => DistanceBucket::Back(distance),
            6..=10 => DistanceBucket::Back6To10,
            11..=15 => DistanceBucket::Back11To15,
            16..=20 => DistanceBucket::Back16To20,
            _ => DistanceBucket::Beyond20,
        }
    }

    fn slot(self) -> usize {
        match self {
            DistanceBucket::Back(n) => n,
            DistanceBucket::Back6To10 => 6,
            DistanceBucket::Back11To15 => 7,
            DistanceBucket::Back16To20 => 8,
            DistanceBucket::Beyond20 => 9,
        }
    }
}

impl fmt::Display for DistanceBucket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DistanceBucket::Back(0) => f.write_str("U_i"),
            DistanceBucket::Back(n) => write!(f, "U_i-{n}"),
            DistanceBucket::Back6To10 => f.write_str("U_i-6..10"),
            DistanceBucket::Back11To15 => f.write_str("U_i-11..15"),
            DistanceBucket::Back16To20 => f.write_str("U_i-16..20"),
            DistanceBucket::Beyond20 => f.write_str("U_i-21+"),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DistanceHistogram {
    counts: [u64; 10],
}

impl DistanceHistogram {
    pub fn add(&mut self, distance: usize) {
        self.counts[DistanceBucket::of(distance).slot()] += 1;
    }

    pub fn get(&self, bucket: DistanceBucket) -> u64 {
        self.counts[bucket.slot()]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn rows(&self) -> impl Iterator<Item = (DistanceBucket, u64)> + '_ {
        DistanceBucket::ALL.into_iter().map(|b| (b, self.get(b)))
    }

    fn merge(&mut self, other: &Self) {
        for (a, b) in self.counts.iter_mut().zip(other.counts) {
            *a += b;
        }
    }
}

impl Serialize for DistanceHistogram {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(self.counts.len()))?;
        for (bucket, n) in self.rows() {
            map.serialize_entry(&bucket.to_string(), &n)?;
        }
        map.end()
    }
}

/// Row of the locus tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LocusCategory {
    IntraUtterance,
    /// `Cf(s, U_{i-1})`
    PrevCf,
    /// `Cp(s-1, U_{DS[s-1.end]})`: rank 1 at the reachable segment end.
    PrevSegEndCp,
    /// `Cf(s-1, U_{DS[s-1.end]})`: deeper ranks at the reachable segment end.
    PrevSegEndCf,
    /// `Cp(s-k, U_{DS[s-k.end]})` for `k >= 2`.
    SegEndCp(usize),
}

impl LocusCategory {
    /// Category of a successful resolution made from level `s`.
    pub fn of(locus: &Locus, s: usize) -> Option<Self> {
        Some(match locus.clause {
            LocusClause::IntraUtterance => LocusCategory::IntraUtterance,
            LocusClause::PrevCf => LocusCategory::PrevCf,
            LocusClause::PrevSegEndCf if locus.rank == Some(1) => LocusCategory::PrevSegEndCp,
            LocusClause::PrevSegEndCf => LocusCategory::PrevSegEndCf,
            LocusClause::SegEndCp => LocusCategory::SegEndCp(s.saturating_sub(locus.level?)),
            LocusClause::Unreachable => return None,
        })
    }
}

impl fmt::Display for LocusCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LocusCategory::IntraUtterance => f.write_str("U_i"),
            LocusCategory::PrevCf => f.write_str("Cf(s, U_i-1)"),
            LocusCategory::PrevSegEndCp => f.write_str("Cp(s-1, U_DS[s-1.end])"),
            LocusCategory::PrevSegEndCf => f.write_str("Cf(s-1, U_DS[s-1.end])"),
            LocusCategory::SegEndCp(k) => write!(f, "Cp(s-{k}, U_DS[s-{k}.end])"),
        }
    }
}

/// Where correct and false-positive resolutions were found. False
/// positives are counted in their row and reported again on their own;
/// they are not errors.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LocusHistogram {
    pub rows: BTreeMap<LocusCategory, u64>,
    pub errors: u64,
    pub false_positives: u64,
}

impl LocusHistogram {
    pub fn get(&self, category: LocusCategory) -> u64 {
        self.rows.get(&category).copied().unwrap_or(0)
    }

    pub fn located(&self) -> u64 {
        self.rows.values().sum()
    }

    fn merge(&mut self, other: &Self) {
        for (k, v) in &other.rows {
            *self.rows.entry(*k).or_default() += v;
        }
        self.errors += other.errors;
        self.false_positives += other.false_positives;
    }
}

impl Serialize for LocusHistogram {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        struct Rows<'a>(&'a BTreeMap<LocusCategory, u64>);
        impl Serialize for Rows<'_> {
            fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
                serializer.collect_map(self.0.iter().map(|(k, v)| (k.to_string(), v)))
            }
        }
        let mut map = serializer.serialize_map(Some(3))?;
        map.serialize_entry("rows", &Rows(&self.rows))?;
        map.serialize_entry("errors", &self.errors)?;
        map.serialize_entry("false_positives", &self.false_positives)?;
        map.end()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, DeriveSerialize)]
pub struct ByCategory<T> {
    pub anaphors: T,
    pub ellipses: T,
}

impl<T> ByCategory<T> {
    pub fn get(&self, category: ExpressionCategory) -> &T {
        match category {
            ExpressionCategory::Anaphor => &self.anaphors,
            ExpressionCategory::Ellipsis => &self.ellipses,
        }
    }

    pub fn get_mut(&mut self, category: ExpressionCategory) -> &mut T {
        match category {
            ExpressionCategory::Anaphor => &mut self.anaphors,
            ExpressionCategory::Ellipsis => &mut self.ellipses,
        }
    }
}

/// Gold linear distance (`i` minus the gold antecedent index) per kind.
pub fn distance_histogram(doc: &Document) -> ByCategory<DistanceHistogram> {
    let mut out = ByCategory::<DistanceHistogram>::default();
    for utt in &doc.utterances {
        for x in &utt.expressions {
            if let (Some(category), Some(gold)) = (x.kind.category(), &x.gold) {
                out.get_mut(category)
                    .add(utt.index.saturating_sub(gold.utterance));
            }
        }
    }
    out
}

pub fn locus_histogram(scored: &[ScoredExpression]) -> ByCategory<LocusHistogram> {
    let mut out = ByCategory::<LocusHistogram>::default();
    for s in scored {
        let hist = out.get_mut(s.category);
        match s.outcome.value {
            OutcomeKind::Error => hist.errors += 1,
            value => {
                if value == OutcomeKind::FalsePositive {
                    hist.false_positives += 1;
                }
                if let Some(cat) = LocusCategory::of(&s.outcome.locus, s.level) {
                    *hist.rows.entry(cat).or_default() += 1;
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, DeriveSerialize)]
pub struct Counts {
    pub anaphors: u64,
    pub ellipses: u64,
    pub utterances: u64,
    pub words: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, DeriveSerialize)]
pub struct StatsReport {
    pub documents: u64,
    pub counts: Counts,
    /// Gold-annotated expressions per kind.
    pub gold: ByCategory<u64>,
    pub distance: ByCategory<DistanceHistogram>,
    pub locus: ByCategory<LocusHistogram>,
    pub errors: u64,
    pub false_positives: u64,
    pub max_depth: usize,
}

impl StatsReport {
    /// Associative, commutative combination of two reports.
    pub fn merge(&mut self, other: &StatsReport) {
        self.documents += other.documents;
        self.counts.anaphors += other.counts.anaphors;
        self.counts.ellipses += other.counts.ellipses;
        self.counts.utterances += other.counts.utterances;
        self.counts.words += other.counts.words;
        self.gold.anaphors += other.gold.anaphors;
        self.gold.ellipses += other.gold.ellipses;
        self.distance.anaphors.merge(&other.distance.anaphors);
        self.distance.ellipses.merge(&other.distance.ellipses);
        self.locus.anaphors.merge(&other.locus.anaphors);
        self.locus.ellipses.merge(&other.locus.ellipses);
        self.errors += other.errors;
        self.false_positives += other.false_positives;
        self.max_depth = self.max_depth.max(other.max_depth);
    }

    pub fn has_gold(&self) -> bool {
        self.gold.anaphors + self.gold.ellipses > 0
    }
}

/// Statistics for one analyzed document.
pub fn document_report(doc: &Document, trace: &AnalysisTrace) -> StatsReport {
    let scoring = score(doc, trace);
    let mut counts = Counts {
        utterances: doc.utterances.len() as u64,
        words: doc.word_count() as u64,
        ..Counts::default()
    };
    let mut gold = ByCategory::<u64>::default();
    for x in doc.utterances.iter().flat_map(|u| &u.expressions) {
        match x.kind.category() {
            Some(ExpressionCategory::Anaphor) => counts.anaphors += 1,
            Some(ExpressionCategory::Ellipsis) => counts.ellipses += 1,
            None => continue,
        }
        if x.gold.is_some() {
            *gold.get_mut(x.kind.category().expect("anaphoric")) += 1;
        }
    }
    let locus = locus_histogram(&scoring.scored);
    StatsReport {
        documents: 1,
        counts,
        gold,
        distance: distance_histogram(doc),
        errors: locus.anaphors.errors + locus.ellipses.errors,
        false_positives: locus.anaphors.false_positives + locus.ellipses.false_positives,
        locus,
        max_depth: trace.max_depth(),
    }
}

/// Aggregate over documents paired with their traces.
pub fn summarize<'a>(
    pairs: impl IntoIterator<Item = (&'a Document, &'a AnalysisTrace)>,
) -> StatsReport {
    pairs.into_iter().map(|(d, t)| document_report(d, t)).fold(
        StatsReport::default(),
        |mut acc, r| {
            acc.merge(&r);
            acc
        },
    )
}
