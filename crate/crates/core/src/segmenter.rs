//! Centered segmentation: the per-utterance state machine that grows the
//! segment hierarchy from local centering data.
//!
//! Each utterance after the first fires exactly one block, tested in order:
//!
//! * **1** – some resolved antecedent string-equals `Cp(s, U_{i-1})`: the
//!   current segment continues, possibly after [`lift`] collapses a chain
//!   of rheme thematizations into a lower level.
//! * **2a** – no antecedent lies in `Cf(s, U_{i-1})` and one string-equals
//!   the preferred center at the end of an open level `k < s`: levels above
//!   `k` close and `k` continues.
//! * **2b** – during that scan, at `k = s-1`, an antecedent lies anywhere in
//!   `Cf(k, U_{DS[k.end]})`: the current segment closes and a parallel one
//!   opens at the same level.
//! * **2c** – the scan finds nothing: a new embedded segment opens.
//! * **3** – some antecedent lies in `Cf(s, U_{i-1})` without matching its
//!   preferred center: a new embedded segment opens.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::centering::{
    classify_tp, classify_transition, compute_backward_center, CenteringRecord, TpPattern,
    TransitionType,
};
use crate::corpus::{CfEntry, Document, Entity, EntityId, Utterance};
use crate::registry::{InvariantViolation, SegmentRegistry, SegmentSpan};
use crate::resolver::{
    initial_results, str_equal, AntecedentResolver, CenteredResolver, ResolutionResult, ResolvedSet,
};

#[derive(Debug, Error)]
pub enum SegmentationError {
    #[error("document `{0}` has no utterances")]
    EmptyDocument(String),
    #[error("expected U{expected}, got U{found}")]
    OutOfOrder { expected: usize, found: usize },
    #[error("utterance U{0} has an empty cf list")]
    EmptyCf(usize),
    #[error(transparent)]
    Invariant(#[from] InvariantViolation),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Block {
    #[serde(rename = "init")]
    Init,
    #[serde(rename = "1")]
    B1,
    #[serde(rename = "2a")]
    B2a,
    #[serde(rename = "2b")]
    B2b,
    #[serde(rename = "2c")]
    B2c,
    #[serde(rename = "3")]
    B3,
}

impl Block {
    pub fn label(self) -> &'static str {
        match self {
            Block::Init => "",
            Block::B1 => "1",
            Block::B2a => "2a",
            Block::B2b => "2b",
            Block::B2c => "2c",
            Block::B3 => "3",
        }
    }
}

impl fmt::Display for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftEffect {
    pub from_level: usize,
    pub to_level: usize,
}

/// Result of evaluating the lift recursion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftOutcome {
    pub level: usize,
    /// `(level, utterance)` arguments of each recursive call.
    pub hops: Vec<(usize, usize)>,
}

impl LiftOutcome {
    pub fn depth(&self) -> usize {
        self.hops.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepRecord {
    pub utterance: usize,
    pub block: Block,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lift: Option<LiftEffect>,
    pub centering: CenteringRecord,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tp: Option<TpPattern>,
    /// Level of the utterance after the step.
    pub level: usize,
    pub cf: Vec<CfEntry>,
    pub open_segments: Vec<SegmentSpan>,
    pub resolutions: Vec<ResolutionResult>,
}

impl StepRecord {
    /// Block column text, e.g. `1, Lift`.
    pub fn block_label(&self) -> String {
        match (self.block, self.lift) {
            (Block::B1, Some(_)) => "1, Lift".to_owned(),
            (b, _) => b.label().to_owned(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalysisTrace {
    pub document: String,
    pub entities: Vec<Entity>,
    pub steps: Vec<StepRecord>,
    pub final_registry: SegmentRegistry,
}

impl AnalysisTrace {
    pub fn max_depth(&self) -> usize {
        self.final_registry.max_level()
    }

    pub fn display_name<'a>(&'a self, id: &'a EntityId) -> &'a str {
        self.entities
            .iter()
            .find(|e| &e.id == id)
            .map(|e| e.surface.as_str())
            .unwrap_or(id.as_str())
    }
}

pub fn initialize(u1: &Utterance) -> Result<(SegmentRegistry, StepRecord), SegmentationError> {
    if u1.index != 1 {
        return Err(SegmentationError::OutOfOrder {
            expected: 1,
            found: u1.index,
        });
    }
    let cp = u1
        .preferred_center()
        .ok_or(SegmentationError::EmptyCf(1))?
        .clone();
    let registry = SegmentRegistry::new(1);
    registry.check_invariants(1)?;
    let record = StepRecord {
        utterance: 1,
        block: Block::Init,
        lift: None,
        centering: CenteringRecord {
            utterance: 1,
            cb: None,
            cp,
            transition: TransitionType::None,
        },
        tp: None,
        level: 1,
        cf: u1.cf.clone(),
        open_segments: registry.open_spans(),
        resolutions: initial_results(u1),
    };
    Ok((registry, record))
}

/// `Cp(level, U_utterance)`, defined only when the utterance was analyzed
/// at that level.
fn cp_at<'d>(
    doc: &'d Document,
    registry: &SegmentRegistry,
    level: usize,
    utterance: usize,
) -> Option<&'d CfEntry> {
    if registry.level_of(utterance)? != level {
        return None;
    }
    doc.utterance(utterance)?.cf.first()
}

fn lift_applies(doc: &Document, registry: &SegmentRegistry, s: usize, i: usize) -> bool {
    if s <= 2 || i <= 3 {
        return false;
    }
    let (Some(a), Some(b), Some(c)) = (
        cp_at(doc, registry, s, i - 1),
        cp_at(doc, registry, s - 1, i - 2),
        cp_at(doc, registry, s - 2, i - 3),
    ) else {
        return false;
    };
    let rheme_of_prev = doc
        .utterance(i - 2)
        .is_some_and(|u| u.cf.iter().any(|e| e.entity == a.entity));
    a.entity != b.entity && b.entity != c.entity && rheme_of_prev
}

/// Level utterance `i` belongs to when it continues level `s`. Pure.
pub fn lift(doc: &Document, registry: &SegmentRegistry, s: usize, i: usize) -> LiftOutcome {
    let (mut level, mut utterance) = (s, i);
    let mut hops = Vec::new();
    while lift_applies(doc, registry, level, utterance) {
        level -= 1;
        utterance -= 1;
        hops.push((level, utterance));
    }
    LiftOutcome { level, hops }
}

/// Advances the registry by one utterance given its resolution outcome.
pub fn step(
    doc: &Document,
    registry: &mut SegmentRegistry,
    utt: &Utterance,
    resolved: ResolvedSet,
    prev_cb: Option<&EntityId>,
) -> Result<StepRecord, SegmentationError> {
    let i = utt.index;
    let expected = registry.last_utterance() + 1;
    if i != expected {
        return Err(SegmentationError::OutOfOrder { expected, found: i });
    }
    let cp = utt
        .preferred_center()
        .ok_or(SegmentationError::EmptyCf(i))?
        .clone();

    let s = registry.current_level();
    let cf_at = |u: usize| doc.utterance(u).map(|u| u.cf.as_slice()).unwrap_or(&[]);
    let prev_cf = registry.open_end(s).map(cf_at);
    let prev_list = prev_cf.unwrap_or(&[]);
    let r: BTreeSet<EntityId> = resolved.entities.keys().cloned().collect();
    let str_matches = |cf: &[CfEntry]| {
        cf.first()
            .is_some_and(|cp| r.iter().any(|e| str_equal(e, cp)))
    };
    let any_in = |cf: &[CfEntry]| cf.iter().any(|e| r.contains(&e.entity));

    let cb = compute_backward_center(prev_cf, &r);
    let transition = classify_transition(cb.as_ref(), prev_cb, &cp);
    let tp = prev_cf.map(|p| classify_tp(p, &utt.cf));

    let mut lift_effect = None;
    let block = if str_matches(prev_list) {
        let outcome = lift(doc, registry, s, i);
        if outcome.level < s {
            lift_effect = Some(LiftEffect {
                from_level: s,
                to_level: outcome.level,
            });
        }
        registry.lift_to(outcome.level, &outcome.hops, i);
        Block::B1
    } else if !any_in(prev_list) {
        let mut fired = None;
        for k in (1..s).rev() {
            let end_cf = registry.open_end(k).map(cf_at).unwrap_or(&[]);
            if str_matches(end_cf) {
                registry.return_to(k, i);
                fired = Some(Block::B2a);
                break;
            } else if k == s - 1 && any_in(end_cf) {
                registry.open_parallel(i);
                fired = Some(Block::B2b);
                break;
            }
        }
        fired.unwrap_or_else(|| {
            registry.open_embedded(i);
            Block::B2c
        })
    } else {
        registry.open_embedded(i);
        Block::B3
    };

    registry.check_invariants(i)?;
    Ok(StepRecord {
        utterance: i,
        block,
        lift: lift_effect,
        centering: CenteringRecord {
            utterance: i,
            cb,
            cp,
            transition,
        },
        tp,
        level: registry.current_level(),
        cf: utt.cf.clone(),
        open_segments: registry.open_spans(),
        resolutions: resolved.results,
    })
}

/// Incremental driver over one document.
pub struct Segmenter<'d, R = CenteredResolver> {
    doc: &'d Document,
    resolver: R,
    registry: SegmentRegistry,
    steps: Vec<StepRecord>,
}

impl<'d> Segmenter<'d, CenteredResolver> {
    pub fn new(doc: &'d Document) -> Result<Self, SegmentationError> {
        Self::with_resolver(doc, CenteredResolver)
    }
}

impl<'d, R: AntecedentResolver> Segmenter<'d, R> {
    pub fn with_resolver(doc: &'d Document, resolver: R) -> Result<Self, SegmentationError> {
        let first = doc
            .utterances
            .first()
            .ok_or_else(|| SegmentationError::EmptyDocument(doc.id.clone()))?;
        let (registry, record) = initialize(first)?;
        Ok(Self {
            doc,
            resolver,
            registry,
            steps: vec![record],
        })
    }

    pub fn registry(&self) -> &SegmentRegistry {
        &self.registry
    }

    pub fn steps(&self) -> &[StepRecord] {
        &self.steps
    }

    /// The utterance the next call to [`Segmenter::advance`] processes.
    pub fn next_utterance(&self) -> Option<&'d Utterance> {
        self.doc.utterance(self.registry.last_utterance() + 1)
    }

    /// Processes the next utterance; `Ok(None)` once the text is exhausted.
    pub fn advance(&mut self) -> Result<Option<&StepRecord>, SegmentationError> {
        let Some(utt) = self.next_utterance() else {
            return Ok(None);
        };
        let resolved = self
            .resolver
            .resolve_utterance(self.doc, &self.registry, utt);
        let prev_cb = self.steps.last().and_then(|s| s.centering.cb.as_ref());
        let record = step(self.doc, &mut self.registry, utt, resolved, prev_cb)?;
        self.steps.push(record);
        Ok(self.steps.last())
    }

    pub fn finish(mut self) -> Result<AnalysisTrace, SegmentationError> {
        while self.advance()?.is_some() {}
        Ok(AnalysisTrace {
            document: self.doc.id.clone(),
            entities: self.doc.entities.clone(),
            steps: self.steps,
            final_registry: self.registry,
        })
    }
}

pub fn run(doc: &Document) -> Result<AnalysisTrace, SegmentationError> {
    Segmenter::new(doc)?.finish()
}

pub fn run_with<R: AntecedentResolver>(
    doc: &Document,
    resolver: R,
) -> Result<AnalysisTrace, SegmentationError> {
    Segmenter::with_resolver(doc, resolver)?.finish()
}
