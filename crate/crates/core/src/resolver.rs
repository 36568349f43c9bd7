//! Antecedent resolution against the reachability structure imposed by the
//! open discourse segments.
//!
//! Three loci are consulted, in this order:
//!
//! 1. the forward-looking centers of the immediately preceding utterance,
//!    `Cf(s, U_{i-1})`;
//! 2. the forward-looking centers at the end of the hierarchically
//!    immediately reachable segment, `Cf(s-1, U_{DS[s-1.end]})`;
//! 3. the preferred center at the end of any deeper open segment,
//!    `Cp(v, U_{DS[v.end]})` with `v < s-1`, highest `v` first. Only direct
//!    realizations count here; an entry mediated by a textual ellipsis does
//!    not string-match.
//!
//! Within a locus, Cf lists are scanned in rank order. Closed and absorbed
//! segments are never consulted.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::corpus::{CfEntry, Document, EntityId, Expression, ExpressionId, Utterance};
use crate::registry::SegmentRegistry;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LocusClause {
    PrevCf,
    PrevSegEndCf,
    SegEndCp,
    /// Antecedent inside the same utterance; taken from gold annotation.
    IntraUtterance,
    Unreachable,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Locus {
    pub clause: LocusClause,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub utterance: Option<usize>,
    /// 1-based position within the Cf list.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank: Option<usize>,
}

impl Locus {
    pub fn unreachable() -> Self {
        Self {
            clause: LocusClause::Unreachable,
            level: None,
            utterance: None,
            rank: None,
        }
    }

    fn at(clause: LocusClause, level: usize, utterance: usize, rank: usize) -> Self {
        Self {
            clause,
            level: Some(level),
            utterance: Some(utterance),
            rank: Some(rank),
        }
    }

    pub fn is_reachable(&self) -> bool {
        self.clause != LocusClause::Unreachable
    }

    /// Sort key: earlier clauses first, then higher levels, then better rank.
    fn precedence(&self) -> (LocusClause, std::cmp::Reverse<usize>, usize) {
        (
            self.clause,
            std::cmp::Reverse(self.level.unwrap_or(0)),
            self.rank.unwrap_or(usize::MAX),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResolutionResult {
    pub expression: ExpressionId,
    /// Utterance containing the expression.
    pub utterance: usize,
    /// Segment level the expression was resolved from.
    pub level: usize,
    pub entity: Option<EntityId>,
    pub locus: Locus,
}

/// Outcome of resolving every expression of one utterance.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ResolvedSet {
    /// Resolved antecedents with the best locus each was found at.
    pub entities: BTreeMap<EntityId, Locus>,
    pub results: Vec<ResolutionResult>,
}

impl ResolvedSet {
    pub fn contains(&self, entity: &EntityId) -> bool {
        self.entities.contains_key(entity)
    }

    pub fn is_empty(&self) -> bool {
        self.entities.is_empty()
    }
}

/// Source of the resolution outcome set driving segmentation.
pub trait AntecedentResolver {
    fn resolve_utterance(
        &self,
        doc: &Document,
        registry: &SegmentRegistry,
        utterance: &Utterance,
    ) -> ResolvedSet;
}

/// The reachability-constrained resolver.
#[derive(Debug, Clone, Copy, Default)]
pub struct CenteredResolver;

impl AntecedentResolver for CenteredResolver {
    fn resolve_utterance(
        &self,
        doc: &Document,
        registry: &SegmentRegistry,
        utterance: &Utterance,
    ) -> ResolvedSet {
        resolved_set(doc, registry, utterance)
    }
}

pub fn is_anaphor_for(x: &Expression, ante: &EntityId) -> bool {
    x.candidates.contains(ante)
}

/// String equality in the segmentation sense: same entity, directly realized.
pub fn str_equal(entity: &EntityId, entry: &CfEntry) -> bool {
    !entry.mediated && &entry.entity == entity
}

/// The three reachable loci for utterance `i` at level `s`, as
/// (clause, level, utterance, cf) in precedence order. Clause 3 yields only
/// the rank-1 entry of each segment end.
fn loci<'d>(
    doc: &'d Document,
    registry: &SegmentRegistry,
    s: usize,
    i: usize,
) -> Vec<(LocusClause, usize, usize, &'d [CfEntry])> {
    let mut out = Vec::new();
    let cf_of = |u: usize| doc.utterance(u).map(|u| u.cf.as_slice());
    if let Some(prev) = i.checked_sub(1).filter(|&p| p >= 1) {
        if registry.level_of(prev) == Some(s) && registry.open_end(s) == Some(prev) {
            if let Some(cf) = cf_of(prev) {
                out.push((LocusClause::PrevCf, s, prev, cf));
            }
        }
    }
    if s >= 2 {
        if let Some((end, cf)) = registry
            .open_end(s - 1)
            .and_then(|end| cf_of(end).map(|cf| (end, cf)))
        {
            out.push((LocusClause::PrevSegEndCf, s - 1, end, cf));
        }
    }
    for v in (1..s.saturating_sub(1)).rev() {
        if let Some((end, cf)) = registry
            .open_end(v)
            .and_then(|end| cf_of(end).map(|cf| (end, cf)))
        {
            out.push((LocusClause::SegEndCp, v, end, &cf[..cf.len().min(1)]));
        }
    }
    out
}

fn matches(clause: LocusClause, ante: &EntityId, entry: &CfEntry) -> bool {
    match clause {
        LocusClause::SegEndCp => str_equal(ante, entry),
        _ => &entry.entity == ante,
    }
}

/// Where `ante` is reachable from utterance `i` at level `s`, if anywhere.
pub fn is_reachable(
    doc: &Document,
    registry: &SegmentRegistry,
    ante: &EntityId,
    s: usize,
    i: usize,
) -> Locus {
    for (clause, level, utterance, cf) in loci(doc, registry, s, i) {
        if let Some(pos) = cf.iter().position(|e| matches(clause, ante, e)) {
            return Locus::at(clause, level, utterance, pos + 1);
        }
    }
    Locus::unreachable()
}

/// First reachable antecedent compatible with `x`, scanning loci in clause
/// order and each Cf list in rank order.
pub fn resolve(
    doc: &Document,
    registry: &SegmentRegistry,
    x: &Expression,
    s: usize,
    i: usize,
) -> ResolutionResult {
    let found = loci(doc, registry, s, i)
        .into_iter()
        .find_map(|(clause, level, utterance, cf)| {
            cf.iter().enumerate().find_map(|(pos, entry)| {
                (matches(clause, &entry.entity, entry) && is_anaphor_for(x, &entry.entity)).then(
                    || {
                        (
                            entry.entity.clone(),
                            Locus::at(clause, level, utterance, pos + 1),
                        )
                    },
                )
            })
        });
    let (entity, locus) = match found {
        Some((e, l)) => (Some(e), l),
        None => (None, Locus::unreachable()),
    };
    ResolutionResult {
        expression: x.id.clone(),
        utterance: i,
        level: s,
        entity,
        locus,
    }
}

fn intra_utterance(x: &Expression, s: usize, i: usize) -> Option<ResolutionResult> {
    let gold = x.gold.as_ref().filter(|g| g.utterance == i)?;
    Some(ResolutionResult {
        expression: x.id.clone(),
        utterance: i,
        level: s,
        entity: Some(gold.entity.clone()),
        locus: Locus {
            clause: LocusClause::IntraUtterance,
            level: Some(s),
            utterance: Some(i),
            rank: None,
        },
    })
}

/// Results for the first utterance, which has nothing to search: every
/// anaphoric expression is either intra-utterance or unresolved.
pub fn initial_results(utt: &Utterance) -> Vec<ResolutionResult> {
    utt.expressions
        .iter()
        .filter(|x| x.kind.is_anaphoric())
        .map(|x| {
            intra_utterance(x, 1, utt.index).unwrap_or_else(|| ResolutionResult {
                expression: x.id.clone(),
                utterance: utt.index,
                level: 1,
                entity: None,
                locus: Locus::unreachable(),
            })
        })
        .collect()
}

/// Resolves every anaphoric expression of `utt` against the pre-step
/// registry. Expressions whose gold antecedent lies in `utt` itself are
/// reported as intra-utterance and kept out of the outcome set.
pub fn resolved_set(doc: &Document, registry: &SegmentRegistry, utt: &Utterance) -> ResolvedSet {
    let s = registry.current_level();
    let i = utt.index;
    let mut out = ResolvedSet::default();
    for x in utt.expressions.iter().filter(|x| x.kind.is_anaphoric()) {
        if let Some(result) = intra_utterance(x, s, i) {
            out.results.push(result);
            continue;
        }
        let result = resolve(doc, registry, x, s, i);
        if let Some(entity) = &result.entity {
            let better = out
                .entities
                .get(entity)
                .is_none_or(|l| result.locus.precedence() < l.precedence());
            if better {
                out.entities.insert(entity.clone(), result.locus.clone());
            }
        }
        out.results.push(result);
    }
    out
}
