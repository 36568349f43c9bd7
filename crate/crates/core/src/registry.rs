//! Segment registry: the stack of open discourse segments plus the archive
//! of every segment ever created.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{CfEntry, Document};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SegmentStatus {
    Open,
    /// Ultimately closed: a segment at the same or a higher level extended
    /// past its end.
    Closed,
    /// Collapsed into a lower-numbered level by `lift`.
    Absorbed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    pub level: usize,
    pub beg: usize,
    pub end: usize,
    pub status: SegmentStatus,
}

impl Segment {
    pub fn contains(&self, utterance: usize) -> bool {
        self.beg <= utterance && utterance <= self.end
    }
}

impl fmt::Display for Segment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.level, self.beg, self.end)
    }
}

/// Compact (level, beg, end) triple used in per-step snapshots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SegmentSpan {
    pub level: usize,
    pub beg: usize,
    pub end: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("segment registry invariant violated after U{utterance}: {message}")]
pub struct InvariantViolation {
    pub utterance: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SegmentRegistry {
    /// Archive index of the open segment at each level; position 0 is level 1.
    open_by_level: Vec<usize>,
    archive: Vec<Segment>,
    current_level: usize,
    /// Level assigned to each utterance when it was analyzed; position 0 is U_1.
    level_of_utterance: Vec<usize>,
}

impl SegmentRegistry {
    /// Registry holding the single segment (1, first, first).
    pub(crate) fn new(first: usize) -> Self {
        Self {
            open_by_level: vec![0],
            archive: vec![Segment {
                level: 1,
                beg: first,
                end: first,
                status: SegmentStatus::Open,
            }],
            current_level: 1,
            level_of_utterance: vec![1],
        }
    }

    pub fn current_level(&self) -> usize {
        self.current_level
    }

    /// Every segment in creation order.
    pub fn archive(&self) -> &[Segment] {
        &self.archive
    }

    /// Open segments ordered by level, starting at level 1.
    pub fn open_segments(&self) -> impl Iterator<Item = &Segment> + '_ {
        self.open_by_level.iter().map(|&i| &self.archive[i])
    }

    pub fn open_segment(&self, level: usize) -> Option<&Segment> {
        level
            .checked_sub(1)
            .and_then(|l| self.open_by_level.get(l))
            .map(|&i| &self.archive[i])
    }

    /// `DS[level.end]` for an open level.
    pub fn open_end(&self, level: usize) -> Option<usize> {
        self.open_segment(level).map(|s| s.end)
    }

    pub fn level_of(&self, utterance: usize) -> Option<usize> {
        utterance
            .checked_sub(1)
            .and_then(|u| self.level_of_utterance.get(u))
            .copied()
    }

    /// Index of the most recently analyzed utterance.
    pub fn last_utterance(&self) -> usize {
        self.level_of_utterance.len()
    }

    pub fn max_level(&self) -> usize {
        self.archive.iter().map(|s| s.level).max().unwrap_or(0)
    }

    pub fn open_spans(&self) -> Vec<SegmentSpan> {
        self.open_segments()
            .map(|s| SegmentSpan {
                level: s.level,
                beg: s.beg,
                end: s.end,
            })
            .collect()
    }

    fn open_mut(&mut self, level: usize) -> &mut Segment {
        let idx = self.open_by_level[level - 1];
        &mut self.archive[idx]
    }

    fn assign(&mut self, utterance: usize, level: usize) {
        debug_assert_eq!(utterance, self.level_of_utterance.len() + 1);
        self.level_of_utterance.push(level);
    }

    /// Ends every open segment above `level` with `status`.
    fn pop_above(&mut self, level: usize, status: SegmentStatus) {
        while self.open_by_level.len() > level {
            let idx = self.open_by_level.pop().expect("non-empty");
            self.archive[idx].status = status;
        }
        self.current_level = level;
    }

    fn push_new(&mut self, utterance: usize) {
        let level = self.open_by_level.len() + 1;
        self.archive.push(Segment {
            level,
            beg: utterance,
            end: utterance,
            status: SegmentStatus::Open,
        });
        self.open_by_level.push(self.archive.len() - 1);
        self.current_level = level;
        self.assign(utterance, level);
    }

    /// Continue the current segment with `utterance`.
    pub(crate) fn extend_current(&mut self, utterance: usize) {
        let level = self.current_level;
        self.open_mut(level).end = utterance;
        self.assign(utterance, level);
    }

    /// Collapse levels above `target` into it. `hops` are the intermediate
    /// (level, utterance) pairs visited by the lift recursion; each absorbed
    /// segment on the chain is extended to its hop utterance.
    pub(crate) fn lift_to(&mut self, target: usize, hops: &[(usize, usize)], utterance: usize) {
        for &(level, hop) in hops {
            if level > target {
                let seg = self.open_mut(level);
                seg.end = seg.end.max(hop);
            }
        }
        self.pop_above(target, SegmentStatus::Absorbed);
        self.extend_current(utterance);
    }

    /// Close everything above `level` and continue `level` with `utterance`.
    pub(crate) fn return_to(&mut self, level: usize, utterance: usize) {
        self.pop_above(level, SegmentStatus::Closed);
        self.extend_current(utterance);
    }

    /// Close the current segment and open a parallel one at the same level.
    pub(crate) fn open_parallel(&mut self, utterance: usize) {
        let level = self.current_level;
        self.pop_above(level - 1, SegmentStatus::Closed);
        self.push_new(utterance);
    }

    /// Open a segment one level below the current one.
    pub(crate) fn open_embedded(&mut self, utterance: usize) {
        self.push_new(utterance);
    }

    /// Checks the stack discipline after `utterance` has been processed.
    pub fn check_invariants(&self, utterance: usize) -> Result<(), InvariantViolation> {
        let fail = |message: String| Err(InvariantViolation { utterance, message });
        if self.current_level != self.open_by_level.len() || self.current_level == 0 {
            return fail(format!(
                "current level {} but {} open levels",
                self.current_level,
                self.open_by_level.len()
            ));
        }
        for (pos, seg) in self.open_segments().enumerate() {
            if seg.level != pos + 1 || seg.status != SegmentStatus::Open {
                return fail(format!("slot {} holds {seg} ({:?})", pos + 1, seg.status));
            }
        }
        let open: Vec<&Segment> = self.open_segments().collect();
        for pair in open.windows(2) {
            if pair[1].beg <= pair[0].end {
                return fail(format!("{} does not start after {} ends", pair[1], pair[0]));
            }
        }
        if self.archive.iter().any(|s| s.beg > s.end) {
            return fail("segment with beg > end".into());
        }
        let open_count = self
            .archive
            .iter()
            .filter(|s| s.status == SegmentStatus::Open)
            .count();
        if open_count != self.open_by_level.len() {
            return fail("open segment outside the level stack".into());
        }
        if self.open_end(self.current_level) != Some(utterance) {
            return fail(format!(
                "current level {} does not end at U{utterance}",
                self.current_level
            ));
        }
        if self.last_utterance() != utterance
            || self.level_of(utterance) != Some(self.current_level)
        {
            return fail("utterance level bookkeeping out of step".into());
        }
        Ok(())
    }

    /// What the next utterance could reach, in precedence order.
    pub fn reachable_snapshot(&self, doc: &Document) -> ReachableSnapshot {
        let level = self.current_level;
        let cf_view = |level: usize, utterance: usize| CfView {
            level,
            utterance,
            cf: doc
                .utterance(utterance)
                .map(|u| u.cf.clone())
                .unwrap_or_default(),
        };
        let previous = self.open_end(level).map(|end| cf_view(level, end));
        let segment_end = level
            .checked_sub(1)
            .and_then(|l| self.open_end(l).map(|end| cf_view(l, end)));
        let deeper = (1..level.saturating_sub(1))
            .rev()
            .filter_map(|v| {
                let end = self.open_end(v)?;
                let entry = doc.utterance(end)?.cf.first()?.clone();
                Some(CpView {
                    level: v,
                    utterance: end,
                    entry,
                })
            })
            .collect();
        ReachableSnapshot {
            next_utterance: self.last_utterance() + 1,
            level,
            previous,
            segment_end,
            deeper,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CfView {
    pub level: usize,
    pub utterance: usize,
    pub cf: Vec<CfEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CpView {
    pub level: usize,
    pub utterance: usize,
    pub entry: CfEntry,
}

/// Centering data visible to the next utterance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ReachableSnapshot {
    pub next_utterance: usize,
    pub level: usize,
    /// `Cf(s, U_{i-1})`.
    pub previous: Option<CfView>,
    /// `Cf(s-1, U_{DS[s-1.end]})`.
    pub segment_end: Option<CfView>,
    /// `Cp(v, U_{DS[v.end]})` for open levels `v < s-1`, highest first.
    pub deeper: Vec<CpView>,
}
