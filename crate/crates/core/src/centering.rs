//! Local centering: backward and preferred centers, transitions, and
//! thematic progression between adjacent utterances.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::corpus::{CfEntry, EntityId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransitionType {
    Continue,
    Retain,
    SmoothShift,
    RoughShift,
    /// No backward center, or the first utterance.
    None,
}

impl TransitionType {
    pub fn label(self) -> &'static str {
        match self {
            TransitionType::Continue => "C",
            TransitionType::Retain => "R",
            TransitionType::SmoothShift => "SS",
            TransitionType::RoughShift => "RS",
            TransitionType::None => "---",
        }
    }
}

impl fmt::Display for TransitionType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Thematic progression between two adjacent utterances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TpPattern {
    ConstantTheme,
    LinearThematization,
    Other,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CenteringRecord {
    pub utterance: usize,
    pub cb: Option<EntityId>,
    pub cp: EntityId,
    pub transition: TransitionType,
}

pub fn preferred_center(cf: &[CfEntry]) -> Option<&EntityId> {
    cf.first().map(|e| &e.entity)
}

/// Highest-ranked entry of `prev_cf` whose entity was resolved in the
/// current utterance. Mediation is ignored: a mediated entry still counts
/// as realized.
pub fn compute_backward_center(
    prev_cf: Option<&[CfEntry]>,
    resolved: &BTreeSet<EntityId>,
) -> Option<EntityId> {
    prev_cf?
        .iter()
        .find(|entry| resolved.contains(&entry.entity))
        .map(|entry| entry.entity.clone())
}

pub fn classify_transition(
    cb_n: Option<&EntityId>,
    cb_prev: Option<&EntityId>,
    cp_n: &EntityId,
) -> TransitionType {
    let Some(cb) = cb_n else {
        return TransitionType::None;
    };
    let same_cb = cb_prev.is_none_or(|prev| prev == cb);
    match (same_cb, cb == cp_n) {
        (true, true) => TransitionType::Continue,
        (true, false) => TransitionType::Retain,
        (false, true) => TransitionType::SmoothShift,
        (false, false) => TransitionType::RoughShift,
    }
}

pub fn classify_tp(prev_cf: &[CfEntry], curr_cf: &[CfEntry]) -> TpPattern {
    let (Some(prev_cp), Some(curr_cp)) = (preferred_center(prev_cf), preferred_center(curr_cf))
    else {
        return TpPattern::Other;
    };
    if prev_cp == curr_cp {
        TpPattern::ConstantTheme
    } else if prev_cf.iter().any(|e| &e.entity == curr_cp) {
        TpPattern::LinearThematization
    } else {
        TpPattern::Other
    }
}
