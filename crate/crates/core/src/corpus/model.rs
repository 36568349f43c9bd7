use std::fmt;

use serde::{Deserialize, Serialize};

/// Opaque discourse entity identifier.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EntityId(pub String);

impl EntityId {
    pub fn new(id: impl Into<String>) -> Self {
        Self(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for EntityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for EntityId {
    fn from(s: &str) -> Self {
        Self(s.to_owned())
    }
}

/// Opaque referential expression identifier.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ExpressionId(pub String);

impl fmt::Display for ExpressionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for ExpressionId {
    fn from(s: &str) -> Self {
        Self(s.to_owned())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Entity {
    pub id: EntityId,
    /// Display form only; identity is always by `id`.
    pub surface: String,
}

/// One ranked entry of a forward-looking center list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CfEntry {
    pub entity: EntityId,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub surface: String,
    /// Set when the entity only enters the list through a textual ellipsis.
    /// Mediated entries never satisfy string-equality tests.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub mediated: bool,
}

impl CfEntry {
    pub fn direct(entity: impl Into<EntityId>, surface: impl Into<String>) -> Self {
        Self {
            entity: entity.into(),
            surface: surface.into(),
            mediated: false,
        }
    }

    pub fn mediated(entity: impl Into<EntityId>) -> Self {
        Self {
            entity: entity.into(),
            surface: String::new(),
            mediated: true,
        }
    }
}

impl From<String> for EntityId {
    fn from(s: String) -> Self {
        Self(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ExpressionKind {
    #[serde(rename = "pronoun")]
    PronominalAnaphor,
    #[serde(rename = "nominal")]
    NominalAnaphor,
    #[serde(rename = "ellipsis")]
    TextualEllipsis,
    #[serde(rename = "none")]
    NonAnaphoric,
}

impl ExpressionKind {
    pub fn is_anaphoric(self) -> bool {
        !matches!(self, ExpressionKind::NonAnaphoric)
    }

    /// Statistics group the expression is counted under, if any.
    pub fn category(self) -> Option<ExpressionCategory> {
        match self {
            ExpressionKind::PronominalAnaphor | ExpressionKind::NominalAnaphor => {
                Some(ExpressionCategory::Anaphor)
            }
            ExpressionKind::TextualEllipsis => Some(ExpressionCategory::Ellipsis),
            ExpressionKind::NonAnaphoric => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExpressionCategory {
    Anaphor,
    Ellipsis,
}

/// Linearly most recent correct antecedent of an expression.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldAntecedent {
    pub entity: EntityId,
    pub utterance: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Expression {
    pub id: ExpressionId,
    pub surface: String,
    pub kind: ExpressionKind,
    /// Entities the expression is linguistically compatible with.
    #[serde(default)]
    pub candidates: Vec<EntityId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gold: Option<GoldAntecedent>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Utterance {
    pub index: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub text: Option<String>,
    #[serde(rename = "words", default)]
    pub word_count: usize,
    /// Rank order: the first entry is the preferred center.
    #[serde(default)]
    pub cf: Vec<CfEntry>,
    #[serde(default)]
    pub expressions: Vec<Expression>,
}

impl Utterance {
    /// Entity of the rank-1 entry.
    pub fn preferred_center(&self) -> Option<&EntityId> {
        self.cf.first().map(|e| &e.entity)
    }

    pub fn cf_rank_of(&self, entity: &EntityId) -> Option<usize> {
        self.cf
            .iter()
            .position(|e| &e.entity == entity)
            .map(|p| p + 1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    #[serde(default)]
    pub entities: Vec<Entity>,
    #[serde(default)]
    pub utterances: Vec<Utterance>,
}

impl Document {
    /// Utterance by its 1-based linear index.
    pub fn utterance(&self, index: usize) -> Option<&Utterance> {
        index
            .checked_sub(1)
            .and_then(|i| self.utterances.get(i))
            .filter(|u| u.index == index)
    }

    pub fn entity(&self, id: &EntityId) -> Option<&Entity> {
        self.entities.iter().find(|e| &e.id == id)
    }

    /// Display string for an entity, falling back to its id.
    pub fn display_name<'a>(&'a self, id: &'a EntityId) -> &'a str {
        self.entity(id)
            .map(|e| e.surface.as_str())
            .unwrap_or(id.as_str())
    }

    pub fn word_count(&self) -> usize {
        self.utterances.iter().map(|u| u.word_count).sum()
    }
}
