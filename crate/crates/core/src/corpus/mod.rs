//! Annotated corpus schema, parsing, and validation.

mod model;
mod parse;
mod validate;

pub use model::{
    CfEntry, Document, Entity, EntityId, Expression, ExpressionCategory, ExpressionId,
    ExpressionKind, GoldAntecedent, Utterance,
};
pub use parse::{link, parse_corpus, to_json, CorpusError};
pub use validate::{validate_document, Finding, Severity, ValidationReport};
