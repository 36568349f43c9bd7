//! Reading and writing the JSON corpus format.
//!
//! A corpus file holds either one document object or an array of them:
//!
//! ```json
//! {"id": "doc", "entities": [{"id": "e1", "surface": "Brother"}],
//!  "utterances": [{"index": 1, "text": "...", "words": 2,
//!                  "cf": [{"entity": "e1", "surface": "Brother"}],
//!                  "expressions": []}]}
//! ```

use std::collections::HashSet;

use thiserror::Error;

use super::model::{Document, EntityId};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("malformed corpus: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("document `{document}`: {source}")]
    Schema {
        document: String,
        source: serde_json::Error,
    },
    #[error("document `{document}`: duplicate entity id `{entity}`")]
    DuplicateEntity { document: String, entity: EntityId },
    #[error("document `{document}`, U{utterance}, field `{field}`: undeclared entity `{entity}`")]
    UndeclaredEntity {
        document: String,
        utterance: usize,
        field: &'static str,
        entity: EntityId,
    },
    #[error(
        "document `{document}`, field `index`: expected utterance index {expected}, found {found}"
    )]
    NonConsecutiveIndex {
        document: String,
        expected: usize,
        found: usize,
    },
}

/// Parses a corpus file and links every entity reference.
pub fn parse_corpus(bytes: &[u8]) -> Result<Vec<Document>, CorpusError> {
    let value: serde_json::Value = serde_json::from_slice(bytes)?;
    let items = match value {
        serde_json::Value::Array(items) => items,
        other => vec![other],
    };
    let docs = items
        .into_iter()
        .enumerate()
        .map(|(n, item)| {
            let document = item
                .get("id")
                .and_then(|v| v.as_str())
                .map(str::to_owned)
                .unwrap_or_else(|| format!("#{}", n + 1));
            serde_json::from_value::<Document>(item)
                .map_err(|source| CorpusError::Schema { document, source })
        })
        .collect::<Result<Vec<_>, _>>()?;
    for doc in &docs {
        link(doc)?;
    }
    Ok(docs)
}

/// Checks entity declarations, references, and index continuity.
pub fn link(doc: &Document) -> Result<(), CorpusError> {
    let mut declared = HashSet::new();
    for entity in &doc.entities {
        if !declared.insert(&entity.id) {
            return Err(CorpusError::DuplicateEntity {
                document: doc.id.clone(),
                entity: entity.id.clone(),
            });
        }
    }

    for (pos, utt) in doc.utterances.iter().enumerate() {
        if utt.index != pos + 1 {
            return Err(CorpusError::NonConsecutiveIndex {
                document: doc.id.clone(),
                expected: pos + 1,
                found: utt.index,
            });
        }
        let undeclared = |field: &'static str, entity: &EntityId| CorpusError::UndeclaredEntity {
            document: doc.id.clone(),
            utterance: utt.index,
            field,
            entity: entity.clone(),
        };
        for entry in &utt.cf {
            if !declared.contains(&entry.entity) {
                return Err(undeclared("cf", &entry.entity));
            }
        }
        for expr in &utt.expressions {
            if let Some(bad) = expr.candidates.iter().find(|c| !declared.contains(c)) {
                return Err(undeclared("candidates", bad));
            }
            if let Some(gold) = &expr.gold {
                if !declared.contains(&gold.entity) {
                    return Err(undeclared("gold", &gold.entity));
                }
            }
        }
    }
    Ok(())
}

pub fn to_json(docs: &[Document]) -> String {
    serde_json::to_string_pretty(docs).expect("documents always serialize")
}
