use std::collections::HashSet;
use std::fmt;

use serde::Serialize;

use super::model::{Document, EntityId, ExpressionId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Warning,
    Error,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Finding {
    pub severity: Severity,
    pub document: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub utterance: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expression: Option<ExpressionId>,
    pub field: &'static str,
    pub rule: String,
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Warning => "warning",
            Severity::Error => "error",
        };
        write!(f, "{sev}: document `{}`", self.document)?;
        if let Some(u) = self.utterance {
            write!(f, ", U{u}")?;
        }
        if let Some(x) = &self.expression {
            write!(f, ", expression `{x}`")?;
        }
        write!(f, ", field `{}`: {}", self.field, self.rule)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub findings: Vec<Finding>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.findings.is_empty()
    }

    pub fn has_errors(&self) -> bool {
        self.findings.iter().any(|f| f.severity == Severity::Error)
    }

    pub fn errors(&self) -> impl Iterator<Item = &Finding> {
        self.findings
            .iter()
            .filter(|f| f.severity == Severity::Error)
    }
}

struct Collector<'a> {
    doc: &'a Document,
    findings: Vec<Finding>,
}

impl Collector<'_> {
    fn push(
        &mut self,
        severity: Severity,
        utterance: Option<usize>,
        expression: Option<&ExpressionId>,
        field: &'static str,
        rule: impl Into<String>,
    ) {
        self.findings.push(Finding {
            severity,
            document: self.doc.id.clone(),
            utterance,
            expression: expression.cloned(),
            field,
            rule: rule.into(),
        });
    }
}

/// Checks every document invariant. Findings are data; this never fails.
pub fn validate_document(doc: &Document) -> ValidationReport {
    let mut c = Collector {
        doc,
        findings: Vec::new(),
    };

    if doc.utterances.is_empty() {
        c.push(
            Severity::Error,
            None,
            None,
            "utterances",
            "document must contain at least one utterance",
        );
    }

    let mut declared: HashSet<&EntityId> = HashSet::new();
    for entity in &doc.entities {
        if !declared.insert(&entity.id) {
            c.push(
                Severity::Error,
                None,
                None,
                "entities",
                format!("duplicate entity id `{}`", entity.id),
            );
        }
    }

    let mut expression_ids = HashSet::new();
    for (pos, utt) in doc.utterances.iter().enumerate() {
        let at = Some(utt.index);
        if utt.index != pos + 1 {
            c.push(
                Severity::Error,
                at,
                None,
                "index",
                format!(
                    "utterance indices must be consecutive from 1 (expected {})",
                    pos + 1
                ),
            );
        }
        if utt.cf.is_empty() {
            c.push(Severity::Error, at, None, "cf", "cf must be non-empty");
        }
        let mut seen = HashSet::new();
        for entry in &utt.cf {
            if !declared.contains(&entry.entity) {
                c.push(
                    Severity::Error,
                    at,
                    None,
                    "cf",
                    format!("undeclared entity `{}`", entry.entity),
                );
            }
            if !seen.insert(&entry.entity) {
                c.push(
                    Severity::Error,
                    at,
                    None,
                    "cf",
                    format!("entity `{}` occurs more than once in cf", entry.entity),
                );
            }
            if !entry.mediated && entry.surface.trim().is_empty() {
                c.push(
                    Severity::Error,
                    at,
                    None,
                    "cf",
                    format!(
                        "direct cf entry for `{}` needs a surface string",
                        entry.entity
                    ),
                );
            }
        }

        for expr in &utt.expressions {
            let x = Some(&expr.id);
            if !expression_ids.insert(&expr.id) {
                c.push(Severity::Error, at, x, "id", "duplicate expression id");
            }
            for cand in &expr.candidates {
                if !declared.contains(cand) {
                    c.push(
                        Severity::Error,
                        at,
                        x,
                        "candidates",
                        format!("undeclared entity `{cand}`"),
                    );
                }
            }
            if expr.kind.is_anaphoric() && expr.candidates.is_empty() {
                c.push(
                    Severity::Error,
                    at,
                    x,
                    "candidates",
                    "anaphoric expression needs a non-empty candidate set",
                );
            }
            let Some(gold) = &expr.gold else { continue };
            if !declared.contains(&gold.entity) {
                c.push(
                    Severity::Error,
                    at,
                    x,
                    "gold",
                    format!("undeclared entity `{}`", gold.entity),
                );
            }
            if gold.utterance == 0 || gold.utterance > utt.index {
                c.push(
                    Severity::Error,
                    at,
                    x,
                    "gold",
                    "gold antecedent must precede expression",
                );
            }
            if !expr.kind.is_anaphoric() {
                c.push(
                    Severity::Warning,
                    at,
                    x,
                    "gold",
                    "gold annotation on a non-anaphoric expression is ignored",
                );
            } else if !expr.candidates.contains(&gold.entity) {
                c.push(
                    Severity::Warning,
                    at,
                    x,
                    "gold",
                    "gold entity is not among the candidates",
                );
            }
        }
    }

    ValidationReport {
        findings: c.findings,
    }
}
