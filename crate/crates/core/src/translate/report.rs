use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use super::TranslateOptions;
use crate::diag::{Diagnostic, Span};
use crate::orm::{Construct, RuleKey};

/// What happened to one construct.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReportEntry {
    pub construct: Construct,
    /// The construct in model syntax.
    pub text: String,
    pub rule: RuleKey,
    /// Indices into the knowledge base's axiom list.
    pub axioms: Vec<usize>,
    /// Symbols introduced for this construct.
    pub fresh: Vec<String>,
    pub notes: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RejectionReason {
    RingConstraint,
    MultiRoleFrequency,
}

impl fmt::Display for RejectionReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RejectionReason::RingConstraint => "ring constraint",
            RejectionReason::MultiRoleFrequency => "multi-role frequency constraint",
        })
    }
}

/// A construct outside the translatable fragment.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Rejection {
    /// Index into `OrmModel::constraints`.
    pub constraint: usize,
    pub text: String,
    pub reason: RejectionReason,
    pub span: Span,
    pub rule: RuleKey,
}

impl Rejection {
    pub fn new(constraint: usize, text: String, reason: RejectionReason, span: Span) -> Self {
        Rejection { constraint, text, reason, span, rule: RuleKey::Rejected }
    }

    pub fn diagnostic(&self) -> Diagnostic {
        Diagnostic::error(
            "rejected",
            format!("{} `{}` has no DLR_ifd translation (§4)", self.reason, self.text.trim_end_matches(';')),
            self.span,
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RejectionError {
    pub rejections: Vec<Rejection>,
}

impl RejectionError {
    pub fn diagnostics(&self) -> Vec<Diagnostic> {
        self.rejections.iter().map(Rejection::diagnostic).collect()
    }
}

impl fmt::Display for RejectionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lines: Vec<String> = self.diagnostics().iter().map(|d| d.to_string()).collect();
        f.write_str(&lines.join("\n"))
    }
}

impl std::error::Error for RejectionError {}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum TranslateError {
    #[error("model does not validate")]
    Invalid(Vec<Diagnostic>),
    #[error("{0}")]
    Rejected(RejectionError),
    #[error("internal error: {0}")]
    Internal(String),
}

impl TranslateError {
    pub fn diagnostics(&self) -> Vec<Diagnostic> {
        match self {
            TranslateError::Invalid(d) => d.clone(),
            TranslateError::Rejected(r) => r.diagnostics(),
            TranslateError::Internal(msg) => vec![Diagnostic::error("internal", msg.clone(), Span::default())],
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct TranslationReport {
    pub options: TranslateOptions,
    pub entries: Vec<ReportEntry>,
    pub rejections: Vec<Rejection>,
    /// Fact types represented as concepts.
    pub reified_facts: BTreeSet<String>,
}

impl TranslationReport {
    pub fn entry(&self, c: &Construct) -> Option<&ReportEntry> {
        self.entries.iter().find(|e| &e.construct == c)
    }

    /// Every auxiliary symbol, in order of introduction.
    pub fn fresh_symbols(&self) -> Vec<&str> {
        self.entries.iter().flat_map(|e| e.fresh.iter().map(String::as_str)).collect()
    }
}
