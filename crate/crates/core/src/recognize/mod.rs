//! Entity recognizers: regular-expression patterns, external span
//! predictors, and the merge step that reconciles their outputs.

mod adapter;
mod merge;
mod pattern;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use adapter::{
    recognize_external, AdapterDecl, AdapterEntity, AdapterRequest, AdapterResponse, AdapterSource, ExternalAdapter,
    FileAdapter, Handshake, PredictionSource, SubprocessAdapter, PROTOCOL,
};
pub use merge::merge;
pub use pattern::{default_patterns, recognize_patterns, CompiledPattern, Pattern};

use crate::corpus::{AnnotatedDocument, CorpusError, Document};

#[derive(Debug, Error)]
pub enum RecognizeError {
    #[error("pattern {name:?}: {reason}")]
    InvalidPattern { name: String, reason: String },
    #[error("recognizer name {0:?} is declared more than once")]
    DuplicateRecognizer(String),
    #[error("merge policy names unknown recognizer {0:?}")]
    UnknownRecognizer(String),
    #[error("adapter {adapter:?}: {reason}")]
    Protocol { adapter: String, reason: String },
    #[error("adapter {adapter:?}, document {doc_id:?}: {reason} in record {record}")]
    Adapter {
        adapter: String,
        doc_id: String,
        record: String,
        reason: String,
    },
    #[error(transparent)]
    Corpus(#[from] CorpusError),
}

pub type Result<T, E = RecognizeError> = std::result::Result<T, E>;

/// Declarative recognizer setup, as found in a pipeline config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecognizerConfig {
    #[serde(default = "default_patterns")]
    pub patterns: Vec<Pattern>,
    #[serde(default)]
    pub adapters: Vec<AdapterDecl>,
    /// Recognizer names in decreasing priority, used to break merge ties.
    #[serde(default)]
    pub merge_policy: Vec<String>,
}

impl Default for RecognizerConfig {
    fn default() -> Self {
        Self {
            patterns: default_patterns(),
            adapters: Vec::new(),
            merge_policy: Vec::new(),
        }
    }
}

impl RecognizerConfig {
    /// Names of all recognizers: `pattern:<name>` per pattern, then adapters.
    pub fn recognizer_names(&self) -> Vec<String> {
        self.patterns
            .iter()
            .map(Pattern::source)
            .chain(self.adapters.iter().map(|a| a.name.clone()))
            .collect()
    }

    /// Check everything that can be checked without launching adapters.
    pub fn validate(&self) -> Result<Vec<CompiledPattern>> {
        let compiled = self.patterns.iter().map(Pattern::compile).collect::<Result<Vec<_>>>()?;
        let mut seen = BTreeSet::new();
        for name in self.recognizer_names() {
            if !seen.insert(name.clone()) {
                return Err(RecognizeError::DuplicateRecognizer(name));
            }
        }
        if let Some(unknown) = self.merge_policy.iter().find(|n| !seen.contains(*n)) {
            return Err(RecognizeError::UnknownRecognizer(unknown.clone()));
        }
        Ok(compiled)
    }
}

/// A ready-to-run recognizer ensemble.
pub struct Recognizer {
    patterns: Vec<CompiledPattern>,
    adapters: Vec<ExternalAdapter>,
    policy: Vec<String>,
}

impl Recognizer {
    /// Validate the configuration, compile patterns and open adapters.
    pub fn open(config: &RecognizerConfig) -> Result<Self> {
        let patterns = config.validate()?;
        let adapters = config
            .adapters
            .iter()
            .map(ExternalAdapter::open)
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            patterns,
            adapters,
            policy: config.merge_policy.clone(),
        })
    }

    pub fn with_parts(patterns: Vec<CompiledPattern>, adapters: Vec<ExternalAdapter>, policy: Vec<String>) -> Self {
        Self {
            patterns,
            adapters,
            policy,
        }
    }

    pub fn has_adapters(&self) -> bool {
        !self.adapters.is_empty()
    }

    fn pattern_lists(&self, doc: &Document) -> Vec<(String, Vec<crate::corpus::EntitySpan>)> {
        let index = crate::corpus::CharIndex::new(&doc.text);
        self.patterns
            .iter()
            .map(|p| (p.source().to_owned(), p.recognize(&doc.text, &index)))
            .collect()
    }

    /// Pattern recognizers only; usable from many threads at once.
    pub fn recognize_patterns_only(&self, doc: &Document) -> Result<AnnotatedDocument> {
        let merged = merge(&self.pattern_lists(doc), &self.policy);
        Ok(AnnotatedDocument::new(doc.clone(), merged)?)
    }

    /// Run all recognizers and merge their spans.
    pub fn recognize(&mut self, doc: &Document) -> Result<AnnotatedDocument> {
        let mut lists = self.pattern_lists(doc);
        for adapter in &mut self.adapters {
            let spans = recognize_external(doc, adapter)?;
            lists.push((adapter.name().to_owned(), spans));
        }
        let merged = merge(&lists, &self.policy);
        Ok(AnnotatedDocument::new(doc.clone(), merged)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn policy_must_name_known_recognizers() {
        let cfg = RecognizerConfig {
            merge_policy: vec!["nonexistent".into()],
            ..Default::default()
        };
        assert!(matches!(cfg.validate(), Err(RecognizeError::UnknownRecognizer(_))));

        let ok = RecognizerConfig {
            merge_policy: vec!["pattern:email".into()],
            ..Default::default()
        };
        assert!(ok.validate().is_ok());
    }

    #[test]
    fn duplicate_names_are_rejected() {
        let cfg = RecognizerConfig {
            patterns: vec![Pattern::new("a", "x", 0.5), Pattern::new("a", "y", 0.5)],
            ..Default::default()
        };
        assert!(matches!(cfg.validate(), Err(RecognizeError::DuplicateRecognizer(_))));
    }

    #[test]
    fn config_rejects_unknown_fields() {
        assert!(serde_json::from_str::<RecognizerConfig>(r#"{"patternz":[]}"#).is_err());
        let cfg: RecognizerConfig = serde_json::from_str("{}").unwrap();
        assert_eq!(cfg.patterns, default_patterns());
    }

    #[test]
    fn ensemble_recognizes_default_classes() {
        let rec = Recognizer::open(&RecognizerConfig::default()).unwrap();
        let text = "mail ana.lopez@example.org from 192.168.1.20 re case 123/45";
        let adoc = rec.recognize_patterns_only(&Document::new("d", text)).unwrap();
        let labels: Vec<_> = adoc.spans.iter().map(|s| s.label.as_str()).collect();
        assert_eq!(labels, ["EMAIL", "IPV4", "DOCUMENT_NUMBER"]);
        assert!(adoc.first_overlap().is_none());
    }

    #[test]
    fn output_depends_on_text_only() {
        let rec = Recognizer::open(&RecognizerConfig::default()).unwrap();
        let text = "call +34 612 345 678 or write to x@y.io";
        let a = rec.recognize_patterns_only(&Document::new("one", text)).unwrap();
        let b = rec.recognize_patterns_only(&Document::new("two", text)).unwrap();
        assert_eq!(a.spans, b.spans);
    }
}
