//! Documents, standoff entity spans and the offset-safe transformations
//! between raw text, model-sized segments and token tag sequences.
//!
//! All offsets are Unicode code-point indices into the document text.

mod iob2;
mod labels;
mod segment;
mod standoff;
pub mod text;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use iob2::{from_iob2, regroup_subtokens, to_iob2, Iob2Decoded, Subtoken, Token};
pub use labels::{normalize_labels, LabelMap, CANONICAL_LABELS};
pub use segment::{reconstruct, segment, Segment, TokenCounter, WhitespaceWords};
pub use standoff::{read_standoff, write_standoff, OffsetUnit, StandoffRecord};
pub use text::{char_len, char_slice, CharIndex};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("token budget must be at least 1")]
    ZeroBudget,
    #[error("word {word:?} at offset {start} counts {tokens} tokens, budget is {budget}")]
    WordExceedsBudget {
        word: String,
        start: usize,
        tokens: usize,
        budget: usize,
    },
    #[error("segments belong to different parents: {0:?} and {1:?}")]
    MixedParents(String, String),
    #[error("segment index {0} appears more than once")]
    DuplicateSegment(usize),
    #[error("gap before segment {index} of {parent:?}: expected offset {expected}, found {found}")]
    SegmentGap {
        parent: String,
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("segment {index} of {parent:?} overlaps its predecessor: expected offset {expected}, found {found}")]
    SegmentOverlap {
        parent: String,
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("got {spans} span lists for {segments} segments")]
    SpanListCount { segments: usize, spans: usize },
    #[error("invalid span {label}[{start},{end}): {reason}")]
    InvalidSpan {
        label: String,
        start: usize,
        end: usize,
        reason: String,
    },
    #[error("span {label}[{start},{end}) has a boundary inside token {token}")]
    SpanSplitsToken {
        label: String,
        start: usize,
        end: usize,
        token: usize,
    },
    #[error("{tags} tags for {tokens} tokens")]
    TagCountMismatch { tokens: usize, tags: usize },
    #[error("malformed IOB2 tag {0:?}")]
    MalformedTag(String),
    #[error("unmapped labels: {}", .0.join(", "))]
    UnmappedLabels(Vec<String>),
    #[error("label map target {0:?} is outside the canonical label set")]
    NonCanonicalTarget(String),
    #[error("line {line}: {source}")]
    Json {
        line: usize,
        #[source]
        source: serde_json::Error,
    },
    #[error("document {id:?}: {source}")]
    Document {
        id: String,
        #[source]
        source: Box<CorpusError>,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = CorpusError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lang: Option<String>,
}

impl Document {
    pub fn new(id: impl Into<String>, text: impl Into<String>) -> Self {
        Self {
            id: id.into(),
            text: text.into(),
            lang: None,
        }
    }
}

fn default_score() -> f64 {
    1.0
}

/// One recognized entity mention.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntitySpan {
    pub label: String,
    pub start: usize,
    pub end: usize,
    #[serde(rename = "text")]
    pub surface: String,
    #[serde(default = "default_score")]
    pub score: f64,
    #[serde(default)]
    pub source: String,
}

impl EntitySpan {
    /// Build a span over `text[start..end)`, copying the surface form.
    pub fn from_text(
        text: &str,
        label: impl Into<String>,
        start: usize,
        end: usize,
        score: f64,
        source: impl Into<String>,
    ) -> Result<Self> {
        let label = label.into();
        let surface = match char_slice(text, start, end) {
            Some(s) if start < end => s.to_owned(),
            _ => {
                return Err(CorpusError::InvalidSpan {
                    label,
                    start,
                    end,
                    reason: format!("outside text of {} code points", char_len(text)),
                })
            }
        };
        let span = Self {
            label,
            start,
            end,
            surface,
            score,
            source: source.into(),
        };
        span.check_score()?;
        Ok(span)
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end <= self.start
    }

    pub fn overlaps(&self, other: &EntitySpan) -> bool {
        self.start < other.end && other.start < self.end
    }

    fn invalid(&self, reason: impl Into<String>) -> CorpusError {
        CorpusError::InvalidSpan {
            label: self.label.clone(),
            start: self.start,
            end: self.end,
            reason: reason.into(),
        }
    }

    fn check_score(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.score) {
            return Err(self.invalid(format!("score {} outside [0,1]", self.score)));
        }
        Ok(())
    }

    /// Check offsets, score and slice identity against an indexed text.
    pub fn validate_indexed(&self, text: &str, index: &CharIndex) -> Result<()> {
        if self.start >= self.end {
            return Err(self.invalid("empty or inverted extent"));
        }
        if self.end > index.char_len() {
            return Err(self.invalid(format!("end beyond text of {} code points", index.char_len())));
        }
        self.check_score()?;
        let actual = index.slice(text, self.start, self.end).unwrap_or_default();
        if actual != self.surface {
            return Err(self.invalid(format!("surface {:?} does not match text {:?}", self.surface, actual)));
        }
        Ok(())
    }

    pub fn validate(&self, text: &str) -> Result<()> {
        self.validate_indexed(text, &CharIndex::new(text))
    }
}

/// Ordering used everywhere spans are sorted.
pub fn span_order(a: &EntitySpan, b: &EntitySpan) -> std::cmp::Ordering {
    (a.start, a.end, &a.label).cmp(&(b.start, b.end, &b.label))
}

/// A document with its standoff annotations, sorted by `(start, end)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnotatedDocument {
    pub doc: Document,
    pub spans: Vec<EntitySpan>,
}

impl AnnotatedDocument {
    /// Validates every span against the text and sorts them.
    pub fn new(doc: Document, mut spans: Vec<EntitySpan>) -> Result<Self> {
        let index = CharIndex::new(&doc.text);
        for span in &spans {
            span.validate_indexed(&doc.text, &index)
                .map_err(|e| CorpusError::Document {
                    id: doc.id.clone(),
                    source: Box::new(e),
                })?;
        }
        spans.sort_by(span_order);
        Ok(Self { doc, spans })
    }

    pub fn unannotated(doc: Document) -> Self {
        Self { doc, spans: Vec::new() }
    }

    pub fn id(&self) -> &str {
        &self.doc.id
    }

    pub fn text(&self) -> &str {
        &self.doc.text
    }

    /// First pair of overlapping spans, if any. Assumes sorted spans.
    pub fn first_overlap(&self) -> Option<(&EntitySpan, &EntitySpan)> {
        first_overlap(&self.spans)
    }
}

/// First pair of overlapping spans in a `(start, end)`-sorted list.
pub fn first_overlap(spans: &[EntitySpan]) -> Option<(&EntitySpan, &EntitySpan)> {
    let mut furthest: Option<&EntitySpan> = None;
    for span in spans {
        if let Some(prev) = furthest {
            if span.start < prev.end {
                return Some((prev, span));
            }
            if span.end > prev.end {
                furthest = Some(span);
            }
        } else {
            furthest = Some(span);
        }
    }
    None
}
