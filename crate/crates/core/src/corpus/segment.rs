use serde::{Deserialize, Serialize};

use super::{char_len, AnnotatedDocument, CharIndex, CorpusError, Document, EntitySpan, Result};

/// Counts model tokens for one whitespace-delimited word.
///
/// Segment sizes are the sum of their words' counts, so a subword counter
/// only has to price individual words.
pub trait TokenCounter {
    fn count(&self, word: &str) -> usize;
}

/// Every word costs one token.
#[derive(Debug, Clone, Copy, Default)]
pub struct WhitespaceWords;

impl TokenCounter for WhitespaceWords {
    fn count(&self, _word: &str) -> usize {
        1
    }
}

impl<F: Fn(&str) -> usize> TokenCounter for F {
    fn count(&self, word: &str) -> usize {
        self(word)
    }
}

/// A contiguous slice of a parent document sized for a model's token budget.
///
/// `text` starts at `offset` (code points) in the parent; `trailing` holds the
/// whitespace between this segment and the next one (or the end of the
/// parent), so `text + trailing` over all segments rebuilds the parent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    pub parent_id: String,
    pub index: usize,
    pub text: String,
    pub offset: usize,
    #[serde(default)]
    pub trailing: String,
}

impl Segment {
    fn extent(&self) -> usize {
        char_len(&self.text) + char_len(&self.trailing)
    }
}

struct Word {
    start: usize,
    byte_start: usize,
    byte_end: usize,
}

fn words(text: &str) -> Vec<Word> {
    let mut out = Vec::new();
    let mut current: Option<(usize, usize)> = None;
    for (cp, (byte, ch)) in text.char_indices().enumerate() {
        if ch.is_whitespace() {
            if let Some((start, byte_start)) = current.take() {
                out.push(Word {
                    start,
                    byte_start,
                    byte_end: byte,
                });
            }
        } else if current.is_none() {
            current = Some((cp, byte));
        }
    }
    if let Some((start, byte_start)) = current {
        out.push(Word {
            start,
            byte_start,
            byte_end: text.len(),
        });
    }
    out
}

/// Split a document into segments of at most `budget` tokens, cutting only
/// at whitespace.
pub fn segment(doc: &Document, budget: usize, counter: &impl TokenCounter) -> Result<Vec<Segment>> {
    if budget == 0 {
        return Err(CorpusError::ZeroBudget);
    }
    let text = doc.text.as_str();
    if text.is_empty() {
        return Ok(Vec::new());
    }
    let words = words(text);
    let make = |index: usize, offset: usize, from: usize, to: usize, next: usize| Segment {
        parent_id: doc.id.clone(),
        index,
        text: text[from..to].to_owned(),
        offset,
        trailing: text[to..next].to_owned(),
    };
    if words.is_empty() {
        return Ok(vec![make(0, 0, 0, text.len(), text.len())]);
    }

    let mut segments = Vec::new();
    // Leading whitespace of the document belongs to the first segment.
    let (mut seg_start, mut seg_byte) = (0usize, 0usize);
    let mut used = 0usize;
    for (i, word) in words.iter().enumerate() {
        let cost = counter.count(&text[word.byte_start..word.byte_end]);
        if cost > budget {
            return Err(CorpusError::WordExceedsBudget {
                word: text[word.byte_start..word.byte_end].to_owned(),
                start: word.start,
                tokens: cost,
                budget,
            });
        }
        if used + cost > budget && i > 0 {
            let prev = &words[i - 1];
            segments.push(make(
                segments.len(),
                seg_start,
                seg_byte,
                prev.byte_end,
                word.byte_start,
            ));
            seg_start = word.start;
            seg_byte = word.byte_start;
            used = 0;
        }
        used += cost;
    }
    let last = words.last().expect("non-empty");
    segments.push(make(segments.len(), seg_start, seg_byte, last.byte_end, text.len()));
    Ok(segments)
}

/// Rebuild the parent document from its segments and shift per-segment
/// spans into parent coordinates.
///
/// `seg_spans[i]` belongs to `segments[i]`; segments may arrive in any order.
pub fn reconstruct(segments: &[Segment], seg_spans: &[Vec<EntitySpan>]) -> Result<AnnotatedDocument> {
    if segments.len() != seg_spans.len() {
        return Err(CorpusError::SpanListCount {
            segments: segments.len(),
            spans: seg_spans.len(),
        });
    }
    let mut parts: Vec<(&Segment, &Vec<EntitySpan>)> = segments.iter().zip(seg_spans).collect();
    parts.sort_by_key(|(s, _)| s.index);

    let Some((first, _)) = parts.first() else {
        return Err(CorpusError::SpanListCount { segments: 0, spans: 0 });
    };
    let parent = first.parent_id.clone();
    let mut text = String::new();
    let mut spans = Vec::new();
    let mut expected = 0usize;
    let mut last_index = None;

    for (seg, seg_spans) in &parts {
        if seg.parent_id != parent {
            return Err(CorpusError::MixedParents(parent, seg.parent_id.clone()));
        }
        if last_index == Some(seg.index) {
            return Err(CorpusError::DuplicateSegment(seg.index));
        }
        last_index = Some(seg.index);
        if seg.offset != expected {
            let (index, found) = (seg.index, seg.offset);
            let parent = parent.clone();
            return Err(if found > expected {
                CorpusError::SegmentGap {
                    parent,
                    index,
                    expected,
                    found,
                }
            } else {
                CorpusError::SegmentOverlap {
                    parent,
                    index,
                    expected,
                    found,
                }
            });
        }
        let index = CharIndex::new(&seg.text);
        for span in seg_spans.iter() {
            span.validate_indexed(&seg.text, &index)?;
            spans.push(EntitySpan {
                start: span.start + seg.offset,
                end: span.end + seg.offset,
                ..span.clone()
            });
        }
        text.push_str(&seg.text);
        text.push_str(&seg.trailing);
        expected += seg.extent();
    }
    AnnotatedDocument::new(
        Document {
            id: parent,
            text,
            lang: None,
        },
        spans,
    )
}
