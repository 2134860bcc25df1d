use regex::Regex;
use regex_automata::{meta, Anchored, Input, MatchKind};
use serde::{Deserialize, Serialize};

use super::{RecognizeError, Result};
use crate::corpus::{CharIndex, Document, EntitySpan};

/// A named regular expression whose matches become entity spans.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Pattern {
    pub name: String,
    pub regex: String,
    pub score: f64,
}

impl Pattern {
    pub fn new(name: impl Into<String>, regex: impl Into<String>, score: f64) -> Self {
        Self {
            name: name.into(),
            regex: regex.into(),
            score,
        }
    }

    pub fn label(&self) -> String {
        self.name.to_uppercase()
    }

    /// Recognizer name recorded as the span source.
    pub fn source(&self) -> String {
        format!("pattern:{}", self.name)
    }

    pub fn compile(&self) -> Result<CompiledPattern> {
        let invalid = |reason: String| RecognizeError::InvalidPattern {
            name: self.name.clone(),
            reason,
        };
        let mut chars = self.name.chars();
        let identifier = chars.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
            && chars.all(|c| c.is_ascii_alphanumeric() || c == '_');
        if !identifier {
            return Err(invalid("name is not an identifier".into()));
        }
        if !(0.0..=1.0).contains(&self.score) {
            return Err(invalid(format!("score {} outside [0,1]", self.score)));
        }
        let first = Regex::new(&self.regex).map_err(|e| invalid(e.to_string()))?;
        let longest = meta::Regex::builder()
            .configure(meta::Regex::config().match_kind(MatchKind::All))
            .build(&self.regex)
            .map_err(|e| invalid(e.to_string()))?;
        Ok(CompiledPattern {
            pattern: self.clone(),
            label: self.label(),
            source: self.source(),
            first,
            longest,
        })
    }
}

#[derive(Debug, Clone)]
pub struct CompiledPattern {
    pattern: Pattern,
    label: String,
    source: String,
    // Locates the leftmost match start.
    first: Regex,
    // Anchored at that start, extends to the longest match.
    longest: meta::Regex,
}

impl CompiledPattern {
    pub fn pattern(&self) -> &Pattern {
        &self.pattern
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    /// Non-overlapping leftmost-longest matches as byte ranges.
    pub fn find_ranges(&self, text: &str) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        let mut pos = 0;
        while pos <= text.len() {
            let Some(m) = self.first.find_at(text, pos) else {
                break;
            };
            let start = m.start();
            let input = Input::new(text).range(start..).anchored(Anchored::Yes);
            let end = self.longest.search(&input).map_or(m.end(), |lm| lm.end().max(m.end()));
            if end > start {
                out.push((start, end));
                pos = end;
            } else {
                // Empty match: step over one character.
                match text[start..].chars().next() {
                    Some(c) => pos = start + c.len_utf8(),
                    None => break,
                }
            }
        }
        out
    }

    pub fn recognize(&self, text: &str, index: &CharIndex) -> Vec<EntitySpan> {
        self.find_ranges(text)
            .into_iter()
            .map(|(bs, be)| {
                let start = index.char_of(bs).expect("regex matches on char boundaries");
                let end = index.char_of(be).expect("regex matches on char boundaries");
                EntitySpan {
                    label: self.label.clone(),
                    start,
                    end,
                    surface: text[bs..be].to_owned(),
                    score: self.pattern.score,
                    source: self.source.clone(),
                }
            })
            .collect()
    }
}

/// Run every pattern over the document text; spans from different patterns
/// may overlap (see [`super::merge`]).
pub fn recognize_patterns(doc: &Document, patterns: &[CompiledPattern]) -> Vec<EntitySpan> {
    let index = CharIndex::new(&doc.text);
    let mut spans: Vec<EntitySpan> = patterns.iter().flat_map(|p| p.recognize(&doc.text, &index)).collect();
    spans.sort_by(crate::corpus::span_order);
    spans
}

/// Built-in pattern set covering the synthetic entity classes.
pub fn default_patterns() -> Vec<Pattern> {
    const B58: &str = "[1-9A-HJ-NP-Za-km-z]";
    vec![
        Pattern::new("document_number", r"\d+\/\d{2}", 0.7),
        Pattern::new(
            "email",
            r"\b[A-Za-z0-9._%+-]+@[A-Za-z0-9-]+(?:\.[A-Za-z0-9-]+)*\.[A-Za-z]{2,}\b",
            0.9,
        ),
        Pattern::new("iban", r"\b[A-Z]{2}\d{2}[A-Z0-9]{11,30}\b", 0.85),
        Pattern::new(
            "ipv4",
            r"\b(?:(?:25[0-5]|2[0-4]\d|1\d\d|[1-9]?\d)\.){3}(?:25[0-5]|2[0-4]\d|1\d\d|[1-9]?\d)\b",
            0.8,
        ),
        Pattern::new(
            "ipv6",
            r"(?i)\b(?:[0-9a-f]{1,4}:){7}[0-9a-f]{1,4}\b|\b(?:[0-9a-f]{1,4}:){1,6}(?::[0-9a-f]{1,4}){1,6}\b",
            0.8,
        ),
        Pattern::new("ethereum_address", r"\b0x[0-9a-fA-F]{40}\b", 0.85),
        Pattern::new("bitcoin_address", format!(r"\b[13]{B58}{{25,33}}\b"), 0.6),
        Pattern::new("litecoin_address", format!(r"\b[LM]{B58}{{26,33}}\b"), 0.6),
        Pattern::new("creditcardnumber", r"\b(?:\d{4}[ -]?){3}\d{4}\b", 0.75),
        Pattern::new("phone", r"\+\d{1,3}(?:[ -]\d{2,4}){2,4}\b", 0.6),
        Pattern::new("idcardnum", r"\b\d{8}[A-HJ-NP-TV-Z]\b", 0.6),
        Pattern::new("passport", r"\b[A-Z]{3}\d{6}\b", 0.5),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc_number() -> CompiledPattern {
        Pattern::new("document_number", r"\d+\/\d{2}", 0.7).compile().unwrap()
    }

    #[test]
    fn listing_pattern_matches_case_number() {
        let spans = recognize_patterns(&Document::new("d", "case 123/45 closed"), &[doc_number()]);
        assert_eq!(spans.len(), 1);
        let s = &spans[0];
        assert_eq!((s.start, s.end, s.surface.as_str()), (5, 11, "123/45"));
        assert_eq!(s.label, "DOCUMENT_NUMBER");
        assert_eq!(s.score, 0.7);
        assert_eq!(s.source, "pattern:document_number");
    }

    #[test]
    fn no_match_and_repeated_matches() {
        let p = [doc_number()];
        assert!(recognize_patterns(&Document::new("d", "no digits here"), &p).is_empty());
        let spans = recognize_patterns(&Document::new("d", "1/23 and 45/67"), &p);
        let offs: Vec<_> = spans.iter().map(|s| (s.start, s.end)).collect();
        assert_eq!(offs, [(0, 4), (9, 14)]);
    }

    #[test]
    fn matching_is_leftmost_longest() {
        let p = Pattern::new("x", "a|ab", 0.5).compile().unwrap();
        assert_eq!(p.find_ranges("xab ab"), [(1, 3), (4, 6)]);
        let lazy = Pattern::new("x", r"\d+?", 0.5).compile().unwrap();
        assert_eq!(lazy.find_ranges("a123"), [(1, 4)]);
    }

    #[test]
    fn empty_matches_are_skipped() {
        let p = Pattern::new("x", "a*", 0.5).compile().unwrap();
        assert_eq!(p.find_ranges("bab€aa"), [(1, 2), (6, 8)]);
    }

    #[test]
    fn offsets_are_code_points() {
        let spans = recognize_patterns(&Document::new("d", "ñandú 12/34"), &[doc_number()]);
        assert_eq!((spans[0].start, spans[0].end), (6, 11));
    }

    #[test]
    fn invalid_patterns_are_named() {
        let err = Pattern::new("broken", "(", 0.5).compile().unwrap_err();
        assert!(err.to_string().contains("broken"));
        assert!(Pattern::new("bad name", "a", 0.5).compile().is_err());
        assert!(Pattern::new("x", "a", 1.2).compile().is_err());
    }

    #[test]
    fn default_patterns_compile() {
        for p in default_patterns() {
            p.compile().unwrap();
        }
    }
}
