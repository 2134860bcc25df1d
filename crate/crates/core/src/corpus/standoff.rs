//! JSON Lines standoff annotation files.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::{AnnotatedDocument, CharIndex, CorpusError, Document, EntitySpan, Result};

/// One line of a standoff file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StandoffRecord {
    pub id: String,
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lang: Option<String>,
    #[serde(default)]
    pub entities: Vec<EntitySpan>,
}

impl From<&AnnotatedDocument> for StandoffRecord {
    fn from(adoc: &AnnotatedDocument) -> Self {
        Self {
            id: adoc.doc.id.clone(),
            text: adoc.doc.text.clone(),
            lang: adoc.doc.lang.clone(),
            entities: adoc.spans.clone(),
        }
    }
}

/// Unit the offsets of an input file are expressed in. Loaded documents are
/// always converted to code points.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OffsetUnit {
    #[default]
    CodePoint,
    Byte,
    Utf16,
}

impl StandoffRecord {
    /// Convert offsets to code points and validate every span.
    pub fn into_document(self, unit: OffsetUnit) -> Result<AnnotatedDocument> {
        let id = self.id.clone();
        let wrap = |e: CorpusError| CorpusError::Document {
            id: id.clone(),
            source: Box::new(e),
        };
        let mut spans = self.entities;
        if unit != OffsetUnit::CodePoint {
            let convert = OffsetConverter::new(&self.text, unit);
            for span in &mut spans {
                let (start, end) = (convert.to_code_point(span.start), convert.to_code_point(span.end));
                match (start, end) {
                    (Some(s), Some(e)) => {
                        span.start = s;
                        span.end = e;
                    }
                    _ => {
                        return Err(wrap(CorpusError::InvalidSpan {
                            label: span.label.clone(),
                            start: span.start,
                            end: span.end,
                            reason: format!("offset not on a {unit:?} character boundary"),
                        }))
                    }
                }
            }
        }
        let doc = Document {
            id: self.id,
            text: self.text,
            lang: self.lang,
        };
        AnnotatedDocument::new(doc, spans)
    }
}

struct OffsetConverter {
    // Offset in the foreign unit of every code point boundary.
    boundaries: Vec<usize>,
}

impl OffsetConverter {
    fn new(text: &str, unit: OffsetUnit) -> Self {
        let boundaries = match unit {
            OffsetUnit::CodePoint => (0..=text.chars().count()).collect(),
            OffsetUnit::Byte => {
                let index = CharIndex::new(text);
                (0..=index.char_len()).filter_map(|i| index.byte_of(i)).collect()
            }
            OffsetUnit::Utf16 => {
                let mut acc = 0;
                let mut out = vec![0];
                for ch in text.chars() {
                    acc += ch.len_utf16();
                    out.push(acc);
                }
                out
            }
        };
        Self { boundaries }
    }

    fn to_code_point(&self, offset: usize) -> Option<usize> {
        self.boundaries.binary_search(&offset).ok()
    }
}

/// Read a standoff JSONL stream; blank lines are skipped.
pub fn read_standoff(reader: impl BufRead, unit: OffsetUnit) -> Result<Vec<AnnotatedDocument>> {
    let mut out = Vec::new();
    for (n, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: StandoffRecord =
            serde_json::from_str(&line).map_err(|source| CorpusError::Json { line: n + 1, source })?;
        out.push(record.into_document(unit)?);
    }
    Ok(out)
}

pub fn write_standoff<'a>(mut writer: impl Write, docs: impl IntoIterator<Item = &'a AnnotatedDocument>) -> Result<()> {
    for adoc in docs {
        let line = serde_json::to_string(&StandoffRecord::from(adoc))
            .map_err(|source| CorpusError::Json { line: 0, source })?;
        writeln!(writer, "{line}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_and_writes_code_point_offsets() {
        let input = concat!(
            r#"{"id":"1","text":"Señor John","entities":[{"label":"NAME","start":6,"end":10,"text":"John","score":0.9,"source":"m"}]}"#,
            "\n\n",
            r#"{"id":"2","text":"plain"}"#,
            "\n"
        );
        let docs = read_standoff(input.as_bytes(), OffsetUnit::CodePoint).unwrap();
        assert_eq!(docs.len(), 2);
        assert_eq!(docs[0].spans[0].surface, "John");
        assert!(docs[1].spans.is_empty());

        let mut out = Vec::new();
        write_standoff(&mut out, &docs).unwrap();
        let again = read_standoff(out.as_slice(), OffsetUnit::CodePoint).unwrap();
        assert_eq!(again, docs);
    }

    #[test]
    fn byte_and_utf16_offsets_are_reinterpreted() {
        // "Señor " is 7 bytes, 6 code points, 6 UTF-16 units.
        let bytes = r#"{"id":"1","text":"Señor John","entities":[{"label":"NAME","start":7,"end":11,"text":"John"}]}"#;
        let docs = read_standoff(bytes.as_bytes(), OffsetUnit::Byte).unwrap();
        assert_eq!((docs[0].spans[0].start, docs[0].spans[0].end), (6, 10));

        let emoji = r#"{"id":"1","text":"😀 John","entities":[{"label":"NAME","start":3,"end":7,"text":"John"}]}"#;
        let docs = read_standoff(emoji.as_bytes(), OffsetUnit::Utf16).unwrap();
        assert_eq!((docs[0].spans[0].start, docs[0].spans[0].end), (2, 6));
    }

    #[test]
    fn surface_mismatch_names_the_document() {
        let bad = r#"{"id":"doc-7","text":"John","entities":[{"label":"NAME","start":0,"end":4,"text":"Jane"}]}"#;
        let err = read_standoff(bad.as_bytes(), OffsetUnit::CodePoint).unwrap_err();
        assert!(err.to_string().contains("doc-7"));
        let err = read_standoff("{not json".as_bytes(), OffsetUnit::CodePoint).unwrap_err();
        assert!(matches!(err, CorpusError::Json { line: 1, .. }));
    }
}
