use super::{CharIndex, CorpusError, EntitySpan, Result};

/// A word token with code-point offsets into its document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub text: String,
    pub start: usize,
    pub end: usize,
}

impl Token {
    pub fn new(text: impl Into<String>, start: usize, end: usize) -> Self {
        Self {
            text: text.into(),
            start,
            end,
        }
    }

    /// Whitespace tokenization with code-point offsets.
    pub fn split_whitespace(text: &str) -> Vec<Token> {
        let mut out = Vec::new();
        let mut current: Option<(usize, String)> = None;
        for (cp, ch) in text.chars().enumerate() {
            if ch.is_whitespace() {
                if let Some((start, word)) = current.take() {
                    out.push(Token::new(word, start, cp));
                }
            } else {
                current.get_or_insert_with(|| (cp, String::new())).1.push(ch);
            }
        }
        if let Some((start, word)) = current {
            let end = start + word.chars().count();
            out.push(Token::new(word, start, end));
        }
        out
    }
}

/// Tag each token `B-<label>`, `I-<label>` or `O`.
pub fn to_iob2(tokens: &[Token], spans: &[EntitySpan]) -> Result<Vec<String>> {
    let mut tags = vec![String::from("O"); tokens.len()];
    for span in spans {
        let first = tokens.partition_point(|t| t.end <= span.start);
        let mut covered = 0;
        for (i, tok) in tokens.iter().enumerate().skip(first) {
            if tok.start >= span.end {
                break;
            }
            if tok.start < span.start || tok.end > span.end {
                return Err(CorpusError::SpanSplitsToken {
                    label: span.label.clone(),
                    start: span.start,
                    end: span.end,
                    token: i,
                });
            }
            let prefix = if covered == 0 { "B" } else { "I" };
            tags[i] = format!("{prefix}-{}", span.label);
            covered += 1;
        }
        if covered == 0 {
            return Err(CorpusError::InvalidSpan {
                label: span.label.clone(),
                start: span.start,
                end: span.end,
                reason: "covers no token".into(),
            });
        }
    }
    Ok(tags)
}

enum Tag<'a> {
    Outside,
    Begin(&'a str),
    Inside(&'a str),
}

fn parse_tag(tag: &str) -> Result<Tag<'_>> {
    match tag {
        "O" => Ok(Tag::Outside),
        _ => match tag.split_once('-') {
            Some(("B", label)) if !label.is_empty() => Ok(Tag::Begin(label)),
            Some(("I", label)) if !label.is_empty() => Ok(Tag::Inside(label)),
            _ => Err(CorpusError::MalformedTag(tag.to_owned())),
        },
    }
}

/// Spans decoded from a tag sequence, plus the token positions where an
/// orphan `I-` tag was read as `B-`.
#[derive(Debug, Clone, PartialEq)]
pub struct Iob2Decoded {
    pub spans: Vec<EntitySpan>,
    pub repaired: Vec<usize>,
}

/// Decode IOB2 tags over `tokens` of `text` into entity spans.
///
/// Decoding is lenient: an `I-X` that does not continue an `X` entity opens
/// a new one and its position is recorded in [`Iob2Decoded::repaired`].
pub fn from_iob2(text: &str, tokens: &[Token], tags: &[impl AsRef<str>]) -> Result<Iob2Decoded> {
    if tokens.len() != tags.len() {
        return Err(CorpusError::TagCountMismatch {
            tokens: tokens.len(),
            tags: tags.len(),
        });
    }
    let index = CharIndex::new(text);
    let mut spans = Vec::new();
    let mut repaired = Vec::new();
    let mut open: Option<(&str, usize, usize)> = None;

    let mut close = |open: &mut Option<(&str, usize, usize)>| -> Result<()> {
        if let Some((label, first, last)) = open.take() {
            let (start, end) = (tokens[first].start, tokens[last].end);
            let surface =
                index
                    .slice(text, start, end)
                    .filter(|_| start < end)
                    .ok_or_else(|| CorpusError::InvalidSpan {
                        label: label.to_owned(),
                        start,
                        end,
                        reason: "token offsets outside text".into(),
                    })?;
            spans.push(EntitySpan {
                label: label.to_owned(),
                start,
                end,
                surface: surface.to_owned(),
                score: 1.0,
                source: "iob2".into(),
            });
        }
        Ok(())
    };

    for (i, tag) in tags.iter().enumerate() {
        match parse_tag(tag.as_ref())? {
            Tag::Outside => close(&mut open)?,
            Tag::Begin(label) => {
                close(&mut open)?;
                open = Some((label, i, i));
            }
            Tag::Inside(label) => match open.as_mut() {
                Some((current, _, last)) if *current == label => *last = i,
                _ => {
                    close(&mut open)?;
                    repaired.push(i);
                    open = Some((label, i, i));
                }
            },
        }
    }
    close(&mut open)?;
    Ok(Iob2Decoded { spans, repaired })
}

/// One model subtoken with the id of the word it came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subtoken {
    pub piece: String,
    pub word_id: usize,
    pub label: String,
}

impl Subtoken {
    pub fn new(piece: impl Into<String>, word_id: usize, label: impl Into<String>) -> Self {
        Self {
            piece: piece.into(),
            word_id,
            label: label.into(),
        }
    }
}

/// Collapse subtoken predictions to one label per word: the first subtoken's.
pub fn regroup_subtokens(subtokens: &[Subtoken]) -> Vec<(usize, String)> {
    let mut out: Vec<(usize, String)> = Vec::new();
    for sub in subtokens {
        if out.last().map(|(w, _)| *w) != Some(sub.word_id) {
            out.push((sub.word_id, sub.label.clone()));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn john() -> (&'static str, Vec<Token>) {
        let text = "John Smith called";
        (text, Token::split_whitespace(text))
    }

    #[test]
    fn whitespace_tokens_have_codepoint_offsets() {
        let toks = Token::split_whitespace("  añb  c");
        assert_eq!(toks, vec![Token::new("añb", 2, 5), Token::new("c", 7, 8)]);
    }

    #[test]
    fn encodes_multi_token_entity() {
        let (text, toks) = john();
        let span = EntitySpan::from_text(text, "NAME", 0, 10, 1.0, "").unwrap();
        assert_eq!(to_iob2(&toks, &[span]).unwrap(), ["B-NAME", "I-NAME", "O"]);
        assert_eq!(to_iob2(&toks, &[]).unwrap(), ["O", "O", "O"]);
    }

    #[test]
    fn adjacent_entities_restart_with_b() {
        let (text, toks) = john();
        let a = EntitySpan::from_text(text, "NAME", 0, 4, 1.0, "").unwrap();
        let b = EntitySpan::from_text(text, "NAME", 5, 10, 1.0, "").unwrap();
        assert_eq!(to_iob2(&toks[..2], &[a, b]).unwrap(), ["B-NAME", "B-NAME"]);
    }

    #[test]
    fn boundary_inside_token_is_rejected() {
        let (text, toks) = john();
        let span = EntitySpan::from_text(text, "NAME", 0, 3, 1.0, "").unwrap();
        assert!(matches!(
            to_iob2(&toks, &[span]),
            Err(CorpusError::SpanSplitsToken { token: 0, .. })
        ));
    }

    #[test]
    fn decodes_spans() {
        let (text, toks) = john();
        let out = from_iob2(text, &toks, &["B-NAME", "I-NAME", "O"]).unwrap();
        assert_eq!(out.spans.len(), 1);
        assert_eq!((out.spans[0].start, out.spans[0].end), (0, 10));
        assert_eq!(out.spans[0].surface, "John Smith");
        assert!(out.repaired.is_empty());

        assert!(from_iob2(text, &toks, &["O", "O", "O"]).unwrap().spans.is_empty());
    }

    #[test]
    fn orphan_inside_tag_opens_entity() {
        let out = from_iob2("John", &[Token::new("John", 0, 4)], &["I-NAME"]).unwrap();
        assert_eq!(out.spans.len(), 1);
        assert_eq!(out.spans[0].label, "NAME");
        assert_eq!(out.repaired, vec![0]);

        let (text, toks) = john();
        let out = from_iob2(text, &toks, &["B-NAME", "I-PHONE", "O"]).unwrap();
        assert_eq!(out.spans.len(), 2);
        assert_eq!(out.repaired, vec![1]);
    }

    #[test]
    fn malformed_tags_and_length_mismatch() {
        let (text, toks) = john();
        assert!(matches!(
            from_iob2(text, &toks, &["B-NAME", "X", "O"]),
            Err(CorpusError::MalformedTag(_))
        ));
        assert!(matches!(
            from_iob2(text, &toks, &["B-", "O", "O"]),
            Err(CorpusError::MalformedTag(_))
        ));
        assert!(matches!(
            from_iob2(text, &toks, &["O"]),
            Err(CorpusError::TagCountMismatch { .. })
        ));
    }

    #[test]
    fn regroup_takes_first_subtoken() {
        let subs = [Subtoken::new("Jo", 0, "B-NAME"), Subtoken::new("##hn", 0, "I-NAME")];
        assert_eq!(regroup_subtokens(&subs), vec![(0, "B-NAME".to_string())]);
        let subs = [Subtoken::new("1", 0, "O"), Subtoken::new("23", 0, "B-PHONE")];
        assert_eq!(regroup_subtokens(&subs), vec![(0, "O".to_string())]);
        let subs = [Subtoken::new("a", 0, "O"), Subtoken::new("b", 1, "B-NAME")];
        assert_eq!(
            regroup_subtokens(&subs),
            vec![(0, "O".to_string()), (1, "B-NAME".to_string())]
        );
        assert!(regroup_subtokens(&[]).is_empty());
    }

    proptest! {
        #[test]
        fn regroup_is_idempotent(labels in prop::collection::vec((0usize..3, "[OBI]"), 0..20)) {
            let mut word = 0;
            let subs: Vec<Subtoken> = labels
                .iter()
                .map(|(step, l)| {
                    word += step;
                    Subtoken::new("x", word, l.clone())
                })
                .collect();
            let once = regroup_subtokens(&subs);
            let again: Vec<Subtoken> = once.iter().map(|(w, l)| Subtoken::new("x", *w, l.clone())).collect();
            prop_assert_eq!(regroup_subtokens(&again), once);
        }
    }
}
