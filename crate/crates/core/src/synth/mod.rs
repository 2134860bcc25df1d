//! Seeded synthetic corpus with injected fake entities and gold spans.
//!
//! The generator is PCG64 (`rand_pcg::Pcg64`, XSL-RR 128/64) seeded with
//! `seed_from_u64`. For each paragraph, in order:
//!
//! 1. each sentence draws a word count uniformly from
//!    `min_words..=max_words`, then that many filler words;
//! 2. `entities_per_paragraph` distinct non-final word positions are picked
//!    by a partial Fisher-Yates shuffle over the paragraph's eligible slots;
//! 3. for each picked slot, in pick order, a label is drawn from
//!    `entity_mix` (labels in lexicographic order) and its surface generated.
//!
//! Sentences are joined by a space, capitalized and terminated with `.`.

mod entities;
mod words;

use std::collections::BTreeMap;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{RngExt, SeedableRng};
use rand_pcg::Pcg64;
use serde::{Deserialize, Serialize};

use crate::corpus::{AnnotatedDocument, Document, EntitySpan};

pub use entities::{gen_entity, iban_mod97, is_private_ipv4, is_public_ipv4, SYNTH_LABELS};

#[derive(Debug, thiserror::Error)]
pub enum SynthError {
    #[error("unsupported entity label {0:?}")]
    UnsupportedLabel(String),
    #[error("invalid synth spec: {0}")]
    InvalidSpec(String),
    #[error("paragraph {paragraph} has {eligible} eligible words, {requested} entities requested")]
    ParagraphTooShort {
        paragraph: usize,
        eligible: usize,
        requested: usize,
    },
}

pub type Result<T, E = SynthError> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SynthSpec {
    pub seed: u64,
    pub paragraphs: usize,
    pub sentences_per_paragraph: usize,
    pub min_words: usize,
    pub max_words: usize,
    pub entities_per_paragraph: usize,
    pub entity_mix: BTreeMap<String, f64>,
}

impl Default for SynthSpec {
    fn default() -> Self {
        Self {
            seed: 12345,
            paragraphs: 100,
            sentences_per_paragraph: 4,
            min_words: 6,
            max_words: 14,
            entities_per_paragraph: 3,
            entity_mix: SYNTH_LABELS.iter().map(|l| (l.to_string(), 1.0)).collect(),
        }
    }
}

impl SynthSpec {
    pub fn validate(&self) -> Result<()> {
        if self.min_words < 1 || self.min_words > self.max_words {
            return Err(SynthError::InvalidSpec(format!(
                "word bounds {}..={} are empty or start at 0",
                self.min_words, self.max_words
            )));
        }
        if let Some(label) = self.entity_mix.keys().find(|l| !SYNTH_LABELS.contains(&l.as_str())) {
            return Err(SynthError::UnsupportedLabel(label.clone()));
        }
        if self.entity_mix.values().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(SynthError::InvalidSpec(
                "entity weights must be finite and non-negative".into(),
            ));
        }
        if self.entities_per_paragraph > 0 && !self.entity_mix.values().any(|w| *w > 0.0) {
            return Err(SynthError::InvalidSpec("no entity label has positive weight".into()));
        }
        Ok(())
    }
}

fn capitalize(word: &str) -> String {
    let mut chars = word.chars();
    match chars.next() {
        Some(c) => c.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

/// Generate the corpus described by `spec`.
pub fn gen_corpus(spec: &SynthSpec) -> Result<Vec<AnnotatedDocument>> {
    spec.validate()?;
    let labels: Vec<(&String, f64)> = spec
        .entity_mix
        .iter()
        .filter(|(_, w)| **w > 0.0)
        .map(|(l, w)| (l, *w))
        .collect();
    let chooser = if labels.is_empty() {
        None
    } else {
        Some(WeightedIndex::new(labels.iter().map(|(_, w)| *w)).map_err(|e| SynthError::InvalidSpec(e.to_string()))?)
    };
    let mut rng = Pcg64::seed_from_u64(spec.seed);
    let mut out = Vec::with_capacity(spec.paragraphs);

    for p in 0..spec.paragraphs {
        let mut sentences: Vec<Vec<String>> = Vec::with_capacity(spec.sentences_per_paragraph);
        let mut eligible: Vec<(usize, usize)> = Vec::new();
        for s in 0..spec.sentences_per_paragraph {
            let n = rng.random_range(spec.min_words..=spec.max_words);
            let words: Vec<String> = (0..n)
                .map(|_| words::FILLER[rng.random_range(0..words::FILLER.len())].to_owned())
                .collect();
            eligible.extend((0..n - 1).map(|w| (s, w)));
            sentences.push(words);
        }
        let k = spec.entities_per_paragraph;
        if eligible.len() < k {
            return Err(SynthError::ParagraphTooShort {
                paragraph: p,
                eligible: eligible.len(),
                requested: k,
            });
        }
        let mut entity_at: BTreeMap<(usize, usize), String> = BTreeMap::new();
        for i in 0..k {
            let j = rng.random_range(i..eligible.len());
            eligible.swap(i, j);
            let idx = chooser.as_ref().expect("validated").sample(&mut rng);
            let label = labels[idx].0;
            entity_at.insert(eligible[i], label.clone());
            sentences[eligible[i].0][eligible[i].1] = gen_entity(label, &mut rng)?;
        }

        let mut text = String::new();
        let mut cp = 0;
        let mut spans = Vec::with_capacity(k);
        for (s, words) in sentences.iter().enumerate() {
            for (w, word) in words.iter().enumerate() {
                if s > 0 || w > 0 {
                    text.push(' ');
                    cp += 1;
                }
                let len = word.chars().count();
                match entity_at.get(&(s, w)) {
                    Some(label) => {
                        spans.push(EntitySpan {
                            label: label.clone(),
                            start: cp,
                            end: cp + len,
                            surface: word.clone(),
                            score: 1.0,
                            source: "synth".into(),
                        });
                        text.push_str(word);
                    }
                    None if w == 0 => text.push_str(&capitalize(word)),
                    None => text.push_str(word),
                }
                cp += len;
            }
            text.push('.');
            cp += 1;
        }
        let doc = Document::new(format!("synth-{}-{p:05}", spec.seed), text);
        out.push(AnnotatedDocument::new(doc, spans).expect("generated spans are valid"));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{char_slice, first_overlap};

    fn mix(items: &[(&str, f64)]) -> BTreeMap<String, f64> {
        items.iter().map(|(l, w)| (l.to_string(), *w)).collect()
    }

    #[test]
    fn same_seed_same_corpus() {
        let spec = SynthSpec {
            paragraphs: 50,
            ..SynthSpec::default()
        };
        assert_eq!(gen_corpus(&spec).unwrap(), gen_corpus(&spec).unwrap());
        let other = SynthSpec {
            seed: 1,
            ..spec.clone()
        };
        assert_ne!(gen_corpus(&spec).unwrap(), gen_corpus(&other).unwrap());
    }

    #[test]
    fn spans_slice_back_and_do_not_overlap() {
        let corpus = gen_corpus(&SynthSpec {
            paragraphs: 200,
            ..SynthSpec::default()
        })
        .unwrap();
        for adoc in &corpus {
            assert_eq!(adoc.spans.len(), 3);
            assert!(first_overlap(&adoc.spans).is_none());
            for s in &adoc.spans {
                assert_eq!(char_slice(adoc.text(), s.start, s.end), Some(s.surface.as_str()));
            }
        }
        assert_eq!(corpus[7].id(), "synth-12345-00007");
    }

    #[test]
    fn single_label_mix() {
        let spec = SynthSpec {
            entity_mix: mix(&[("NAME", 1.0), ("IBAN", 0.0)]),
            ..SynthSpec::default()
        };
        let corpus = gen_corpus(&spec).unwrap();
        assert!(corpus.iter().flat_map(|d| &d.spans).all(|s| s.label == "NAME"));
    }

    #[test]
    fn too_short_paragraph_is_named() {
        let spec = SynthSpec {
            sentences_per_paragraph: 1,
            min_words: 2,
            max_words: 2,
            entities_per_paragraph: 2,
            ..SynthSpec::default()
        };
        match gen_corpus(&spec) {
            Err(SynthError::ParagraphTooShort {
                paragraph: 0,
                eligible: 1,
                requested: 2,
            }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn invalid_specs() {
        let bad = |spec: SynthSpec| gen_corpus(&spec).is_err();
        assert!(bad(SynthSpec {
            entity_mix: mix(&[("NAME", -1.0)]),
            ..SynthSpec::default()
        }));
        assert!(bad(SynthSpec {
            entity_mix: mix(&[("NAME", 0.0)]),
            ..SynthSpec::default()
        }));
        assert!(bad(SynthSpec {
            entity_mix: mix(&[("PERSON", 1.0)]),
            ..SynthSpec::default()
        }));
        assert!(bad(SynthSpec {
            min_words: 0,
            ..SynthSpec::default()
        }));
        let none = SynthSpec {
            entities_per_paragraph: 0,
            entity_mix: BTreeMap::new(),
            ..SynthSpec::default()
        };
        assert!(gen_corpus(&none).unwrap().iter().all(|d| d.spans.is_empty()));
    }

    #[test]
    fn label_histogram_tracks_mix() {
        let weights = [("EMAIL", 1.0), ("IBAN", 2.0), ("NAME", 1.0)];
        let spec = SynthSpec {
            paragraphs: 2500,
            entities_per_paragraph: 4,
            entity_mix: mix(&weights),
            ..SynthSpec::default()
        };
        let mut hist: BTreeMap<String, usize> = BTreeMap::new();
        for s in gen_corpus(&spec).unwrap().iter().flat_map(|d| &d.spans) {
            *hist.entry(s.label.clone()).or_default() += 1;
        }
        let total: usize = hist.values().sum();
        assert_eq!(total, 10_000);
        for (label, w) in weights {
            let expected = w / 4.0;
            let observed = hist[label] as f64 / total as f64;
            assert!(
                (observed - expected).abs() / expected < 0.05,
                "{label}: {observed} vs {expected}"
            );
        }
    }
}
