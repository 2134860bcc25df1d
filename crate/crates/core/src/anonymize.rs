//! Span replacement strategies. The main one substitutes each entity with a
//! `<LABEL_hexdigits>` placeholder derived from a salted SHA-256 of its class
//! and surface form, so repeated mentions always get the same placeholder.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::RwLock;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::corpus::{char_len, first_overlap, AnnotatedDocument, CharIndex, EntitySpan};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AnonymizeError {
    #[error("invalid anonymizer config: {0}")]
    InvalidConfig(String),
    #[error("cannot build a placeholder for an empty {label} surface")]
    EmptySurface { label: String },
    #[error("document {doc_id:?}: spans [{}, {}) and [{}, {}) overlap; merge them first", .first.0, .first.1, .second.0, .second.1)]
    OverlappingSpans {
        doc_id: String,
        first: (usize, usize),
        second: (usize, usize),
    },
}

pub type Result<T, E = AnonymizeError> = std::result::Result<T, E>;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    #[default]
    Substitute,
    Redact,
    Mask,
}

fn default_hash_len() -> usize {
    8
}

fn default_mask_char() -> char {
    '*'
}

#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnonymizerConfig {
    #[serde(default)]
    pub strategy: Strategy,
    #[serde(default)]
    pub salt: String,
    #[serde(default = "default_hash_len")]
    pub hash_len: usize,
    #[serde(default = "default_mask_char")]
    pub mask_char: char,
    /// Salt every occurrence with its position, emulating a tool that hashes
    /// each mention independently. Only meaningful for metric validation.
    #[serde(default)]
    pub simulate_inline: bool,
}

impl Default for AnonymizerConfig {
    fn default() -> Self {
        Self {
            strategy: Strategy::Substitute,
            salt: String::new(),
            hash_len: default_hash_len(),
            mask_char: default_mask_char(),
            simulate_inline: false,
        }
    }
}

// The salt is secret; keep it out of logs.
impl fmt::Debug for AnonymizerConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AnonymizerConfig")
            .field("strategy", &self.strategy)
            .field("salt", &if self.salt.is_empty() { "" } else { "<redacted>" })
            .field("hash_len", &self.hash_len)
            .field("mask_char", &self.mask_char)
            .field("simulate_inline", &self.simulate_inline)
            .finish()
    }
}

impl AnonymizerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(4..=64).contains(&self.hash_len) {
            return Err(AnonymizeError::InvalidConfig(format!(
                "hash_len {} outside [4, 64]",
                self.hash_len
            )));
        }
        Ok(())
    }
}

fn digest_prefix(salt: &[u8], label: &str, surface: &str, hash_len: usize) -> String {
    let mut hasher = Sha256::new();
    hasher.update(salt);
    hasher.update([0u8]);
    hasher.update(label.as_bytes());
    hasher.update([0u8]);
    hasher.update(surface.as_bytes());
    let mut hex = hex::encode(hasher.finalize());
    hex.truncate(hash_len);
    hex
}

/// `<LABEL_h>` with `h` the first `hash_len` hex digits of
/// `SHA-256(salt ‖ 0x00 ‖ label ‖ 0x00 ‖ surface)`.
pub fn placeholder(label: &str, surface: &str, cfg: &AnonymizerConfig) -> Result<String> {
    placeholder_salted(label, surface, cfg.salt.as_bytes(), cfg.hash_len)
}

fn placeholder_salted(label: &str, surface: &str, salt: &[u8], hash_len: usize) -> Result<String> {
    if surface.is_empty() {
        return Err(AnonymizeError::EmptySurface {
            label: label.to_owned(),
        });
    }
    if !(4..=64).contains(&hash_len) {
        return Err(AnonymizeError::InvalidConfig(format!(
            "hash_len {hash_len} outside [4, 64]"
        )));
    }
    Ok(format!("<{label}_{}>", digest_prefix(salt, label, surface, hash_len)))
}

fn inline_salt(base: &str, doc_id: &str, start: usize) -> Vec<u8> {
    let mut salt = base.as_bytes().to_vec();
    salt.push(1);
    salt.extend_from_slice(doc_id.as_bytes());
    salt.push(0);
    salt.extend_from_slice(start.to_string().as_bytes());
    salt
}

/// Parse `<LABEL_hex>` back into its parts.
pub fn parse_placeholder(s: &str) -> Option<(&str, &str)> {
    let inner = s.strip_prefix('<')?.strip_suffix('>')?;
    let (label, hex) = inner.rsplit_once('_')?;
    let ok = !label.is_empty() && !hex.is_empty() && hex.bytes().all(|b| b.is_ascii_hexdigit());
    ok.then_some((label, hex))
}

/// An entity token: class plus exact surface form.
pub type TokenKey = (String, String);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Replacement {
    #[serde(flatten)]
    pub original: EntitySpan,
    pub placeholder: String,
    pub new_start: usize,
    pub new_end: usize,
}

impl Replacement {
    pub fn token(&self) -> TokenKey {
        (self.original.label.clone(), self.original.surface.clone())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnonymizationResult {
    pub text: String,
    pub replacements: Vec<Replacement>,
    /// Token to placeholder, filled by the substitute strategy only.
    pub mapping: BTreeMap<TokenKey, String>,
}

/// Rewrite a document, replacing each span according to `cfg.strategy`.
pub fn anonymize(adoc: &AnnotatedDocument, cfg: &AnonymizerConfig) -> Result<AnonymizationResult> {
    cfg.validate()?;
    let mut sorted = adoc.spans.clone();
    sorted.sort_by(crate::corpus::span_order);
    if let Some((a, b)) = first_overlap(&sorted) {
        return Err(AnonymizeError::OverlappingSpans {
            doc_id: adoc.doc.id.clone(),
            first: (a.start, a.end),
            second: (b.start, b.end),
        });
    }

    let text = &adoc.doc.text;
    let index = CharIndex::new(text);
    let mut out = String::with_capacity(text.len());
    let mut replacements = Vec::with_capacity(sorted.len());
    let mut mapping = BTreeMap::new();
    let mut cursor = 0usize; // code points consumed from the original
    let mut written = 0usize; // code points written to the output

    for span in sorted {
        let gap = index.slice(text, cursor, span.start).unwrap_or_default();
        out.push_str(gap);
        written += span.start - cursor;

        let replacement = match cfg.strategy {
            Strategy::Substitute => {
                let ph = if cfg.simulate_inline {
                    let salt = inline_salt(&cfg.salt, &adoc.doc.id, span.start);
                    placeholder_salted(&span.label, &span.surface, &salt, cfg.hash_len)?
                } else {
                    placeholder(&span.label, &span.surface, cfg)?
                };
                mapping
                    .entry((span.label.clone(), span.surface.clone()))
                    .or_insert_with(|| ph.clone());
                ph
            }
            Strategy::Redact => String::new(),
            Strategy::Mask => std::iter::repeat_n(cfg.mask_char, span.len()).collect(),
        };
        let new_start = written;
        written += char_len(&replacement);
        out.push_str(&replacement);
        cursor = span.end;
        replacements.push(Replacement {
            original: span,
            placeholder: replacement,
            new_start,
            new_end: written,
        });
    }
    out.push_str(index.slice(text, cursor, index.char_len()).unwrap_or_default());

    Ok(AnonymizationResult {
        text: out,
        replacements,
        mapping,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MappingEntry {
    pub label: String,
    pub surface: String,
}

/// Corpus-wide record of which token produced which placeholder.
#[derive(Debug, Clone, Default)]
pub struct MappingStore {
    occurrences: Vec<(TokenKey, String)>,
}

impl MappingStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, result: &AnonymizationResult) {
        self.occurrences
            .extend(result.replacements.iter().map(|r| (r.token(), r.placeholder.clone())));
    }

    /// Every (token, placeholder) occurrence in recording order.
    pub fn occurrences(&self) -> &[(TokenKey, String)] {
        &self.occurrences
    }

    /// `{"<LABEL_h>": {"label", "surface"}}`. When several tokens share a
    /// placeholder, the first one recorded is exported.
    pub fn export(&self) -> BTreeMap<String, MappingEntry> {
        let mut out = BTreeMap::new();
        for ((label, surface), ph) in &self.occurrences {
            out.entry(ph.clone()).or_insert_with(|| MappingEntry {
                label: label.clone(),
                surface: surface.clone(),
            });
        }
        out
    }
}

/// A [`MappingStore`] shared between workers: one writer at a time, many
/// concurrent readers.
#[derive(Debug, Default)]
pub struct SharedMappingStore {
    inner: RwLock<MappingStore>,
}

impl SharedMappingStore {
    pub fn record(&self, result: &AnonymizationResult) {
        self.inner.write().expect("mapping lock poisoned").record(result);
    }

    pub fn read<R>(&self, f: impl FnOnce(&MappingStore) -> R) -> R {
        f(&self.inner.read().expect("mapping lock poisoned"))
    }

    pub fn into_inner(self) -> MappingStore {
        self.inner.into_inner().expect("mapping lock poisoned")
    }
}
