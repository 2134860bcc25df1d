use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{CorpusError, EntitySpan, Result};

/// Default closed set of canonical entity labels.
pub const CANONICAL_LABELS: [&str; 7] = [
    "ADDRESS",
    "CREDITCARDNUMBER",
    "EMAIL",
    "IDCARDNUM",
    "NAME",
    "PASSPORT",
    "PHONE",
];

/// Rewrites dataset- or model-specific labels onto a closed canonical set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "LabelMapRepr", into = "LabelMapRepr")]
pub struct LabelMap {
    table: BTreeMap<String, String>,
    canonical: BTreeSet<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LabelMapRepr {
    #[serde(default)]
    table: BTreeMap<String, String>,
    #[serde(default)]
    canonical: Option<BTreeSet<String>>,
}

impl TryFrom<LabelMapRepr> for LabelMap {
    type Error = CorpusError;

    fn try_from(repr: LabelMapRepr) -> Result<Self> {
        match repr.canonical {
            Some(set) => LabelMap::with_canonical(repr.table, set),
            None => LabelMap::new(repr.table),
        }
    }
}

impl From<LabelMap> for LabelMapRepr {
    fn from(map: LabelMap) -> Self {
        Self {
            table: map.table,
            canonical: Some(map.canonical),
        }
    }
}

fn default_canonical() -> BTreeSet<String> {
    CANONICAL_LABELS.iter().map(|s| s.to_string()).collect()
}

impl LabelMap {
    /// Map onto the default canonical set. Canonical labels map to themselves
    /// unless the table says otherwise.
    pub fn new(table: BTreeMap<String, String>) -> Result<Self> {
        Self::with_canonical(table, default_canonical())
    }

    pub fn with_canonical(mut table: BTreeMap<String, String>, canonical: BTreeSet<String>) -> Result<Self> {
        if let Some(bad) = table.values().find(|v| !canonical.contains(*v)) {
            return Err(CorpusError::NonCanonicalTarget(bad.clone()));
        }
        for label in &canonical {
            table.entry(label.clone()).or_insert_with(|| label.clone());
        }
        Ok(Self { table, canonical })
    }

    pub fn identity(canonical: impl IntoIterator<Item = impl Into<String>>) -> Self {
        let canonical: BTreeSet<String> = canonical.into_iter().map(Into::into).collect();
        Self::with_canonical(BTreeMap::new(), canonical).expect("identity map is canonical")
    }

    pub fn get(&self, source: &str) -> Option<&str> {
        self.table.get(source).map(String::as_str)
    }

    pub fn canonical(&self) -> &BTreeSet<String> {
        &self.canonical
    }
}

impl Default for LabelMap {
    fn default() -> Self {
        Self::identity(CANONICAL_LABELS)
    }
}

/// Rewrite span labels through `map`; every unmapped label is reported.
pub fn normalize_labels(spans: &[EntitySpan], map: &LabelMap) -> Result<Vec<EntitySpan>> {
    let mut unmapped = BTreeSet::new();
    let out: Vec<EntitySpan> = spans
        .iter()
        .filter_map(|span| match map.get(&span.label) {
            Some(label) => Some(EntitySpan {
                label: label.to_owned(),
                ..span.clone()
            }),
            None => {
                unmapped.insert(span.label.clone());
                None
            }
        })
        .collect();
    if !unmapped.is_empty() {
        return Err(CorpusError::UnmappedLabels(unmapped.into_iter().collect()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn span(label: &str) -> EntitySpan {
        EntitySpan::from_text("John", label, 0, 4, 1.0, "m").unwrap()
    }

    #[test]
    fn maps_source_labels() {
        let map = LabelMap::new([("PER".to_string(), "NAME".to_string())].into()).unwrap();
        let out = normalize_labels(&[span("PER")], &map).unwrap();
        assert_eq!(out[0].label, "NAME");
        assert_eq!(out[0].surface, "John");
    }

    #[test]
    fn identity_map_leaves_spans_alone() {
        let spans = vec![span("NAME"), span("EMAIL")];
        assert_eq!(normalize_labels(&spans, &LabelMap::default()).unwrap(), spans);
    }

    #[test]
    fn unmapped_labels_are_all_listed() {
        let err = normalize_labels(&[span("FOO"), span("BAR"), span("NAME")], &LabelMap::default()).unwrap_err();
        match err {
            CorpusError::UnmappedLabels(labels) => assert_eq!(labels, ["BAR", "FOO"]),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn targets_must_be_canonical() {
        let err = LabelMap::new([("PER".to_string(), "PERSON".to_string())].into());
        assert!(matches!(err, Err(CorpusError::NonCanonicalTarget(_))));
    }

    #[test]
    fn deserializes_from_json() {
        let map: LabelMap = serde_json::from_str(r#"{"table":{"PER":"NAME"}}"#).unwrap();
        assert_eq!(map.get("PER"), Some("NAME"));
        assert_eq!(map.get("EMAIL"), Some("EMAIL"));
        assert!(serde_json::from_str::<LabelMap>(r#"{"table":{"PER":"NOPE"}}"#).is_err());
    }
}
